#include "plidar/interpolation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "plidar/errors.hpp"
#include "plidar/spatial_index.hpp"

namespace plidar {

namespace {

bool finite(const Point3& p) {
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

void require_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw InvalidArgumentError("alpha must lie in [0, 1]");
    }
}

class StageClock {
public:
    explicit StageClock(StageTimes& times) : times_(times), last_(std::chrono::steady_clock::now()) {}

    void lap(const std::string& stage) {
        const auto now = std::chrono::steady_clock::now();
        times_[stage] += std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
    }

private:
    StageTimes& times_;
    std::chrono::steady_clock::time_point last_;
};

}  // namespace

void SceneFlow::validate_for(const PointCloud& source) const {
    if (vectors.size() != source.size()) {
        throw SizeMismatchError("scene flow has " + std::to_string(vectors.size()) + " vectors for a cloud of " +
                                std::to_string(source.size()) + " points");
    }
    for (const auto& v : vectors) {
        if (!finite(v)) {
            throw InvalidArgumentError("scene flow components must be finite");
        }
    }
}

SceneFlow SceneFlow::negated() const {
    SceneFlow out;
    out.vectors.reserve(vectors.size());
    for (const auto& v : vectors) {
        out.vectors.push_back(-1.0 * v);
    }
    return out;
}

OpticalFlow::OpticalFlow(int width, int height) : width_(width), height_(height) {
    if (width < 0 || height < 0) {
        throw DimensionError("negative optical flow size");
    }
    vectors_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), PixelFlow{});
}

OpticalFlow::OpticalFlow(int width, int height, std::vector<PixelFlow> vectors)
    : width_(width), height_(height), vectors_(std::move(vectors)) {
    if (width < 0 || height < 0 ||
        vectors_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw DimensionError("optical flow buffer does not match its size");
    }
    for (const auto& f : vectors_) {
        if (!std::isfinite(f.du) || !std::isfinite(f.dv)) {
            throw InvalidArgumentError("optical flow components must be finite");
        }
    }
}

void OpticalFlow::set(int u, int v, PixelFlow f) {
    if (!std::isfinite(f.du) || !std::isfinite(f.dv)) {
        throw InvalidArgumentError("optical flow components must be finite");
    }
    vectors_[index(u, v)] = f;
}

SceneFlow ZeroFlowProvider::flow(FlowDirection, const PointCloud& source, const PointCloud&) const {
    SceneFlow sf;
    sf.vectors.assign(source.size(), Point3{});
    return sf;
}

SceneFlow FixedFlowProvider::flow(FlowDirection direction, const PointCloud& source, const PointCloud&) const {
    const SceneFlow& sf = direction == FlowDirection::Forward ? forward_ : backward_;
    sf.validate_for(source);
    return sf;
}

SceneFlow RigidMotionFlowProvider::flow(FlowDirection direction, const PointCloud& source, const PointCloud&) const {
    const RigidMotion m = direction == FlowDirection::Forward ? motion_ : motion_.inverse();
    SceneFlow sf;
    sf.vectors.reserve(source.size());
    for (const auto& p : source.points) {
        sf.vectors.push_back(m.apply(p) - p);
    }
    return sf;
}

PointCloud warp(const PointCloud& pc, const SceneFlow& sf, double alpha) {
    require_alpha(alpha);
    sf.validate_for(pc);
    PointCloud out = pc;
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        out.points[i] = pc.points[i] + alpha * sf.vectors[i];
    }
    return out;
}

SynthesisMode parse_synthesis_mode(const std::string& name) {
    if (name == "forward") return SynthesisMode::Forward;
    if (name == "backward") return SynthesisMode::Backward;
    if (name == "union") return SynthesisMode::Union;
    throw InvalidArgumentError("unknown synthesis mode '" + name + "' (expected forward, backward or union)");
}

std::string to_string(SynthesisMode mode) {
    switch (mode) {
        case SynthesisMode::Forward:
            return "forward";
        case SynthesisMode::Backward:
            return "backward";
        case SynthesisMode::Union:
            return "union";
    }
    return "union";
}

PointCloud synthesize_midpoint(const PointCloud& pc_prev, const PointCloud& pc_next, const SceneFlow& sf_fwd,
                               const SceneFlow& sf_bwd, SynthesisMode mode, double alpha) {
    require_alpha(alpha);
    switch (mode) {
        case SynthesisMode::Forward:
            return warp(pc_prev, sf_fwd, alpha);
        case SynthesisMode::Backward:
            return warp(pc_next, sf_bwd, 1.0 - alpha);
        case SynthesisMode::Union:
            return concatenate(warp(pc_prev, sf_fwd, alpha), warp(pc_next, sf_bwd, 1.0 - alpha));
    }
    throw InvalidArgumentError("unknown synthesis mode");
}

DepthMap warp_depth_by_optical_flow(const DepthMap& depth, const OpticalFlow& of, double alpha) {
    require_alpha(alpha);
    if (depth.width() != of.width() || depth.height() != of.height()) {
        throw DimensionError("optical flow and depth map differ in size");
    }
    DepthMap out(depth.width(), depth.height());
    for (int v = 0; v < depth.height(); ++v) {
        for (int u = 0; u < depth.width(); ++u) {
            const double z = depth.at(u, v);
            if (z <= 0.0) {
                continue;
            }
            const PixelFlow& f = of.at(u, v);
            const double uf = std::floor(u + alpha * f.du + 0.5);
            const double vf = std::floor(v + alpha * f.dv + 0.5);
            if (!(uf >= 0.0 && uf < depth.width() && vf >= 0.0 && vf < depth.height())) {
                continue;
            }
            const int tu = static_cast<int>(uf);
            const int tv = static_cast<int>(vf);
            const double cur = out.at(tu, tv);
            if (cur == 0.0 || z < cur) {
                out.set(tu, tv, z);
            }
        }
    }
    return out;
}

DepthMap merge_nearest(const DepthMap& a, const DepthMap& b) {
    if (!a.same_shape(b)) {
        throw DimensionError("merge_nearest: depth maps differ in size");
    }
    std::vector<double> out(a.pixel_count());
    const auto da = a.depths();
    const auto db = b.depths();
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (da[i] > 0.0 && db[i] > 0.0) {
            out[i] = std::min(da[i], db[i]);
        } else {
            out[i] = da[i] > 0.0 ? da[i] : db[i];
        }
    }
    return DepthMap(a.width(), a.height(), std::move(out));
}

DepthMap optical_flow_midpoint(const DepthMap& d_prev, const DepthMap& d_next, const OpticalFlow& of_fwd,
                               const OpticalFlow& of_bwd, SynthesisMode mode, double alpha) {
    require_alpha(alpha);
    switch (mode) {
        case SynthesisMode::Forward:
            return warp_depth_by_optical_flow(d_prev, of_fwd, alpha);
        case SynthesisMode::Backward:
            return warp_depth_by_optical_flow(d_next, of_bwd, 1.0 - alpha);
        case SynthesisMode::Union:
            return merge_nearest(warp_depth_by_optical_flow(d_prev, of_fwd, alpha),
                                 warp_depth_by_optical_flow(d_next, of_bwd, 1.0 - alpha));
    }
    throw InvalidArgumentError("unknown synthesis mode");
}

DepthMap average_baseline(const DepthMap& d_prev, const DepthMap& d_next) {
    if (!d_prev.same_shape(d_next)) {
        throw DimensionError("average_baseline: depth maps differ in size");
    }
    std::vector<double> out(d_prev.pixel_count());
    const auto a = d_prev.depths();
    const auto b = d_next.depths();
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (a[i] > 0.0 && b[i] > 0.0) {
            out[i] = 0.5 * (a[i] + b[i]);
        } else {
            out[i] = a[i] > 0.0 ? a[i] : b[i];
        }
    }
    return DepthMap(d_prev.width(), d_prev.height(), std::move(out));
}

void DensifyParams::validate() const {
    if (k < 1) {
        throw InvalidArgumentError("densify k must be >= 1");
    }
    if (!(radius >= 1.0) || !std::isfinite(radius)) {
        throw InvalidArgumentError("densify radius must be finite and >= 1 pixel");
    }
}

DepthMap densify(const DepthMap& sparse, const DensifyParams& params) {
    params.validate();
    std::vector<Point3> seeds;
    std::vector<double> seed_depth;
    seeds.reserve(sparse.valid_count());
    seed_depth.reserve(seeds.capacity());
    for (int v = 0; v < sparse.height(); ++v) {
        for (int u = 0; u < sparse.width(); ++u) {
            if (sparse.valid(u, v)) {
                seeds.push_back({static_cast<double>(u), static_cast<double>(v), 0.0});
                seed_depth.push_back(sparse.at(u, v));
            }
        }
    }
    if (seeds.empty() || seeds.size() == sparse.pixel_count()) {
        return sparse;
    }
    const KdTree tree(seeds);
    const double max_sq = params.radius * params.radius;
    std::vector<double> out(sparse.depths().begin(), sparse.depths().end());
    for (int v = 0; v < sparse.height(); ++v) {
        for (int u = 0; u < sparse.width(); ++u) {
            if (sparse.valid(u, v)) {
                continue;
            }
            const auto nbrs = tree.nearest_k({static_cast<double>(u), static_cast<double>(v), 0.0}, params.k, max_sq);
            if (nbrs.empty()) {
                continue;
            }
            double wsum = 0.0;
            double zsum = 0.0;
            double lo = seed_depth[nbrs.front().index];
            double hi = lo;
            for (const auto& n : nbrs) {
                const double w = 1.0 / std::sqrt(n.squared_distance);
                const double z = seed_depth[n.index];
                wsum += w;
                zsum += w * z;
                lo = std::min(lo, z);
                hi = std::max(hi, z);
            }
            // Rounding in the weighted mean can leave the contributors' range by an ulp.
            out[static_cast<std::size_t>(v) * static_cast<std::size_t>(sparse.width()) + static_cast<std::size_t>(u)] =
                std::clamp(zsum / wsum, lo, hi);
        }
    }
    return DepthMap(sparse.width(), sparse.height(), std::move(out));
}

PointCloud subsample(const PointCloud& pc, std::size_t max_points, std::uint64_t seed) {
    if (max_points == 0 || pc.size() <= max_points) {
        return pc;
    }
    std::vector<std::size_t> idx(pc.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < max_points; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(max_points);
    std::sort(idx.begin(), idx.end());

    PointCloud out;
    out.attribute_dim = pc.attribute_dim;
    out.points.reserve(max_points);
    for (std::size_t i : idx) {
        out.points.push_back(pc.points[i]);
        if (pc.has_attributes()) {
            const auto a = pc.attribute(i);
            out.attributes.insert(out.attributes.end(), a.begin(), a.end());
        }
        if (pc.has_pixel_origin()) {
            out.pixel_origin.push_back(pc.pixel_origin[i]);
        }
    }
    return out;
}

void InterpolationOptions::validate() const {
    require_alpha(alpha);
    densify.validate();
}

FrameResult interpolate_frame(const DepthMap& d_prev, const DepthMap& d_next, const FlowProvider& provider,
                              const CameraIntrinsics& k, const InterpolationOptions& options) {
    options.validate();
    if (!d_prev.same_shape(d_next)) {
        throw DimensionError("interpolate_frame: input depth maps differ in size");
    }
    FrameResult result;
    StageClock clock(result.stage_ms);

    const PointCloud pc_prev = subsample(back_project(d_prev, k), options.sample_points, options.seed);
    const PointCloud pc_next = subsample(back_project(d_next, k), options.sample_points, options.seed + 1);
    clock.lap("back_project");

    const bool need_fwd = options.mode != SynthesisMode::Backward;
    const bool need_bwd = options.mode != SynthesisMode::Forward;
    SceneFlow sf_fwd;
    SceneFlow sf_bwd;
    if (need_fwd) {
        sf_fwd = provider.flow(FlowDirection::Forward, pc_prev, pc_next);
        sf_fwd.validate_for(pc_prev);
    }
    if (need_bwd) {
        sf_bwd = provider.flow(FlowDirection::Backward, pc_next, pc_prev);
        sf_bwd.validate_for(pc_next);
    }
    clock.lap("flow");

    const PointCloud mid = synthesize_midpoint(pc_prev, pc_next, sf_fwd, sf_bwd, options.mode, options.alpha);
    clock.lap("warp");

    result.sparse = project(mid, k, d_prev.width(), d_prev.height());
    clock.lap("project");

    result.dense = densify(result.sparse, options.densify);
    clock.lap("densify");

    result.cloud = back_project(result.dense, k);
    clock.lap("back_project_dense");
    return result;
}

}  // namespace plidar

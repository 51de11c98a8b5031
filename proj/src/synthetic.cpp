#include "plidar/synthetic.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "plidar/errors.hpp"
#include "plidar/io.hpp"

namespace plidar {

namespace {

constexpr double kEps = 1e-9;
constexpr double kCameraHeight = 1.65;

struct Plane {
    Point3 normal;
    double offset;  // normal . p == offset
};

struct Box {
    Point3 lo;
    Point3 hi;
};

struct Scene {
    std::vector<Plane> planes;
    std::vector<Box> boxes;
};

double dot(const Point3& a, const Point3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    // 53 random bits mapped to [0, 1), independent of the standard library's distributions.
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

Scene make_scene(std::mt19937_64& rng, std::size_t n_boxes) {
    Scene s;
    s.planes.push_back({{0, 1, 0}, kCameraHeight});                // ground
    s.planes.push_back({{0, 0, 1}, uniform(rng, 45.0, 70.0)});     // far wall
    s.planes.push_back({{1, 0, 0}, uniform(rng, 8.0, 14.0)});      // right facade
    s.planes.push_back({{1, 0, 0}, -uniform(rng, 8.0, 14.0)});     // left facade
    s.planes.push_back({{0, 1, 0}, -uniform(rng, 6.0, 10.0)});     // overhead
    for (std::size_t i = 0; i < n_boxes; ++i) {
        const double cx = uniform(rng, -6.0, 6.0);
        const double cz = uniform(rng, 8.0, 35.0);
        const double hx = uniform(rng, 0.8, 2.5);
        const double hz = uniform(rng, 0.8, 3.0);
        const double h = uniform(rng, 1.0, 3.5);
        s.boxes.push_back({{cx - hx, kCameraHeight - h, cz - hz}, {cx + hx, kCameraHeight, cz + hz}});
    }
    return s;
}

double hit_plane(const Plane& pl, const Point3& o, const Point3& d) {
    const double denom = dot(pl.normal, d);
    if (std::abs(denom) < 1e-12) {
        return std::numeric_limits<double>::infinity();
    }
    const double s = (pl.offset - dot(pl.normal, o)) / denom;
    return s > kEps ? s : std::numeric_limits<double>::infinity();
}

double hit_box(const Box& b, const Point3& o, const Point3& d) {
    double t_near = -std::numeric_limits<double>::infinity();
    double t_far = std::numeric_limits<double>::infinity();
    const double os[3] = {o.x, o.y, o.z};
    const double ds[3] = {d.x, d.y, d.z};
    const double lo[3] = {b.lo.x, b.lo.y, b.lo.z};
    const double hi[3] = {b.hi.x, b.hi.y, b.hi.z};
    for (int a = 0; a < 3; ++a) {
        if (std::abs(ds[a]) < 1e-15) {
            if (os[a] < lo[a] || os[a] > hi[a]) {
                return std::numeric_limits<double>::infinity();
            }
            continue;
        }
        double t0 = (lo[a] - os[a]) / ds[a];
        double t1 = (hi[a] - os[a]) / ds[a];
        if (t0 > t1) std::swap(t0, t1);
        t_near = std::max(t_near, t0);
        t_far = std::min(t_far, t1);
    }
    if (t_near > t_far) {
        return std::numeric_limits<double>::infinity();
    }
    if (t_near > kEps) return t_near;
    if (t_far > kEps) return t_far;
    return std::numeric_limits<double>::infinity();
}

/// Dense depth of the scene after it has moved by `pose`.
DepthMap render(const Scene& scene, const RigidMotion& pose, const CameraIntrinsics& k, int width, int height) {
    const RigidMotion to_object = pose.inverse();
    const Point3 origin = to_object.apply(Point3{});
    std::vector<double> depths(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0);
    for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
            // Camera ray with unit z, so the ray parameter is the depth.
            const Point3 ray{(u - k.cu()) / k.fu(), (v - k.cv()) / k.fv(), 1.0};
            const Point3 dir = to_object.rotate(ray);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& pl : scene.planes) best = std::min(best, hit_plane(pl, origin, dir));
            for (const auto& b : scene.boxes) best = std::min(best, hit_box(b, origin, dir));
            if (std::isfinite(best) && best <= io::kMaxDepth) {
                depths[static_cast<std::size_t>(v) * static_cast<std::size_t>(width) + static_cast<std::size_t>(u)] =
                    best;
            }
        }
    }
    return DepthMap(width, height, std::move(depths));
}

DepthMap apply_mask(const DepthMap& dense, const std::vector<char>& mask) {
    std::vector<double> out(dense.pixel_count(), 0.0);
    const auto d = dense.depths();
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (mask[i]) out[i] = d[i];
    }
    return DepthMap(dense.width(), dense.height(), std::move(out));
}

DepthMap quantized(const DepthMap& d) {
    std::vector<double> out(d.depths().begin(), d.depths().end());
    for (auto& z : out) {
        z = std::floor(z * io::kDepthScale + 0.5) / io::kDepthScale;
    }
    return DepthMap(d.width(), d.height(), std::move(out));
}

SceneFlow flow_from_motion(const PointCloud& pc, const RigidMotion& m) {
    SceneFlow sf;
    sf.vectors.reserve(pc.size());
    for (const auto& p : pc.points) {
        sf.vectors.push_back(m.apply(p) - p);
    }
    return sf;
}

PointCloud moved(const PointCloud& pc, const RigidMotion& m) {
    PointCloud out = pc;
    for (auto& p : out.points) {
        p = m.apply(p);
    }
    return out;
}

}  // namespace

CameraIntrinsics default_synthetic_intrinsics() {
    // KITTI 2011_09_26 P2 with the 1242x375 -> 1216x256 bottom crop applied.
    return CameraIntrinsics(721.5377, 721.5377, 609.5593, 172.854).cropped(13, 119);
}

void SyntheticSpec::validate() const {
    const double angle = std::sqrt(dot(rotation, rotation));
    if (!(angle < std::numbers::pi / 4)) {
        throw InvalidArgumentError("rotation angle must be below pi/4");
    }
    if (!(std::sqrt(dot(translation, translation)) <= 5.0)) {
        throw InvalidArgumentError("translation must not exceed 5 m");
    }
    if (!(sparsity > 0.0 && sparsity <= 1.0)) {
        throw InvalidArgumentError("sparsity must lie in (0, 1]");
    }
    if (width <= 0 || height <= 0) {
        throw InvalidArgumentError("image size must be positive");
    }
}

OpticalFlow optical_flow_from_motion(const DepthMap& depth, const CameraIntrinsics& k, const RigidMotion& motion) {
    OpticalFlow of(depth.width(), depth.height());
    if (motion.is_identity()) {
        // Projecting and re-projecting would leave rounding noise.
        return of;
    }
    for (int v = 0; v < depth.height(); ++v) {
        for (int u = 0; u < depth.width(); ++u) {
            const double z = depth.at(u, v);
            if (z <= 0.0) {
                continue;
            }
            const Point3 p{(u - k.cu()) * z / k.fu(), (v - k.cv()) * z / k.fv(), z};
            const Point3 q = motion.apply(p);
            if (q.z <= 0.0) {
                continue;
            }
            of.set(u, v, {k.fu() * q.x / q.z + k.cu() - u, k.fv() * q.y / q.z + k.cv() - v});
        }
    }
    return of;
}

PointCloud render_through_pipeline(const PointCloud& mid, const CameraIntrinsics& k, int width, int height,
                                   const DensifyParams& densify_params) {
    return back_project(densify(project(mid, k, width, height), densify_params), k);
}

SyntheticScene generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    SyntheticScene s;
    s.spec = spec;
    s.motion = RigidMotion(spec.rotation, spec.translation);
    const RigidMotion half = s.motion.scaled(0.5);
    const CameraIntrinsics& k = spec.intrinsics;

    std::mt19937_64 rng(spec.seed);
    const Scene scene = make_scene(rng, spec.boxes);

    s.dense_prev = render(scene, RigidMotion{}, k, spec.width, spec.height);
    s.dense_mid = render(scene, half, k, spec.width, spec.height);
    s.dense_next = render(scene, s.motion, k, spec.width, spec.height);
    if (spec.quantize_depth) {
        s.dense_prev = quantized(s.dense_prev);
        s.dense_mid = quantized(s.dense_mid);
        s.dense_next = quantized(s.dense_next);
    }

    std::vector<char> mask(s.dense_prev.pixel_count());
    for (auto& m : mask) {
        m = uniform(rng, 0.0, 1.0) < spec.sparsity ? 1 : 0;
    }
    s.sparse_prev = apply_mask(s.dense_prev, mask);
    s.sparse_mid = apply_mask(s.dense_mid, mask);
    s.sparse_next = apply_mask(s.dense_next, mask);

    s.cloud_prev = back_project(s.dense_prev, k);
    s.cloud_mid = back_project(s.dense_mid, k);
    s.cloud_next = back_project(s.dense_next, k);

    const PointCloud in_prev = back_project(s.sparse_prev, k);
    const PointCloud in_next = back_project(s.sparse_next, k);
    const RigidMotion inverse = s.motion.inverse();
    s.flow_fwd = flow_from_motion(in_prev, s.motion);
    s.flow_bwd = flow_from_motion(in_next, inverse);
    s.optical_fwd = optical_flow_from_motion(s.dense_prev, k, s.motion);
    s.optical_bwd = optical_flow_from_motion(s.dense_next, k, inverse);

    PointCloud next_at_mid = in_next;
    for (auto& p : next_at_mid.points) {
        p = half.apply(inverse.apply(p));
    }
    s.oracle_mid = concatenate(moved(in_prev, half), next_at_mid);
    return s;
}

}  // namespace plidar

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "plidar/geometry.hpp"
#include "plidar/motion.hpp"

namespace plidar {

/// Per-point 3D displacement, index-aligned with a source cloud.
struct SceneFlow {
    std::vector<Point3> vectors;

    std::size_t size() const { return vectors.size(); }
    /// Throws when the count differs from `source` or a component is not finite.
    void validate_for(const PointCloud& source) const;
    SceneFlow negated() const;
};

struct PixelFlow {
    double du = 0.0;
    double dv = 0.0;
    friend bool operator==(const PixelFlow&, const PixelFlow&) = default;
};

/// Per-pixel 2D displacement in pixels, row-major.
class OpticalFlow {
public:
    OpticalFlow() = default;
    OpticalFlow(int width, int height);
    OpticalFlow(int width, int height, std::vector<PixelFlow> vectors);

    int width() const { return width_; }
    int height() const { return height_; }
    const PixelFlow& at(int u, int v) const { return vectors_[index(u, v)]; }
    void set(int u, int v, PixelFlow f);
    const std::vector<PixelFlow>& vectors() const { return vectors_; }

    friend bool operator==(const OpticalFlow&, const OpticalFlow&) = default;

private:
    std::size_t index(int u, int v) const {
        return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(u);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<PixelFlow> vectors_;
};

enum class FlowDirection {
    Forward,   // t-1 -> t+1, aligned to the previous cloud
    Backward,  // t+1 -> t-1, aligned to the next cloud
};

/// Source of scene flow for a pair of clouds. Implementations stand in for
/// a learned estimator: fixed (e.g. file-backed) flows, analytic oracles.
class FlowProvider {
public:
    virtual ~FlowProvider() = default;

    /// Flow aligned to `source`, pointing towards `target`'s frame.
    virtual SceneFlow flow(FlowDirection direction, const PointCloud& source, const PointCloud& target) const = 0;
};

/// Always returns zero motion.
class ZeroFlowProvider final : public FlowProvider {
public:
    SceneFlow flow(FlowDirection direction, const PointCloud& source, const PointCloud& target) const override;
};

/// Returns flows supplied up front, typically loaded from disk.
class FixedFlowProvider final : public FlowProvider {
public:
    FixedFlowProvider(SceneFlow forward, SceneFlow backward)
        : forward_(std::move(forward)), backward_(std::move(backward)) {}

    SceneFlow flow(FlowDirection direction, const PointCloud& source, const PointCloud& target) const override;

private:
    SceneFlow forward_;
    SceneFlow backward_;
};

/// Exact flow for a scene moving rigidly by `motion` between t-1 and t+1.
class RigidMotionFlowProvider final : public FlowProvider {
public:
    explicit RigidMotionFlowProvider(RigidMotion motion) : motion_(std::move(motion)) {}

    SceneFlow flow(FlowDirection direction, const PointCloud& source, const PointCloud& target) const override;

private:
    RigidMotion motion_;
};

/// point_i + alpha * sf_i; attributes, pixel origins and order are kept.
PointCloud warp(const PointCloud& pc, const SceneFlow& sf, double alpha);

enum class SynthesisMode { Forward, Backward, Union };

SynthesisMode parse_synthesis_mode(const std::string& name);
std::string to_string(SynthesisMode mode);

/// Intermediate cloud at fraction `alpha` between t-1 and t+1. Forward warps
/// the previous cloud by alpha of the forward flow, backward warps the next
/// cloud by (1 - alpha) of the backward flow, union concatenates both.
PointCloud synthesize_midpoint(const PointCloud& pc_prev, const PointCloud& pc_next, const SceneFlow& sf_fwd,
                               const SceneFlow& sf_bwd, SynthesisMode mode, double alpha = 0.5);

/// Moves each valid depth to (u + alpha du, v + alpha dv), rounded half up,
/// nearest depth winning collisions. Depth values are not changed.
DepthMap warp_depth_by_optical_flow(const DepthMap& depth, const OpticalFlow& of, double alpha);

/// Per-pixel minimum over the valid inputs.
DepthMap merge_nearest(const DepthMap& a, const DepthMap& b);

/// Optical-flow counterpart of synthesize_midpoint + project.
DepthMap optical_flow_midpoint(const DepthMap& d_prev, const DepthMap& d_next, const OpticalFlow& of_fwd,
                               const OpticalFlow& of_bwd, SynthesisMode mode, double alpha = 0.5);

/// Mean where both inputs are valid, the valid one where only one is, 0 otherwise.
DepthMap average_baseline(const DepthMap& d_prev, const DepthMap& d_next);

struct DensifyParams {
    std::size_t k = 8;
    double radius = 12.0;  // pixels

    void validate() const;
};

/// Fills each invalid pixel with the inverse-distance-weighted mean of up
/// to `k` nearest valid pixels within `radius`. Valid pixels are copied.
/// This is a plain deterministic interpolator, not a learned completion.
DepthMap densify(const DepthMap& sparse, const DensifyParams& params = {});

/// Uniform random subset of at most `max_points` points, original order
/// preserved. max_points == 0 returns the cloud unchanged.
PointCloud subsample(const PointCloud& pc, std::size_t max_points, std::uint64_t seed);

/// Typical input size of learned scene-flow estimators.
inline constexpr std::size_t kDefaultSamplePoints = 17500;

struct InterpolationOptions {
    SynthesisMode mode = SynthesisMode::Union;
    double alpha = 0.5;
    DensifyParams densify;
    /// 0 disables subsampling of the input clouds before flow lookup.
    std::size_t sample_points = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Wall time in milliseconds keyed by stage name.
using StageTimes = std::map<std::string, double>;

struct FrameResult {
    DepthMap sparse;  // projected intermediate cloud
    DepthMap dense;
    PointCloud cloud;  // back-projected dense map
    StageTimes stage_ms;
};

/// back_project both maps -> flows -> synthesize -> project -> densify ->
/// back_project.
FrameResult interpolate_frame(const DepthMap& d_prev, const DepthMap& d_next, const FlowProvider& provider,
                              const CameraIntrinsics& k, const InterpolationOptions& options = {});

}  // namespace plidar

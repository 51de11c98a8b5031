#pragma once

#include <cstdint>

#include "plidar/geometry.hpp"
#include "plidar/interpolation.hpp"
#include "plidar/motion.hpp"

namespace plidar {

/// KITTI-like camera after the 1216x256 bottom crop.
CameraIntrinsics default_synthetic_intrinsics();

struct SyntheticSpec {
    /// Axis-angle rotation (radians) and translation (m) of the scene
    /// between t-1 and t+1, expressed in the t-1 camera frame.
    Point3 rotation{};
    Point3 translation{};
    /// Fraction of pixels carrying a measurement in the sparse maps.
    double sparsity = 0.04;
    int width = 1216;
    int height = 256;
    CameraIntrinsics intrinsics = default_synthetic_intrinsics();
    std::size_t boxes = 4;
    std::uint64_t seed = 0;
    /// Round rendered depths to the 1/256 m grid of 16-bit depth images so
    /// that everything derived from them survives a write/read cycle.
    bool quantize_depth = false;

    /// Throws InvalidArgumentError unless |rotation| < pi/4,
    /// |translation| <= 5 m, 0 < sparsity <= 1 and the image is non-empty.
    void validate() const;
};

/// A street-like scene of planes and boxes seen at t-1, t and t+1.
///
/// The scene moves by `motion` from t-1 to t+1 and by motion.scaled(0.5)
/// from t-1 to t. Dense maps are exact per-pixel ray casts; sparse maps keep
/// the pixels of one seeded random mask (shared by all three frames).
/// `flow_fwd` / `flow_bwd` are exact and index-aligned to
/// back_project(sparse_prev) / back_project(sparse_next). `oracle_mid` holds
/// the true positions at t of both sparse input clouds, in union order.
struct SyntheticScene {
    SyntheticSpec spec;
    RigidMotion motion;

    DepthMap dense_prev;
    DepthMap dense_mid;
    DepthMap dense_next;
    DepthMap sparse_prev;
    DepthMap sparse_mid;
    DepthMap sparse_next;

    PointCloud cloud_prev;  // back_project(dense_*)
    PointCloud cloud_mid;
    PointCloud cloud_next;

    SceneFlow flow_fwd;
    SceneFlow flow_bwd;
    OpticalFlow optical_fwd;
    OpticalFlow optical_bwd;

    PointCloud oracle_mid;
};

SyntheticScene generate_synthetic(const SyntheticSpec& spec);

/// Per-pixel image motion of the valid pixels of `depth` under `motion`.
OpticalFlow optical_flow_from_motion(const DepthMap& depth, const CameraIntrinsics& k, const RigidMotion& motion);

/// Runs an already-positioned intermediate cloud through the same
/// project -> densify -> back_project stages as interpolate_frame.
PointCloud render_through_pipeline(const PointCloud& mid, const CameraIntrinsics& k, int width, int height,
                                   const DensifyParams& densify);

}  // namespace plidar

#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "plidar/geometry.hpp"
#include "plidar/interpolation.hpp"

namespace plidar::io {

/// Depths stored in 16-bit images are meters * 256.
inline constexpr double kDepthScale = 256.0;
/// Larger depths are rejected when reading.
inline constexpr double kMaxDepth = 200.0;

inline constexpr std::string_view kSceneFlowMagic = "PLSF0001";
inline constexpr std::string_view kOpticalFlowMagic = "PLOF0001";

/// 16-bit single-channel PNG, depth = stored / 256, stored 0 = invalid.
DepthMap read_depth_png(const std::filesystem::path& path);
/// Stores round(depth * 256) with halves rounded up; values above 65535 are rejected.
void write_depth_png(const DepthMap& depth, const std::filesystem::path& path);

/// Little-endian float32 records (x, y, z, attribute), 16 bytes each.
PointCloud read_cloud_bin(const std::filesystem::path& path);
/// Writes attribute 0 for clouds without attributes; attribute_dim must be 0 or 1.
void write_cloud_bin(const PointCloud& pc, const std::filesystem::path& path);

/// "PLSF0001", uint64 LE count, then count float32 LE (dx, dy, dz) triples.
SceneFlow read_scene_flow(const std::filesystem::path& path);
void write_scene_flow(const SceneFlow& sf, const std::filesystem::path& path);

/// "PLOF0001", uint32 LE width, uint32 LE height, then width*height
/// float32 LE (du, dv) pairs in row-major order.
OpticalFlow read_optical_flow(const std::filesystem::path& path);
void write_optical_flow(const OpticalFlow& of, const std::filesystem::path& path);

/// ASCII PLY with double x/y/z and one double property per attribute
/// ("scalar" when there is exactly one).
void write_ply(const PointCloud& pc, const std::filesystem::path& path);

/// Text file of "fu <v>", "fv <v>", "cu <v>", "cv <v>" lines in any order;
/// '#' starts a comment.
CameraIntrinsics read_intrinsics(const std::filesystem::path& path);
void write_intrinsics(const CameraIntrinsics& k, const std::filesystem::path& path);

/// Flow provider reading PLSF0001 files on demand. An empty path means the
/// direction is unavailable.
class FileFlowProvider final : public FlowProvider {
public:
    FileFlowProvider(std::filesystem::path forward, std::filesystem::path backward)
        : forward_(std::move(forward)), backward_(std::move(backward)) {}

    SceneFlow flow(FlowDirection direction, const PointCloud& source, const PointCloud& target) const override;

private:
    std::filesystem::path forward_;
    std::filesystem::path backward_;
};

}  // namespace plidar::io

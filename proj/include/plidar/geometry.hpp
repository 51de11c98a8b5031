#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace plidar {

/// Point or displacement in camera coordinates, meters.
struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend constexpr Point3 operator+(const Point3& a, const Point3& b) {
        return {a.x + b.x, a.y + b.y, a.z + b.z};
    }
    friend constexpr Point3 operator-(const Point3& a, const Point3& b) {
        return {a.x - b.x, a.y - b.y, a.z - b.z};
    }
    friend constexpr Point3 operator*(double s, const Point3& p) { return {s * p.x, s * p.y, s * p.z}; }
    friend constexpr bool operator==(const Point3&, const Point3&) = default;
};

/// Squared Euclidean distance, always summed in x, y, z order.
inline double squared_distance(const Point3& a, const Point3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

struct PixelCoord {
    int u = 0;
    int v = 0;
    friend constexpr bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Pinhole parameters in pixels. Focal lengths must be positive and the
/// principal point finite; the constructor enforces both.
class CameraIntrinsics {
public:
    CameraIntrinsics(double fu, double fv, double cu, double cv);

    double fu() const { return fu_; }
    double fv() const { return fv_; }
    double cu() const { return cu_; }
    double cv() const { return cv_; }

    /// Intrinsics of the image obtained by removing `left` columns and
    /// `top` rows from this one.
    CameraIntrinsics cropped(int left, int top) const;

    friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;

private:
    double fu_;
    double fv_;
    double cu_;
    double cv_;
};

/// Row-major grid of metric depths. 0 marks a pixel without a measurement;
/// every stored value is finite and non-negative.
class DepthMap {
public:
    DepthMap() = default;
    DepthMap(int width, int height);
    DepthMap(int width, int height, std::vector<double> depths);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return depths_.size(); }

    double at(int u, int v) const { return depths_[index(u, v)]; }
    void set(int u, int v, double depth);

    std::span<const double> depths() const { return depths_; }

    bool valid(int u, int v) const { return at(u, v) > 0.0; }
    std::size_t valid_count() const;

    bool same_shape(const DepthMap& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const DepthMap&, const DepthMap&) = default;

private:
    std::size_t index(int u, int v) const {
        return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(u);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> depths_;
};

/// Ordered points in camera coordinates. `attributes` holds
/// `attribute_dim` values per point when non-empty; `pixel_origin` records
/// the source pixel of each point when non-empty.
struct PointCloud {
    std::vector<Point3> points;
    std::size_t attribute_dim = 0;
    std::vector<double> attributes;
    std::vector<PixelCoord> pixel_origin;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_attributes() const { return attribute_dim > 0; }
    bool has_pixel_origin() const { return !pixel_origin.empty(); }

    std::span<const double> attribute(std::size_t i) const {
        return std::span<const double>(attributes).subspan(i * attribute_dim, attribute_dim);
    }

    /// Throws InvalidArgumentError when coordinates are non-finite or the
    /// optional per-point arrays have the wrong length.
    void validate() const;

    static PointCloud from_points(std::vector<Point3> pts) {
        PointCloud pc;
        pc.points = std::move(pts);
        return pc;
    }
};

/// `a` followed by `b`. Optional arrays survive only when both inputs carry
/// them with the same layout.
PointCloud concatenate(const PointCloud& a, const PointCloud& b);

/// One point per pixel with depth > 0, in row-major order, with
/// pixel_origin filled in.
PointCloud back_project(const DepthMap& depth, const CameraIntrinsics& k);

/// Rasterizes a cloud with a z-buffer. Pixel coordinates are rounded half
/// up; points behind the camera or outside the image are dropped and the
/// nearest depth wins on collisions.
DepthMap project(const PointCloud& pc, const CameraIntrinsics& k, int width, int height);

struct CropResult {
    DepthMap depth;
    int left = 0;
    int top = 0;

    CameraIntrinsics adjust(const CameraIntrinsics& k) const { return k.cropped(left, top); }
};

/// Bottom-anchored, horizontally centered window of size target_w x target_h.
CropResult crop_bottom(const DepthMap& depth, int target_w, int target_h);

}  // namespace plidar

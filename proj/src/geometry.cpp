#include "plidar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plidar/errors.hpp"

namespace plidar {

CameraIntrinsics::CameraIntrinsics(double fu, double fv, double cu, double cv)
    : fu_(fu), fv_(fv), cu_(cu), cv_(cv) {
    if (!(std::isfinite(fu) && fu > 0.0) || !(std::isfinite(fv) && fv > 0.0)) {
        throw InvalidArgumentError("focal lengths must be finite and positive");
    }
    if (!std::isfinite(cu) || !std::isfinite(cv)) {
        throw InvalidArgumentError("principal point must be finite");
    }
}

CameraIntrinsics CameraIntrinsics::cropped(int left, int top) const {
    return {fu_, fv_, cu_ - left, cv_ - top};
}

DepthMap::DepthMap(int width, int height) : width_(width), height_(height) {
    if (width < 0 || height < 0) {
        throw DimensionError("negative depth map size");
    }
    depths_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0);
}

DepthMap::DepthMap(int width, int height, std::vector<double> depths)
    : width_(width), height_(height), depths_(std::move(depths)) {
    if (width < 0 || height < 0 ||
        depths_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw DimensionError("depth buffer of " + std::to_string(depths_.size()) + " values does not match " +
                             std::to_string(width) + "x" + std::to_string(height));
    }
    for (double d : depths_) {
        if (!std::isfinite(d) || d < 0.0) {
            throw InvalidArgumentError("depths must be finite and non-negative");
        }
    }
}

void DepthMap::set(int u, int v, double depth) {
    if (!std::isfinite(depth) || depth < 0.0) {
        throw InvalidArgumentError("depths must be finite and non-negative");
    }
    depths_[index(u, v)] = depth;
}

std::size_t DepthMap::valid_count() const {
    return static_cast<std::size_t>(std::count_if(depths_.begin(), depths_.end(), [](double d) { return d > 0.0; }));
}

void PointCloud::validate() const {
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
            throw InvalidArgumentError("point coordinates must be finite");
        }
    }
    if (attributes.size() != points.size() * attribute_dim) {
        throw InvalidArgumentError("attribute count does not match point count");
    }
    if (!pixel_origin.empty() && pixel_origin.size() != points.size()) {
        throw InvalidArgumentError("pixel_origin count does not match point count");
    }
}

PointCloud concatenate(const PointCloud& a, const PointCloud& b) {
    PointCloud out;
    out.points.reserve(a.size() + b.size());
    out.points.insert(out.points.end(), a.points.begin(), a.points.end());
    out.points.insert(out.points.end(), b.points.begin(), b.points.end());
    if (a.attribute_dim == b.attribute_dim && a.has_attributes()) {
        out.attribute_dim = a.attribute_dim;
        out.attributes = a.attributes;
        out.attributes.insert(out.attributes.end(), b.attributes.begin(), b.attributes.end());
    }
    if (a.has_pixel_origin() && b.has_pixel_origin()) {
        out.pixel_origin = a.pixel_origin;
        out.pixel_origin.insert(out.pixel_origin.end(), b.pixel_origin.begin(), b.pixel_origin.end());
    }
    return out;
}

PointCloud back_project(const DepthMap& depth, const CameraIntrinsics& k) {
    PointCloud pc;
    const std::size_t n = depth.valid_count();
    pc.points.reserve(n);
    pc.pixel_origin.reserve(n);
    for (int v = 0; v < depth.height(); ++v) {
        for (int u = 0; u < depth.width(); ++u) {
            const double z = depth.at(u, v);
            if (z <= 0.0) {
                continue;
            }
            pc.points.push_back({(u - k.cu()) * z / k.fu(), (v - k.cv()) * z / k.fv(), z});
            pc.pixel_origin.push_back({u, v});
        }
    }
    return pc;
}

DepthMap project(const PointCloud& pc, const CameraIntrinsics& k, int width, int height) {
    if (width <= 0 || height <= 0) {
        throw DimensionError("projection target must have positive size");
    }
    std::vector<double> zbuf(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0);
    for (const auto& p : pc.points) {
        if (!(p.z > 0.0)) {
            continue;
        }
        const double uf = std::floor(k.fu() * p.x / p.z + k.cu() + 0.5);
        const double vf = std::floor(k.fv() * p.y / p.z + k.cv() + 0.5);
        if (!(uf >= 0.0 && uf < width && vf >= 0.0 && vf < height)) {
            continue;
        }
        double& cell = zbuf[static_cast<std::size_t>(vf) * static_cast<std::size_t>(width) + static_cast<std::size_t>(uf)];
        if (cell == 0.0 || p.z < cell) {
            cell = p.z;
        }
    }
    return DepthMap(width, height, std::move(zbuf));
}

CropResult crop_bottom(const DepthMap& depth, int target_w, int target_h) {
    if (target_w <= 0 || target_h <= 0 || target_w > depth.width() || target_h > depth.height()) {
        throw DimensionError("crop " + std::to_string(target_w) + "x" + std::to_string(target_h) +
                             " does not fit in " + std::to_string(depth.width()) + "x" +
                             std::to_string(depth.height()));
    }
    CropResult out;
    out.left = (depth.width() - target_w) / 2;
    out.top = depth.height() - target_h;
    std::vector<double> buf;
    buf.reserve(static_cast<std::size_t>(target_w) * static_cast<std::size_t>(target_h));
    for (int v = 0; v < target_h; ++v) {
        for (int u = 0; u < target_w; ++u) {
            buf.push_back(depth.at(u + out.left, v + out.top));
        }
    }
    out.depth = DepthMap(target_w, target_h, std::move(buf));
    return out;
}

}  // namespace plidar

#pragma once

#include <array>

#include "plidar/geometry.hpp"

namespace plidar {

/// Rigid transform p -> R p + t, with R given as an axis-angle vector
/// (direction = axis, norm = angle in radians).
class RigidMotion {
public:
    RigidMotion() = default;
    RigidMotion(const Point3& rotation, const Point3& translation);

    const Point3& rotation() const { return rotation_; }
    const Point3& translation() const { return translation_; }
    double angle() const;

    Point3 apply(const Point3& p) const;
    Point3 rotate(const Point3& p) const;
    RigidMotion inverse() const;

    /// Same axis, `fraction` of the angle and of the translation.
    RigidMotion scaled(double fraction) const;

    bool is_identity() const { return rotation_ == Point3{} && translation_ == Point3{}; }

private:
    Point3 rotation_{};
    Point3 translation_{};
    std::array<double, 9> r_{1, 0, 0, 0, 1, 0, 0, 0, 1};
};

}  // namespace plidar

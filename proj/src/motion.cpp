#include "plidar/motion.hpp"

#include <cmath>

namespace plidar {

RigidMotion::RigidMotion(const Point3& rotation, const Point3& translation)
    : rotation_(rotation), translation_(translation) {
    const double theta = angle();
    if (theta == 0.0) {
        return;
    }
    const double kx = rotation.x / theta;
    const double ky = rotation.y / theta;
    const double kz = rotation.z / theta;
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double t = 1.0 - c;
    // Rodrigues: R = I + s K + (1 - c) K^2
    r_ = {c + t * kx * kx,      t * kx * ky - s * kz, t * kx * kz + s * ky,
          t * kx * ky + s * kz, c + t * ky * ky,      t * ky * kz - s * kx,
          t * kx * kz - s * ky, t * ky * kz + s * kx, c + t * kz * kz};
}

double RigidMotion::angle() const {
    return std::sqrt(rotation_.x * rotation_.x + rotation_.y * rotation_.y + rotation_.z * rotation_.z);
}

Point3 RigidMotion::rotate(const Point3& p) const {
    return {r_[0] * p.x + r_[1] * p.y + r_[2] * p.z, r_[3] * p.x + r_[4] * p.y + r_[5] * p.z,
            r_[6] * p.x + r_[7] * p.y + r_[8] * p.z};
}

Point3 RigidMotion::apply(const Point3& p) const {
    return rotate(p) + translation_;
}

RigidMotion RigidMotion::inverse() const {
    // R^-1 = R(-axis angle); t' = -R^-1 t
    RigidMotion inv(-1.0 * rotation_, Point3{});
    const Point3 t = inv.rotate(translation_);
    return RigidMotion(-1.0 * rotation_, -1.0 * t);
}

RigidMotion RigidMotion::scaled(double fraction) const {
    return RigidMotion(fraction * rotation_, fraction * translation_);
}

}  // namespace plidar

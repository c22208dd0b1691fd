#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace airsea {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using cd = std::complex<double>;

inline Vec3 lift(const Vec2& p, double z) { return Vec3(p.x(), p.y(), z); }
inline Vec2 ground(const Vec3& p) { return Vec2(p.x(), p.y()); }

}  // namespace airsea

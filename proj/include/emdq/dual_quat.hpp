#pragma once

#include "emdq/core.hpp"

#include <span>
#include <utility>

namespace emdq {

struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  static constexpr Quat zero() { return {0.0, 0.0, 0.0, 0.0}; }
  static Quat pure(const Vec3& v) { return {0.0, v.x(), v.y(), v.z()}; }

  Vec3 vec() const { return {x, y, z}; }
  Quat conj() const { return {w, -x, -y, -z}; }
  double dot(const Quat& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }
  double norm() const;

  friend Quat operator*(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
  friend Quat operator+(const Quat& a, const Quat& b) {
    return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Quat operator-(const Quat& a, const Quat& b) {
    return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Quat operator*(double s, const Quat& q) { return {s * q.w, s * q.x, s * q.y, s * q.z}; }
  friend bool operator==(const Quat&, const Quat&) = default;
};

/// Rigid motion as real + eps * dual. The unit condition is |real| = 1 and
/// <real, dual> = 0. Planar motions (rotation about z, translation in xy)
/// only populate real.w, real.z, dual.x and dual.y.
struct DualQuat {
  Quat real{1.0, 0.0, 0.0, 0.0};
  Quat dual = Quat::zero();

  static constexpr DualQuat identity() { return {}; }

  DualQuat operator-() const { return {-1.0 * real, -1.0 * dual}; }
  friend bool operator==(const DualQuat&, const DualQuat&) = default;
};

/// Scaled rigid motion: x -> mu * dq(x).
struct ScaledDq {
  DualQuat dq;
  double mu = 1.0;
};

/// Throws DegenerateGeometryError unless R is orthonormal with det +1.
DualQuat dq_from_transform(const Mat3& R, const Vec3& t);
DualQuat trans2dq(const Vec3& t);
std::pair<Mat3, Vec3> dq_to_transform(const DualQuat& dq);

/// mu * (R x + t) for the motion encoded by dq.
Vec3 dq_apply(const DualQuat& dq, double mu, const Vec3& x);

/// Composition a * b: applies b first, then a.
DualQuat dq_multiply(const DualQuat& a, const DualQuat& b);

/// Divides by the dual-number norm. Throws Error if the real part is zero.
DualQuat dq_normalize(const DualQuat& dq);

/// Weighted linear blend. Inputs are flipped onto the hemisphere of the
/// heaviest-weighted element before summing; the sum is then normalized.
/// Throws Error on negative weights, size mismatch or all-zero weights.
DualQuat dq_blend(std::span<const double> weights, std::span<const DualQuat> dqs);

/// Same operations restricted to the four components a planar motion can
/// populate. Inputs must be planar; the other components of the output are
/// exactly zero.
namespace planar {

Vec3 apply(const DualQuat& dq, double mu, const Vec3& x);
DualQuat multiply(const DualQuat& a, const DualQuat& b);
DualQuat normalize(const DualQuat& dq);
DualQuat blend(std::span<const double> weights, std::span<const DualQuat> dqs);
bool is_planar(const DualQuat& dq);

}  // namespace planar

/// Dimension dispatch used by the EM and field kernels.
inline Vec3 dq_apply(int dim, const DualQuat& dq, double mu, const Vec3& x) {
  return dim == 2 ? planar::apply(dq, mu, x) : dq_apply(dq, mu, x);
}
inline DualQuat dq_multiply(int dim, const DualQuat& a, const DualQuat& b) {
  return dim == 2 ? planar::multiply(a, b) : dq_multiply(a, b);
}
inline DualQuat dq_blend(int dim, std::span<const double> w, std::span<const DualQuat> dqs) {
  return dim == 2 ? planar::blend(w, dqs) : dq_blend(w, dqs);
}

}  // namespace emdq

#include "emdq/dual_quat.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace emdq {

double Quat::norm() const { return std::sqrt(dot(*this)); }

namespace {

Vec3 rotate(const Quat& q, const Vec3& v) {
  const Vec3 u = q.vec();
  const Vec3 c = u.cross(v);
  return v + 2.0 * q.w * c + 2.0 * u.cross(c);
}

Mat3 rotation_matrix(const Quat& q) {
  return Eigen::Quaterniond(q.w, q.x, q.y, q.z).toRotationMatrix();
}

void check_weights(std::span<const double> weights, std::size_t n) {
  if (weights.size() != n) throw Error("dq_blend: weight/element count mismatch");
  if (n == 0) throw Error("dq_blend: empty input");
  bool any = false;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("dq_blend: weights must be finite and >= 0");
    any = any || w > 0.0;
  }
  if (!any) throw Error("dq_blend: all weights are zero");
}

std::size_t heaviest(std::span<const double> weights) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < weights.size(); ++i)
    if (weights[i] > weights[best]) best = i;
  return best;
}

}  // namespace

DualQuat dq_from_transform(const Mat3& R, const Vec3& t) {
  if ((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
      std::abs(R.determinant() - 1.0) > 1e-9)
    throw DegenerateGeometryError("dq_from_transform: R is not a proper rotation");
  Eigen::Quaterniond e(R);
  e.normalize();
  Quat real{e.w(), e.x(), e.y(), e.z()};
  // Canonical sign: non-negative scalar part.
  if (real.w < 0.0) real = -1.0 * real;
  return {real, 0.5 * (Quat::pure(t) * real)};
}

DualQuat trans2dq(const Vec3& t) {
  return {Quat{1.0, 0.0, 0.0, 0.0}, Quat{0.0, 0.5 * t.x(), 0.5 * t.y(), 0.5 * t.z()}};
}

std::pair<Mat3, Vec3> dq_to_transform(const DualQuat& dq) {
  const Vec3 t = 2.0 * (dq.dual * dq.real.conj()).vec();
  return {rotation_matrix(dq.real), t};
}

Vec3 dq_apply(const DualQuat& dq, double mu, const Vec3& x) {
  const Vec3 t = 2.0 * (dq.dual * dq.real.conj()).vec();
  return mu * (rotate(dq.real, x) + t);
}

DualQuat dq_multiply(const DualQuat& a, const DualQuat& b) {
  return {a.real * b.real, a.real * b.dual + a.dual * b.real};
}

DualQuat dq_normalize(const DualQuat& dq) {
  const double n2 = dq.real.dot(dq.real);
  if (!(n2 > 0.0)) throw Error("dq_normalize: zero real part");
  const double n = std::sqrt(n2);
  const double rd = dq.real.dot(dq.dual);
  return {(1.0 / n) * dq.real, (1.0 / n) * dq.dual - (rd / (n2 * n)) * dq.real};
}

DualQuat dq_blend(std::span<const double> weights, std::span<const DualQuat> dqs) {
  check_weights(weights, dqs.size());
  const std::size_t h = heaviest(weights);
  const Quat& ref = dqs[h].real;
  // Relative weights: tiny absolute weights would underflow the norm.
  const double scale = 1.0 / weights[h];
  DualQuat sum{Quat::zero(), Quat::zero()};
  for (std::size_t i = 0; i < dqs.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const double wi = weights[i] * scale;
    const double w = dqs[i].real.dot(ref) < 0.0 ? -wi : wi;
    sum.real = sum.real + w * dqs[i].real;
    sum.dual = sum.dual + w * dqs[i].dual;
  }
  return dq_normalize(sum);
}

namespace planar {

bool is_planar(const DualQuat& dq) {
  return dq.real.x == 0.0 && dq.real.y == 0.0 && dq.dual.w == 0.0 && dq.dual.z == 0.0;
}

Vec3 apply(const DualQuat& dq, double mu, const Vec3& x) {
  const double c = dq.real.w, s = dq.real.z;
  const double cc = c * c - s * s, ss = 2.0 * c * s;
  const double tx = 2.0 * (dq.dual.x * c - dq.dual.y * s);
  const double ty = 2.0 * (dq.dual.x * s + dq.dual.y * c);
  return {mu * (cc * x.x() - ss * x.y() + tx), mu * (ss * x.x() + cc * x.y() + ty), 0.0};
}

DualQuat multiply(const DualQuat& a, const DualQuat& b) {
  const double aw = a.real.w, az = a.real.z, ax = a.dual.x, ay = a.dual.y;
  const double bw = b.real.w, bz = b.real.z, bx = b.dual.x, by = b.dual.y;
  DualQuat out{Quat::zero(), Quat::zero()};
  out.real.w = aw * bw - az * bz;
  out.real.z = aw * bz + az * bw;
  out.dual.x = aw * bx - az * by + ax * bw + ay * bz;
  out.dual.y = aw * by + az * bx + ay * bw - ax * bz;
  return out;
}

DualQuat normalize(const DualQuat& dq) {
  const double n2 = dq.real.w * dq.real.w + dq.real.z * dq.real.z;
  if (!(n2 > 0.0)) throw Error("dq_normalize: zero real part");
  const double inv = 1.0 / std::sqrt(n2);
  DualQuat out{Quat::zero(), Quat::zero()};
  out.real.w = dq.real.w * inv;
  out.real.z = dq.real.z * inv;
  out.dual.x = dq.dual.x * inv;
  out.dual.y = dq.dual.y * inv;
  return out;
}

DualQuat blend(std::span<const double> weights, std::span<const DualQuat> dqs) {
  check_weights(weights, dqs.size());
  const std::size_t h = heaviest(weights);
  const Quat& ref = dqs[h].real;
  const double scale = 1.0 / weights[h];
  double rw = 0.0, rz = 0.0, dx = 0.0, dy = 0.0;
  for (std::size_t i = 0; i < dqs.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const Quat& r = dqs[i].real;
    const double wi = weights[i] * scale;
    const double w = r.w * ref.w + r.z * ref.z < 0.0 ? -wi : wi;
    rw += w * r.w;
    rz += w * r.z;
    dx += w * dqs[i].dual.x;
    dy += w * dqs[i].dual.y;
  }
  DualQuat sum{Quat::zero(), Quat::zero()};
  sum.real.w = rw;
  sum.real.z = rz;
  sum.dual.x = dx;
  sum.dual.y = dy;
  return normalize(sum);
}

}  // namespace planar

}  // namespace emdq

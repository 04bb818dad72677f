#pragma once

#include <Eigen/Dense>

#include <limits>

namespace transverse {

// Everything in this library lives in R^2 or R^3; combined Jacobians such as
// [dh | df] have at most 6 columns. Bounded storage keeps hot loops off the heap.
inline constexpr int kMaxStorage = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxStorage, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxStorage,
                          kMaxStorage>;

inline Vec zeros(int n) { return Vec::Zero(n); }

/// Axis-aligned box in the ambient space.
struct Box {
  Vec lo;
  Vec hi;

  static Box empty(int m) {
    Box b;
    b.lo = Vec::Constant(m, std::numeric_limits<double>::infinity());
    b.hi = Vec::Constant(m, -std::numeric_limits<double>::infinity());
    return b;
  }
  void extend(const Vec& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void inflate(double r) {
    lo.array() -= r;
    hi.array() += r;
  }
  bool contains(const Vec& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
  bool intersects(const Box& o) const {
    return (lo.array() <= o.hi.array()).all() && (o.lo.array() <= hi.array()).all();
  }
  double distance(const Vec& p) const {
    Vec d = (lo - p).cwiseMax(p - hi).cwiseMax(Vec::Zero(p.size()));
    return d.norm();
  }
};

}  // namespace transverse

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "transverse/linalg.hpp"

namespace transverse {

class SmoothMapError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Domain {
  enum class Kind { kPoint, kInterval, kBox };

  Kind kind = Kind::kPoint;
  Vec lo;
  Vec hi;
  bool periodic = false;  // intervals only

  static Domain point();
  static Domain interval(double a, double b, bool periodic = false);
  static Domain box(Vec lo, Vec hi);

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& y, double tol = 1e-12) const;
  /// Periodic parameters are reduced into [lo, hi); others are clamped.
  Vec normalize(const Vec& y) const;
  /// Distance in parameter space, modulo the period where applicable.
  double distance(const Vec& a, const Vec& b) const;
};

/// The map h: Y -> R^m, restricted to closed-form families so that the
/// Jacobian is analytic.
class SmoothMap {
 public:
  enum class Family { kPoint, kLine, kCircle, kPolynomialCurve, kTorusKnot, kSurfacePatch };

  static SmoothMap point(Vec p);
  /// origin + y * direction, y in [a, b].
  static SmoothMap line(Vec origin, Vec direction, double a, double b);
  /// center + r (cos 2πy, sin 2πy) in R^2, y in [0, 1) periodic.
  static SmoothMap circle(Vec center, double radius);
  /// center + r (cos 2πy u + sin 2πy w).
  static SmoothMap circle(Vec center, double radius, Vec u, Vec w);
  /// Σ_k c_k y^k, y in [a, b].
  static SmoothMap polynomial_curve(std::vector<Vec> coefficients, double a, double b);
  /// (p, q) torus knot with radii R > r about `center`, y in [0, 1) periodic.
  static SmoothMap torus_knot(int p, int q, double major, double minor, Vec center);
  /// origin + u a + v b + (c_uu u² + c_uv uv + c_vv v²) n over [u0,u1]×[v0,v1].
  static SmoothMap surface_patch(Vec origin, Vec a, Vec b, Vec normal, double c_uu,
                                 double c_uv, double c_vv, Vec uv_lo, Vec uv_hi);

  Family family() const { return family_; }
  std::string family_name() const;
  const Domain& domain() const { return domain_; }
  int domain_dim() const { return domain_.dim(); }
  int ambient_dim() const { return ambient_dim_; }

  Vec eval(const Vec& y) const;
  /// m × n differential.
  Mat jacobian(const Vec& y) const;
  /// Deterministic grid: `density` points per parameter unit on intervals
  /// (endpoints included unless periodic), density^n points on boxes, the
  /// single point on a point domain.
  std::vector<Vec> sample_domain(int density) const;

 private:
  SmoothMap(Family f, Domain d, int m) : family_(f), domain_(std::move(d)), ambient_dim_(m) {}
  void check_param(const Vec& y) const;

  Family family_;
  Domain domain_;
  int ambient_dim_;
  std::vector<Vec> vecs_;
  std::vector<double> scalars_;
};

}  // namespace transverse

#pragma once

#include <stdexcept>

#include "transverse/linalg.hpp"

/// Smooth bump calculus on the standard simplex.
///
/// ρ(r) = e^{-1/r} for r > 0 and 0 otherwise; ρ_l(t) = ρ(1 - Σ t_i) Π ρ(t_i) is
/// positive exactly on the open standard l-simplex. A 0-simplex has no boundary
/// and uses ρ_0 ≡ 1.
namespace transverse::bump {

class BumpError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr int kMaxDerivative = 4;

double rho(double r);
/// k-th derivative of ρ, 0 ≤ k ≤ kMaxDerivative.
double rho_deriv(double r, int k);

/// True iff t lies in the open standard simplex (every barycentric coordinate
/// 1 - Σ t_i, t_1, ..., t_l strictly positive). Always true for l = 0.
bool in_open_simplex(const Vec& t);

double rho_l(const Vec& t);
Vec rho_l_grad(const Vec& t);
Mat rho_l_hess(const Vec& t);
/// max ρ_l, attained at the barycenter.
double rho_l_max(int l);

/// Smooth step: 1 on r ≤ 1/2, 0 on r ≥ 1, ρ(1-r) / (ρ(1-r) + ρ(r-1/2)) between.
class Cutoff {
 public:
  static const Cutoff& instance();

  double value(double r) const;
  double deriv(double r) const;
  /// 1.05 times the largest |β'| over 10^4 samples of [1/2, 1].
  double c_beta() const { return c_beta_; }

 private:
  Cutoff();
  double c_beta_;
};

double beta(double r);
double beta_deriv(double r);
double c_beta();

/// e^{-rate/ρ_l(t)}, defined on the open simplex. rate = 1 is the standard
/// warp; any rate > 0 is flat to all orders at the boundary.
double warp(const Vec& t, double rate = 1.0);
/// Same as warp but returns 0 off the open simplex.
double warp_or_zero(const Vec& t, double rate = 1.0);
Vec warp_grad(const Vec& t, double rate = 1.0);
Mat warp_hess(const Vec& t, double rate = 1.0);

}  // namespace transverse::bump

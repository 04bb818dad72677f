#pragma once

#include <stdexcept>

#include "transverse/charts.hpp"
#include "transverse/linalg.hpp"

namespace transverse {

/// Per-simplex data of the perturbation: chart, constants, regular value.
struct LocalPerturbation {
  TubularChart chart;
  double c_sigma = 0.0;
  double epsilon = 0.0;
  Vec regular_value;  // v, |v| < ε²
  int retries_used = 0;
  int shrinks = 0;
  /// s_σ(t) = e^{-rate/ρ_l(t)} v. The construction uses rate = 1.
  double warp_rate = 1.0;

  SimplexId simplex() const { return chart.simplex(); }
  int dim() const { return chart.dim(); }
  int normal_dim() const { return chart.normal_dim(); }

  Vec section(const Vec& t) const;
  /// ∇s_σ(t), (m - l) × l.
  Mat section_grad(const Vec& t) const;
  /// Second derivative of s_σ contracted as ∂²s/∂t_a∂t_b = H_ab v; returns H.
  Mat warp_hessian(const Vec& t) const;
  /// Upper bound on |s_σ(t)| over the open simplex.
  double section_bound() const;
};

class EpsilonTooLarge : public std::runtime_error {
 public:
  EpsilonTooLarge(const std::string& what, double deviation)
      : std::runtime_error(what), deviation_(deviation) {}
  double deviation() const { return deviation_; }

 private:
  double deviation_;
};

/// ψ'_σ(t, v) = (t, v + β(|v| / (ε ρ_l(t))) s_σ(t)) on the open simplex, the
/// identity elsewhere. Coordinates are stacked as (t, v).
class LocalDiffeo {
 public:
  explicit LocalDiffeo(LocalPerturbation p) : pert_(std::move(p)) {}

  const LocalPerturbation& perturbation() const { return pert_; }
  int ambient_dim() const { return pert_.chart.ambient_dim(); }

  /// t in the open simplex and |v| < ε ρ_l(t).
  bool in_support(const Vec& tv) const;
  Vec eval(const Vec& tv) const;
  Mat jacobian(const Vec& tv) const;
  /// Newton on the v component; throws InversionError on failure.
  Vec inverse(const Vec& tv) const;

 private:
  LocalPerturbation pert_;
};

/// Checks the Jacobian guard ‖Dψ' - I‖ < 1/2 and det > 0 on deterministic
/// support samples; throws EpsilonTooLarge otherwise.
LocalDiffeo build_local_diffeo(LocalPerturbation pert);

/// Points (i + 1/2)/density per axis strictly inside the standard l-simplex;
/// the empty vector for l = 0.
std::vector<Vec> simplex_interior_grid(int l, int density);
/// Unit vectors in R^k: ±1 for k = 1, `count` angles for k = 2, a Fibonacci
/// sphere of `count` points for k = 3, ± axes beyond.
std::vector<Vec> unit_directions(int k, int count);

/// Deterministic sample points (t, v) inside the support of ψ'.
std::vector<Vec> support_samples(const LocalPerturbation& pert, int density);

}  // namespace transverse

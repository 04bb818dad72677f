#pragma once

#include <cstdint>
#include <stdexcept>

namespace transverse {

struct PipelineConfig {
  std::uint64_t seed = 1;
  /// Regular-value candidates tried per simplex before giving up.
  int max_retries = 64;
  /// Samples per unit of t (and normal directions) in the c_σ containment search.
  int containment_density = 16;
  double tol_rank = 1e-6;
  double epsilon_max = 0.25;
  /// Intersection seeds per curve parameter unit.
  int verify_density = 64;
  /// Intersection seeds per axis of a surface patch.
  int surface_density = 16;
  double residual_tol = 1e-10;
  double dedupe_radius = 1e-6;
  /// A vertex counts as hit when h passes within this distance.
  double vertex_delta = 1e-7;
  /// ε halvings allowed when the Jacobian guard trips.
  int max_shrinks = 8;
  /// Reject candidates that push sampled points of h out of η(|K|).
  bool preserve_coverage = true;
  /// Sections are e^{-rate/ρ_l(t)} v. rate = 1 is the construction; smaller
  /// rates make level ≥ 1 perturbations numerically visible. Must stay at or
  /// above kMinWarpRate so that |s_σ| < ε² ρ_l holds on every level.
  double warp_rate = 1.0;

  /// max over l ≥ 1 of ρ_max ln(1/ρ_max), attained at l = 1 (4 e^{-4}).
  static constexpr double kMinWarpRate = 0.07326255555493671;

  void validate() const {
    if (max_retries < 1) throw std::invalid_argument("max_retries must be at least 1");
    if (containment_density < 1 || verify_density < 1 || surface_density < 1)
      throw std::invalid_argument("densities must be positive");
    if (!(tol_rank > 0) || !(epsilon_max > 0) || !(residual_tol > 0) || !(dedupe_radius > 0) ||
        !(vertex_delta > 0))
      throw std::invalid_argument("tolerances must be positive");
    if (!(warp_rate >= kMinWarpRate)) throw std::invalid_argument("warp_rate below 4 e^-4");
    if (max_shrinks < 0) throw std::invalid_argument("max_shrinks must be nonnegative");
  }
};

}  // namespace transverse

#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "transverse/charts.hpp"
#include "transverse/config.hpp"
#include "transverse/local_diffeo.hpp"
#include "transverse/smoothmap.hpp"
#include "transverse/verify.hpp"

namespace transverse {

class DegenerateGeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SamplingError : public std::runtime_error {
 public:
  SamplingError(const std::string& what, SimplexId simplex, int candidates)
      : std::runtime_error(what), simplex_(simplex), candidates_(candidates) {}
  SimplexId simplex() const { return simplex_; }
  int candidates() const { return candidates_; }

 private:
  SimplexId simplex_;
  int candidates_;
};

class LevelError : public std::runtime_error {
 public:
  LevelError(const std::string& what, int level, SimplexId simplex)
      : std::runtime_error(what), level_(level), simplex_(simplex) {}
  int level() const { return level_; }
  SimplexId simplex() const { return simplex_; }

 private:
  int level_;
  SimplexId simplex_;
};

/// Uniform doubles from mt19937_64 with a portable bits-to-double conversion.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  /// [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::mt19937_64 gen_;
};

/// Stream seed for one (level, simplex) pair, independent of processing order.
std::uint64_t stream_seed(std::uint64_t seed, int level, SimplexId simplex);

/// ψ_σ = chart ∘ ψ'_σ ∘ chart^{-1}, exactly the identity outside its support.
class SimplexDiffeo final : public AmbientDiffeo {
 public:
  SimplexDiffeo(LocalDiffeo local, Box support, double max_displacement);

  Vec apply(const Vec& x, Mat* jac = nullptr) const override;
  Vec invert(const Vec& x, Mat* jac = nullptr) const override;
  const Box& support_box() const override { return support_; }
  double max_displacement() const override { return max_disp_; }
  LinkMetadata metadata() const override;

  const LocalDiffeo& local() const { return local_; }
  const TubularChart& chart() const { return local_.perturbation().chart; }

 private:
  LocalDiffeo local_;
  Box support_;
  double max_disp_;
};

std::shared_ptr<const SimplexDiffeo> extend_to_ambient(const TriangulationState& state,
                                                       LocalDiffeo local);

/// Largest c (halved) such that chart(t, c ρ_l(t) u) stays in η(St(b_σ, sd K))
/// on the sample grid.
double estimate_c_sigma(const TriangulationState& state, SimplexId sigma,
                        const PipelineConfig& config);

/// min(c_σ, 1/(2 C_β), ε_max, 0.1 × mesh scale).
double initial_epsilon(const TriangulationState& state, double c_sigma,
                       const PipelineConfig& config);

struct SampledValue {
  Vec regular_value;
  int retries = 0;
  std::shared_ptr<const SimplexDiffeo> link;
};

/// Draws v uniformly from the ball of radius ε² until the deformed simplex
/// passes the verifier. Throws SamplingError after config.max_retries
/// candidates and EpsilonTooLarge when the Jacobian guard trips.
SampledValue sample_regular_value(const TriangulationState& state, SimplexId sigma,
                                  const Verifier& verifier, double epsilon, double c_sigma,
                                  const PipelineConfig& config, Rng& rng, int shrinks = 0);
SampledValue sample_regular_value(const TriangulationState& state, SimplexId sigma,
                                  const SmoothMap& h, double epsilon, double c_sigma,
                                  const PipelineConfig& config, Rng& rng);

struct PerturbationLog {
  SimplexId simplex = -1;
  int dim = 0;
  bool perturbed = false;  // false when σ already passed
  double c_sigma = 0.0;
  double epsilon = 0.0;
  double v_norm = 0.0;
  int retries = 0;
  int shrinks = 0;
};

std::string to_string(const PerturbationLog& log);

/// Builds ψ_σ for one simplex: c_σ search, ε selection with shrinking, sampling.
std::shared_ptr<const SimplexDiffeo> perturb_simplex(const TriangulationState& state,
                                                     SimplexId sigma, const Verifier& verifier,
                                                     const PipelineConfig& config,
                                                     PerturbationLog* log = nullptr);

struct LevelResult {
  TriangulationState state;
  std::vector<PerturbationLog> logs;
};

/// Appends ψ_σ for every l-simplex that fails the verifier, in ascending id
/// order. Throws LevelError naming the first simplex that cannot be fixed.
LevelResult perturb_level(const TriangulationState& state, int level, const SmoothMap& h,
                          const PipelineConfig& config);

struct PipelineResult {
  TriangulationState state;
  TransversalityReport report;
  std::vector<PerturbationLog> logs;
  std::vector<std::string> failures;
};

class PipelineError : public std::runtime_error {
 public:
  PipelineError(const std::string& what, std::shared_ptr<const PipelineResult> result)
      : std::runtime_error(what), result_(std::move(result)) {}
  const PipelineResult& result() const { return *result_; }

 private:
  std::shared_ptr<const PipelineResult> result_;
};

/// Levels 0..m-1, then a full verification. A failing level is rolled back
/// and recorded; the remaining levels still run. Throws PipelineError (with the
/// partial result) unless every level succeeded and the final report passes.
PipelineResult make_transverse(const Mesh& mesh, const SmoothMap& h, const PipelineConfig& config);

}  // namespace transverse

#include "transverse/perturb.hpp"

#include <cmath>
#include <cstdio>

#include "transverse/bump.hpp"
#include "transverse/log.hpp"

namespace transverse {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, int level, SimplexId simplex) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(level));
  return splitmix64(h ^ static_cast<std::uint64_t>(simplex));
}

// ---------------------------------------------------------------------------

SimplexDiffeo::SimplexDiffeo(LocalDiffeo local, Box support, double max_displacement)
    : local_(std::move(local)), support_(std::move(support)), max_disp_(max_displacement) {}

Vec SimplexDiffeo::apply(const Vec& x, Mat* jac) const {
  const int m = static_cast<int>(x.size());
  auto identity = [&]() {
    if (jac) *jac = Mat::Identity(m, m);
    return x;
  };
  if (!support_.contains(x)) return identity();
  Mat j_in;
  const Vec tv = chart().inverse(x, jac ? &j_in : nullptr);
  if (!local_.in_support(tv)) return identity();
  Mat j_out;
  const Vec y = chart().eval(local_.eval(tv), jac ? &j_out : nullptr);
  if (jac) *jac = j_out * local_.jacobian(tv) * j_in;
  return y;
}

Vec SimplexDiffeo::invert(const Vec& x, Mat* jac) const {
  const int m = static_cast<int>(x.size());
  auto identity = [&]() {
    if (jac) *jac = Mat::Identity(m, m);
    return x;
  };
  if (!support_.contains(x)) return identity();
  const Vec tv = chart().inverse(x);
  if (!local_.in_support(tv)) return identity();
  const Vec y = chart().eval(local_.inverse(tv));
  if (jac) {
    Mat j;
    apply(y, &j);
    *jac = j.inverse();
  }
  return y;
}

LinkMetadata SimplexDiffeo::metadata() const {
  const auto& p = local_.perturbation();
  LinkMetadata md;
  md.simplex = p.simplex();
  md.dim = p.dim();
  md.c_sigma = p.c_sigma;
  md.epsilon = p.epsilon;
  md.regular_value = p.regular_value;
  md.retries = p.retries_used;
  md.shrinks = p.shrinks;
  md.support = support_;
  return md;
}

std::shared_ptr<const SimplexDiffeo> extend_to_ambient(const TriangulationState& state,
                                                       LocalDiffeo local) {
  const auto& p = local.perturbation();
  const SimplexId sigma = p.simplex();
  // The affine support lies within ε ρ_max of the base simplex; the prefix
  // chain moves it by at most the displacement of the links it meets.
  Box box = state.base().bounding_box(state.complex().simplex(sigma));
  box.inflate(p.epsilon * bump::rho_l_max(p.dim()));
  int overlaps = 0;
  for (const auto& link : p.chart.prefix())
    if (link->support_box().intersects(box)) ++overlaps;
  box.inflate(chain_displacement(p.chart.prefix(), box) + 1e-12);
  const double disp = 2.0 * p.section_bound() * std::pow(1.5, overlaps);
  return std::make_shared<SimplexDiffeo>(std::move(local), std::move(box), disp);
}

// ---------------------------------------------------------------------------

double estimate_c_sigma(const TriangulationState& state, SimplexId sigma,
                        const PipelineConfig& config) {
  const TubularChart chart = make_chart(state, sigma);
  const StarSpec& star = state.star_of_barycenter(sigma);
  const int l = chart.dim();
  const int k = chart.normal_dim();
  const int density = config.containment_density;
  const auto ts = simplex_interior_grid(l, density);
  const auto dirs = unit_directions(k, k == 2 ? density : 2 * density);
  std::vector<double> rhos;
  for (const Vec& t : ts) rhos.push_back(bump::rho_l(t));

  auto passes = [&](double c) {
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (const Vec& d : dirs)
        if (!star_or_exterior(state, chart.eval(ts[i], Vec(c * rhos[i] * d)), star)) return false;
    return true;
  };

  constexpr double kMin = 1e-8;
  constexpr double kMax = 1024.0;
  double lo = 0.0;
  double hi = 0.0;
  if (passes(1.0)) {
    lo = 1.0;
    while (lo < kMax && passes(2.0 * lo)) lo *= 2.0;
    if (lo >= kMax) return lo / 2.0;
    hi = 2.0 * lo;
  } else {
    hi = 1.0;
    double c = 0.5;
    while (c >= kMin && !passes(c)) {
      hi = c;
      c *= 0.5;
    }
    if (c < kMin)
      throw DegenerateGeometryError("no containment constant above 1e-8 for simplex " +
                                    std::to_string(sigma));
    lo = c;
  }
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? lo : hi) = mid;
  }
  return lo / 2.0;
}

double initial_epsilon(const TriangulationState& state, double c_sigma,
                       const PipelineConfig& config) {
  return std::min({c_sigma, 1.0 / (2.0 * bump::c_beta()), config.epsilon_max,
                   0.1 * state.mesh_scale()});
}

SampledValue sample_regular_value(const TriangulationState& state, SimplexId sigma,
                                  const Verifier& verifier, double epsilon, double c_sigma,
                                  const PipelineConfig& config, Rng& rng, int shrinks) {
  const TubularChart chart = make_chart(state, sigma);
  const int k = chart.normal_dim();
  const double radius = epsilon * epsilon;
  SimplexStatus last;
  for (int attempt = 0; attempt < config.max_retries; ++attempt) {
    Vec v(k);
    do {
      for (int a = 0; a < k; ++a) v[a] = rng.uniform(-radius, radius);
    } while (!(v.norm() < radius));

    LocalPerturbation pert{chart, c_sigma, epsilon, v, attempt, shrinks, config.warp_rate};
    auto link = extend_to_ambient(state, build_local_diffeo(std::move(pert)));
    const TriangulationState cand = state.with_links({link});
    last = verifier.verify_simplex(cand, sigma);
    if (!last.pass) continue;
    if (config.preserve_coverage && !verifier.coverage_preserved(state, cand, link->support_box()))
      continue;
    return {v, attempt, link};
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "simplex %d: no acceptable regular value in %d candidates "
                "(last candidate: %d records, min margin %.3g)",
                sigma, config.max_retries, last.records, last.min_margin);
  throw SamplingError(buf, sigma, config.max_retries);
}

SampledValue sample_regular_value(const TriangulationState& state, SimplexId sigma,
                                  const SmoothMap& h, double epsilon, double c_sigma,
                                  const PipelineConfig& config, Rng& rng) {
  return sample_regular_value(state, sigma, Verifier(h, config), epsilon, c_sigma, config, rng);
}

// ---------------------------------------------------------------------------

std::string to_string(const PerturbationLog& log) {
  char buf[256];
  if (!log.perturbed) {
    std::snprintf(buf, sizeof buf, "simplex %d l=%d already transverse", log.simplex, log.dim);
  } else {
    std::snprintf(buf, sizeof buf,
                  "simplex %d l=%d c_sigma=%.6g epsilon=%.6g |v|=%.6g retries=%d shrinks=%d",
                  log.simplex, log.dim, log.c_sigma, log.epsilon, log.v_norm, log.retries,
                  log.shrinks);
  }
  return buf;
}

std::shared_ptr<const SimplexDiffeo> perturb_simplex(const TriangulationState& state,
                                                     SimplexId sigma, const Verifier& verifier,
                                                     const PipelineConfig& config,
                                                     PerturbationLog* log) {
  const double c = estimate_c_sigma(state, sigma, config);
  double eps = initial_epsilon(state, c, config);
  const int level = state.complex().simplex(sigma).dim();
  Rng rng(stream_seed(config.seed, level, sigma));
  for (int shrink = 0;; ++shrink) {
    try {
      SampledValue sv = sample_regular_value(state, sigma, verifier, eps, c, config, rng, shrink);
      if (log) {
        *log = {sigma, level, true, c, eps, sv.regular_value.norm(), sv.retries, shrink};
      }
      return sv.link;
    } catch (const EpsilonTooLarge& e) {
      if (shrink >= config.max_shrinks) throw;
      log_debug("simplex " + std::to_string(sigma) + ": " + e.what() + ", halving epsilon");
      eps *= 0.5;
    }
  }
}

LevelResult perturb_level(const TriangulationState& state, int level, const SmoothMap& h,
                          const PipelineConfig& config) {
  if (level < 0 || level >= state.ambient_dim())
    throw std::invalid_argument("perturb_level: level out of range");
  const Verifier verifier(h, config);
  Chain links;
  std::vector<PerturbationLog> logs;
  for (SimplexId sigma : state.complex().of_dim(level)) {
    PerturbationLog log;
    log.simplex = sigma;
    log.dim = level;
    try {
      if (!verifier.verify_simplex(state, sigma).pass) {
        links.push_back(perturb_simplex(state, sigma, verifier, config, &log));
      }
    } catch (const std::exception& e) {
      throw LevelError("level " + std::to_string(level) + ", simplex " + std::to_string(sigma) +
                           ": " + e.what(),
                       level, sigma);
    }
    if (log.perturbed)
      log_info(to_string(log));
    else
      log_debug(to_string(log));
    logs.push_back(log);
  }
  return {state.with_links(links), std::move(logs)};
}

PipelineResult make_transverse(const Mesh& mesh, const SmoothMap& h, const PipelineConfig& config) {
  config.validate();
  TriangulationState state(mesh);
  if (h.ambient_dim() != state.ambient_dim())
    throw std::invalid_argument("map and mesh live in different ambient dimensions");
  std::vector<PerturbationLog> logs;
  std::vector<std::string> failures;
  for (int l = 0; l < state.ambient_dim(); ++l) {
    try {
      LevelResult r = perturb_level(state, l, h, config);
      state = std::move(r.state);
      logs.insert(logs.end(), r.logs.begin(), r.logs.end());
    } catch (const LevelError& e) {
      log_error(e.what());
      failures.emplace_back(e.what());
    }
  }
  TransversalityReport report = verify_triangulation(state, h, config);
  auto result = std::make_shared<PipelineResult>(
      PipelineResult{state, std::move(report), std::move(logs), std::move(failures)});
  if (!result->failures.empty() || !result->report.pass) {
    std::string what = "pipeline did not reach transversality";
    if (!result->failures.empty()) what += ": " + result->failures.front();
    throw PipelineError(what, result);
  }
  return *result;
}

}  // namespace transverse

#pragma once

#include <random>
#include <vector>

#include "transverse/simplicial.hpp"

namespace testing {

using transverse::Box;
using transverse::Mat;
using transverse::Vec;

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Box box(double lo, double hi, int m) {
  Box b;
  b.lo = Vec::Constant(m, lo);
  b.hi = Vec::Constant(m, hi);
  return b;
}

struct Sampler {
  std::mt19937_64 gen;
  explicit Sampler(std::uint64_t seed = 12345) : gen(seed) {}
  double uniform(double a = 0.0, double b = 1.0) {
    return std::uniform_real_distribution<double>(a, b)(gen);
  }
  Vec in_box(const Box& b) {
    Vec x(b.lo.size());
    for (int i = 0; i < x.size(); ++i) x[i] = uniform(b.lo[i], b.hi[i]);
    return x;
  }
  /// Uniform on the open standard l-simplex.
  Vec in_simplex(int l, double margin = 0.0) {
    while (true) {
      Vec t(l);
      double s = 0.0;
      for (int i = 0; i < l; ++i) s += (t[i] = uniform());
      if (s < 1.0 - margin && (l == 0 || t.minCoeff() > margin)) return t;
    }
  }
};

}  // namespace testing

#include "transverse/perturb.hpp"

namespace testing {

/// ψ_σ with a regular value of norm `fraction` ε² in a seeded random direction.
inline std::shared_ptr<const transverse::SimplexDiffeo> make_link(
    const transverse::TriangulationState& state, transverse::SimplexId sigma, double rate,
    double fraction = 0.9, std::uint64_t seed = 1) {
  using namespace transverse;
  PipelineConfig cfg;
  const double c = estimate_c_sigma(state, sigma, cfg);
  const double eps = initial_epsilon(state, c, cfg);
  TubularChart chart = make_chart(state, sigma);
  Sampler rng(seed);
  Vec dir(chart.normal_dim());
  for (int a = 0; a < dir.size(); ++a) dir[a] = rng.uniform(-1, 1);
  dir.normalize();
  LocalPerturbation p{chart, c, eps, fraction * eps * eps * dir, 0, 0, rate};
  return extend_to_ambient(state, build_local_diffeo(std::move(p)));
}

/// State with vertex links on `vertices` and then edge links on `edges`.
inline transverse::TriangulationState perturbed_state(const transverse::Mesh& mesh,
                                                      const std::vector<int>& vertex_ids,
                                                      const std::vector<int>& edge_ids,
                                                      double rate = 0.0733) {
  using namespace transverse;
  TriangulationState s(mesh);
  Chain level;
  for (int v : vertex_ids) level.push_back(make_link(s, v, rate, 0.9, 100 + v));
  s = s.with_links(level);
  level.clear();
  for (int e : edge_ids) level.push_back(make_link(s, e, rate, 0.9, 200 + e));
  return s.with_links(level);
}

}  // namespace testing

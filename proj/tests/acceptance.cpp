#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "support.hpp"
#include "transverse/bump.hpp"
#include "transverse/io.hpp"
#include "transverse/log.hpp"
#include "transverse/scenario.hpp"

using namespace transverse;
namespace fs = std::filesystem;

namespace {

// e^{-1} and e^{-4} to 22 digits (mpmath, 50-digit precision)
constexpr double kE1 = 0.3678794411714423215955;
constexpr double kE4 = 0.01831563888873418029372;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail] " << what << "; ";
    }
  }
  template <class T>
  void note(const std::string& key, const T& value) {
    detail << key << "=" << value << " ";
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Scenario scenario(const std::string& name) {
  return load_scenario(std::string(TRANSVERSE_SCENARIOS) + "/" + name + ".scn");
}

PipelineResult run_pipeline(const Scenario& sc) {
  try {
    return make_transverse(sc.build_mesh(), sc.h(), sc.pipeline);
  } catch (const PipelineError& e) {
    return e.result();
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Vec> support_points(const LocalPerturbation& p, int count, std::uint64_t seed) {
  testing::Sampler rng(seed);
  std::vector<Vec> out;
  const int l = p.dim(), k = p.normal_dim();
  while (static_cast<int>(out.size()) < count) {
    Vec t = rng.in_simplex(l, 0.05);
    Vec v(k);
    for (int a = 0; a < k; ++a) v[a] = rng.uniform(-1, 1);
    if (v.norm() >= 1) continue;
    Vec tv(l + k);
    tv.head(l) = t;
    tv.tail(k) = v * p.epsilon * bump::rho_l(t);
    out.push_back(tv);
  }
  return out;
}

Verdict scenario_a() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  Scenario sc = scenario("circle_grid");
  TriangulationState base(sc.build_mesh());
  auto before = verify_triangulation(base, sc.h(), sc.pipeline);
  v.note("verify_only_skeleton_hits", before.skeleton_hits);
  v.require(!before.pass && before.skeleton_hits >= 4, "verify-only should fail with >= 4 skeleton hits");

  PipelineResult r = run_pipeline(sc);
  v.note("links", r.state.chain().size());
  v.note("min_vertex_distance", r.report.min_vertex_distance);
  v.note("min_margin", r.report.min_margin);
  v.require(r.report.pass, "verify after make_transverse");
  v.require(r.report.min_vertex_distance > 1e-7, "vertex distance > 1e-7");
  v.require(r.report.skeleton_hits == 0 && r.report.tangent_count == 0, "no skeleton hits or tangencies");
  for (const auto& rec : r.report.records)
    if (rec.dim == 1) v.require(rec.margin > 1e-6, "edge crossing margin > 1e-6");
  int odd = 0;
  for (SimplexId tri : r.state.complex().of_dim(2))
    if (edge_crossing_count(r.report, r.state.complex(), tri) % 2) ++odd;
  v.note("odd_parity_triangles", odd);
  v.require(odd == 0, "even crossing parity per triangle");
  const double secs = seconds_since(t0);
  v.note("seconds", secs);
  v.require(secs < 30, "runtime < 30 s");
  return v;
}

Verdict scenario_b() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  Scenario sc = scenario("line_along_edge");
  PipelineResult r = run_pipeline(sc);
  int low = 0, bad_tri = 0;
  for (const auto& rec : r.report.records) {
    if (rec.dim <= 1) ++low;
    else if (rec.dim == 2 && rec.classification != Classification::kTransverse) ++bad_tri;
  }
  v.note("links", r.state.chain().size());
  v.note("records_on_1_skeleton", low);
  v.note("non_transverse_triangle_records", bad_tri);
  for (const auto& f : r.failures) v.note("failure", "\"" + f + "\"");
  v.require(r.failures.empty(), "every level succeeds");
  v.require(low == 0, "no intersections with the 0- and 1-skeleton");
  v.require(bad_tri == 0, "2-simplex crossings pass the rank test");
  const double secs = seconds_since(t0);
  v.note("seconds", secs);
  v.require(secs < 60, "runtime < 60 s");
  return v;
}

Verdict scenario_c() {
  Verdict v;
  Scenario sc = scenario("point_corner");
  PipelineResult r = run_pipeline(sc);
  const Vec x = sc.h().eval(Vec(0));
  const Vec p = r.state.eta_inverse(x);
  auto loc = r.state.base_locator().locate(p);
  v.note("links", r.state.chain().size());
  v.require(loc.has_value(), "point lies in |K|");
  if (loc) {
    v.note("carrier_dim", r.state.complex().simplex(loc->carrier).dim());
    v.note("margin", loc->margin());
    v.require(loc->interior && r.state.complex().simplex(loc->carrier).dim() == 2,
              "strictly interior to a top simplex");
    v.require(loc->margin() > 1e-9, "barycentric margin > 1e-9");
  }
  v.require(r.report.pass, "verify passes");
  return v;
}

Verdict bumps() {
  Verdict v;
  v.note("rho1_err", std::abs(bump::rho(1.0) - kE1));
  v.note("rho_mid_err", std::abs(bump::rho_l(testing::vec({0.5})) - kE4));
  v.require(std::abs(bump::rho(1.0) - kE1) < 1e-12, "rho(1) = e^-1");
  v.require(std::abs(bump::rho_l(testing::vec({0.5})) - kE4) < 1e-12, "rho_1(1/2) = e^-4");

  testing::Sampler rng(4);
  int sampled = 0, nonzero = 0;
  while (sampled < 1000) {
    const int l = 1 + sampled % 3;
    Vec t(l);
    if (sampled % 2 == 0) {
      // on a facet of the closed simplex
      t = rng.in_simplex(l);
      const int face = static_cast<int>(rng.uniform(0, l + 1));
      if (face < l) {
        t[face] = 0.0;
      } else {
        t /= t.sum();
      }
    } else {
      for (int a = 0; a < l; ++a) t[a] = rng.uniform(-1, 2);
      if (t.minCoeff() > 0 && t.sum() < 1) continue;
    }
    ++sampled;
    const bool zero = bump::rho_l(t) == 0.0 && bump::rho_l_grad(t).isZero(0.0) &&
                      bump::rho_l_hess(t).isZero(0.0) && bump::warp_or_zero(t) == 0.0;
    if (!zero) ++nonzero;
  }
  v.note("boundary_points", sampled);
  v.require(nonzero == 0, "bump and derivatives vanish off the open simplex");
  for (int k = 1; k <= bump::kMaxDerivative; ++k)
    for (double r : {0.0, -1.0}) v.require(bump::rho_deriv(r, k) == 0.0, "rho derivatives vanish at r <= 0");

  bool plateau = true;
  for (int i = 0; i <= 100; ++i) {
    const double lo = 0.5 * i / 100.0, hi = 1.0 + i / 10.0;
    plateau = plateau && bump::beta(lo) == 1.0 && bump::beta(hi) == 0.0 &&
              bump::beta_deriv(lo) == 0.0 && bump::beta_deriv(hi) == 0.0;
  }
  v.require(plateau, "beta = 1 on [0,1/2] and 0 on [1,inf)");
  return v;
}

Verdict jacobians() {
  Verdict v;
  Mesh m2 = grid_triangulation(testing::box(0, 1, 2), 1);
  Mesh m3 = grid_triangulation(testing::box(0, 1, 3), 1);
  TriangulationState s2(m2), s3(m3);
  struct Case {
    const char* name;
    const TriangulationState* s;
    SimplexId sigma;
    double rate;
    double step;
  };
  // at rate 1 an edge section is below 1e-20, so the slow rate is what exercises the formula
  const double slow = PipelineConfig::kMinWarpRate;
  const std::vector<Case> cases = {
      {"vertex_m2", &s2, s2.complex().of_dim(0)[0], 1.0, 1e-6},
      {"edge_m2", &s2, s2.complex().of_dim(1)[0], 1.0, 1e-7},
      {"edge_m2_slow", &s2, s2.complex().of_dim(1)[0], slow, 1e-7},
      {"edge_m3_slow", &s3, s3.complex().of_dim(1)[0], slow, 1e-7},
      {"triangle_m3_slow", &s3, s3.complex().of_dim(2)[0], slow, 1e-9},
  };
  for (const auto& c : cases) {
    auto link = testing::make_link(*c.s, c.sigma, c.rate);
    const LocalDiffeo& psi = link->local();
    const auto pts = support_points(psi.perturbation(), 100, 11);
    auto f = [&](const Vec& x) { return psi.eval(x); };
    auto j = [&](const Vec& x) { return psi.jacobian(x); };
    const double err = fd_jacobian_check(f, j, pts, c.step);
    double min_det = std::numeric_limits<double>::infinity();
    for (const Vec& x : pts) min_det = std::min(min_det, psi.jacobian(x).determinant());
    auto corrupted = [&](const Vec& x) {
      Mat a = psi.jacobian(x);
      a(a.rows() - 1, 0) += 1e-3;
      return a;
    };
    const double control = fd_jacobian_check(f, corrupted, pts, c.step);
    v.note(std::string(c.name) + "_rel_err", err);
    v.note(std::string(c.name) + "_min_det", min_det);
    v.note(std::string(c.name) + "_control_err", control);
    v.require(err < 1e-6, std::string(c.name) + " analytic Jacobian matches");
    v.require(min_det > 0, std::string(c.name) + " det > 0");
    v.require(control > 1e-6, std::string(c.name) + " corrupted Jacobian detected");
  }
  return v;
}

Verdict diffeos() {
  Verdict v;
  Scenario sc = scenario("circle_grid");
  PipelineResult r = run_pipeline(sc);
  const Chain& chain = r.state.chain();
  v.require(chain.size() >= 2, "at least two same-level links");
  if (chain.size() < 2) return v;
  const auto& a = *chain[0];
  const auto& b = *chain[1];
  testing::Sampler rng(21);
  Box world = r.state.base().bounding_box();

  int outside = 0, moved = 0;
  while (outside < 100) {
    Vec x = rng.in_box(world);
    if (a.support_box().contains(x)) continue;
    ++outside;
    if (a.apply(x) != x || a.invert(x) != x) ++moved;
  }
  v.note("moved_outside_support", moved);
  v.require(moved == 0, "identity outside the support box");

  auto ld = dynamic_cast<const SimplexDiffeo*>(&a);
  double round = 0.0;
  for (const Vec& tv : support_points(ld->local().perturbation(), 100, 22)) {
    const Vec x = ld->chart().eval(tv);
    round = std::max(round, (a.invert(a.apply(x)) - x).norm());
  }
  v.note("round_trip", round);
  v.require(round < 1e-9, "Newton round trip < 1e-9");

  double commute = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Box& box = (i % 3 == 0) ? a.support_box() : (i % 3 == 1) ? b.support_box() : world;
    const Vec x = rng.in_box(box);
    commute = std::max(commute, (a.apply(b.apply(x)) - b.apply(a.apply(x))).norm());
  }
  v.note("commute_err", commute);
  v.require(commute <= 1e-12, "same-level links commute");
  return v;
}

// Points on |K_{l-1}|: every vertex plus uniform samples on lower simplices.
std::vector<std::pair<SimplexId, Vec>> lower_skeleton_samples(const SimplicialComplex& k, int l,
                                                              testing::Sampler& rng) {
  std::vector<std::pair<SimplexId, Vec>> out;
  std::vector<SimplexId> lower;
  for (int d = 0; d < l; ++d)
    for (SimplexId id : k.of_dim(d)) lower.push_back(id);
  if (lower.empty()) return out;
  for (SimplexId id : k.of_dim(0)) out.push_back({id, Vec(0)});
  while (out.size() < 1000) {
    const SimplexId id = lower[static_cast<std::size_t>(rng.uniform(0, lower.size())) % lower.size()];
    out.push_back({id, rng.in_simplex(k.simplex(id).dim())});
  }
  return out;
}

void check_levels(Verdict& v, const std::string& label, const Mesh& mesh,
                  const std::function<TriangulationState(const TriangulationState&, int)>& step) {
  TriangulationState state(mesh);
  testing::Sampler rng(31);
  const int m = state.ambient_dim();
  for (int l = 0; l < m; ++l) {
    TriangulationState next = step(state, l);
    const auto pts = lower_skeleton_samples(state.complex(), l, rng);
    double worst = 0.0;
    for (const auto& [id, t] : pts)
      worst = std::max(worst, (next.simplex_point(id, t) - state.simplex_point(id, t)).norm());
    v.note(label + "_level" + std::to_string(l) + "_links", next.chain().size() - state.chain().size());
    v.note(label + "_level" + std::to_string(l) + "_max_move", pts.empty() ? 0.0 : worst);
    v.require(worst < 1e-12, label + " level " + std::to_string(l) + " keeps K_{l-1} fixed");
    state = next;
  }
}

Verdict skeletons() {
  Verdict v;
  for (const char* name : {"circle_grid", "tangent_parabola", "line_through_vertex"}) {
    Scenario sc = scenario(name);
    check_levels(v, name, sc.build_mesh(), [&](const TriangulationState& s, int l) {
      return perturb_level(s, l, sc.h(), sc.pipeline).state;
    });
  }
  // every simplex of every level perturbed, regardless of the map
  check_levels(v, "forced_m3", grid_triangulation(testing::box(0, 1, 3), 1),
               [](const TriangulationState& s, int l) {
                 Chain level;
                 for (SimplexId id : s.complex().of_dim(l))
                   level.push_back(testing::make_link(s, id, PipelineConfig::kMinWarpRate, 0.9, 500 + id));
                 return s.with_links(level);
               });
  return v;
}

Verdict decay() {
  Verdict v;
  TriangulationState s2(grid_triangulation(testing::box(0, 1, 2), 1));
  TriangulationState s3(grid_triangulation(testing::box(0, 1, 3), 1));
  const std::vector<std::pair<std::string, std::shared_ptr<const SimplexDiffeo>>> links = {
      {"edge_m2", testing::make_link(s2, s2.complex().of_dim(1)[0], 1.0)},
      {"edge_m2_slow", testing::make_link(s2, s2.complex().of_dim(1)[0], PipelineConfig::kMinWarpRate)},
      {"edge_m3_slow", testing::make_link(s3, s3.complex().of_dim(1)[0], PipelineConfig::kMinWarpRate)},
  };
  for (const auto& [name, link] : links) {
    DecayTable table = boundary_decay_check(link->local().perturbation(), 3, 10);
    int failing = 0;
    double worst = 0.0;
    for (const auto& e : table.entries) {
      if (!e.pass) ++failing;
      if (e.initial > 0) worst = std::max(worst, e.final / e.initial);
    }
    v.note(name + "_entries", table.entries.size());
    v.note(name + "_worst_ratio", worst);
    v.require(table.entries.size() == 16 && failing == 0, name + " decays for all i, j <= 3");
  }
  return v;
}

Verdict determinism() {
  Verdict v;
  for (const char* name : {"circle_grid", "tangent_parabola", "point_corner"}) {
    Scenario sc = scenario(name);
    const fs::path root = fs::temp_directory_path() / ("transverse_acceptance_" + std::string(name));
    fs::remove_all(root);
    run_scenario(sc, (root / "a").string(), false);
    run_scenario(sc, (root / "b").string(), false);
    const std::string a = slurp(root / "a" / "chain.txt");
    const std::string b = slurp(root / "b" / "chain.txt");
    v.note(std::string(name) + "_bytes", a.size());
    v.require(!a.empty() && a == b, std::string(name) + " chain dumps identical");
    fs::remove_all(root);
  }
  return v;
}

long factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

Verdict combinatorics() {
  Verdict v;
  for (int l = 0; l <= 3; ++l) {
    std::vector<Vec> coords;
    std::vector<int> top;
    for (int i = 0; i <= l; ++i) {
      Vec p = Vec::Zero(std::max(l, 1));
      if (i > 0) p[i - 1] = 1.0;
      coords.push_back(p);
      top.push_back(i);
    }
    auto k = SimplicialComplex::build(l + 1, {top});
    GeometricRealization r(std::max(l, 1), coords);
    Subdivision sd = barycentric_subdivision(k, r);
    const long tops = sd.complex.count(l);
    v.note("sd_top_l" + std::to_string(l), tops);
    v.require(tops == factorial(l + 1), "sd of an " + std::to_string(l) + "-simplex has (l+1)! tops");
  }
  for (int m : {2, 3}) {
    Mesh g = grid_triangulation(testing::box(0, 1, m), 4);
    Subdivision sd = barycentric_subdivision(g.complex, g.realization);
    int overlaps = 0;
    for (int l = 0; l <= m; ++l) {
      std::vector<int> owner(sd.complex.size(), -1);
      for (SimplexId s : g.complex.of_dim(l))
        for (SimplexId t : sd.complex.star(sd.barycenter_vertex[s])) {
          if (owner[t] >= 0) ++overlaps;
          owner[t] = s;
        }
    }
    v.note("grid_m" + std::to_string(m) + "_star_overlaps", overlaps);
    v.require(overlaps == 0, "same-dimension stars disjoint in the m=" + std::to_string(m) + " grid");
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  if (std::getenv("TRANSVERSE_LOG_LEVEL") == nullptr) set_log_level(LogLevel::kError);

  const std::map<int, std::pair<const char*, std::function<Verdict()>>> criteria = {
      {1, {"circle scenario", scenario_a}},   {2, {"line along edge", scenario_b}},
      {3, {"point on vertex", scenario_c}},   {4, {"bump suite", bumps}},
      {5, {"jacobian suite", jacobians}},     {6, {"diffeomorphism suite", diffeos}},
      {7, {"skeleton preservation", skeletons}}, {8, {"decay suite", decay}},
      {9, {"determinism", determinism}},      {10, {"combinatorial oracles", combinatorics}},
  };
  bool all = true;
  for (const auto& [n, entry] : criteria) {
    if (only != 0 && n != only) continue;
    Verdict v;
    try {
      v = entry.second();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %d (%s): %s  %s\n", n, entry.first, v.pass ? "PASS" : "FAIL",
                v.detail.str().c_str());
    all = all && v.pass;
  }
  return all ? 0 : 1;
}

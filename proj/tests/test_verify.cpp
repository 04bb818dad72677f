#include <doctest.h>

#include <cmath>
#include <set>

#include "support.hpp"
#include "transverse/perturb.hpp"
#include "transverse/verify.hpp"

using namespace transverse;
using testing::vec;

namespace {
// σ_min of [u|w] for unit u, w at 30°: sqrt(1 - cos 30°)
constexpr double kThirtyDegrees = 0.3660254037844386;
// columns e1, e2 and (1,1,1)/√3
constexpr double kDiagonal3 = 0.4283729905961322;
}  // namespace

TEST_SUITE("verify") {

TEST_CASE("transversality margin oracles") {
  Mat dh(2, 1), df(2, 1);
  dh << 1, 0;
  df << 0, 3;
  CHECK(transversality_margin(dh, df) == doctest::Approx(1.0).epsilon(1e-15));
  df << std::cos(M_PI / 6), std::sin(M_PI / 6);
  CHECK(transversality_margin(dh, df) == doctest::Approx(kThirtyDegrees).epsilon(1e-12));
  df << -2, 0;
  CHECK(transversality_margin(dh, df) < 1e-15);
  CHECK_FALSE(check_transverse_at(dh, df, 1e-6));
  Mat a(3, 2), b(3, 1);
  a << 1, 0, 0, 1, 0, 0;
  b << 5, 5, 5;
  CHECK(transversality_margin(a, b) == doctest::Approx(kDiagonal3).epsilon(1e-12));
  // too few columns to span
  CHECK(transversality_margin(Mat(3, 1), Mat(3, 1)) == 0.0);
}

TEST_CASE("circle on the grid: vertex hits and diagonal crossings") {
  PipelineConfig cfg;
  Mesh m = grid_triangulation(testing::box(-2, 2, 2), 4);
  TriangulationState s(m);
  auto report = verify_triangulation(s, SmoothMap::circle(vec({0, 0}), 1.0), cfg);
  CHECK_FALSE(report.pass);
  CHECK(report.skeleton_hits == 4);
  CHECK(report.transverse_count == 2);
  CHECK(report.tangent_count == 0);
  std::set<std::pair<long, long>> where;
  for (const auto& r : report.records) {
    if (r.classification == Classification::kTransverse) {
      CHECK(std::abs(std::abs(r.point[0]) - M_SQRT1_2) < 1e-9);
      CHECK(std::abs(r.point[0] - r.point[1]) < 1e-9);
      CHECK(r.margin == doctest::Approx(1.0).epsilon(1e-9));
    } else {
      where.insert({std::lround(r.point[0]), std::lround(r.point[1])});
      CHECK(r.dim == 0);
    }
  }
  CHECK(where == std::set<std::pair<long, long>>{{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
  CHECK(report.min_vertex_distance < 1e-12);
}

TEST_CASE("vertical line crosses three edges of a square") {
  PipelineConfig cfg;
  TriangulationState s(grid_triangulation(testing::box(0, 1, 2), 1));
  auto h = SmoothMap::line(vec({0.4, 0}), vec({0, 1}), -0.5, 1.5);
  auto report = verify_triangulation(s, h, cfg);
  CHECK(report.pass);
  REQUIRE(report.records.size() == 3);
  for (const auto& r : report.records) {
    CHECK(r.dim == 1);
    CHECK(r.point[0] == doctest::Approx(0.4));
    CHECK((h.eval(r.y) - s.simplex_point(r.simplex, r.t)).norm() < 1e-10);
    CHECK(r.residual < cfg.residual_tol);
  }
  CHECK(report.records_on(s.complex().id_of({0, 3})).size() == 1);
  // triangle boundary is crossed an even number of times
  for (SimplexId tri : s.complex().of_dim(2)) CHECK(edge_crossing_count(report, s.complex(), tri) == 2);
}

TEST_CASE("segment inside an edge is tangent") {
  PipelineConfig cfg;
  TriangulationState s(grid_triangulation(testing::box(0, 2, 2), 2));
  auto h = SmoothMap::line(vec({0.5, 0}), vec({1, 0}), -0.2, 0.2);
  const SimplexId e = s.complex().id_of({0, 1});
  std::vector<IntersectionRecord> records;
  auto st = Verifier(h, cfg).verify_simplex(s, e, &records);
  CHECK_FALSE(st.pass);
  REQUIRE_FALSE(records.empty());
  CHECK(st.records == static_cast<int>(records.size()));
  for (const auto& r : records) CHECK(r.classification == Classification::kTangent);
}

TEST_CASE("vertex distance") {
  PipelineConfig cfg;
  TriangulationState s(grid_triangulation(testing::box(0, 1, 2), 1));
  Verifier ver(SmoothMap::point(vec({0.3, 0.4})), cfg);
  CHECK(ver.vertex_distance(s, 0) == doctest::Approx(0.5).epsilon(1e-12));
  Verifier line(SmoothMap::line(vec({0, 0.2}), vec({1, 0}), -1, 2), cfg);
  Vec y;
  CHECK(line.vertex_distance(s, 3, &y) == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("no duplicate records") {
  PipelineConfig cfg;
  cfg.verify_density = 512;
  TriangulationState s(grid_triangulation(testing::box(-2, 2, 2), 4));
  auto report = verify_triangulation(s, SmoothMap::circle(vec({0.1, 0.05}), 1.3), cfg);
  for (std::size_t i = 0; i < report.records.size(); ++i)
    for (std::size_t j = i + 1; j < report.records.size(); ++j)
      if (report.records[i].simplex == report.records[j].simplex)
        CHECK((report.records[i].point - report.records[j].point).norm() > cfg.dedupe_radius);
  for (SimplexId tri : s.complex().of_dim(2)) CHECK(edge_crossing_count(report, s.complex(), tri) % 2 == 0);
}

TEST_CASE("top simplices only need an embedding") {
  PipelineConfig cfg;
  TriangulationState s(grid_triangulation(testing::box(0, 1, 2), 1));
  auto h = SmoothMap::point(vec({0.7, 0.2}));
  for (SimplexId tri : s.complex().of_dim(2)) CHECK(Verifier(h, cfg).verify_simplex(s, tri).pass);
}

TEST_CASE("finite difference checker") {
  Mat a(2, 2);
  a << 1, 2, -3, 0.5;
  auto f = [&](const Vec& x) { return Vec(a * x); };
  auto j = [&](const Vec&) { return a; };
  std::vector<Vec> pts = {vec({0, 0}), vec({1, -2}), vec({100, 3})};
  CHECK(fd_jacobian_check(f, j, pts) < 1e-8);
  auto wrong = [&](const Vec&) { return Mat(a.transpose()); };
  CHECK(fd_jacobian_check(f, wrong, pts) > 0.1);
}

TEST_CASE("boundary decay of an edge perturbation") {
  TriangulationState s(grid_triangulation(testing::box(0, 1, 2), 1));
  for (double rate : {1.0, PipelineConfig::kMinWarpRate}) {
    auto link = testing::make_link(s, s.complex().id_of({0, 1}), rate);
    DecayTable table = boundary_decay_check(link->local().perturbation());
    CHECK(table.pass());
    CHECK(table.entries.size() == 16);
    for (const auto& e : table.entries) CHECK(e.final <= e.initial);
  }
  auto vertex = testing::make_link(s, 0, 1.0);
  CHECK_THROWS(boundary_decay_check(vertex->local().perturbation()));
}

TEST_CASE("coverage") {
  PipelineConfig cfg;
  TriangulationState s(grid_triangulation(testing::box(0, 1, 2), 2));
  Verifier ver(SmoothMap::circle(vec({0.5, 0.5}), 0.3), cfg);
  auto link = testing::make_link(s, 4, 1.0);
  CHECK(ver.coverage_preserved(s, s.with_links({link}), link->support_box()));
  CHECK(ver.coverage_preserved(s, s, s.base().bounding_box()));
}

TEST_CASE("perturbed vertex makes the circle transverse") {
  PipelineConfig cfg;
  Mesh m = grid_triangulation(testing::box(-2, 2, 2), 4);
  auto h = SmoothMap::circle(vec({0, 0}), 1.0);
  auto r = make_transverse(m, h, cfg);
  CHECK(r.report.pass);
  CHECK(r.report.skeleton_hits == 0);
  CHECK(r.report.tangent_count == 0);
  CHECK(r.report.min_vertex_distance > 0);
  for (SimplexId tri : r.state.complex().of_dim(2))
    CHECK(edge_crossing_count(r.report, r.state.complex(), tri) % 2 == 0);
}

}  // TEST_SUITE

#include <doctest.h>

#include <algorithm>
#include <set>

#include "support.hpp"
#include "transverse/simplicial.hpp"

using namespace transverse;
using testing::vec;

namespace {

Mesh single_simplex(int l) {
  std::vector<Vec> coords;
  for (int v = 0; v <= l; ++v) {
    Vec p = Vec::Zero(std::max(l, 1));
    if (v > 0) p[v - 1] = 1.0;
    coords.push_back(p);
  }
  std::vector<int> top(l + 1);
  for (int v = 0; v <= l; ++v) top[v] = v;
  return {SimplicialComplex::build(l + 1, {top}), GeometricRealization(std::max(l, 1), coords)};
}

long factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

}  // namespace

TEST_SUITE("simplicial") {

TEST_CASE("face closure counts") {
  auto tri = SimplicialComplex::build(3, {{0, 1, 2}});
  CHECK(tri.count(0) == 3);
  CHECK(tri.count(1) == 3);
  CHECK(tri.count(2) == 1);
  CHECK(tri.dim() == 2);

  auto edge = SimplicialComplex::build(2, {{0, 1}});
  CHECK(edge.count(0) == 2);
  CHECK(edge.count(1) == 1);

  auto two = SimplicialComplex::build(4, {{0, 1, 2}, {1, 2, 3}});
  CHECK(two.count(0) == 4);
  CHECK(two.count(1) == 5);
  CHECK(two.count(2) == 2);

  for (SimplexId s = 0; s < two.size(); ++s)
    for (SimplexId f : two.faces(s)) CHECK(two.simplex(s).contains(two.simplex(f)));
}

TEST_CASE("bad input is rejected") {
  CHECK_THROWS_AS(SimplicialComplex::build(3, {{0, 1, 2}, {0, 1, 2}}), ComplexError);
  CHECK_THROWS_AS(SimplicialComplex::build(3, {{0, 1, 5}}), ComplexError);
  CHECK_THROWS_AS(SimplicialComplex::build(3, {{0, 0, 1}}), ComplexError);
  CHECK_THROWS_AS(SimplicialComplex::build(4, {{0, 1, 2}}), ComplexError);
}

TEST_CASE("skeleton") {
  auto tri = SimplicialComplex::build(3, {{0, 1, 2}});
  auto s0 = tri.skeleton(0);
  CHECK(s0.count(0) == 3);
  CHECK(s0.size() == 3);
  auto s1 = tri.skeleton(1);
  CHECK(s1.count(1) == 3);
  CHECK(s1.size() == 6);
  auto s2 = tri.skeleton(2);
  CHECK(s2.size() == tri.size());
  for (SimplexId s = 0; s < s1.size(); ++s) CHECK(s1.simplex(s) == tri.simplex(s));
  CHECK_THROWS(tri.skeleton(3));
  CHECK_THROWS(tri.skeleton(-1));
}

TEST_CASE("star") {
  auto tri = SimplicialComplex::build(3, {{0, 1, 2}});
  CHECK(tri.star(tri.id_of({0, 1, 2})).size() == 1);
  std::set<std::vector<int>> got;
  for (SimplexId s : tri.star(tri.id_of({0}))) got.insert(tri.simplex(s).vertices);
  CHECK(got == std::set<std::vector<int>>{{0}, {0, 1}, {0, 2}, {0, 1, 2}});
  CHECK_THROWS(tri.star(99));
}

TEST_CASE("barycenters") {
  GeometricRealization r(2, {vec({0, 0}), vec({1, 0}), vec({0, 1})});
  CHECK(r.barycenter(Simplex{{0, 1}}).isApprox(vec({0.5, 0})));
  CHECK((r.barycenter(Simplex{{0, 1, 2}}) - vec({1.0 / 3, 1.0 / 3})).norm() < 1e-15);
  CHECK(r.barycenter(Simplex{{2}}) == vec({0, 1}));
}

TEST_CASE("barycentric subdivision of a single simplex") {
  for (int l = 0; l <= 3; ++l) {
    CAPTURE(l);
    Mesh m = single_simplex(l);
    Subdivision sd = barycentric_subdivision(m.complex, m.realization);
    CHECK(sd.complex.vertex_count() == m.complex.size());
    CHECK(sd.complex.count(l) == factorial(l + 1));
    if (l == 2) CHECK(sd.complex.vertex_count() == 7);
    for (SimplexId s = 0; s < m.complex.size(); ++s) {
      const Vec b = sd.realization.coord(sd.barycenter_vertex[s]);
      CHECK((b - m.realization.barycenter(m.complex.simplex(s))).norm() < 1e-15);
    }
  }
}

TEST_CASE("subdivision covers the same set") {
  Mesh m = grid_triangulation(testing::box(0, 1, 2), 2);
  Subdivision sd = barycentric_subdivision(m.complex, m.realization);
  testing::Sampler rng(7);
  for (int i = 0; i < 300; ++i) {
    Vec x = rng.in_box(testing::box(-0.2, 1.2, 2));
    const bool a = point_locate(m.complex, m.realization, x, 1e-12).has_value();
    const bool b = point_locate(sd.complex, sd.realization, x, 1e-12).has_value();
    CHECK(a == b);
  }
}

TEST_CASE("grid counts") {
  Mesh sq = grid_triangulation(testing::box(0, 1, 2), 1);
  CHECK(sq.complex.vertex_count() == 4);
  CHECK(sq.complex.count(2) == 2);
  for (int n = 1; n <= 4; ++n) {
    Mesh g = grid_triangulation(testing::box(0, 1, 2), n);
    CHECK(g.complex.count(2) == 2 * n * n);
    CHECK(g.complex.vertex_count() == (n + 1) * (n + 1));
    g.realization.validate(g.complex);
  }
  Mesh cube = grid_triangulation(testing::box(0, 1, 3), 1);
  CHECK(cube.complex.count(3) == 6);
  cube.realization.validate(cube.complex);
  CHECK_THROWS_AS(grid_triangulation(testing::box(0, 1, 4), 1), ComplexError);
  CHECK_THROWS(grid_triangulation(testing::box(0, 1, 2), 0));
}

TEST_CASE("point location matches a brute-force scan") {
  Mesh g = grid_triangulation(testing::box(-1, 1, 2), 3);
  PointLocator loc(g.complex, g.realization);
  testing::Sampler rng(11);
  auto brute = [&](const Vec& x) -> std::optional<SimplexId> {
    for (SimplexId s : g.complex.of_dim(2)) {
      const Simplex& sx = g.complex.simplex(s);
      Mat e = g.realization.edge_matrix(sx);
      Vec t = e.fullPivLu().solve(x - g.realization.coord(sx.vertices[0]));
      if (t.minCoeff() >= -1e-10 && t.sum() <= 1 + 1e-10) return s;
    }
    return std::nullopt;
  };
  for (int i = 0; i < 1000; ++i) {
    Vec x = rng.in_box(testing::box(-1.3, 1.3, 2));
    auto a = loc.locate(x);
    auto b = brute(x);
    REQUIRE(a.has_value() == b.has_value());
    if (a) {
      const Simplex& sa = g.complex.simplex(a->simplex);
      Mat e = g.realization.edge_matrix(sa);
      Vec t = e.fullPivLu().solve(x - g.realization.coord(sa.vertices[0]));
      CHECK(t.minCoeff() >= -1e-10);
      CHECK(t.sum() <= 1 + 1e-10);
    }
  }
  CHECK(loc.locate(vec({50, 50})) == std::nullopt);

  Mesh tri{SimplicialComplex::build(3, {{0, 1, 2}}),
           GeometricRealization(2, {vec({0, 0}), vec({1, 0}), vec({0, 1})})};
  auto at = point_locate(tri.complex, tri.realization, vec({1.0 / 3, 1.0 / 3}));
  REQUIRE(at.has_value());
  CHECK(at->interior);
  for (double w : at->barycentric) CHECK(w == doctest::Approx(1.0 / 3).epsilon(1e-12));
  auto edge = point_locate(tri.complex, tri.realization, vec({0.5, 0}));
  REQUIRE(edge.has_value());
  CHECK_FALSE(edge->interior);
  CHECK(tri.complex.simplex(edge->carrier).vertices == std::vector<int>{0, 1});
}

TEST_CASE("same-dimension barycenter stars are disjoint") {
  Mesh g = grid_triangulation(testing::box(0, 1, 2), 4);
  Subdivision sd = barycentric_subdivision(g.complex, g.realization);
  for (int l = 0; l <= 2; ++l) {
    std::set<SimplexId> seen;
    for (SimplexId s : g.complex.of_dim(l)) {
      for (SimplexId t : sd.complex.star(sd.barycenter_vertex[s])) {
        CHECK(seen.insert(t).second);
      }
    }
  }
}

TEST_CASE("realization validation") {
  GeometricRealization flat(2, {vec({0, 0}), vec({1, 0}), vec({2, 0})});
  CHECK_THROWS(flat.validate(SimplicialComplex::build(3, {{0, 1, 2}})));
  GeometricRealization overlap(2, {vec({0, 0}), vec({1, 0}), vec({0, 1}), vec({0.2, 0.2})});
  CHECK_THROWS(overlap.validate(SimplicialComplex::build(4, {{0, 1, 2}, {1, 2, 3}})));
}

}  // TEST_SUITE

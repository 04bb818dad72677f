#pragma once

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "transverse/linalg.hpp"

namespace transverse {

class ComplexError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using SimplexId = int;

/// Barycentric tolerance separating interior from boundary membership.
inline constexpr double kBarycentricTol = 1e-10;

/// A simplex as a strictly increasing list of vertex ids.
struct Simplex {
  std::vector<int> vertices;

  int dim() const { return static_cast<int>(vertices.size()) - 1; }
  bool contains(const Simplex& face) const;
  auto operator<=>(const Simplex& o) const {
    if (auto c = vertices.size() <=> o.vertices.size(); c != 0) return c;
    return vertices <=> o.vertices;
  }
  bool operator==(const Simplex&) const = default;
};

std::string to_string(const Simplex& s);

/// Abstract simplicial complex closed under faces.
///
/// Simplices are numbered in (dimension, lexicographic) order, so the ids of
/// a skeleton agree with the ids of the parent complex.
class SimplicialComplex {
 public:
  SimplicialComplex() = default;

  /// Builds the face closure of `top_simplices`. Rejects duplicates, invalid
  /// vertex ids, repeated vertices and vertices that appear in no simplex.
  static SimplicialComplex build(int vertex_count,
                                 const std::vector<std::vector<int>>& top_simplices);

  int vertex_count() const { return vertex_count_; }
  int dim() const { return dim_; }
  int size() const { return static_cast<int>(simplices_.size()); }
  const Simplex& simplex(SimplexId id) const { return simplices_.at(id); }
  const std::vector<Simplex>& simplices() const { return simplices_; }

  std::span<const SimplexId> of_dim(int l) const;
  int count(int l) const { return static_cast<int>(of_dim(l).size()); }

  std::optional<SimplexId> find(const std::vector<int>& vertices) const;
  SimplexId id_of(const std::vector<int>& vertices) const;

  /// Simplices that are not a proper face of another simplex.
  std::vector<SimplexId> maximal() const;
  /// Every σ' with σ ⊆ σ' (the simplices whose interiors make up St(σ, K)).
  std::vector<SimplexId> star(SimplexId sigma) const;
  /// Every face of σ, including σ itself.
  std::vector<SimplexId> faces(SimplexId sigma) const;
  /// Subcomplex of simplices of dimension ≤ l.
  SimplicialComplex skeleton(int l) const;

 private:
  int vertex_count_ = 0;
  int dim_ = -1;
  std::vector<Simplex> simplices_;
  std::vector<int> dim_offsets_;  // simplices of dim l are [offsets[l], offsets[l+1])
  std::vector<SimplexId> by_dim_;
  std::map<std::vector<int>, SimplexId> index_;
  std::vector<std::vector<SimplexId>> cofacets_;
};

/// Vertex coordinates in R^m.
class GeometricRealization {
 public:
  GeometricRealization() = default;
  GeometricRealization(int ambient_dim, std::vector<Vec> coords);

  int ambient_dim() const { return ambient_dim_; }
  int vertex_count() const { return static_cast<int>(coords_.size()); }
  const Vec& coord(int v) const { return coords_.at(v); }
  const std::vector<Vec>& coords() const { return coords_; }

  Vec barycenter(const Simplex& s) const;
  /// Columns p_i - p_0, the linear part of ι_σ.
  Mat edge_matrix(const Simplex& s) const;
  /// ι_σ(t) = p_0 + Σ t_i (p_i - p_0).
  Vec embed(const Simplex& s, const Vec& t) const;
  Box bounding_box(const Simplex& s) const;
  Box bounding_box() const;

  /// Throws unless every simplex is affinely independent and distinct maximal
  /// simplices have disjoint interiors (checked on interior samples).
  void validate(const SimplicialComplex& k) const;

 private:
  int ambient_dim_ = 0;
  std::vector<Vec> coords_;
};

Vec barycenter(const Simplex& s, const GeometricRealization& r);

struct Mesh {
  SimplicialComplex complex;
  GeometricRealization realization;
};

struct Subdivision {
  SimplicialComplex complex;
  GeometricRealization realization;
  /// barycenter_vertex[σ] is the vertex of sd K at b_σ.
  std::vector<int> barycenter_vertex;
};

/// sd K: one vertex per simplex of K, top simplices are full flags.
Subdivision barycentric_subdivision(const SimplicialComplex& k,
                                    const GeometricRealization& r);

/// Standard grid over `box`, each cell cut into m! simplices (Kuhn split).
Mesh grid_triangulation(const Box& box, int resolution);

struct Location {
  SimplexId simplex;                 // maximal simplex whose closure holds x
  std::vector<double> barycentric;   // w.r.t. its vertices
  SimplexId carrier;                 // the simplex whose interior holds x
  bool interior;                     // x in the open maximal simplex
  double margin() const;             // smallest barycentric coordinate
};

/// Point location over the maximal simplices of a realized complex, bucketed
/// on a uniform grid.
class PointLocator {
 public:
  PointLocator(const SimplicialComplex& k, const GeometricRealization& r);

  std::optional<Location> locate(const Vec& x, double tol = kBarycentricTol) const;

  /// Barycentric coordinates of x against maximal simplex `cell`, plus the
  /// distance from x to its affine hull.
  std::vector<double> barycentric(int cell, const Vec& x, double* offset = nullptr) const;
  SimplexId cell_simplex(int cell) const { return cells_[cell].id; }
  int cell_count() const { return static_cast<int>(cells_.size()); }
  int cell_of(SimplexId id) const;

 private:
  struct Cell {
    SimplexId id;
    Vec origin;
    Mat edges;
    Mat solve;  // left inverse of `edges`
    Box box;
  };
  const SimplicialComplex* complex_;
  std::vector<Cell> cells_;
  Box bounds_;
  std::vector<int> bins_per_axis_;
  std::vector<std::vector<int>> bins_;

  int bin_index(const Vec& x) const;
};

std::optional<Location> point_locate(const SimplicialComplex& k,
                                     const GeometricRealization& r, const Vec& x,
                                     double tol = kBarycentricTol);

}  // namespace transverse

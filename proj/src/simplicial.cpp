#include "transverse/simplicial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace transverse {

bool Simplex::contains(const Simplex& face) const {
  return std::includes(vertices.begin(), vertices.end(), face.vertices.begin(),
                       face.vertices.end());
}

std::string to_string(const Simplex& s) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < s.vertices.size(); ++i) os << (i ? "," : "") << s.vertices[i];
  os << '}';
  return os.str();
}

SimplicialComplex SimplicialComplex::build(int vertex_count,
                                           const std::vector<std::vector<int>>& top_simplices) {
  if (vertex_count < 0) throw ComplexError("negative vertex count");
  std::map<std::vector<int>, std::size_t> seen;
  std::set<std::vector<int>> closure;
  for (std::size_t i = 0; i < top_simplices.size(); ++i) {
    std::vector<int> vs = top_simplices[i];
    if (vs.empty()) throw ComplexError("empty simplex at position " + std::to_string(i));
    std::sort(vs.begin(), vs.end());
    if (std::adjacent_find(vs.begin(), vs.end()) != vs.end())
      throw ComplexError("simplex at position " + std::to_string(i) + " repeats a vertex");
    if (vs.front() < 0 || vs.back() >= vertex_count)
      throw ComplexError("simplex at position " + std::to_string(i) +
                         " references a vertex outside [0, " + std::to_string(vertex_count) +
                         ")");
    if (auto [it, fresh] = seen.emplace(vs, i); !fresh) {
      throw ComplexError("duplicate simplex " + to_string(Simplex{vs}) + " at positions " +
                         std::to_string(it->second) + " and " + std::to_string(i));
    }
    const unsigned n = static_cast<unsigned>(vs.size());
    if (n > 16) throw ComplexError("simplex dimension too large");
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      std::vector<int> face;
      for (unsigned j = 0; j < n; ++j)
        if (mask & (1u << j)) face.push_back(vs[j]);
      closure.insert(std::move(face));
    }
  }

  SimplicialComplex k;
  k.vertex_count_ = vertex_count;
  for (const auto& vs : closure) k.simplices_.push_back(Simplex{vs});
  std::sort(k.simplices_.begin(), k.simplices_.end());
  k.dim_ = k.simplices_.empty() ? -1 : k.simplices_.back().dim();

  int vertices_used = 0;
  for (const auto& s : k.simplices_) vertices_used += s.dim() == 0;
  if (vertices_used != vertex_count)
    throw ComplexError(std::to_string(vertex_count - vertices_used) +
                       " vertices appear in no simplex");

  k.dim_offsets_.assign(k.dim_ + 2, 0);
  for (const auto& s : k.simplices_) ++k.dim_offsets_[s.dim() + 1];
  std::partial_sum(k.dim_offsets_.begin(), k.dim_offsets_.end(), k.dim_offsets_.begin());
  k.by_dim_.resize(k.simplices_.size());
  std::iota(k.by_dim_.begin(), k.by_dim_.end(), 0);
  for (int id = 0; id < k.size(); ++id) k.index_.emplace(k.simplices_[id].vertices, id);

  k.cofacets_.assign(k.simplices_.size(), {});
  for (int id = 0; id < k.size(); ++id) {
    const auto& vs = k.simplices_[id].vertices;
    if (vs.size() < 2) continue;
    for (std::size_t drop = 0; drop < vs.size(); ++drop) {
      std::vector<int> facet;
      for (std::size_t j = 0; j < vs.size(); ++j)
        if (j != drop) facet.push_back(vs[j]);
      k.cofacets_[k.index_.at(facet)].push_back(id);
    }
  }
  return k;
}

std::span<const SimplexId> SimplicialComplex::of_dim(int l) const {
  if (l < 0 || l > dim_) return {};
  return std::span<const SimplexId>(by_dim_).subspan(
      dim_offsets_[l], dim_offsets_[l + 1] - dim_offsets_[l]);
}

std::optional<SimplexId> SimplicialComplex::find(const std::vector<int>& vertices) const {
  std::vector<int> vs = vertices;
  std::sort(vs.begin(), vs.end());
  auto it = index_.find(vs);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SimplexId SimplicialComplex::id_of(const std::vector<int>& vertices) const {
  if (auto id = find(vertices)) return *id;
  throw ComplexError("simplex " + to_string(Simplex{vertices}) + " is not in the complex");
}

std::vector<SimplexId> SimplicialComplex::maximal() const {
  std::vector<SimplexId> out;
  for (int id = 0; id < size(); ++id)
    if (cofacets_[id].empty()) out.push_back(id);
  return out;
}

std::vector<SimplexId> SimplicialComplex::star(SimplexId sigma) const {
  if (sigma < 0 || sigma >= size())
    throw ComplexError("simplex id " + std::to_string(sigma) + " is not in the complex");
  std::set<SimplexId> out{sigma};
  std::vector<SimplexId> frontier{sigma};
  while (!frontier.empty()) {
    SimplexId s = frontier.back();
    frontier.pop_back();
    for (SimplexId c : cofacets_[s])
      if (out.insert(c).second) frontier.push_back(c);
  }
  return {out.begin(), out.end()};
}

std::vector<SimplexId> SimplicialComplex::faces(SimplexId sigma) const {
  const auto& vs = simplex(sigma).vertices;
  const unsigned n = static_cast<unsigned>(vs.size());
  std::vector<SimplexId> out;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> face;
    for (unsigned j = 0; j < n; ++j)
      if (mask & (1u << j)) face.push_back(vs[j]);
    out.push_back(index_.at(face));
  }
  std::sort(out.begin(), out.end());
  return out;
}

SimplicialComplex SimplicialComplex::skeleton(int l) const {
  if (l < 0 || l > dim_)
    throw ComplexError("skeleton dimension " + std::to_string(l) + " outside [0, " +
                       std::to_string(dim_) + "]");
  std::vector<std::vector<int>> tops;
  for (const auto& s : simplices_)
    if (s.dim() <= l) tops.push_back(s.vertices);
  return build(vertex_count_, tops);
}

// ---------------------------------------------------------------------------

GeometricRealization::GeometricRealization(int ambient_dim, std::vector<Vec> coords)
    : ambient_dim_(ambient_dim), coords_(std::move(coords)) {
  for (const auto& c : coords_)
    if (c.size() != ambient_dim_)
      throw ComplexError("vertex coordinate dimension does not match ambient dimension");
}

Vec GeometricRealization::barycenter(const Simplex& s) const {
  Vec b = Vec::Zero(ambient_dim_);
  for (int v : s.vertices) b += coord(v);
  return b / static_cast<double>(s.vertices.size());
}

Mat GeometricRealization::edge_matrix(const Simplex& s) const {
  Mat a(ambient_dim_, s.dim());
  for (int i = 1; i <= s.dim(); ++i) a.col(i - 1) = coord(s.vertices[i]) - coord(s.vertices[0]);
  return a;
}

Vec GeometricRealization::embed(const Simplex& s, const Vec& t) const {
  return coord(s.vertices[0]) + edge_matrix(s) * t;
}

Box GeometricRealization::bounding_box(const Simplex& s) const {
  Box b = Box::empty(ambient_dim_);
  for (int v : s.vertices) b.extend(coord(v));
  return b;
}

Box GeometricRealization::bounding_box() const {
  Box b = Box::empty(ambient_dim_);
  for (const auto& c : coords_) b.extend(c);
  return b;
}

void GeometricRealization::validate(const SimplicialComplex& k) const {
  if (k.vertex_count() != vertex_count())
    throw ComplexError("realization has " + std::to_string(vertex_count()) +
                       " vertices, complex has " + std::to_string(k.vertex_count()));
  const double scale = std::max(1.0, (bounding_box().hi - bounding_box().lo).norm());
  for (SimplexId id : k.maximal()) {
    const Simplex& s = k.simplex(id);
    if (s.dim() == 0) continue;
    if (s.dim() > ambient_dim_)
      throw ComplexError("simplex " + to_string(s) + " has dimension above the ambient space");
    Eigen::JacobiSVD<Mat> svd(edge_matrix(s));
    if (svd.singularValues().minCoeff() <= 1e-12 * scale)
      throw ComplexError("simplex " + to_string(s) + " is affinely dependent");
  }
  PointLocator locator(k, *this);
  for (int cell = 0; cell < locator.cell_count(); ++cell) {
    const Simplex& s = k.simplex(locator.cell_simplex(cell));
    std::vector<Vec> samples{barycenter(s)};
    for (int v : s.vertices) samples.push_back(0.75 * barycenter(s) + 0.25 * coord(v));
    for (const Vec& x : samples) {
      for (int other = 0; other < locator.cell_count(); ++other) {
        if (other == cell) continue;
        double offset = 0.0;
        auto lambda = locator.barycentric(other, x, &offset);
        if (offset <= kBarycentricTol * scale &&
            *std::min_element(lambda.begin(), lambda.end()) > kBarycentricTol) {
          throw ComplexError("interiors of " + to_string(s) + " and " +
                             to_string(k.simplex(locator.cell_simplex(other))) + " overlap");
        }
      }
    }
  }
}

Vec barycenter(const Simplex& s, const GeometricRealization& r) { return r.barycenter(s); }

// ---------------------------------------------------------------------------

namespace {

void collect_flags(const SimplicialComplex& k, SimplexId top, std::vector<SimplexId>& chain,
                   std::vector<std::vector<SimplexId>>& out) {
  chain.push_back(top);
  const auto& vs = k.simplex(top).vertices;
  if (vs.size() == 1) {
    out.push_back(chain);
  } else {
    for (std::size_t drop = 0; drop < vs.size(); ++drop) {
      std::vector<int> facet;
      for (std::size_t j = 0; j < vs.size(); ++j)
        if (j != drop) facet.push_back(vs[j]);
      collect_flags(k, k.id_of(facet), chain, out);
    }
  }
  chain.pop_back();
}

}  // namespace

Subdivision barycentric_subdivision(const SimplicialComplex& k, const GeometricRealization& r) {
  if (r.vertex_count() != k.vertex_count())
    throw ComplexError("realization does not match complex");
  std::vector<Vec> coords;
  coords.reserve(k.size());
  std::vector<int> bary(k.size());
  for (int id = 0; id < k.size(); ++id) {
    bary[id] = id;
    coords.push_back(r.barycenter(k.simplex(id)));
  }
  std::vector<std::vector<int>> tops;
  for (SimplexId top : k.maximal()) {
    std::vector<std::vector<SimplexId>> flags;
    std::vector<SimplexId> chain;
    collect_flags(k, top, chain, flags);
    for (auto& flag : flags) {
      std::vector<int> vs;
      for (SimplexId s : flag) vs.push_back(bary[s]);
      tops.push_back(std::move(vs));
    }
  }
  return Subdivision{SimplicialComplex::build(k.size(), tops),
                     GeometricRealization(r.ambient_dim(), std::move(coords)), std::move(bary)};
}

Mesh grid_triangulation(const Box& box, int resolution) {
  const int m = static_cast<int>(box.lo.size());
  if (m != 2 && m != 3)
    throw ComplexError("grid triangulation supports ambient dimension 2 or 3, got " +
                       std::to_string(m));
  if (resolution < 1) throw ComplexError("grid resolution must be at least 1");
  if (!((box.hi - box.lo).array() > 0).all()) throw ComplexError("grid box is empty");

  const int side = resolution + 1;
  const int vertex_count = m == 2 ? side * side : side * side * side;
  auto index = [&](const std::vector<int>& c) {
    int id = 0;
    for (int a = m - 1; a >= 0; --a) id = id * side + c[a];
    return id;
  };

  std::vector<Vec> coords(vertex_count);
  std::vector<int> c(m, 0);
  for (int id = 0; id < vertex_count; ++id) {
    int rest = id;
    Vec p(m);
    for (int a = 0; a < m; ++a) {
      c[a] = rest % side;
      rest /= side;
      p[a] = box.lo[a] + (box.hi[a] - box.lo[a]) * c[a] / resolution;
    }
    coords[id] = p;
  }

  std::vector<std::vector<int>> tops;
  std::vector<int> cell(m, 0);
  const int cell_count = m == 2 ? resolution * resolution : resolution * resolution * resolution;
  for (int cid = 0; cid < cell_count; ++cid) {
    int rest = cid;
    for (int a = 0; a < m; ++a) {
      cell[a] = rest % resolution;
      rest /= resolution;
    }
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<int> corner = cell;
      std::vector<int> simplex{index(corner)};
      for (int axis : perm) {
        ++corner[axis];
        simplex.push_back(index(corner));
      }
      tops.push_back(std::move(simplex));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return Mesh{SimplicialComplex::build(vertex_count, tops),
              GeometricRealization(m, std::move(coords))};
}

// ---------------------------------------------------------------------------

double Location::margin() const {
  return *std::min_element(barycentric.begin(), barycentric.end());
}

PointLocator::PointLocator(const SimplicialComplex& k, const GeometricRealization& r)
    : complex_(&k), bounds_(r.bounding_box()) {
  const int m = r.ambient_dim();
  for (SimplexId id : k.maximal()) {
    const Simplex& s = k.simplex(id);
    Cell cell{id, r.coord(s.vertices[0]), r.edge_matrix(s), Mat(), r.bounding_box(s)};
    if (s.dim() > 0) {
      Mat gram = cell.edges.transpose() * cell.edges;
      cell.solve = gram.inverse() * cell.edges.transpose();
    } else {
      cell.solve = Mat(0, m);
    }
    cell.box.inflate(1e-9);
    cells_.push_back(std::move(cell));
  }
  const int n = std::max(1, static_cast<int>(cells_.size()));
  const int per_axis = std::max(1, static_cast<int>(std::round(std::pow(n, 1.0 / m))));
  bins_per_axis_.assign(m, per_axis);
  int total = 1;
  for (int a = 0; a < m; ++a) total *= per_axis;
  bins_.assign(total, {});
  for (int ci = 0; ci < static_cast<int>(cells_.size()); ++ci) {
    std::vector<int> lo(m), hi(m);
    for (int a = 0; a < m; ++a) {
      const double w = bounds_.hi[a] - bounds_.lo[a];
      auto clamp_bin = [&](double x) {
        if (w <= 0) return 0;
        return std::clamp(static_cast<int>(std::floor((x - bounds_.lo[a]) / w * per_axis)), 0,
                          per_axis - 1);
      };
      lo[a] = clamp_bin(cells_[ci].box.lo[a]);
      hi[a] = clamp_bin(cells_[ci].box.hi[a]);
    }
    std::vector<int> at = lo;
    while (true) {
      int flat = 0;
      for (int a = m - 1; a >= 0; --a) flat = flat * per_axis + at[a];
      bins_[flat].push_back(ci);
      int a = 0;
      while (a < m && ++at[a] > hi[a]) {
        at[a] = lo[a];
        ++a;
      }
      if (a == m) break;
    }
  }
}

int PointLocator::bin_index(const Vec& x) const {
  const int m = static_cast<int>(x.size());
  int flat = 0;
  for (int a = m - 1; a >= 0; --a) {
    const double w = bounds_.hi[a] - bounds_.lo[a];
    const int per = bins_per_axis_[a];
    int b = w <= 0 ? 0
                   : std::clamp(static_cast<int>(std::floor((x[a] - bounds_.lo[a]) / w * per)),
                                0, per - 1);
    flat = flat * per + b;
  }
  return flat;
}

int PointLocator::cell_of(SimplexId id) const {
  for (int c = 0; c < cell_count(); ++c)
    if (cells_[c].id == id) return c;
  return -1;
}

std::vector<double> PointLocator::barycentric(int cell, const Vec& x, double* offset) const {
  const Cell& c = cells_[cell];
  Vec d = x - c.origin;
  Vec t = c.solve * d;
  std::vector<double> lambda(t.size() + 1);
  lambda[0] = 1.0 - t.sum();
  for (int i = 0; i < t.size(); ++i) lambda[i + 1] = t[i];
  if (offset) *offset = (c.edges * t - d).norm();
  return lambda;
}

std::optional<Location> PointLocator::locate(const Vec& x, double tol) const {
  if (cells_.empty() || bounds_.distance(x) > tol) return std::nullopt;
  std::optional<Location> best;
  for (int ci : bins_[bin_index(x)]) {
    if (!cells_[ci].box.contains(x) && cells_[ci].box.distance(x) > tol) continue;
    double offset = 0.0;
    auto lambda = barycentric(ci, x, &offset);
    if (offset > tol) continue;
    const double lo = *std::min_element(lambda.begin(), lambda.end());
    if (lo < -tol) continue;
    if (best && (lo < best->margin() || (lo == best->margin() && cells_[ci].id > best->simplex)))
      continue;
    best = Location{cells_[ci].id, std::move(lambda), -1, lo > tol};
  }
  if (!best) return std::nullopt;
  const Simplex& s = complex_->simplex(best->simplex);
  std::vector<int> carrier;
  for (std::size_t i = 0; i < s.vertices.size(); ++i)
    if (best->barycentric[i] > tol) carrier.push_back(s.vertices[i]);
  if (carrier.empty()) {
    // All coordinates within tolerance of zero cannot happen for a sum of 1;
    // fall back to the most weighted vertex.
    auto it = std::max_element(best->barycentric.begin(), best->barycentric.end());
    carrier.push_back(s.vertices[it - best->barycentric.begin()]);
  }
  best->carrier = complex_->id_of(carrier);
  return best;
}

std::optional<Location> point_locate(const SimplicialComplex& k, const GeometricRealization& r,
                                     const Vec& x, double tol) {
  return PointLocator(k, r).locate(x, tol);
}

}  // namespace transverse

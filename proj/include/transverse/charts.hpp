#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "transverse/linalg.hpp"
#include "transverse/simplicial.hpp"

namespace transverse {

class ChartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton inversion of a chain link failed.
class InversionError : public std::runtime_error {
 public:
  InversionError(const std::string& what, int link) : std::runtime_error(what), link_(link) {}
  int link() const { return link_; }

 private:
  int link_;
};

/// Reproducibility record of one link in the chain.
struct LinkMetadata {
  SimplexId simplex = -1;
  int dim = 0;
  double c_sigma = 0.0;
  double epsilon = 0.0;
  Vec regular_value;
  int retries = 0;
  int shrinks = 0;
  Box support;
};

/// A diffeomorphism of R^m that is the identity outside `support_box()`.
class AmbientDiffeo {
 public:
  virtual ~AmbientDiffeo() = default;

  /// ψ(x); when `jac` is given also stores Dψ(x).
  virtual Vec apply(const Vec& x, Mat* jac = nullptr) const = 0;
  /// ψ^{-1}(x); when `jac` is given also stores D(ψ^{-1})(x).
  virtual Vec invert(const Vec& x, Mat* jac = nullptr) const = 0;
  virtual const Box& support_box() const = 0;
  /// Upper bound on |ψ(x) - x|.
  virtual double max_displacement() const = 0;
  virtual LinkMetadata metadata() const = 0;
};

using Chain = std::vector<std::shared_ptr<const AmbientDiffeo>>;

/// Applies links in order.
Vec chain_apply(const Chain& chain, const Vec& x, Mat* jac = nullptr);
/// Inverts links in reverse order. Throws InversionError naming the link.
Vec chain_invert(const Chain& chain, const Vec& x, Mat* jac = nullptr);
/// Sum of displacement bounds of links whose support meets `box`.
double chain_displacement(const Chain& chain, const Box& box);

/// Tubular chart (t, v) ↦ Φ(b + A t + N v) around a realized l-simplex, where
/// Φ is the chain in force when the chart was made. chart(t, 0) = η(ι_σ(t)).
class TubularChart {
 public:
  TubularChart(SimplexId simplex, Vec origin, Mat tangent, Mat normal, Chain prefix,
               double dilation = 1.1);

  SimplexId simplex() const { return simplex_; }
  int dim() const { return static_cast<int>(tangent_.cols()); }
  int ambient_dim() const { return static_cast<int>(origin_.size()); }
  int normal_dim() const { return ambient_dim() - dim(); }

  const Vec& origin() const { return origin_; }
  const Mat& tangent() const { return tangent_; }
  const Mat& normal() const { return normal_; }
  /// [A | N], invertible.
  const Mat& frame() const { return frame_; }
  const Chain& prefix() const { return prefix_; }
  double dilation() const { return dilation_; }

  /// True when t lies in Δ^l dilated about its barycenter.
  bool in_domain(const Vec& t) const;

  /// b + A t + N v, before the chain.
  Vec affine(const Vec& tv) const { return origin_ + frame_ * tv; }
  Vec eval(const Vec& tv, Mat* jac = nullptr) const;
  Vec eval(const Vec& t, const Vec& v) const;
  /// Chart coordinates (t, v) of x.
  Vec inverse(const Vec& x, Mat* jac = nullptr) const;

 private:
  SimplexId simplex_;
  Vec origin_;
  Mat tangent_;
  Mat normal_;
  Mat frame_;
  Mat frame_inv_;
  Chain prefix_;
  double dilation_;
};

/// Open star St(b_σ, sd K), as the maximal simplices of sd K that contain b_σ.
struct StarSpec {
  SimplexId sigma = -1;
  int barycenter_vertex = -1;
  std::vector<SimplexId> simplices;  // every sd simplex containing b_σ
  std::vector<int> cells;            // indices into the sd point locator
  std::vector<int> barycenter_slot;  // position of b_σ in each cell
};

/// A realized complex together with the ordered chain of ambient
/// diffeomorphisms; η = chain ∘ (base realization).
class TriangulationState {
 public:
  explicit TriangulationState(Mesh base);

  const SimplicialComplex& complex() const { return shared_->mesh.complex; }
  const GeometricRealization& base() const { return shared_->mesh.realization; }
  const Mesh& mesh() const { return shared_->mesh; }
  const Subdivision& subdivision() const { return shared_->sd; }
  const PointLocator& base_locator() const { return shared_->base_locator; }
  const PointLocator& subdivision_locator() const { return shared_->sd_locator; }
  const StarSpec& star_of_barycenter(SimplexId sigma) const { return shared_->stars.at(sigma); }
  int ambient_dim() const { return base().ambient_dim(); }
  /// Shortest edge length of K.
  double mesh_scale() const { return shared_->mesh_scale; }

  const Chain& chain() const { return chain_; }
  TriangulationState with_links(const Chain& links) const;

  Vec eta(const Vec& p, Mat* jac = nullptr) const { return chain_apply(chain_, p, jac); }
  Vec eta_inverse(const Vec& x, Mat* jac = nullptr) const { return chain_invert(chain_, x, jac); }
  /// η(ι_σ(t)); `df` receives the m × l differential.
  Vec simplex_point(SimplexId sigma, const Vec& t, Mat* df = nullptr) const;
  /// Bounding box of η(|σ|).
  Box simplex_box(SimplexId sigma) const;

 private:
  struct Shared;
  std::shared_ptr<const Shared> shared_;
  Chain chain_;

  struct Shared {
    Mesh mesh;
    Subdivision sd;
    PointLocator base_locator;
    PointLocator sd_locator;
    std::vector<StarSpec> stars;
    double mesh_scale;
    explicit Shared(Mesh m);
  };
};

/// Affine frame of σ pushed through the current chain. Throws ChartError when
/// dim σ equals the ambient dimension.
TubularChart make_chart(const TriangulationState& state, SimplexId sigma);

Vec eval_eta(const TriangulationState& state, const Vec& p);
Vec eval_eta_inverse(const TriangulationState& state, const Vec& x);

/// True iff η^{-1}(x) lies in the interior of some simplex of the star.
bool point_in_star(const TriangulationState& state, const Vec& x, const StarSpec& star,
                   double tol = kBarycentricTol);
/// Same test for a point already in base coordinates.
bool base_point_in_star(const TriangulationState& state, const Vec& p, const StarSpec& star,
                        double tol = kBarycentricTol);

/// True iff η^{-1}(x) lies in the closed |K|.
bool point_in_complex(const TriangulationState& state, const Vec& x, double tol = kBarycentricTol);
/// In the star, or outside η(|K|) altogether. Near the boundary of |K| the
/// star is not a neighbourhood; what lies outside belongs to no other simplex.
bool star_or_exterior(const TriangulationState& state, const Vec& x, const StarSpec& star,
                      double tol = kBarycentricTol);

}  // namespace transverse

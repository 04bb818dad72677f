#pragma once

#include <functional>
#include <string>
#include <vector>

#include "transverse/charts.hpp"
#include "transverse/config.hpp"
#include "transverse/linalg.hpp"
#include "transverse/local_diffeo.hpp"
#include "transverse/smoothmap.hpp"

namespace transverse {

enum class Classification { kTransverse, kTangent, kSkeletonHit };
std::string to_string(Classification c);

/// A solution of h(y) = η(ι_σ(t)) with t in the closed simplex σ.
struct IntersectionRecord {
  SimplexId simplex = -1;
  int dim = 0;
  Vec y;
  Vec t;
  Vec point;
  double residual = 0.0;
  double margin = 0.0;
  Classification classification = Classification::kTransverse;
};

struct SimplexStatus {
  SimplexId simplex = -1;
  int dim = 0;
  bool pass = true;
  int records = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  /// Vertices only: smallest |h(y) - η(p)| found.
  double vertex_distance = std::numeric_limits<double>::infinity();
};

struct TransversalityReport {
  bool pass = true;
  std::vector<SimplexStatus> simplices;  // indexed by SimplexId
  std::vector<IntersectionRecord> records;
  int transverse_count = 0;
  int tangent_count = 0;
  int skeleton_hits = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  double min_vertex_distance = std::numeric_limits<double>::infinity();

  const SimplexStatus& status(SimplexId s) const { return simplices.at(s); }
  std::vector<const IntersectionRecord*> records_on(SimplexId s) const;
};

/// Smallest singular value of [Dh | Df] after scaling each column to unit
/// length; zero when a column vanishes. The map is transverse at the point
/// exactly when this is positive.
double transversality_margin(const Mat& dh, const Mat& df);
bool check_transverse_at(const Mat& dh, const Mat& df, double tol_rank);

/// Searches h against η on simplices, sharing one seeding of the domain of h.
class Verifier {
 public:
  Verifier(const SmoothMap& h, const PipelineConfig& config);

  const SmoothMap& map() const { return h_; }
  const std::vector<Vec>& seeds() const { return seeds_; }
  const std::vector<Vec>& seed_points() const { return points_; }
  /// Largest gap between neighbouring seed images.
  double spacing() const { return spacing_; }

  /// All intersections of h with η(σ) for dim σ < m. Solutions on the
  /// boundary of σ are attributed to the face that carries them.
  std::vector<IntersectionRecord> find_intersections(const TriangulationState& state,
                                                     SimplexId sigma) const;
  /// Smallest |h(y) - η(p)| over Y.
  double vertex_distance(const TriangulationState& state, SimplexId vertex, Vec* best_y = nullptr) const;
  /// Status from records found on σ itself (faces are not examined).
  SimplexStatus verify_simplex(const TriangulationState& state, SimplexId sigma,
                               std::vector<IntersectionRecord>* records = nullptr) const;
  TransversalityReport verify_triangulation(const TriangulationState& state) const;

  /// True iff every seed image lying in η(|K|) before also lies in it after.
  bool coverage_preserved(const TriangulationState& before, const TriangulationState& after,
                          const Box& region) const;

 private:
  const SmoothMap& h_;
  PipelineConfig config_;
  std::vector<Vec> seeds_;
  std::vector<Vec> points_;
  double spacing_ = 0.0;
};

std::vector<IntersectionRecord> find_intersections(const TriangulationState& state, SimplexId sigma,
                                                   const SmoothMap& h, const PipelineConfig& config);
TransversalityReport verify_triangulation(const TriangulationState& state, const SmoothMap& h,
                                          const PipelineConfig& config);

/// Largest relative Frobenius error between `jac` and central differences of
/// `f` over `points`, with step 1e-6 (1 + |x_i|) per coordinate by default.
double fd_jacobian_check(const std::function<Vec(const Vec&)>& f,
                         const std::function<Mat(const Vec&)>& jac, const std::vector<Vec>& points,
                         double rel_step = 1e-6);

/// ‖∂^i_v ∂^j_t (β s_σ)‖ along rays towards the boundary of σ.
struct DecayEntry {
  int order_v = 0;
  int order_t = 0;
  double initial = 0.0;
  double final = 0.0;
  bool pass = false;
};

struct DecayTable {
  std::vector<DecayEntry> entries;
  bool pass() const;
};

DecayTable boundary_decay_check(const LocalPerturbation& pert, int max_order = 3, int rays = 10);

/// Sum over the edges of a 2-simplex of the transverse records on them.
int edge_crossing_count(const TransversalityReport& report, const SimplicialComplex& k,
                        SimplexId triangle);

}  // namespace transverse

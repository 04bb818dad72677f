#include "transverse/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "transverse/bump.hpp"
#include "transverse/log.hpp"

namespace transverse {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::kTransverse: return "transverse";
    case Classification::kTangent: return "tangent";
    case Classification::kSkeletonHit: return "skeleton-hit";
  }
  return "unknown";
}

std::vector<const IntersectionRecord*> TransversalityReport::records_on(SimplexId s) const {
  std::vector<const IntersectionRecord*> out;
  for (const auto& r : records)
    if (r.simplex == s) out.push_back(&r);
  return out;
}

double transversality_margin(const Mat& dh, const Mat& df) {
  if (dh.cols() > 0 && df.cols() > 0 && dh.rows() != df.rows())
    throw std::invalid_argument("transversality_margin: row mismatch");
  const int m = static_cast<int>(dh.cols() > 0 ? dh.rows() : df.rows());
  const int cols = static_cast<int>(dh.cols() + df.cols());
  if (cols < m || m == 0) return 0.0;
  Eigen::MatrixXd a(m, cols);
  if (dh.cols() > 0) a.leftCols(dh.cols()) = dh;
  if (df.cols() > 0) a.rightCols(df.cols()) = df;
  for (int c = 0; c < cols; ++c) {
    const double n = a.col(c).norm();
    if (n == 0.0) return 0.0;
    a.col(c) /= n;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(m - 1);
}

bool check_transverse_at(const Mat& dh, const Mat& df, double tol_rank) {
  return transversality_margin(dh, df) >= tol_rank;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kFaceTol = 1e-9;
constexpr double kSnapTol = 1e-3;
constexpr int kMaxIterations = 60;

struct Solve {
  Vec y;
  Vec t;
  double residual = std::numeric_limits<double>::infinity();
};

Solve gauss_newton(const SmoothMap& h, const TriangulationState& state, SimplexId sigma, Vec y,
                   Vec t, double tol) {
  const Domain& dom = h.domain();
  const int n = dom.dim();
  const int l = static_cast<int>(t.size());
  Mat df;
  Vec r = h.eval(y) - state.simplex_point(sigma, t, &df);
  double res = r.norm();
  for (int it = 0; it < kMaxIterations && res >= tol; ++it) {
    const Mat dh = h.jacobian(y);
    Eigen::MatrixXd j(r.size(), n + l);
    if (n > 0) j.leftCols(n) = dh;
    if (l > 0) j.rightCols(l) = -df;
    const Eigen::VectorXd step = j.completeOrthogonalDecomposition().solve(-Eigen::VectorXd(r));
    bool accepted = false;
    double lambda = 1.0;
    for (int k = 0; k < 16; ++k, lambda *= 0.5) {
      Vec y2 = n > 0 ? dom.normalize(y + lambda * Vec(step.head(n))) : y;
      Vec t2 = t + lambda * Vec(step.tail(l));
      Mat df2;
      Vec r2 = h.eval(y2) - state.simplex_point(sigma, t2, &df2);
      const double res2 = r2.norm();
      if (res2 < res) {
        y = std::move(y2);
        t = std::move(t2);
        r = std::move(r2);
        df = std::move(df2);
        res = res2;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    // Far outside the simplex the seed is heading to another root.
    if (l > 0 && (t.minCoeff() < -0.5 || t.sum() > 1.5)) break;
  }
  return {std::move(y), std::move(t), res};
}

std::vector<double> barycentric_of(const Vec& t) {
  std::vector<double> lam(t.size() + 1);
  lam[0] = 1.0 - t.sum();
  for (int i = 0; i < t.size(); ++i) lam[i + 1] = t[i];
  return lam;
}

double barycentric_min(const Vec& t) {
  if (t.size() == 0) return 1.0;
  return std::min(1.0 - t.sum(), t.minCoeff());
}

Vec seed_parameter(const TriangulationState& state, SimplexId sigma, const Vec& x) {
  const int l = state.complex().simplex(sigma).dim();
  if (l == 0) return Vec(0);
  const Vec c = Vec::Constant(l, 1.0 / (l + 1));
  Mat df;
  const Vec x0 = state.simplex_point(sigma, c, &df);
  Vec t = c + Vec(Eigen::MatrixXd(df).completeOrthogonalDecomposition().solve(
                  Eigen::VectorXd(x - x0)));
  auto lam = barycentric_of(t);
  double sum = 0.0;
  for (double& v : lam) sum += (v = std::max(v, 0.0));
  for (double& v : lam) v /= sum;
  for (int i = 0; i < l; ++i) t[i] = 0.98 * lam[i + 1] + 0.02 * c[i];
  return t;
}

bool same_record(const IntersectionRecord& a, const IntersectionRecord& b, const Domain& dom,
                 double radius) {
  if (a.simplex != b.simplex) return false;
  if (a.y.size() > 0 && dom.distance(a.y, b.y) >= radius) return false;
  if (a.t.size() > 0 && (a.t - b.t).cwiseAbs().maxCoeff() >= radius) return false;
  return true;
}

void push_unique(std::vector<IntersectionRecord>& out, IntersectionRecord rec, const Domain& dom,
                 double radius) {
  for (auto& r : out) {
    if (same_record(r, rec, dom, radius)) {
      if (rec.residual < r.residual) r = std::move(rec);
      return;
    }
  }
  out.push_back(std::move(rec));
}

double embedding_margin(const TriangulationState& state, SimplexId sigma) {
  const int l = state.complex().simplex(sigma).dim();
  if (l == 0) return 1.0;
  std::vector<Vec> ts;
  ts.push_back(Vec::Constant(l, 1.0 / (l + 1)));
  for (int v = 0; v <= l; ++v) {
    Vec t = Vec::Constant(l, 0.1 / (l + 1));
    if (v > 0) t[v - 1] += 0.9;
    ts.push_back(t);
  }
  double worst = std::numeric_limits<double>::infinity();
  for (const Vec& t : ts) {
    Mat df;
    state.simplex_point(sigma, t, &df);
    Eigen::MatrixXd a(df);
    for (int c = 0; c < a.cols(); ++c) a.col(c).normalize();
    worst = std::min(worst, Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(l - 1));
  }
  return worst;
}

bool inside_complex(const TriangulationState& s, const Vec& x) {
  try {
    return point_in_complex(s, x, 1e-12);
  } catch (const InversionError&) {
    return false;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

Verifier::Verifier(const SmoothMap& h, const PipelineConfig& config) : h_(h), config_(config) {
  const int density = h.domain_dim() >= 2 ? config.surface_density : config.verify_density;
  seeds_ = h.sample_domain(density);
  points_.reserve(seeds_.size());
  for (const Vec& y : seeds_) points_.push_back(h.eval(y));
  for (std::size_t i = 0; i < points_.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < points_.size(); ++j)
      if (j != i) nearest = std::min(nearest, (points_[i] - points_[j]).norm());
    if (std::isfinite(nearest)) spacing_ = std::max(spacing_, nearest);
  }
}

double Verifier::vertex_distance(const TriangulationState& state, SimplexId vertex,
                                 Vec* best_y) const {
  const Vec x = state.simplex_point(vertex, Vec(0));
  const Domain& dom = h_.domain();
  const int n = dom.dim();
  double best = std::numeric_limits<double>::infinity();
  Vec arg;
  const double reach = spacing_ + 1e-9;
  for (std::size_t i = 0; i < seeds_.size(); ++i) {
    double d = (points_[i] - x).norm();
    Vec y = seeds_[i];
    if (n > 0 && d <= reach) {
      for (int it = 0; it < 40; ++it) {
        const Vec r = h_.eval(y) - x;
        const Eigen::MatrixXd j(h_.jacobian(y));
        const Eigen::VectorXd step = j.completeOrthogonalDecomposition().solve(-Eigen::VectorXd(r));
        bool accepted = false;
        double lambda = 1.0;
        for (int k = 0; k < 16; ++k, lambda *= 0.5) {
          Vec y2 = dom.normalize(y + lambda * Vec(step));
          const double d2 = (h_.eval(y2) - x).norm();
          if (d2 < d) {
            y = std::move(y2);
            d = d2;
            accepted = true;
            break;
          }
        }
        if (!accepted || step.norm() < 1e-15) break;
      }
    }
    if (d < best) {
      best = d;
      arg = y;
    }
  }
  if (best_y) *best_y = arg;
  return best;
}

std::vector<IntersectionRecord> Verifier::find_intersections(const TriangulationState& state,
                                                             SimplexId sigma) const {
  const int m = state.ambient_dim();
  const Simplex& simplex = state.complex().simplex(sigma);
  const int l = simplex.dim();
  const int n = h_.domain_dim();
  std::vector<IntersectionRecord> out;
  if (l >= m) return out;
  const Domain& dom = h_.domain();

  auto classify = [&](IntersectionRecord& rec, const Mat& df) {
    const Mat dh = n > 0 ? h_.jacobian(rec.y) : Mat(m, 0);
    rec.margin = transversality_margin(dh, df);
    if (n + rec.dim < m)
      rec.classification = Classification::kSkeletonHit;
    else
      rec.classification =
          rec.margin >= config_.tol_rank ? Classification::kTransverse : Classification::kTangent;
  };

  if (l == 0) {
    Vec y;
    const double d = vertex_distance(state, sigma, &y);
    if (d <= config_.vertex_delta) {
      IntersectionRecord rec;
      rec.simplex = sigma;
      rec.dim = 0;
      rec.y = y;
      rec.t = Vec(0);
      rec.point = h_.eval(y);
      rec.residual = d;
      classify(rec, Mat(m, 0));
      out.push_back(std::move(rec));
    }
    return out;
  }

  const Box box = state.simplex_box(sigma);
  const double reach = spacing_ + 1e-9;
  for (std::size_t i = 0; i < seeds_.size(); ++i) {
    if (box.distance(points_[i]) > reach) continue;
    const Vec t0 = seed_parameter(state, sigma, points_[i]);
    Solve s = gauss_newton(h_, state, sigma, seeds_[i], t0, config_.residual_tol);
    if (!(s.residual < config_.residual_tol)) {
      log_debug("seed discarded on simplex " + std::to_string(sigma) + ", residual " +
                std::to_string(s.residual));
      continue;
    }
    const auto lam = barycentric_of(s.t);
    if (*std::min_element(lam.begin(), lam.end()) < -kFaceTol) continue;

    IntersectionRecord rec;
    rec.y = s.y;
    rec.simplex = sigma;
    rec.dim = l;
    rec.t = s.t;
    std::vector<int> keep;
    for (int a = 0; a <= l; ++a)
      if (lam[a] > kFaceTol) keep.push_back(a);
    const bool on_face = static_cast<int>(keep.size()) <= l;
    if (!on_face) {
      // Gauss-Newton creeps towards tangential contacts with a face and can
      // stop short of it with a residual already below tolerance.
      keep.clear();
      for (int a = 0; a <= l; ++a)
        if (lam[a] > kSnapTol) keep.push_back(a);
    }
    if (keep.empty()) continue;
    if (static_cast<int>(keep.size()) <= l) {
      Simplex face;
      double total = 0.0;
      for (int a : keep) {
        face.vertices.push_back(simplex.vertices[a]);
        total += lam[a];
      }
      const SimplexId fid = state.complex().id_of(face.vertices);
      Vec tf(face.dim());
      for (int a = 1; a < static_cast<int>(keep.size()); ++a) tf[a - 1] = lam[keep[a]] / total;
      if (on_face) {
        rec.simplex = fid;
        rec.dim = face.dim();
        rec.t = tf;
      } else {
        Solve fs = gauss_newton(h_, state, fid, s.y, tf, config_.residual_tol);
        const double tol = face.dim() == 0 ? config_.vertex_delta : config_.residual_tol;
        const bool inside = face.dim() == 0 || barycentric_min(fs.t) >= -kFaceTol;
        if (fs.residual < tol && inside && (n == 0 || dom.distance(fs.y, s.y) < kSnapTol)) {
          rec.simplex = fid;
          rec.dim = face.dim();
          rec.y = fs.y;
          rec.t = fs.t;
        }
      }
    }
    rec.point = h_.eval(rec.y);
    Mat df;
    const Vec f = state.simplex_point(rec.simplex, rec.t, &df);
    rec.residual = (rec.point - f).norm();
    if (rec.dim == 0 && rec.residual > config_.vertex_delta) continue;
    classify(rec, df);
    push_unique(out, std::move(rec), dom, config_.dedupe_radius);
  }
  return out;
}

SimplexStatus Verifier::verify_simplex(const TriangulationState& state, SimplexId sigma,
                                       std::vector<IntersectionRecord>* records) const {
  SimplexStatus st;
  st.simplex = sigma;
  st.dim = state.complex().simplex(sigma).dim();
  if (st.dim >= state.ambient_dim()) {
    st.pass = embedding_margin(state, sigma) >= config_.tol_rank;
    return st;
  }
  for (auto& r : find_intersections(state, sigma)) {
    if (r.simplex != sigma) continue;
    ++st.records;
    st.min_margin = std::min(st.min_margin, r.margin);
    if (r.classification != Classification::kTransverse) st.pass = false;
    if (records) records->push_back(std::move(r));
  }
  if (st.dim == 0) st.vertex_distance = vertex_distance(state, sigma);
  return st;
}

TransversalityReport Verifier::verify_triangulation(const TriangulationState& state) const {
  TransversalityReport rep;
  const auto& k = state.complex();
  const int m = state.ambient_dim();
  std::vector<IntersectionRecord> all;
  for (SimplexId s = 0; s < k.size(); ++s) {
    if (k.simplex(s).dim() >= m) continue;
    for (auto& r : find_intersections(state, s)) push_unique(all, std::move(r), h_.domain(), config_.dedupe_radius);
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.simplex < b.simplex; });
  rep.simplices.resize(k.size());
  for (SimplexId s = 0; s < k.size(); ++s) {
    auto& st = rep.simplices[s];
    st.simplex = s;
    st.dim = k.simplex(s).dim();
    if (st.dim >= m) st.pass = embedding_margin(state, s) >= config_.tol_rank;
    if (st.dim == 0) {
      st.vertex_distance = vertex_distance(state, s);
      rep.min_vertex_distance = std::min(rep.min_vertex_distance, st.vertex_distance);
    }
  }
  for (const auto& r : all) {
    auto& st = rep.simplices[r.simplex];
    ++st.records;
    st.min_margin = std::min(st.min_margin, r.margin);
    switch (r.classification) {
      case Classification::kTransverse:
        ++rep.transverse_count;
        rep.min_margin = std::min(rep.min_margin, r.margin);
        break;
      case Classification::kTangent:
        ++rep.tangent_count;
        st.pass = false;
        break;
      case Classification::kSkeletonHit:
        ++rep.skeleton_hits;
        st.pass = false;
        break;
    }
  }
  rep.records = std::move(all);
  rep.pass = std::all_of(rep.simplices.begin(), rep.simplices.end(),
                         [](const auto& s) { return s.pass; });
  return rep;
}

bool Verifier::coverage_preserved(const TriangulationState& before, const TriangulationState& after,
                                  const Box& region) const {
  for (const Vec& p : points_) {
    if (!region.contains(p)) continue;
    if (inside_complex(before, p) && !inside_complex(after, p)) return false;
  }
  return true;
}

std::vector<IntersectionRecord> find_intersections(const TriangulationState& state, SimplexId sigma,
                                                   const SmoothMap& h, const PipelineConfig& config) {
  return Verifier(h, config).find_intersections(state, sigma);
}

TransversalityReport verify_triangulation(const TriangulationState& state, const SmoothMap& h,
                                          const PipelineConfig& config) {
  return Verifier(h, config).verify_triangulation(state);
}

// ---------------------------------------------------------------------------

double fd_jacobian_check(const std::function<Vec(const Vec&)>& f,
                         const std::function<Mat(const Vec&)>& jac, const std::vector<Vec>& points,
                         double rel_step) {
  double worst = 0.0;
  for (const Vec& x : points) {
    const Mat j = jac(x);
    Mat fd(j.rows(), j.cols());
    for (int c = 0; c < x.size(); ++c) {
      const double h = rel_step * (1.0 + std::abs(x[c]));
      Vec xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      fd.col(c) = (f(xp) - f(xm)) / (2.0 * h);
    }
    const double scale = std::max(j.norm(), 1e-300);
    worst = std::max(worst, (fd - j).norm() / scale);
  }
  return worst;
}

// ---------------------------------------------------------------------------

bool DecayTable::pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
}

namespace {

std::vector<Vec> ray_directions(int l, int count) {
  std::vector<Vec> out;
  for (int k = 0; k < count; ++k) {
    Vec d(l);
    if (l == 1) {
      d[0] = k % 2 == 0 ? 1.0 : -1.0;
    } else if (l == 2) {
      const double a = 2.0 * std::numbers::pi * (k + 0.5) / count;
      d << std::cos(a), std::sin(a);
    } else {
      const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
      d.setZero();
      d[0] = rr * std::cos(golden * k);
      d[1] = rr * std::sin(golden * k);
      d[2] = z;
    }
    out.push_back(d);
  }
  return out;
}

// Largest s with c + s d in the closed simplex.
double exit_length(const Vec& c, const Vec& d) {
  double s = std::numeric_limits<double>::infinity();
  for (int i = 0; i < c.size(); ++i)
    if (d[i] < 0) s = std::min(s, -c[i] / d[i]);
  const double ds = d.sum();
  if (ds > 0) s = std::min(s, (1.0 - c.sum()) / ds);
  return s;
}

// ‖∇^j s_σ(t)‖ in Frobenius norm; orders 1-3 by central differences of the
// next lower analytic derivative.
double derivative_norm(const LocalPerturbation& p, const Vec& t, int j, double h) {
  const int l = static_cast<int>(t.size());
  const double vn = p.regular_value.norm();
  if (j == 0) return p.section(t).norm();
  double acc = 0.0;
  for (int a = 0; a < l; ++a) {
    Vec tp = t, tm = t;
    tp[a] += h;
    tm[a] -= h;
    if (j == 1) {
      acc += ((p.section(tp) - p.section(tm)) / (2 * h)).squaredNorm();
    } else if (j == 2) {
      const Vec gp = bump::warp_grad(tp, p.warp_rate);
      const Vec gm = bump::warp_grad(tm, p.warp_rate);
      acc += ((gp - gm) / (2 * h)).squaredNorm() * vn * vn;
    } else {
      const Mat hp = p.warp_hessian(tp);
      const Mat hm = p.warp_hessian(tm);
      acc += ((hp - hm) / (2 * h)).squaredNorm() * vn * vn;
    }
  }
  return std::sqrt(acc);
}

}  // namespace

DecayTable boundary_decay_check(const LocalPerturbation& pert, int max_order, int rays) {
  const int l = pert.dim();
  if (l == 0) throw std::invalid_argument("boundary_decay_check needs a simplex of positive dimension");
  if (max_order < 0 || max_order > 3) throw std::invalid_argument("decay orders are limited to 3");
  constexpr int kSteps = 14;
  const Vec c = Vec::Constant(l, 1.0 / (l + 1));

  DecayTable table;
  for (int i = 0; i <= max_order; ++i)
    for (int j = 0; j <= max_order; ++j) table.entries.push_back({i, j, 0.0, 0.0, true});

  for (const Vec& dir : ray_directions(l, rays)) {
    const double len = exit_length(c, dir);
    std::vector<Vec> pts;
    std::vector<double> gap;
    for (int k = 1; k <= kSteps; ++k) {
      const double f = 1.0 - std::ldexp(1.0, -k);
      pts.push_back(c + f * len * dir);
      gap.push_back((1.0 - f) * len);
    }
    for (auto& e : table.entries) {
      // log of ρ_l^{-i} ‖∇^j s‖, -inf when the derivative underflows
      auto log_ratio = [&](int idx) {
        const Vec& t = pts[idx];
        double log_rho = -1.0 / (1.0 - t.sum());
        for (int a = 0; a < l; ++a) log_rho -= 1.0 / t[a];
        const double d = derivative_norm(pert, t, e.order_t, 1e-3 * gap[idx]);
        if (d == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(d) - e.order_v * log_rho;
      };
      const double li = log_ratio(0);
      const double lf = log_ratio(kSteps - 1);
      const bool ok = std::isinf(lf) || lf < std::log(1e-6) + li;
      const double initial = std::exp(li);
      const double final = std::exp(lf);
      if (!ok || final / std::max(initial, 1e-300) > e.final / std::max(e.initial, 1e-300)) {
        e.initial = initial;
        e.final = final;
      }
      e.pass = e.pass && ok;
    }
  }
  return table;
}

int edge_crossing_count(const TransversalityReport& report, const SimplicialComplex& k,
                        SimplexId triangle) {
  const Simplex& t = k.simplex(triangle);
  if (t.dim() != 2) throw std::invalid_argument("edge_crossing_count expects a 2-simplex");
  int count = 0;
  for (int skip = 0; skip < 3; ++skip) {
    Simplex e;
    for (int a = 0; a < 3; ++a)
      if (a != skip) e.vertices.push_back(t.vertices[a]);
    const SimplexId id = k.id_of(e.vertices);
    for (const auto& r : report.records)
      if (r.simplex == id && r.classification == Classification::kTransverse) ++count;
  }
  return count;
}

}  // namespace transverse

#include "transverse/charts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace transverse {

Vec chain_apply(const Chain& chain, const Vec& x, Mat* jac) {
  const int m = static_cast<int>(x.size());
  Vec y = x;
  if (jac) *jac = Mat::Identity(m, m);
  Mat step;
  for (const auto& link : chain) {
    if (!link->support_box().contains(y)) continue;
    y = link->apply(y, jac ? &step : nullptr);
    if (jac) *jac = step * *jac;
  }
  return y;
}

Vec chain_invert(const Chain& chain, const Vec& x, Mat* jac) {
  const int m = static_cast<int>(x.size());
  Vec y = x;
  if (jac) *jac = Mat::Identity(m, m);
  Mat step;
  for (int i = static_cast<int>(chain.size()) - 1; i >= 0; --i) {
    const auto& link = chain[i];
    if (!link->support_box().contains(y)) continue;
    try {
      y = link->invert(y, jac ? &step : nullptr);
    } catch (const InversionError& e) {
      throw InversionError(e.what(), i);
    }
    if (jac) *jac = step * *jac;
  }
  return y;
}

double chain_displacement(const Chain& chain, const Box& box) {
  double total = 0.0;
  for (const auto& link : chain) total += link->max_displacement();
  Box grown = box;
  grown.inflate(total);
  double local = 0.0;
  for (const auto& link : chain)
    if (link->support_box().intersects(grown)) local += link->max_displacement();
  return local;
}

// ---------------------------------------------------------------------------

TubularChart::TubularChart(SimplexId simplex, Vec origin, Mat tangent, Mat normal, Chain prefix,
                           double dilation)
    : simplex_(simplex),
      origin_(std::move(origin)),
      tangent_(std::move(tangent)),
      normal_(std::move(normal)),
      prefix_(std::move(prefix)),
      dilation_(dilation) {
  const int m = ambient_dim();
  if (tangent_.rows() != m || normal_.rows() != m || tangent_.cols() + normal_.cols() != m)
    throw ChartError("chart frame does not fit the ambient dimension");
  frame_.resize(m, m);
  frame_ << tangent_, normal_;
  Eigen::FullPivLU<Mat> lu(frame_);
  if (!lu.isInvertible()) throw ChartError("chart frame [A|N] is singular");
  frame_inv_ = lu.inverse();
}

bool TubularChart::in_domain(const Vec& t) const {
  const int l = dim();
  const double c = 1.0 / (l + 1);
  double t0 = 1.0 - t.sum();
  if (c + (t0 - c) / dilation_ < 0) return false;
  for (int i = 0; i < l; ++i)
    if (c + (t[i] - c) / dilation_ < 0) return false;
  return true;
}

Vec TubularChart::eval(const Vec& tv, Mat* jac) const {
  Mat dphi;
  Vec x = chain_apply(prefix_, affine(tv), jac ? &dphi : nullptr);
  if (jac) *jac = dphi * frame_;
  return x;
}

Vec TubularChart::eval(const Vec& t, const Vec& v) const {
  Vec tv(ambient_dim());
  tv << t, v;
  return eval(tv);
}

Vec TubularChart::inverse(const Vec& x, Mat* jac) const {
  Mat dinv;
  Vec y = chain_invert(prefix_, x, jac ? &dinv : nullptr);
  if (jac) *jac = frame_inv_ * dinv;
  return frame_inv_ * (y - origin_);
}

// ---------------------------------------------------------------------------

TriangulationState::Shared::Shared(Mesh m)
    : mesh(std::move(m)),
      sd(barycentric_subdivision(mesh.complex, mesh.realization)),
      base_locator(mesh.complex, mesh.realization),
      sd_locator(sd.complex, sd.realization),
      mesh_scale(std::numeric_limits<double>::infinity()) {
  const auto& k = mesh.complex;
  for (SimplexId e : k.of_dim(1)) {
    const auto& vs = k.simplex(e).vertices;
    mesh_scale = std::min(mesh_scale,
                          (mesh.realization.coord(vs[1]) - mesh.realization.coord(vs[0])).norm());
  }
  if (!std::isfinite(mesh_scale)) mesh_scale = 1.0;

  std::vector<int> cell_index(sd.complex.size(), -1);
  for (int c = 0; c < sd_locator.cell_count(); ++c) cell_index[sd_locator.cell_simplex(c)] = c;

  stars.resize(k.size());
  for (SimplexId s = 0; s < k.size(); ++s) {
    StarSpec& st = stars[s];
    st.sigma = s;
    st.barycenter_vertex = sd.barycenter_vertex[s];
    const SimplexId bv = sd.complex.id_of({st.barycenter_vertex});
    st.simplices = sd.complex.star(bv);
    for (SimplexId c : st.simplices) {
      if (cell_index[c] < 0) continue;
      st.cells.push_back(cell_index[c]);
      const auto& vs = sd.complex.simplex(c).vertices;
      st.barycenter_slot.push_back(static_cast<int>(
          std::find(vs.begin(), vs.end(), st.barycenter_vertex) - vs.begin()));
    }
  }
}

TriangulationState::TriangulationState(Mesh base)
    : shared_(std::make_shared<const Shared>(std::move(base))) {}

TriangulationState TriangulationState::with_links(const Chain& links) const {
  TriangulationState next = *this;
  next.chain_.insert(next.chain_.end(), links.begin(), links.end());
  return next;
}

Vec TriangulationState::simplex_point(SimplexId sigma, const Vec& t, Mat* df) const {
  const Simplex& s = complex().simplex(sigma);
  Mat deta;
  Vec x = eta(base().embed(s, t), df ? &deta : nullptr);
  if (df) *df = deta * base().edge_matrix(s);
  return x;
}

Box TriangulationState::simplex_box(SimplexId sigma) const {
  Box b = base().bounding_box(complex().simplex(sigma));
  b.inflate(chain_displacement(chain_, b) + 1e-12);
  return b;
}

// ---------------------------------------------------------------------------

namespace {

Mat normal_completion(const Mat& a, int m) {
  const int l = static_cast<int>(a.cols());
  if (l == 0) return Mat::Identity(m, m);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ() * Mat::Identity(m, m);
  Mat n = q.rightCols(m - l);
  for (int c = 0; c < n.cols(); ++c) {
    int at = 0;
    n.col(c).cwiseAbs().maxCoeff(&at);
    if (n(at, c) < 0) n.col(c) = -n.col(c);
  }
  return n;
}

}  // namespace

TubularChart make_chart(const TriangulationState& state, SimplexId sigma) {
  const Simplex& s = state.complex().simplex(sigma);
  const int m = state.ambient_dim();
  if (s.dim() >= m)
    throw ChartError("simplex " + to_string(s) + " has no normal directions (dim = " +
                     std::to_string(s.dim()) + ")");
  Mat a = state.base().edge_matrix(s);
  return TubularChart(sigma, state.base().coord(s.vertices[0]), a, normal_completion(a, m),
                      state.chain());
}

Vec eval_eta(const TriangulationState& state, const Vec& p) { return state.eta(p); }
Vec eval_eta_inverse(const TriangulationState& state, const Vec& x) {
  return state.eta_inverse(x);
}

bool base_point_in_star(const TriangulationState& state, const Vec& p, const StarSpec& star,
                        double tol) {
  const PointLocator& loc = state.subdivision_locator();
  for (std::size_t i = 0; i < star.cells.size(); ++i) {
    double offset = 0.0;
    auto lambda = loc.barycentric(star.cells[i], p, &offset);
    if (offset > tol) continue;
    if (*std::min_element(lambda.begin(), lambda.end()) < -tol) continue;
    if (lambda[star.barycenter_slot[i]] > tol) return true;
  }
  return false;
}

bool point_in_star(const TriangulationState& state, const Vec& x, const StarSpec& star,
                   double tol) {
  return base_point_in_star(state, state.eta_inverse(x), star, tol);
}

bool point_in_complex(const TriangulationState& state, const Vec& x, double tol) {
  return state.base_locator().locate(state.eta_inverse(x), tol).has_value();
}

bool star_or_exterior(const TriangulationState& state, const Vec& x, const StarSpec& star,
                      double tol) {
  const Vec p = state.eta_inverse(x);
  return base_point_in_star(state, p, star, tol) || !state.base_locator().locate(p, tol);
}

}  // namespace transverse

#include "transverse/local_diffeo.hpp"

#include <cmath>
#include <numbers>

#include "transverse/bump.hpp"

namespace transverse {

Vec LocalPerturbation::section(const Vec& t) const {
  return bump::warp_or_zero(t, warp_rate) * regular_value;
}

Mat LocalPerturbation::section_grad(const Vec& t) const {
  return regular_value * bump::warp_grad(t, warp_rate).transpose();
}

Mat LocalPerturbation::warp_hessian(const Vec& t) const { return bump::warp_hess(t, warp_rate); }

double LocalPerturbation::section_bound() const {
  return regular_value.norm() * std::exp(-warp_rate / bump::rho_l_max(dim()));
}

// ---------------------------------------------------------------------------

bool LocalDiffeo::in_support(const Vec& tv) const {
  const int l = pert_.dim();
  const Vec t = tv.head(l);
  if (!bump::in_open_simplex(t)) return false;
  return tv.tail(tv.size() - l).norm() < pert_.epsilon * bump::rho_l(t);
}

Vec LocalDiffeo::eval(const Vec& tv) const {
  if (!in_support(tv)) return tv;
  const int l = pert_.dim();
  const Vec t = tv.head(l);
  const double radius = pert_.epsilon * bump::rho_l(t);
  Vec out = tv;
  out.tail(tv.size() - l) += bump::beta(tv.tail(tv.size() - l).norm() / radius) * pert_.section(t);
  return out;
}

Mat LocalDiffeo::jacobian(const Vec& tv) const {
  const int m = static_cast<int>(tv.size());
  Mat jac = Mat::Identity(m, m);
  if (!in_support(tv)) return jac;
  const int l = pert_.dim();
  const int k = m - l;
  const Vec t = tv.head(l);
  const Vec v = tv.tail(k);
  const double p = bump::rho_l(t);
  const double radius = pert_.epsilon * p;
  const double vn = v.norm();
  const double r = vn / radius;
  const double b = bump::beta(r);
  const double db = bump::beta_deriv(r);
  const Vec s = pert_.section(t);
  if (l > 0) {
    // ∂/∂t [β(|v|/(ερ)) s] = β ∇s - β' r (∇ρ/ρ) s
    jac.bottomLeftCorner(k, l) = b * pert_.section_grad(t) -
                           (db * r / p) * s * bump::rho_l_grad(t).transpose();
  }
  if (vn > 0.0 && db != 0.0) jac.bottomRightCorner(k, k) += (db / (radius * vn)) * s * v.transpose();
  return jac;
}

Vec LocalDiffeo::inverse(const Vec& tv) const {
  const int l = pert_.dim();
  const int k = static_cast<int>(tv.size()) - l;
  const Vec t = tv.head(l);
  if (!bump::in_open_simplex(t)) return tv;
  const double radius = pert_.epsilon * bump::rho_l(t);
  const Vec s = pert_.section(t);
  const Vec target = tv.tail(k);
  // ψ' maps the ball |w| < radius onto itself and fixes everything else, so
  // targets outside the ball are their own preimage.
  if (!(target.norm() < radius) || s.norm() == 0.0) return tv;

  const double tol = 1e-12 * std::max(target.norm(), radius) + 1e-300;
  Vec w = target;
  for (int it = 0; it < 50; ++it) {
    const double wn = w.norm();
    const double r = wn / radius;
    const Vec res = w + bump::beta(r) * s - target;
    if (res.norm() <= tol) {
      Vec out = tv;
      out.tail(k) = w;
      return out;
    }
    Mat j = Mat::Identity(k, k);
    const double db = bump::beta_deriv(r);
    if (wn > 0.0 && db != 0.0) j += (db / (radius * wn)) * s * w.transpose();
    w -= j.partialPivLu().solve(res);
  }
  throw InversionError("local inverse did not converge", -1);
}

// ---------------------------------------------------------------------------

std::vector<Vec> simplex_interior_grid(int l, int density) {
  std::vector<Vec> out;
  if (l == 0) {
    out.emplace_back(Vec(0));
    return out;
  }
  const int d = std::max(density, 2);
  std::vector<int> idx(l, 0);
  while (true) {
    Vec t(l);
    double sum = 0.0;
    for (int a = 0; a < l; ++a) {
      t[a] = (idx[a] + 0.5) / d;
      sum += t[a];
    }
    if (sum < 1.0 - 0.25 / d) out.push_back(t);
    int a = 0;
    while (a < l && ++idx[a] == d) idx[a++] = 0;
    if (a == l) break;
  }
  return out;
}

std::vector<Vec> unit_directions(int k, int count) {
  std::vector<Vec> out;
  if (k == 1) {
    out.push_back(Vec::Constant(1, 1.0));
    out.push_back(Vec::Constant(1, -1.0));
  } else if (k == 2) {
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * std::numbers::pi * i / count;
      Vec d(2);
      d << std::cos(a), std::sin(a);
      out.push_back(d);
    }
  } else if (k == 3) {
    // Fibonacci sphere
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vec d(3);
      d << rr * std::cos(golden * i), rr * std::sin(golden * i), z;
      out.push_back(d);
    }
  } else {
    for (int a = 0; a < k; ++a) {
      Vec d = zeros(k);
      d[a] = 1.0;
      out.push_back(d);
      out.push_back(-d);
    }
  }
  return out;
}

std::vector<Vec> support_samples(const LocalPerturbation& pert, int density) {
  static constexpr double kRadii[] = {0.0, 0.3, 0.52, 0.6, 0.7, 0.8, 0.9, 0.97};
  const int l = pert.dim();
  const int k = pert.normal_dim();
  std::vector<Vec> out;
  const auto dirs = unit_directions(k, k == 2 ? 12 : 24);
  for (const Vec& t : simplex_interior_grid(l, density)) {
    const double radius = pert.epsilon * bump::rho_l(t);
    for (double f : kRadii) {
      for (const Vec& d : dirs) {
        Vec tv(l + k);
        tv.head(l) = t;
        tv.tail(k) = f * radius * d;
        out.push_back(tv);
        if (f == 0.0) break;
      }
    }
  }
  return out;
}

LocalDiffeo build_local_diffeo(LocalPerturbation pert) {
  if (!(pert.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (pert.regular_value.size() != pert.normal_dim())
    throw std::invalid_argument("regular value has the wrong dimension");
  LocalDiffeo psi(std::move(pert));
  const int m = psi.ambient_dim();
  double worst = 0.0;
  for (const Vec& tv : support_samples(psi.perturbation(), 8)) {
    const Mat j = psi.jacobian(tv);
    const double dev =
        Eigen::JacobiSVD<Mat>(j - Mat::Identity(m, m)).singularValues()(0);
    worst = std::max(worst, dev);
    if (!(dev < 0.5) || !(j.determinant() > 0.0))
      throw EpsilonTooLarge("Jacobian guard failed: |Dψ - I| = " + std::to_string(dev), dev);
  }
  return psi;
}

}  // namespace transverse

#include "transverse/bump.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace transverse::bump {

namespace {

// ρ^{(k)}(r) = e^{-1/r} P_k(1/r) with P_0 = 1 and P_{k+1}(u) = u^2 (P_k(u) - P_k'(u)).
// Coefficients in increasing powers of u.
constexpr std::array<std::array<double, 9>, kMaxDerivative + 1> kRhoPolys = {{
    {1, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 1, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, -2, 1, 0, 0, 0, 0},
    {0, 0, 0, 0, 6, -6, 1, 0, 0},
    {0, 0, 0, 0, 0, -24, 36, -12, 1},
}};

struct SimplexCoords {
  double t0;  // 1 - Σ t_i
  bool interior;
};

SimplexCoords coords(const Vec& t) {
  double t0 = 1.0 - t.sum();
  bool inside = t0 > 0.0 && (t.size() == 0 || t.minCoeff() > 0.0);
  return {t0, inside};
}

}  // namespace

double rho(double r) { return r > 0.0 ? std::exp(-1.0 / r) : 0.0; }

double rho_deriv(double r, int k) {
  if (k < 0 || k > kMaxDerivative)
    throw BumpError("rho_deriv supports orders 0.." + std::to_string(kMaxDerivative) +
                    ", got " + std::to_string(k));
  if (r <= 0.0) return 0.0;
  const double e = std::exp(-1.0 / r);
  if (e == 0.0) return 0.0;
  const double u = 1.0 / r;
  double p = 0.0;
  for (int i = 8; i >= 0; --i) p = p * u + kRhoPolys[k][i];
  return e * p;
}

bool in_open_simplex(const Vec& t) { return coords(t).interior; }

double rho_l(const Vec& t) {
  if (t.size() == 0) return 1.0;
  auto c = coords(t);
  if (!c.interior) return 0.0;
  double v = rho(c.t0);
  for (int i = 0; i < t.size(); ++i) v *= rho(t[i]);
  return v;
}

namespace {

// log ρ_l = -1/t0 - Σ 1/t_i on the open simplex.
Vec log_rho_grad(const Vec& t, double t0) {
  Vec g(t.size());
  for (int j = 0; j < t.size(); ++j) g[j] = 1.0 / (t[j] * t[j]) - 1.0 / (t0 * t0);
  return g;
}

Mat log_rho_hess(const Vec& t, double t0) {
  const int l = static_cast<int>(t.size());
  Mat h = Mat::Constant(l, l, -2.0 / (t0 * t0 * t0));
  for (int j = 0; j < l; ++j) h(j, j) -= 2.0 / (t[j] * t[j] * t[j]);
  return h;
}

}  // namespace

Vec rho_l_grad(const Vec& t) {
  const int l = static_cast<int>(t.size());
  auto c = coords(t);
  const double v = rho_l(t);
  if (l == 0 || !c.interior || v == 0.0) return Vec::Zero(l);
  return v * log_rho_grad(t, c.t0);
}

Mat rho_l_hess(const Vec& t) {
  const int l = static_cast<int>(t.size());
  auto c = coords(t);
  const double v = rho_l(t);
  if (l == 0 || !c.interior || v == 0.0) return Mat::Zero(l, l);
  Vec g = log_rho_grad(t, c.t0);
  return v * (g * g.transpose() + log_rho_hess(t, c.t0));
}

double rho_l_max(int l) {
  if (l <= 0) return 1.0;
  return rho_l(Vec::Constant(l, 1.0 / (l + 1)));
}

// ---------------------------------------------------------------------------

Cutoff::Cutoff() : c_beta_(0.0) {
  constexpr int kSamples = 10000;
  double sup = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double r = 0.5 + 0.5 * i / kSamples;
    sup = std::max(sup, std::abs(deriv(r)));
  }
  c_beta_ = 1.05 * sup;
}

const Cutoff& Cutoff::instance() {
  static const Cutoff cutoff;
  return cutoff;
}

double Cutoff::value(double r) const {
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  const double a = rho(1.0 - r);
  const double b = rho(r - 0.5);
  return a / (a + b);
}

double Cutoff::deriv(double r) const {
  if (r <= 0.5 || r >= 1.0) return 0.0;
  const double a = rho(1.0 - r);
  const double b = rho(r - 0.5);
  const double da = -rho_deriv(1.0 - r, 1);
  const double db = rho_deriv(r - 0.5, 1);
  const double s = a + b;
  return (da * b - a * db) / (s * s);
}

double beta(double r) { return Cutoff::instance().value(r); }
double beta_deriv(double r) { return Cutoff::instance().deriv(r); }
double c_beta() { return Cutoff::instance().c_beta(); }

// ---------------------------------------------------------------------------

double warp_or_zero(const Vec& t, double rate) {
  const double p = rho_l(t);
  if (p <= 0.0) return 0.0;
  return std::exp(-rate / p);
}

double warp(const Vec& t, double rate) {
  if (!in_open_simplex(t)) throw BumpError("warp is only defined on the open simplex");
  return warp_or_zero(t, rate);
}

Vec warp_grad(const Vec& t, double rate) {
  const int l = static_cast<int>(t.size());
  const double w = warp_or_zero(t, rate);
  if (l == 0 || w == 0.0) return Vec::Zero(l);
  const auto c = coords(t);
  const double p = rho_l(t);
  // q = -rate/ρ_l, ∇q = rate ∇log ρ_l / ρ_l
  return w * (rate / p) * log_rho_grad(t, c.t0);
}

Mat warp_hess(const Vec& t, double rate) {
  const int l = static_cast<int>(t.size());
  const double w = warp_or_zero(t, rate);
  if (l == 0 || w == 0.0) return Mat::Zero(l, l);
  const auto c = coords(t);
  const double p = rho_l(t);
  Vec g = log_rho_grad(t, c.t0);
  Vec dq = (rate / p) * g;
  Mat d2q = (rate / p) * (log_rho_hess(t, c.t0) - g * g.transpose());
  return w * (dq * dq.transpose() + d2q);
}

}  // namespace transverse::bump

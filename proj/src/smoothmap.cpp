#include "transverse/smoothmap.hpp"

#include <cmath>
#include <numbers>

namespace transverse {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec scalar(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}
}  // namespace

Domain Domain::point() {
  Domain d;
  d.kind = Kind::kPoint;
  d.lo = Vec(0);
  d.hi = Vec(0);
  return d;
}

Domain Domain::interval(double a, double b, bool periodic) {
  if (!(b > a)) throw SmoothMapError("interval domain needs a < b");
  Domain d;
  d.kind = Kind::kInterval;
  d.lo = scalar(a);
  d.hi = scalar(b);
  d.periodic = periodic;
  return d;
}

Domain Domain::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.size() == 0 || !((hi - lo).array() > 0).all())
    throw SmoothMapError("box domain needs lo < hi componentwise");
  Domain d;
  d.kind = Kind::kBox;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

bool Domain::contains(const Vec& y, double tol) const {
  if (y.size() != dim()) return false;
  if (periodic) return std::isfinite(y[0]);
  return ((y - lo).array() >= -tol).all() && ((hi - y).array() >= -tol).all();
}

Vec Domain::normalize(const Vec& y) const {
  if (dim() == 0) return y;
  if (periodic) {
    const double period = hi[0] - lo[0];
    double r = std::fmod(y[0] - lo[0], period);
    if (r < 0) r += period;
    if (r >= period) r = 0.0;
    return scalar(lo[0] + r);
  }
  return y.cwiseMax(lo).cwiseMin(hi);
}

double Domain::distance(const Vec& a, const Vec& b) const {
  if (dim() == 0) return 0.0;
  if (periodic) {
    const double period = hi[0] - lo[0];
    double d = std::fmod(std::abs(a[0] - b[0]), period);
    return std::min(d, period - d);
  }
  return (a - b).norm();
}

// ---------------------------------------------------------------------------

SmoothMap SmoothMap::point(Vec p) {
  SmoothMap h(Family::kPoint, Domain::point(), static_cast<int>(p.size()));
  h.vecs_ = {std::move(p)};
  return h;
}

SmoothMap SmoothMap::line(Vec origin, Vec direction, double a, double b) {
  if (origin.size() != direction.size()) throw SmoothMapError("line: dimension mismatch");
  if (direction.norm() == 0.0) throw SmoothMapError("line: zero direction");
  SmoothMap h(Family::kLine, Domain::interval(a, b), static_cast<int>(origin.size()));
  h.vecs_ = {std::move(origin), std::move(direction)};
  return h;
}

SmoothMap SmoothMap::circle(Vec center, double radius) {
  if (center.size() != 2) throw SmoothMapError("planar circle needs a 2D center");
  Vec u(2), w(2);
  u << 1, 0;
  w << 0, 1;
  return circle(std::move(center), radius, u, w);
}

SmoothMap SmoothMap::circle(Vec center, double radius, Vec u, Vec w) {
  if (center.size() != u.size() || u.size() != w.size())
    throw SmoothMapError("circle: dimension mismatch");
  if (!(radius > 0)) throw SmoothMapError("circle: radius must be positive");
  SmoothMap h(Family::kCircle, Domain::interval(0.0, 1.0, true), static_cast<int>(center.size()));
  h.vecs_ = {std::move(center), std::move(u), std::move(w)};
  h.scalars_ = {radius};
  return h;
}

SmoothMap SmoothMap::polynomial_curve(std::vector<Vec> coefficients, double a, double b) {
  if (coefficients.empty()) throw SmoothMapError("polynomial curve needs coefficients");
  for (const auto& c : coefficients)
    if (c.size() != coefficients[0].size())
      throw SmoothMapError("polynomial curve: dimension mismatch");
  const int m = static_cast<int>(coefficients[0].size());
  SmoothMap h(Family::kPolynomialCurve, Domain::interval(a, b), m);
  h.vecs_ = std::move(coefficients);
  return h;
}

SmoothMap SmoothMap::torus_knot(int p, int q, double major, double minor, Vec center) {
  if (center.size() != 3) throw SmoothMapError("torus knot lives in R^3");
  if (!(major > minor && minor > 0)) throw SmoothMapError("torus knot needs R > r > 0");
  SmoothMap h(Family::kTorusKnot, Domain::interval(0.0, 1.0, true), 3);
  h.vecs_ = {std::move(center)};
  h.scalars_ = {static_cast<double>(p), static_cast<double>(q), major, minor};
  return h;
}

SmoothMap SmoothMap::surface_patch(Vec origin, Vec a, Vec b, Vec normal, double c_uu,
                                   double c_uv, double c_vv, Vec uv_lo, Vec uv_hi) {
  if (origin.size() != 3 || a.size() != 3 || b.size() != 3 || normal.size() != 3)
    throw SmoothMapError("surface patch lives in R^3");
  if (uv_lo.size() != 2 || uv_hi.size() != 2)
    throw SmoothMapError("surface patch needs a 2D parameter box");
  SmoothMap h(Family::kSurfacePatch, Domain::box(std::move(uv_lo), std::move(uv_hi)), 3);
  h.vecs_ = {std::move(origin), std::move(a), std::move(b), std::move(normal)};
  h.scalars_ = {c_uu, c_uv, c_vv};
  return h;
}

std::string SmoothMap::family_name() const {
  switch (family_) {
    case Family::kPoint: return "point";
    case Family::kLine: return "line";
    case Family::kCircle: return "circle";
    case Family::kPolynomialCurve: return "polynomial";
    case Family::kTorusKnot: return "torus_knot";
    case Family::kSurfacePatch: return "surface_patch";
  }
  return "unknown";
}

void SmoothMap::check_param(const Vec& y) const {
  if (y.size() != domain_.dim())
    throw SmoothMapError("parameter has dimension " + std::to_string(y.size()) + ", domain has " +
                         std::to_string(domain_.dim()));
  if (!domain_.contains(y)) throw SmoothMapError("parameter outside the domain");
}

Vec SmoothMap::eval(const Vec& y) const {
  check_param(y);
  switch (family_) {
    case Family::kPoint: return vecs_[0];
    case Family::kLine: return vecs_[0] + y[0] * vecs_[1];
    case Family::kCircle: {
      const double phi = kTwoPi * y[0];
      return vecs_[0] + scalars_[0] * (std::cos(phi) * vecs_[1] + std::sin(phi) * vecs_[2]);
    }
    case Family::kPolynomialCurve: {
      Vec acc = Vec::Zero(ambient_dim_);
      for (auto it = vecs_.rbegin(); it != vecs_.rend(); ++it) acc = acc * y[0] + *it;
      return acc;
    }
    case Family::kTorusKnot: {
      const double p = scalars_[0], q = scalars_[1], big = scalars_[2], small = scalars_[3];
      const double phi = kTwoPi * y[0];
      const double radial = big + small * std::cos(q * phi);
      Vec x(3);
      x << radial * std::cos(p * phi), radial * std::sin(p * phi), small * std::sin(q * phi);
      return vecs_[0] + x;
    }
    case Family::kSurfacePatch: {
      const double u = y[0], v = y[1];
      const double bend = scalars_[0] * u * u + scalars_[1] * u * v + scalars_[2] * v * v;
      return vecs_[0] + u * vecs_[1] + v * vecs_[2] + bend * vecs_[3];
    }
  }
  return {};
}

Mat SmoothMap::jacobian(const Vec& y) const {
  check_param(y);
  Mat j(ambient_dim_, domain_.dim());
  switch (family_) {
    case Family::kPoint: break;
    case Family::kLine: j.col(0) = vecs_[1]; break;
    case Family::kCircle: {
      const double phi = kTwoPi * y[0];
      j.col(0) = kTwoPi * scalars_[0] * (-std::sin(phi) * vecs_[1] + std::cos(phi) * vecs_[2]);
      break;
    }
    case Family::kPolynomialCurve: {
      Vec acc = Vec::Zero(ambient_dim_);
      for (int k = static_cast<int>(vecs_.size()) - 1; k >= 1; --k) acc = acc * y[0] + k * vecs_[k];
      j.col(0) = acc;
      break;
    }
    case Family::kTorusKnot: {
      const double p = scalars_[0], q = scalars_[1], big = scalars_[2], small = scalars_[3];
      const double phi = kTwoPi * y[0];
      const double radial = big + small * std::cos(q * phi);
      const double d_radial = -small * q * std::sin(q * phi);
      Vec d(3);
      d << d_radial * std::cos(p * phi) - radial * p * std::sin(p * phi),
          d_radial * std::sin(p * phi) + radial * p * std::cos(p * phi),
          small * q * std::cos(q * phi);
      j.col(0) = kTwoPi * d;
      break;
    }
    case Family::kSurfacePatch: {
      const double u = y[0], v = y[1];
      j.col(0) = vecs_[1] + (2 * scalars_[0] * u + scalars_[1] * v) * vecs_[3];
      j.col(1) = vecs_[2] + (scalars_[1] * u + 2 * scalars_[2] * v) * vecs_[3];
      break;
    }
  }
  return j;
}

std::vector<Vec> SmoothMap::sample_domain(int density) const {
  if (density < 1) throw SmoothMapError("sampling density must be at least 1");
  std::vector<Vec> out;
  switch (domain_.kind) {
    case Domain::Kind::kPoint: out.push_back(Vec(0)); break;
    case Domain::Kind::kInterval: {
      const double a = domain_.lo[0], b = domain_.hi[0], len = b - a;
      const int count = std::max(1, static_cast<int>(std::ceil(density * len - 1e-9)));
      const int last = domain_.periodic ? count - 1 : count;
      for (int i = 0; i <= last; ++i) out.push_back(scalar(a + len * i / count));
      break;
    }
    case Domain::Kind::kBox: {
      const int n = domain_.dim();
      std::vector<int> idx(n, 0);
      while (true) {
        Vec y(n);
        for (int a = 0; a < n; ++a) {
          const double f = density == 1 ? 0.5 : static_cast<double>(idx[a]) / (density - 1);
          y[a] = domain_.lo[a] + f * (domain_.hi[a] - domain_.lo[a]);
        }
        out.push_back(y);
        int a = 0;
        while (a < n && ++idx[a] == density) idx[a++] = 0;
        if (a == n) break;
      }
      break;
    }
  }
  return out;
}

}  // namespace transverse

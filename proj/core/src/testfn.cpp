#include "invlab/testfn.hpp"

#include <cmath>
#include <sstream>

#include "invlab/lowdisc.hpp"

namespace invlab {

namespace {

// Radial profile g(s) = exp(-1/(1-s)) and derivatives in s. Below t = 1 - s
// of 1e-8 everything underflows to exactly 0 in double precision; returning
// zeros there avoids 0/0 without changing any representable value.
struct BumpProfile {
  double g = 0.0, g1 = 0.0, g2 = 0.0;
};

BumpProfile bump_profile(double s) {
  BumpProfile p;
  const double t = 1.0 - s;
  if (s >= 1.0 || t < 1e-8) return p;
  p.g = std::exp(-1.0 / t);
  p.g1 = -p.g / (t * t);
  p.g2 = p.g * (2.0 * s - 1.0) / (t * t * t * t);
  return p;
}

struct Monomial {
  double value = 1.0;
  Vec grad;
  Mat hess;
};

Monomial monomial_eval(const Vec& y, const std::array<int, kMaxDim>& powers) {
  const int d = int(y.size());
  Monomial m;
  m.grad = Vec::Zero(d);
  m.hess = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < powers[std::size_t(i)]; ++k) m.value *= y[i];

  auto partial = [&](int i) {
    const int p = powers[std::size_t(i)];
    if (p == 0) return 0.0;
    double v = p;
    for (int k = 0; k < p - 1; ++k) v *= y[i];
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      for (int k = 0; k < powers[std::size_t(j)]; ++k) v *= y[j];
    }
    return v;
  };
  for (int i = 0; i < d; ++i) m.grad[i] = partial(i);

  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double v;
      if (i == j) {
        const int p = powers[std::size_t(i)];
        if (p < 2) {
          v = 0.0;
        } else {
          v = double(p) * double(p - 1);
          for (int k = 0; k < p - 2; ++k) v *= y[i];
          for (int l = 0; l < d; ++l) {
            if (l == i) continue;
            for (int k = 0; k < powers[std::size_t(l)]; ++k) v *= y[l];
          }
        }
      } else {
        const int pi = powers[std::size_t(i)], pj = powers[std::size_t(j)];
        if (pi == 0 || pj == 0) {
          v = 0.0;
        } else {
          v = double(pi) * double(pj);
          for (int k = 0; k < pi - 1; ++k) v *= y[i];
          for (int k = 0; k < pj - 1; ++k) v *= y[j];
          for (int l = 0; l < d; ++l) {
            if (l == i || l == j) continue;
            for (int k = 0; k < powers[std::size_t(l)]; ++k) v *= y[l];
          }
        }
      }
      m.hess(i, j) = m.hess(j, i) = v;
    }
  }
  return m;
}

} // namespace

Box TestFunction::support() const {
  Box b;
  b.lo = center.array() - radius;
  b.hi = center.array() + radius;
  return b;
}

double TestFunction::value(const Vec& x) const {
  const Vec y = x - center;
  const double s = y.squaredNorm() / (radius * radius);
  const BumpProfile p = bump_profile(s);
  if (p.g == 0.0) return 0.0;
  if (degree == 0) return p.g;
  return p.g * monomial_eval(y, powers).value;
}

Vec TestFunction::gradient(const Vec& x) const {
  const Vec y = x - center;
  const double r2 = radius * radius;
  const double s = y.squaredNorm() / r2;
  const BumpProfile p = bump_profile(s);
  if (p.g == 0.0) return Vec::Zero(dim());
  const Vec ds = (2.0 / r2) * y;
  if (degree == 0) return p.g1 * ds;
  const Monomial m = monomial_eval(y, powers);
  return m.value * p.g1 * ds + p.g * m.grad;
}

Mat TestFunction::hessian(const Vec& x) const {
  const Vec y = x - center;
  const double r2 = radius * radius;
  const double s = y.squaredNorm() / r2;
  const BumpProfile p = bump_profile(s);
  if (p.g == 0.0) return Mat::Zero(dim(), dim());
  const Vec ds = (2.0 / r2) * y;
  const Mat bump_hess = p.g2 * (ds * ds.transpose()) +
                        Mat((2.0 * p.g1 / r2) * Mat::Identity(dim(), dim()));
  if (degree == 0) return bump_hess;
  const Monomial m = monomial_eval(y, powers);
  const Vec bump_grad = p.g1 * ds;
  return m.value * bump_hess + bump_grad * m.grad.transpose() +
         m.grad * bump_grad.transpose() + p.g * m.hess;
}

C2Field TestFunction::as_c2() const {
  TestFunction self = *this;
  return C2Field{[self](const Vec& x) { return self.value(x); },
                 [self](const Vec& x) { return self.gradient(x); },
                 [self](const Vec& x) { return self.hessian(x); }};
}

std::string TestFunction::label() const {
  std::ostringstream os;
  os << (degree == 0 ? "bump(" : "bump*mono(");
  os << "c=[";
  for (int i = 0; i < dim(); ++i) os << (i ? "," : "") << center[i];
  os << "], r=" << radius;
  if (degree > 0) {
    os << ", a=[";
    for (int i = 0; i < dim(); ++i) os << (i ? "," : "") << powers[std::size_t(i)];
    os << "]";
  }
  os << ")";
  return os.str();
}

TestFunction make_bump(Vec center, double radius) {
  TestFunction f;
  f.center = std::move(center);
  f.radius = radius;
  return f;
}

TestFunction make_bump_monomial(Vec center, double radius, std::array<int, kMaxDim> powers) {
  TestFunction f;
  f.center = std::move(center);
  f.radius = radius;
  f.powers = powers;
  for (int p : powers) f.degree += p;
  return f;
}

std::vector<TestFunction> make_battery(int d, const BatteryConfig& config) {
  if (d < 1 || d > kMaxDim) throw DimensionError("battery: unsupported dimension");
  const int total = config.bumps + config.bump_monomials;
  std::vector<TestFunction> fns;
  fns.reserve(std::size_t(total));

  const auto centers =
      low_discrepancy_ball(zero_vec(d), config.center_radius, total, config.seed);
  Halton radius_seq(1, config.seed + 1);

  // monomial exponent patterns with total degree 1 or 2, cycled
  std::vector<std::array<int, kMaxDim>> patterns;
  for (int i = 0; i < d; ++i) {
    std::array<int, kMaxDim> p{};
    p[std::size_t(i)] = 1;
    patterns.push_back(p);
  }
  for (int i = 0; i < d; ++i) {
    std::array<int, kMaxDim> p{};
    p[std::size_t(i)] = 2;
    patterns.push_back(p);
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      std::array<int, kMaxDim> p{};
      p[std::size_t(i)] = 1;
      p[std::size_t(j)] = 1;
      patterns.push_back(p);
    }

  for (int k = 0; k < total; ++k) {
    const double u = radius_seq.next()[0];
    const double r = config.min_radius + u * (config.max_radius - config.min_radius);
    if (k < config.bumps) {
      fns.push_back(make_bump(centers[std::size_t(k)], r));
    } else {
      const auto& powers = patterns[std::size_t(k - config.bumps) % patterns.size()];
      fns.push_back(make_bump_monomial(centers[std::size_t(k)], r, powers));
    }
  }
  return fns;
}

} // namespace invlab

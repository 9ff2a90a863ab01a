#include "invlab/gallery.hpp"

#include <cmath>
#include <numbers>

#include "invlab/errors.hpp"
#include "invlab/volume.hpp"

namespace invlab {

namespace {

int as_dim(double v) {
  const int d = int(std::lround(v));
  if (std::abs(v - double(d)) > 1e-9 || d < 1 || d > kMaxDim)
    throw PreconditionError("parameter 'd' must be an integer in [1, " +
                            std::to_string(kMaxDim) + "]");
  return d;
}

Vec axis1(int d) {
  Vec e = zero_vec(d);
  e[0] = 1.0;
  return e;
}

Mat identity(int d) { return Mat(Mat::Identity(d, d)); }

// ------------------------------------------------------------------ pieces

// g(u) = exp(-1/u) on u > 0, the standard flat-at-zero mollifier brick.
double brick(double u) { return u <= 0.0 ? 0.0 : std::exp(-1.0 / u); }
double brick_d(double u) { return u <= 0.0 ? 0.0 : std::exp(-1.0 / u) / (u * u); }

// fall(u): 1 for u <= 0, 0 for u >= 1, smooth and flat at both ends.
double fall(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  const double a = brick(1.0 - u), b = brick(u);
  return a / (a + b);
}
double fall_d(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double a = brick(1.0 - u), b = brick(u);
  const double ad = -brick_d(1.0 - u), bd = brick_d(u);
  const double s = a + b;
  return (ad * s - a * (ad + bd)) / (s * s);
}

// Radial cutoff: 1 on [0, 1/4], 0 from 1/2 on.
double cutoff(double r) { return fall(4.0 * r - 1.0); }
double cutoff_d(double r) { return 4.0 * fall_d(4.0 * r - 1.0); }

// Bounded barrier for the explosive drift pair, in the variable y = e^{-x1}:
// cap(y) = y^2 (6 - y) for y <= 3 and 54 - 81/y beyond, glued C^2 at y = 3.
double cap(double y) { return y <= 3.0 ? y * y * (6.0 - y) : 54.0 - 81.0 / y; }

// V(x) = cap(e^{-x1}); the derivative combinations y cap' and y^2 cap'' are
// coded directly so nothing overflows when y does.
C2Field cap_barrier() {
  ScalarField value = [](const Vec& x) { return cap(std::exp(-x[0])); };
  VectorField grad = [](const Vec& x) -> Vec {
    const double y = std::exp(-x[0]);
    Vec g = zero_vec(int(x.size()));
    g[0] = y <= 3.0 ? -(12.0 * y * y - 3.0 * y * y * y) : -81.0 / y;
    return g;
  };
  MatrixField hess = [](const Vec& x) -> Mat {
    const double y = std::exp(-x[0]);
    const int d = int(x.size());
    Mat h = Mat::Zero(d, d);
    h(0, 0) = y <= 3.0 ? 24.0 * y * y - 9.0 * y * y * y : -81.0 / y;
    return h;
  };
  return C2Field::analytic(value, grad, hess);
}

// V(x) = exp(sign * arctan(x1)): bounded, positive, with drift derivative
// sign * V / (1 + x1^2) -- the standard witness for one-directional blowup.
C2Field arctan_barrier(double sign) {
  ScalarField value = [sign](const Vec& x) { return std::exp(sign * std::atan(x[0])); };
  VectorField grad = [sign](const Vec& x) -> Vec {
    const double u = x[0];
    const double v = std::exp(sign * std::atan(u));
    Vec g = zero_vec(int(x.size()));
    g[0] = sign * v / (1.0 + u * u);
    return g;
  };
  MatrixField hess = [sign](const Vec& x) -> Mat {
    const double u = x[0];
    const double v = std::exp(sign * std::atan(u));
    const int d = int(x.size());
    Mat h = Mat::Zero(d, d);
    const double q = 1.0 + u * u;
    h(0, 0) = v * (1.0 - sign * 2.0 * u) / (q * q);
    return h;
  };
  return C2Field::analytic(value, grad, hess);
}

// w(x) = integral_0^x e^{s^2} ds: Maclaurin series for small x, the
// asymptotic expansion e^{x^2}/(2x) * (1 + 1/(2x^2) + 3/(4x^4) + ...) beyond.
double grow_integral(double x) {
  const double ax = std::abs(x);
  if (ax <= 6.0) {
    double term = x, sum = 0.0; // term_k = x^{2k+1} / k!, summand term_k/(2k+1)
    for (int k = 0; k < 400; ++k) {
      sum += term / double(2 * k + 1);
      term *= x * x / double(k + 1);
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  const double e = std::exp(ax * ax);
  double factor = 1.0, acc = 0.0, x2 = ax * ax;
  for (int k = 0; k < 8; ++k) { // (2k-1)!! / (2 x^2)^k
    acc += factor;
    factor *= double(2 * k + 1) / (2.0 * x2);
  }
  const double w = e / (2.0 * ax) * acc;
  return x > 0.0 ? w : -w;
}

// ------------------------------------------------------------------ cases

GalleryCase brownian_case(const std::map<std::string, double>& p) {
  const int d = as_dim(p.at("d"));
  GalleryCase ex;
  ex.name = "brownian";
  ex.summary = "A = Id, G = 0 with Lebesgue measure; recurrent iff d <= 2";
  ex.d = d;
  ex.params = p;
  ex.cf = CoefficientField::constant(d, identity(d), [d](const Vec&) { return zero_vec(d); },
                                     "brownian");

  DensitySpec leb;
  leb.name = "lebesgue";
  leb.rho = [](const Vec&) { return 1.0; };
  leb.grad_rho = [d](const Vec&) { return zero_vec(d); };
  leb.score = [d](const Vec&) { return zero_vec(d); };
  leb.finiteness = Finiteness::Infinite;
  leb.radial_profile = [](double) { return 1.0; };
  const double wd = unit_ball_volume(d);
  leb.ball_mass = [wd, d](double r) { return wd * std::pow(r, d); };
  ex.densities.push_back(leb);

  ex.expected.recurrent = d <= 2 ? TriState::Yes : TriState::No;
  ex.expected.finite_mass = TriState::No;
  ex.expected.conservative_primal = TriState::Yes;
  ex.expected.conservative_dual = TriState::Yes;
  ex.expected.invariant_for_primal = TriState::Yes;
  ex.expected.invariant_for_dual = TriState::Yes;
  return ex;
}

GalleryCase ou_case(const std::map<std::string, double>& p) {
  const int d = as_dim(p.at("d"));
  GalleryCase ex;
  ex.name = "ou";
  ex.summary = "A = 2 Id, G = -x with Gaussian invariant measure";
  ex.d = d;
  ex.params = p;
  ex.cf = CoefficientField::constant(d, Mat(2.0 * identity(d)),
                                     [](const Vec& x) -> Vec { return -x; }, "ou");

  DensitySpec g;
  g.name = "gaussian";
  g.rho = [](const Vec& x) { return std::exp(-0.5 * x.squaredNorm()); };
  g.grad_rho = [](const Vec& x) -> Vec { return -std::exp(-0.5 * x.squaredNorm()) * x; };
  g.score = [](const Vec& x) -> Vec { return -x; };
  g.finiteness = Finiteness::Finite;
  const double pi = std::numbers::pi;
  g.total_mass = std::pow(2.0 * pi, 0.5 * d);
  g.radial_profile = [](double r) { return std::exp(-0.5 * r * r); };
  if (d == 2)
    g.ball_mass = [pi](double r) { return 2.0 * pi * (1.0 - std::exp(-0.5 * r * r)); };
  ex.densities.push_back(g);

  ex.classify_options.shells.r_min = 2.0; // the strict drift margin needs r^2 > d - 2 + eps
  ex.expected.recurrent = TriState::Yes;
  ex.expected.finite_mass = TriState::Yes;
  ex.expected.conservative_primal = TriState::Yes;
  ex.expected.conservative_dual = TriState::Yes;
  ex.expected.invariant_for_primal = TriState::Yes;
  ex.expected.invariant_for_dual = TriState::Yes;
  return ex;
}

GalleryCase radial_power_case(const std::map<std::string, double>& p) {
  const int d = as_dim(p.at("d"));
  const double m = p.at("m");
  GalleryCase ex;
  ex.name = "radial-power";
  ex.summary = "A = Id with density 1 inside the unit ball and |x|^m outside; "
               "recurrent iff m + d <= 2, finite iff m + d < 0";
  ex.d = d;
  ex.params = p;

  ex.cf = CoefficientField::constant(
      d, identity(d),
      [m, d](const Vec& x) -> Vec {
        const double r2 = x.squaredNorm();
        if (r2 <= 1.0) return zero_vec(d);
        return (0.5 * m / r2) * x;
      },
      "radial-power");

  DensitySpec rho;
  rho.name = "radial-power";
  rho.rho = [m](const Vec& x) {
    const double r = x.norm();
    return r <= 1.0 ? 1.0 : std::pow(r, m);
  };
  rho.grad_rho = [m, d](const Vec& x) -> Vec {
    const double r = x.norm();
    if (r <= 1.0) return zero_vec(d);
    return m * std::pow(r, m - 2.0) * x;
  };
  rho.score = [m, d](const Vec& x) -> Vec {
    const double r2 = x.squaredNorm();
    if (r2 <= 1.0) return zero_vec(d);
    return (m / r2) * x;
  };
  rho.radial_profile = [m](double r) { return r <= 1.0 ? 1.0 : std::pow(r, m); };
  rho.profile_breakpoints = {1.0};
  const double wd = unit_ball_volume(d);
  const double s = m + double(d);
  if (std::abs(s) < 1e-12) {
    rho.ball_mass = [wd, d](double r) {
      return r <= 1.0 ? wd * std::pow(r, d) : wd * (1.0 + double(d) * std::log(r));
    };
  } else {
    rho.ball_mass = [wd, d, s](double r) {
      return r <= 1.0 ? wd * std::pow(r, d)
                      : wd * (1.0 + double(d) * (std::pow(r, s) - 1.0) / s);
    };
  }
  if (s < -1e-12) {
    rho.finiteness = Finiteness::Finite;
    rho.total_mass = wd * m / s;
  } else {
    rho.finiteness = Finiteness::Infinite;
  }
  ex.densities.push_back(rho);

  // The drift switches branches on the unit sphere; shells must stay outside.
  ex.classify_options.shells.r_min = 1.5;

  ex.expected.recurrent = s <= 2.0 + 1e-12 ? TriState::Yes : TriState::No;
  ex.expected.finite_mass = s < -1e-12 ? TriState::Yes : TriState::No;
  ex.expected.conservative_primal = TriState::Yes;
  ex.expected.conservative_dual = TriState::Yes;
  ex.expected.invariant_for_primal = TriState::Yes;
  ex.expected.invariant_for_dual = TriState::Yes;
  return ex;
}

GalleryCase series_bump_case(const std::map<std::string, double>& p) {
  const int d = as_dim(p.at("d"));
  const double gamma = p.at("gamma");
  if (gamma < 2.5)
    throw PreconditionError("parameter 'gamma' must be >= 2.5 (C^2 bump profile)");

  GalleryCase ex;
  ex.name = "series-bump";
  ex.summary = "Gaussian-type density exp(-|x|^2 phi) with a lattice of C^2 bumps "
               "riding on phi; finite and recurrent";
  ex.d = d;
  ex.params = p;

  // phi(x) = 1 + |y|^gamma chi(|y|), y = x - round(x1) e1. The cutoff kills
  // every lattice term except the nearest one.
  auto phi_and_grad = [gamma, d](const Vec& x, Vec* grad) {
    Vec y = x;
    y[0] -= std::round(x[0]);
    const double r = y.norm();
    if (grad) *grad = zero_vec(d);
    if (r < 1e-14 || r >= 0.5) return 1.0;
    const double c = cutoff(r), cd = cutoff_d(r);
    const double rg = std::pow(r, gamma);
    if (grad) *grad = (gamma * std::pow(r, gamma - 2.0) * c + std::pow(r, gamma - 1.0) * cd) * y;
    return 1.0 + rg * c;
  };

  ex.cf = CoefficientField::constant(
      d, identity(d),
      [phi_and_grad](const Vec& x) -> Vec {
        Vec gphi;
        const double phi = phi_and_grad(x, &gphi);
        return -(phi * x + 0.5 * x.squaredNorm() * gphi);
      },
      "series-bump");

  DensitySpec rho;
  rho.name = "bump-gaussian";
  rho.rho = [phi_and_grad](const Vec& x) {
    return std::exp(-x.squaredNorm() * phi_and_grad(x, nullptr));
  };
  rho.score = [phi_and_grad](const Vec& x) -> Vec {
    Vec gphi;
    const double phi = phi_and_grad(x, &gphi);
    return -(2.0 * phi * x + x.squaredNorm() * gphi);
  };
  rho.grad_rho = [rho_fn = rho.rho, sc = rho.score](const Vec& x) -> Vec {
    return rho_fn(x) * sc(x);
  };
  rho.finiteness = Finiteness::Finite;
  ex.densities.push_back(rho);

  // D(r) in the divergence check saturates quickly; keep the sampling ball
  // small so the shell estimates keep a usable relative error.
  ex.classify_options.an.n_max = 10.0;

  ex.expected.recurrent = TriState::Yes;
  ex.expected.finite_mass = TriState::Yes;
  ex.expected.conservative_primal = TriState::Yes;
  ex.expected.conservative_dual = TriState::Yes;
  ex.expected.invariant_for_primal = TriState::Yes;
  ex.expected.invariant_for_dual = TriState::Yes;
  return ex;
}

GalleryCase constant_drift_case(const std::map<std::string, double>& p) {
  const int d = as_dim(p.at("d"));
  const double c = p.at("c");
  if (!(c > 0.0)) throw PreconditionError("parameter 'c' must be positive");

  GalleryCase ex;
  ex.name = "constant-drift-two-measures";
  ex.summary = "A = Id, G = c e1: Lebesgue and 1 + e^{2 c x1} are both invariant, "
               "so the semigroup is transient yet conservative";
  ex.d = d;
  ex.params = p;
  const Vec e1 = axis1(d);
  ex.cf = CoefficientField::constant(d, identity(d),
                                     [e1, c](const Vec&) -> Vec { return c * e1; },
                                     "constant-drift");

  DensitySpec leb;
  leb.name = "lebesgue";
  leb.rho = [](const Vec&) { return 1.0; };
  leb.grad_rho = [d](const Vec&) { return zero_vec(d); };
  leb.score = [d](const Vec&) { return zero_vec(d); };
  leb.finiteness = Finiteness::Infinite;
  leb.radial_profile = [](double) { return 1.0; };
  const double wd = unit_ball_volume(d);
  leb.ball_mass = [wd, d](double r) { return wd * std::pow(r, d); };
  ex.densities.push_back(leb);

  DensitySpec tilt;
  tilt.name = "tilted";
  tilt.rho = [c](const Vec& x) { return 1.0 + std::exp(2.0 * c * x[0]); };
  tilt.grad_rho = [c, e1](const Vec& x) -> Vec {
    return (2.0 * c * std::exp(2.0 * c * x[0])) * e1;
  };
  tilt.score = [c, e1](const Vec& x) -> Vec {
    // 2c e^{2cx1} / (1 + e^{2cx1}), written to survive overflow of e^{2cx1}.
    return (2.0 * c / (1.0 + std::exp(-2.0 * c * x[0]))) * e1;
  };
  tilt.finiteness = Finiteness::Infinite;
  ex.densities.push_back(tilt);

  DensitySpec bad;
  bad.name = "half-tilt";
  bad.rho = [c](const Vec& x) { return std::exp(c * x[0]); };
  bad.grad_rho = [c, e1](const Vec& x) -> Vec { return c * std::exp(c * x[0]) * e1; };
  bad.score = [c, e1](const Vec&) -> Vec { return c * e1; };
  bad.finiteness = Finiteness::Infinite;
  ex.negative_controls.push_back(bad);

  ex.classify_options.external.invariant_density_count = 2;

  ex.expected.recurrent = TriState::No;
  ex.expected.finite_mass = TriState::No;
  ex.expected.conservative_primal = TriState::Yes;
  ex.expected.conservative_dual = TriState::Yes;
  ex.expected.invariant_for_primal = TriState::Yes;
  ex.expected.invariant_for_dual = TriState::Yes;

  CoexcessivePreset co;
  co.numerator = 0;
  co.denominator = 1;
  co.starts = {zero_vec(d), Vec(e1), Vec(-0.5 * e1)};
  co.note = "h = 1 / (1 + e^{2 c x1}) is a fixed point of the dual semigroup";
  ex.coexcessive = co;
  return ex;
}

GalleryCase exp_quadratic_case(const std::map<std::string, double>& p) {
  const int d = as_dim(p.at("d"));
  const double c = p.at("c");
  if (!(c >= 0.5))
    throw PreconditionError("parameter 'c' must be >= 0.5 (the bundled barrier "
                            "certificates need that much drift)");

  GalleryCase ex;
  ex.name = "exp-quadratic-two-finite";
  ex.summary = "A = e^{|x|^2} Id, G = e^{|x|^2} c e1: two finite invariant "
               "measures, explosive in both directions";
  ex.d = d;
  ex.params = p;
  const Vec e1 = axis1(d);
  ex.cf = CoefficientField::isotropic(
      d, [](const Vec& x) { return std::exp(x.squaredNorm()); },
      [](const Vec& x) -> Vec { return 2.0 * std::exp(x.squaredNorm()) * x; },
      [c, e1](const Vec& x) -> Vec { return std::exp(x.squaredNorm()) * c * e1; },
      "exp-quadratic");

  DensitySpec g;
  g.name = "gaussian";
  g.rho = [](const Vec& x) { return std::exp(-x.squaredNorm()); };
  g.grad_rho = [](const Vec& x) -> Vec { return -2.0 * std::exp(-x.squaredNorm()) * x; };
  g.score = [](const Vec& x) -> Vec { return -2.0 * x; };
  g.finiteness = Finiteness::Finite;
  g.total_mass = std::pow(std::numbers::pi, 0.5 * d);
  g.radial_profile = [](double r) { return std::exp(-r * r); };
  ex.densities.push_back(g);

  DensitySpec gt;
  gt.name = "tilted-gaussian";
  gt.rho = [c](const Vec& x) { return std::exp(-x.squaredNorm() + 2.0 * c * x[0]); };
  gt.grad_rho = [c, e1, r = gt.rho](const Vec& x) -> Vec {
    return r(x) * (-2.0 * x + 2.0 * c * e1);
  };
  gt.score = [c, e1](const Vec& x) -> Vec { return -2.0 * x + 2.0 * c * e1; };
  gt.finiteness = Finiteness::Finite;
  gt.total_mass = std::pow(std::numbers::pi, 0.5 * d) * std::exp(c * c);
  ex.densities.push_back(gt);

  ex.certificates.push_back({LyapunovSpec{arctan_barrier(+1.0), 1.0,
                                          LyapunovTarget::PrimalAntiDrift, 0.0, 0.25, false,
                                          "arctan barrier along the drift"},
                             0});
  ex.certificates.push_back({LyapunovSpec{arctan_barrier(-1.0), 1.0,
                                          LyapunovTarget::DualAntiDrift, 0.0, 0.25, false,
                                          "arctan barrier against the dual drift"},
                             0});

  // e^{|x|^2} overflows past |x| ~ 26; certificates only need small shells.
  ex.classify_options.shells.r_max = 3.0;
  ex.classify_options.run_an_check = false;
  ex.classify_options.external.invariant_density_count = 2;

  ex.expected.recurrent = TriState::No;
  ex.expected.finite_mass = TriState::Yes;
  ex.expected.conservative_primal = TriState::No;
  ex.expected.conservative_dual = TriState::No;
  ex.expected.invariant_for_primal = TriState::No;
  ex.expected.invariant_for_dual = TriState::No;
  return ex;
}

GalleryCase divergence_drift_case(const std::map<std::string, double>& p) {
  const int d = as_dim(p.at("d"));
  GalleryCase ex;
  ex.name = "finite-plus-infinite-pair";
  ex.summary = "A = Id, G = -x + e^{x1^2} e1: the Gaussian stays invariant "
               "thanks to a divergence-free drift part, but mass escapes in "
               "finite time both ways";
  ex.d = d;
  ex.params = p;
  const Vec e1 = axis1(d);
  ex.cf = CoefficientField::constant(
      d, identity(d),
      [e1](const Vec& x) -> Vec { return -x + std::exp(x[0] * x[0]) * e1; },
      "divergence-drift");

  DensitySpec g;
  g.name = "gaussian";
  g.rho = [](const Vec& x) { return std::exp(-x.squaredNorm()); };
  g.grad_rho = [](const Vec& x) -> Vec { return -2.0 * std::exp(-x.squaredNorm()) * x; };
  g.score = [](const Vec& x) -> Vec { return -2.0 * x; };
  g.finiteness = Finiteness::Finite;
  g.total_mass = std::pow(std::numbers::pi, 0.5 * d);
  g.radial_profile = [](double r) { return std::exp(-r * r); };
  ex.densities.push_back(g);

  DensitySpec gt;
  gt.name = "flux-tilted";
  gt.rho = [](const Vec& x) {
    return std::exp(-x.squaredNorm() + 2.0 * grow_integral(x[0]));
  };
  // The exponent dwarfs the double range already for moderate x1 (it grows
  // like e^{x1^2}), so quadratures work from the log form with a local shift.
  gt.log_density = [](const Vec& x) {
    return -x.squaredNorm() + 2.0 * grow_integral(x[0]);
  };
  gt.score = [e1](const Vec& x) -> Vec {
    return -2.0 * x + 2.0 * std::exp(x[0] * x[0]) * e1;
  };
  gt.grad_rho = [r = gt.rho, sc = gt.score](const Vec& x) -> Vec { return r(x) * sc(x); };
  gt.finiteness = Finiteness::Infinite;
  ex.densities.push_back(gt);

  ex.certificates.push_back({LyapunovSpec{arctan_barrier(+1.0), 1.0,
                                          LyapunovTarget::PrimalAntiDrift, 0.0, 0.25, false,
                                          "arctan barrier along the flux"},
                             0});
  ex.certificates.push_back({LyapunovSpec{arctan_barrier(-1.0), 1.0,
                                          LyapunovTarget::DualAntiDrift, 0.0, 0.25, false,
                                          "arctan barrier against the dual flux"},
                             0});

  // e^{x1^2} overflows past |x1| ~ 26.
  ex.classify_options.shells.r_max = 20.0;
  ex.classify_options.run_an_check = false;
  ex.classify_options.external.invariant_density_count = 2;

  ex.expected.recurrent = TriState::No;
  ex.expected.finite_mass = TriState::Yes;
  ex.expected.conservative_primal = TriState::No;
  ex.expected.conservative_dual = TriState::No;
  ex.expected.invariant_for_primal = TriState::No;
  ex.expected.invariant_for_dual = TriState::No;
  return ex;
}

DensitySpec exp_density(const Vec& e1) {
  DensitySpec rho;
  rho.name = "exp";
  rho.rho = [](const Vec& x) { return std::exp(x[0]); };
  rho.grad_rho = [e1](const Vec& x) -> Vec { return std::exp(x[0]) * e1; };
  rho.score = [e1](const Vec&) -> Vec { return Vec(e1); };
  rho.finiteness = Finiteness::Infinite;
  return rho;
}

GalleryCase dual_explosive_case(const std::map<std::string, double>& p) {
  const int d = as_dim(p.at("d"));
  GalleryCase ex;
  ex.name = "dual-nonconservative";
  ex.summary = "G = (1/2 + e^{-x1}/2) e1: e^{x1} dx solves the stationary "
               "equation but is not preserved, because the dual process "
               "explodes toward -infinity";
  ex.d = d;
  ex.params = p;
  const Vec e1 = axis1(d);
  ex.cf = CoefficientField::constant(
      d, identity(d),
      [e1](const Vec& x) -> Vec { return (0.5 + 0.5 * std::exp(-x[0])) * e1; },
      "dual-explosive");

  ex.densities.push_back(exp_density(e1));

  DensitySpec adj;
  adj.name = "exp-adjusted";
  adj.rho = [](const Vec& x) { return std::exp(x[0] - std::exp(-x[0])); };
  adj.score = [e1](const Vec& x) -> Vec { return (1.0 + std::exp(-x[0])) * e1; };
  adj.grad_rho = [r = adj.rho, sc = adj.score](const Vec& x) -> Vec { return r(x) * sc(x); };
  adj.finiteness = Finiteness::Infinite;
  ex.densities.push_back(adj);

  ex.certificates.push_back({LyapunovSpec{cap_barrier(), 1.0, LyapunovTarget::DualAntiDrift,
                                          0.0, 0.25, false,
                                          "bounded barrier in y = e^{-x1}"},
                             0});
  ex.classify_options.run_an_check = false;
  ex.classify_options.external.invariant_density_count = 2;

  ex.expected.recurrent = TriState::No;
  ex.expected.finite_mass = TriState::No;
  ex.expected.conservative_primal = TriState::Yes;
  ex.expected.conservative_dual = TriState::No;
  ex.expected.invariant_for_primal = TriState::No;
  ex.expected.invariant_for_dual = TriState::Yes;

  CoexcessivePreset co;
  co.numerator = 1;
  co.denominator = 0;
  co.starts = {Vec(-e1), zero_vec(d), Vec(2.0 * e1)};
  co.note = "h = e^{-e^{-x1}} is harmonic for the dual drift and vanishes "
            "along its blowup direction";
  ex.coexcessive = co;
  return ex;
}

GalleryCase primal_explosive_case(const std::map<std::string, double>& p) {
  const int d = as_dim(p.at("d"));
  GalleryCase ex;
  ex.name = "primal-nonconservative";
  ex.summary = "G = (1/2 - e^{-x1}/2) e1: the process itself explodes toward "
               "-infinity while e^{x1} dx is preserved by the dual";
  ex.d = d;
  ex.params = p;
  const Vec e1 = axis1(d);
  ex.cf = CoefficientField::constant(
      d, identity(d),
      [e1](const Vec& x) -> Vec { return (0.5 - 0.5 * std::exp(-x[0])) * e1; },
      "primal-explosive");

  ex.densities.push_back(exp_density(e1));

  DensitySpec adj;
  adj.name = "exp-adjusted";
  adj.rho = [](const Vec& x) { return std::exp(x[0] + std::exp(-x[0])); };
  adj.score = [e1](const Vec& x) -> Vec { return (1.0 - std::exp(-x[0])) * e1; };
  adj.grad_rho = [r = adj.rho, sc = adj.score](const Vec& x) -> Vec { return r(x) * sc(x); };
  adj.finiteness = Finiteness::Infinite;
  ex.densities.push_back(adj);

  ex.certificates.push_back({LyapunovSpec{cap_barrier(), 1.0, LyapunovTarget::PrimalAntiDrift,
                                          0.0, 0.25, false,
                                          "bounded barrier in y = e^{-x1}"},
                             0});
  ex.classify_options.run_an_check = false;
  ex.classify_options.external.invariant_density_count = 2;

  ex.expected.recurrent = TriState::No;
  ex.expected.finite_mass = TriState::No;
  ex.expected.conservative_primal = TriState::No;
  ex.expected.conservative_dual = TriState::Yes;
  ex.expected.invariant_for_primal = TriState::Yes;
  ex.expected.invariant_for_dual = TriState::No;
  return ex;
}

// ------------------------------------------------------------------ registry

struct Entry {
  std::string summary;
  std::map<std::string, double> defaults;
  GalleryCase (*build)(const std::map<std::string, double>&);
};

const std::vector<std::pair<std::string, Entry>>& registry() {
  static const std::vector<std::pair<std::string, Entry>> reg = {
      {"brownian", {"Brownian motion with Lebesgue measure", {{"d", 2.0}}, brownian_case}},
      {"ou", {"Linear restoring drift with Gaussian measure", {{"d", 2.0}}, ou_case}},
      {"radial-power",
       {"Radial power density, kinked at the unit sphere",
        {{"d", 2.0}, {"m", -2.0}},
        radial_power_case}},
      {"series-bump",
       {"Gaussian density decorated with a lattice of bumps",
        {{"d", 2.0}, {"gamma", 3.0}},
        series_bump_case}},
      {"constant-drift-two-measures",
       {"Constant drift with two invariant measures", {{"d", 2.0}, {"c", 1.0}},
        constant_drift_case}},
      {"exp-quadratic-two-finite",
       {"Exploding isotropic diffusion with two finite invariant measures",
        {{"d", 2.0}, {"c", 1.0}},
        exp_quadratic_case}},
      {"finite-plus-infinite-pair",
       {"Gaussian plus divergence-free flux drift", {{"d", 2.0}}, divergence_drift_case}},
      {"dual-nonconservative",
       {"Stationary but not invariant: the dual explodes", {{"d", 1.0}},
        dual_explosive_case}},
      {"primal-nonconservative",
       {"Exploding process whose dual preserves the measure", {{"d", 1.0}},
        primal_explosive_case}},
  };
  return reg;
}

} // namespace

std::vector<GalleryEntry> gallery_catalog() {
  std::vector<GalleryEntry> out;
  for (const auto& [name, entry] : registry())
    out.push_back({name, entry.summary, entry.defaults});
  return out;
}

GalleryCase make_example(const std::string& name, const std::map<std::string, double>& params) {
  for (const auto& [key, entry] : registry()) {
    if (key != name) continue;
    std::map<std::string, double> resolved = entry.defaults;
    for (const auto& [k, v] : params) {
      if (resolved.find(k) == resolved.end())
        throw PreconditionError("example '" + name + "' has no parameter '" + k + "'");
      resolved[k] = v;
    }
    return entry.build(resolved);
  }
  throw PreconditionError("unknown example '" + name + "' (see list-examples)");
}

Verdict classify_example(const GalleryCase& ex, int density_index) {
  if (density_index < 0 || density_index >= int(ex.densities.size()))
    throw PreconditionError("density index out of range for example '" + ex.name + "'");

  ClassifyOptions opt = ex.classify_options;
  for (const CaseCertificate& cert : ex.certificates) {
    const bool dual = cert.spec.target == LyapunovTarget::DualAntiDrift;
    // A dual certificate speaks about the dual of a specific density.
    if (dual && cert.density != density_index) continue;
    const DensitySpec* rho = dual ? &ex.densities[std::size_t(cert.density)] : nullptr;
    const LyapunovReport rep = lyapunov_shell_check(ex.cf, rho, cert.spec, opt.shells);
    if (rep.verdict != CheckVerdict::Pass) continue;
    if (cert.spec.target == LyapunovTarget::PrimalAntiDrift)
      opt.external.primal_nonconservative = TriState::Yes;
    else if (dual)
      opt.external.dual_nonconservative = TriState::Yes;
  }
  return classify(ex.cf, ex.densities[std::size_t(density_index)], opt);
}

} // namespace invlab

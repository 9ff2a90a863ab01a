#include "invlab/weak_form.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "invlab/quadrature.hpp"
#include "invlab/util.hpp"

namespace invlab {

std::string to_string(CheckVerdict v) {
  switch (v) {
    case CheckVerdict::Pass: return "pass";
    case CheckVerdict::Fail: return "fail";
    case CheckVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

std::optional<Box> intersect(const Box& a, const Box& b) {
  Box r;
  r.lo = a.lo.cwiseMax(b.lo);
  r.hi = a.hi.cwiseMin(b.hi);
  for (int k = 0; k < r.dim(); ++k)
    if (!(r.lo[k] < r.hi[k])) return std::nullopt;
  return r;
}

double apply_L_to(const CoefficientField& cf, const TestFunction& fn, const Vec& x) {
  const Vec grad = fn.gradient(x);
  const Mat hess = fn.hessian(x);
  return 0.5 * cf.A(x).cwiseProduct(hess).sum() + cf.G(x).dot(grad);
}

// Polar-coordinate domain for d == 2 radial densities whose profile has known
// kinks: in (r, theta) the kink circles become cell-aligned segment ends, so
// Gauss-Legendre convergence stays spectral instead of stalling on a curved
// discontinuity. The segments jointly cover the support of the test function.
struct PolarDomain {
  std::vector<double> cuts; // radial segment boundaries, ascending
  double theta_c = 0.0, half = M_PI;
};

PolarDomain polar_domain(const DensitySpec& rho, const TestFunction& fn) {
  PolarDomain dom;
  const double rc = fn.center.norm();
  const double rad = fn.radius;
  const double r_lo = std::max(0.0, rc - rad);
  const double r_hi = rc + rad;
  if (rc > rad) {
    dom.theta_c = std::atan2(fn.center[1], fn.center[0]);
    dom.half = std::asin(std::min(1.0, rad / rc));
  }
  dom.cuts.push_back(r_lo);
  for (double b : rho.profile_breakpoints)
    if (b > r_lo && b < r_hi) dom.cuts.push_back(b);
  dom.cuts.push_back(r_hi);
  std::sort(dom.cuts.begin(), dom.cuts.end());
  return dom;
}

QuadratureResult integrate_polar(const PolarDomain& dom, const BoxIntegrand& integrand,
                                 const QuadratureControl& ctl) {
  QuadratureResult total;
  total.value.assign(1, 0.0);
  total.error.assign(1, 0.0);
  total.converged = true;
  for (std::size_t s = 0; s + 1 < dom.cuts.size(); ++s) {
    Box seg;
    seg.lo = Vec(2);
    seg.hi = Vec(2);
    seg.lo << dom.cuts[s], dom.theta_c - dom.half;
    seg.hi << dom.cuts[s + 1], dom.theta_c + dom.half;
    const QuadratureResult q = adaptive_box_quadrature(integrand, 1, seg, ctl);
    total.value[0] += q.value[0];
    total.error[0] += q.error[0];
    total.cells += q.cells;
    total.converged = total.converged && q.converged;
  }
  return total;
}

FunctionResidual residual_for(const CoefficientField& cf, const DensitySpec& rho,
                              const TestFunction& fn, const InvarianceOptions& options) {
  FunctionResidual out;
  out.label = fn.label();
  out.center = fn.center;
  out.radius = fn.radius;

  const bool polar =
      cf.d == 2 && rho.radial_profile && !rho.profile_breakpoints.empty();
  PolarDomain dom;
  if (polar) dom = polar_domain(rho, fn);

  // The signed residual and its normalizer integral int |L f| rho get
  // separate passes. The normalizer has kinks along the zero set of L f and
  // only scales the relative residual, so a few digits are enough; jamming it
  // into the residual quadrature would either stall convergence on the kinks
  // or let the kink cells starve the refinement of the smooth signed part.
  BoxIntegrand norm_integrand;
  BoxIntegrand res_integrand;
  if (polar) {
    auto eval_lf_w = [&cf, &rho, &fn](const Vec& p, double& lf, double& w) {
      const double r = p[0];
      Vec x(2);
      x[0] = r * std::cos(p[1]);
      x[1] = r * std::sin(p[1]);
      lf = apply_L_to(cf, fn, x);
      w = rho.radial_profile(r) * r;
    };
    norm_integrand = [eval_lf_w](const Vec& p, double* vals) {
      double lf, w;
      eval_lf_w(p, lf, w);
      vals[0] = std::abs(lf) * w;
    };
    res_integrand = [eval_lf_w](const Vec& p, double* vals) {
      double lf, w;
      eval_lf_w(p, lf, w);
      vals[0] = lf * w;
    };
  } else {
    // Densities with an out-of-range exponent are integrated against
    // exp(log rho - shift): the relative residual is invariant under scaling
    // the measure, so any shift within a few hundred nats of the exponent's
    // maximum over the support keeps every evaluation finite. A coarse probe
    // lattice is plenty for that.
    double log_shift = 0.0;
    if (rho.log_density) {
      const Box sup = fn.support();
      const int n = 9;
      double emax = -std::numeric_limits<double>::infinity();
      Vec x(sup.dim());
      std::vector<int> idx(std::size_t(sup.dim()), 0);
      for (;;) {
        for (int k = 0; k < sup.dim(); ++k)
          x[k] = sup.lo[k] + (sup.hi[k] - sup.lo[k]) * idx[std::size_t(k)] / (n - 1);
        emax = std::max(emax, rho.log_density(x));
        int k = 0;
        while (k < sup.dim() && ++idx[std::size_t(k)] == n) idx[std::size_t(k++)] = 0;
        if (k == sup.dim()) break;
      }
      log_shift = emax;
    }
    out.log_scale = log_shift;
    auto eval_lf_w = [&cf, &rho, &fn, log_shift](const Vec& x, double& lf, double& w) {
      lf = apply_L_to(cf, fn, x);
      // weight(): super-exponential tilts legitimately underflow to 0 inside
      // a support box; the integrand's correct limit there is 0.
      w = rho.log_density ? std::exp(rho.log_density(x) - log_shift)
                          : rho.weight(x);
    };
    norm_integrand = [eval_lf_w](const Vec& x, double* vals) {
      double lf, w;
      eval_lf_w(x, lf, w);
      vals[0] = std::abs(lf) * w;
    };
    res_integrand = [eval_lf_w](const Vec& x, double* vals) {
      double lf, w;
      eval_lf_w(x, lf, w);
      vals[0] = lf * w;
    };
  }

  QuadratureControl ctl_norm;
  ctl_norm.abs_tol = std::numeric_limits<double>::min();
  ctl_norm.rel_component = 0;
  ctl_norm.rel_tol = 1e-3;
  ctl_norm.max_cells = options.max_cells_per_function;
  const QuadratureResult qn =
      polar ? integrate_polar(dom, norm_integrand, ctl_norm)
            : adaptive_box_quadrature(norm_integrand, 1, fn.support(), ctl_norm);

  QuadratureControl ctl_res;
  ctl_res.abs_tol = std::max((options.tol / 10.0) * qn.value[0],
                             std::numeric_limits<double>::min());
  ctl_res.max_cells = options.max_cells_per_function;
  const QuadratureResult qr =
      polar ? integrate_polar(dom, res_integrand, ctl_res)
            : adaptive_box_quadrature(res_integrand, 1, fn.support(), ctl_res);

  out.residual = qr.value[0];
  out.normalizer = qn.value[0];
  out.quad_error = qr.error[0];
  out.cells = qn.cells + qr.cells;
  out.converged = qn.converged && qr.converged;
  const double floor = std::numeric_limits<double>::min();
  out.relative = std::abs(out.residual) / std::max(out.normalizer, floor);
  out.pass = out.converged && out.relative <= options.tol;
  return out;
}

} // namespace

ResidualReport invariance_residual(const CoefficientField& cf, const DensitySpec& rho,
                                   const std::vector<TestFunction>& battery,
                                   const InvarianceOptions& options) {
  ResidualReport report;
  report.tol = options.tol;
  report.functions.resize(battery.size());

  auto run_one = [&](std::int64_t i) {
    report.functions[std::size_t(i)] =
        residual_for(cf, rho, battery[std::size_t(i)], options);
  };
  if (options.parallel) {
    parallel_for(std::int64_t(battery.size()), run_one);
  } else {
    for (std::int64_t i = 0; i < std::int64_t(battery.size()); ++i) run_one(i);
  }

  bool any_fail = false, any_inconclusive = false;
  for (const auto& f : report.functions) {
    report.max_relative = std::max(report.max_relative, f.relative);
    if (!f.converged)
      any_inconclusive = true;
    else if (!f.pass)
      any_fail = true;
  }
  report.verdict = any_fail          ? CheckVerdict::Fail
                   : any_inconclusive ? CheckVerdict::Inconclusive
                                      : CheckVerdict::Pass;
  return report;
}

double form_energy(const CoefficientField& cf, const DensitySpec& rho,
                   const TestFunction& f, const TestFunction& g, double abs_tol,
                   int max_cells) {
  const auto box = intersect(f.support(), g.support());
  if (!box) return 0.0;

  // Symmetrized so that swapping f and g only swaps the two addends; the
  // result is then bit-identical by commutativity of +.
  BoxIntegrand integrand = [&](const Vec& x, double* vals) {
    const Vec u = f.gradient(x);
    const Vec v = g.gradient(x);
    const Mat a = cf.A(x);
    const double w = rho.weight(x);
    vals[0] = 0.25 * (u.dot(a * v) + v.dot(a * u)) * w;
  };
  QuadratureControl ctl;
  ctl.abs_tol = abs_tol;
  ctl.max_cells = max_cells;
  return adaptive_box_quadrature(integrand, 1, *box, ctl).value[0];
}

SymmetricIdentityResult symmetric_identity_check(const CoefficientField& cf,
                                                 const DensitySpec& rho,
                                                 const TestFunction& f,
                                                 const TestFunction& g, double tol) {
  SymmetricIdentityResult res;
  res.rhs = -form_energy(cf, rho, f, g);

  const auto box = intersect(f.support(), g.support());
  if (box) {
    const C2Field fc = f.as_c2();
    BoxIntegrand integrand = [&](const Vec& x, double* vals) {
      vals[0] = apply_L_sym(cf, rho, fc, x) * g.value(x) * rho.weight(x);
    };
    QuadratureControl ctl;
    ctl.abs_tol = 1e-11;
    ctl.max_cells = 20000;
    res.lhs = adaptive_box_quadrature(integrand, 1, *box, ctl).value[0];
  }
  res.defect = res.lhs - res.rhs;
  res.pass = std::abs(res.defect) <= tol * std::max({1.0, std::abs(res.lhs), std::abs(res.rhs)});
  return res;
}

DriftDefectResult drift_defect(const CoefficientField& cf, const DensitySpec& rho,
                               const TestFunction& f, const TestFunction& g, double tol) {
  DriftDefectResult res;
  const double energy = form_energy(cf, rho, f, g);
  const auto box = intersect(f.support(), g.support());
  double lg = 0.0, drift = 0.0;
  if (box) {
    const C2Field fc = f.as_c2();
    const DriftDecomposition dec = drift_decomposition(cf, rho);
    BoxIntegrand integrand = [&](const Vec& x, double* vals) {
      const double gw = g.value(x) * rho.weight(x);
      vals[0] = apply_L(cf, fc, x) * gw;
      vals[1] = dec.B(x).dot(fc.gradient(x)) * gw;
    };
    QuadratureControl ctl;
    ctl.abs_tol = 1e-11;
    ctl.max_cells = 20000;
    const auto q = adaptive_box_quadrature(integrand, 2, *box, ctl);
    lg = q.value[0];
    drift = q.value[1];
  }
  res.full_lhs = lg + energy;
  res.drift_term = drift;
  res.defect = res.full_lhs - res.drift_term;
  res.pass = std::abs(res.defect) <=
             tol * std::max({1.0, std::abs(res.full_lhs), std::abs(res.drift_term)});
  return res;
}

} // namespace invlab

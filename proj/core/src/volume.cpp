#include "invlab/volume.hpp"

#include <cmath>

#include "invlab/quadrature.hpp"
#include "invlab/rng.hpp"
#include "invlab/util.hpp"

namespace invlab {

double unit_ball_volume(int d) {
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

namespace {

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  const double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < n; ++i)
    out[std::size_t(i)] = std::exp(la + (lb - la) * double(i) / double(n - 1));
  out.back() = hi;
  return out;
}

VolumeTable radial_table(const DensitySpec& rho, int d, const VolumeOptions& opt) {
  if (!rho.radial_profile)
    throw PreconditionError("radial volume table needs a radial density profile");
  VolumeTable table;
  table.method = VolumeMethod::RadialQuadrature;
  table.d = d;
  table.r = log_spaced(opt.r_min, opt.r_max, opt.points);
  table.se.assign(table.r.size(), 0.0);

  const double surface = d * unit_ball_volume(d); // area of the unit sphere
  const auto& profile = rho.radial_profile;
  auto shell_integrand = [&profile, d](double s) {
    return profile(s) * std::pow(s, d - 1);
  };

  // Segment-wise accumulation keeps every segment's tolerance tight
  // relative to the running total.
  double run = integrate_1d(shell_integrand, 0.0, opt.r_min, 1e-14);
  double lo = opt.r_min;
  for (double r : table.r) {
    const double tol = 1e-14 * std::max(1.0, run);
    run += integrate_1d(shell_integrand, lo, r, tol);
    lo = r;
    table.mu.push_back(surface * run);
  }
  return table;
}

VolumeTable closed_form_table(const DensitySpec& rho, int d, const VolumeOptions& opt) {
  if (!rho.ball_mass)
    throw PreconditionError("closed-form volume table needs rho.ball_mass");
  VolumeTable table;
  table.method = VolumeMethod::ClosedForm;
  table.d = d;
  table.r = log_spaced(opt.r_min, opt.r_max, opt.points);
  table.se.assign(table.r.size(), 0.0);
  for (double r : table.r) table.mu.push_back(rho.ball_mass(r));
  return table;
}

VolumeTable monte_carlo_table(const DensitySpec& rho, int d, const VolumeOptions& opt) {
  VolumeTable table;
  table.method = VolumeMethod::MonteCarlo;
  table.d = d;
  table.r = log_spaced(opt.r_min, opt.r_max, opt.points);

  const double r_max = table.r.back();
  const double ball_vol = unit_ball_volume(d) * std::pow(r_max, d);
  const std::size_t shells = table.r.size();
  std::vector<double> sum(shells, 0.0), sum2(shells, 0.0);

  // Uniform proposal on B_{r_max}: draw a direction from normals, a radius
  // from u^(1/d). One cloud serves every shell.
  RandomStream rng(opt.seed, 0x766f6c756d65ull);
  const std::int64_t n = opt.mc_samples;
  Vec x(d);
  for (std::int64_t k = 0; k < n; ++k) {
    double norm2 = 0.0;
    for (int i = 0; i < d; ++i) {
      x[i] = rng.normal();
      norm2 += x[i] * x[i];
    }
    const double norm = std::sqrt(norm2);
    const double radius = r_max * std::pow(rng.uniform(), 1.0 / d);
    if (norm > 0.0) x *= radius / norm;
    const double w = rho.weight(x);
    for (std::size_t s = 0; s < shells; ++s) {
      if (radius <= table.r[s]) {
        sum[s] += w;
        sum2[s] += w * w;
      }
    }
  }
  for (std::size_t s = 0; s < shells; ++s) {
    const double mean = sum[s] / double(n);
    const double var = std::max(0.0, sum2[s] / double(n) - mean * mean);
    table.mu.push_back(ball_vol * mean);
    table.se.push_back(ball_vol * std::sqrt(var / double(n)));
  }
  return table;
}

} // namespace

VolumeTable volume_table(const DensitySpec& rho, int d, VolumeMethod method,
                         const VolumeOptions& options) {
  if (d < 1 || d > kMaxDim) throw DimensionError("volume table: unsupported dimension");
  if (options.points < 3 || !(options.r_min > 0.0) || !(options.r_max > options.r_min))
    throw PreconditionError("volume table: need r_max > r_min > 0 and >= 3 points");
  switch (method) {
    case VolumeMethod::ClosedForm: return closed_form_table(rho, d, options);
    case VolumeMethod::RadialQuadrature: return radial_table(rho, d, options);
    case VolumeMethod::MonteCarlo: return monte_carlo_table(rho, d, options);
  }
  throw Error("unknown volume method");
}

double radial_ball_mass(const DensitySpec& rho, int d, double r) {
  if (!rho.radial_profile)
    throw PreconditionError("radial_ball_mass needs a radial density profile");
  const auto& profile = rho.radial_profile;
  const double surface = d * unit_ball_volume(d);
  return surface * integrate_1d(
                       [&profile, d](double s) { return profile(s) * std::pow(s, d - 1); },
                       0.0, r, 1e-14);
}

IntegralTestResult recurrence_integral_test(const VolumeTable& table, double margin) {
  IntegralTestResult res;
  res.margin = margin;
  if (table.r.size() < 5) throw PreconditionError("integral test needs >= 5 radii");

  // top decade of the table
  const double r_hi = table.r.back();
  const double r_lo = r_hi / 10.0;
  std::vector<double> lx, ly, z;
  for (std::size_t i = 0; i < table.r.size(); ++i) {
    if (table.r[i] >= r_lo && table.mu[i] > 0.0) {
      lx.push_back(std::log(table.r[i]));
      ly.push_back(std::log(table.mu[i]));
      z.push_back(table.mu[i] / (table.r[i] * table.r[i]));
    }
  }
  if (lx.size() < 3) throw PreconditionError("integral test: too few radii in top decade");

  auto fit_slope = [](const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return sxy / sxx;
  };

  res.kappa = fit_slope(lx, ly);
  if (res.kappa < 2.0 - margin) {
    res.conclusion = IntegralTestConclusion::Divergent;
    return res;
  }
  if (res.kappa > 2.0 + margin) {
    res.conclusion = IntegralTestConclusion::Convergent;
    return res;
  }

  // Boundary: does mu/r^2 grow with ln r? Relative growth of the fitted
  // line across the decade above 20% counts as a log factor.
  const double slope_z = fit_slope(lx, z);
  double mean_z = 0.0;
  for (double v : z) mean_z += v;
  mean_z /= double(z.size());
  const double growth = slope_z * (lx.back() - lx.front()) / std::max(mean_z, 1e-300);
  res.log_factor = growth > 0.2;
  res.conclusion = res.log_factor ? IntegralTestConclusion::Inconclusive
                                  : IntegralTestConclusion::Divergent;
  return res;
}

} // namespace invlab

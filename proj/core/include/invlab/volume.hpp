#pragma once

/// @file volume.hpp
/// Ball-mass tables mu(B_r) for a reference density and the volume-growth
/// integral test: integral of r / mu(B_r) dr diverges iff mass grows slowly
/// enough (exponent < 2, or exactly 2 without an extra log factor).

#include <cstdint>
#include <functional>
#include <vector>

#include "invlab/fields.hpp"

namespace invlab {

enum class VolumeMethod { ClosedForm, RadialQuadrature, MonteCarlo };

struct VolumeTable {
  std::vector<double> r;  // log-spaced radii
  std::vector<double> mu; // mu(B_r)
  std::vector<double> se; // Monte Carlo standard errors; zero otherwise
  VolumeMethod method = VolumeMethod::RadialQuadrature;
  int d = 0;
};

struct VolumeOptions {
  double r_min = 1.0;
  double r_max = 100.0;
  int points = 25; // log-spaced
  // Monte Carlo controls
  std::int64_t mc_samples = 200000;
  std::uint64_t seed = 1;
};

// ClosedForm requires rho.ball_mass; RadialQuadrature requires
// rho.radial_profile; MonteCarlo works for any density (uniform proposal on
// the largest ball, all radii sampled from one cloud).
VolumeTable volume_table(const DensitySpec& rho, int d, VolumeMethod method,
                         const VolumeOptions& options = {});

double unit_ball_volume(int d);

// mu(B_r) for a radial density by 1d quadrature of the shell integrand.
double radial_ball_mass(const DensitySpec& rho, int d, double r);

enum class IntegralTestConclusion { Divergent, Convergent, Inconclusive };

struct IntegralTestResult {
  double kappa = 0.0; // growth exponent fitted on the top decade
  bool log_factor = false;
  IntegralTestConclusion conclusion = IntegralTestConclusion::Inconclusive;
  double margin = 0.1;
};

// Fits mu(B_r) ~ C r^kappa on the top decade of the table. kappa < 2-margin
// means the integral diverges, kappa > 2+margin means it converges; inside
// the margin a multiplicative log factor is tested (mu/r^2 growing in ln r).
// Plain kappa = 2 growth still diverges; a detected log factor is reported
// as Inconclusive because the test cannot resolve the log's power.
IntegralTestResult recurrence_integral_test(const VolumeTable& table, double margin = 0.1);

} // namespace invlab

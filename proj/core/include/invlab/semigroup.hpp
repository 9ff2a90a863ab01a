#pragma once

/// @file semigroup.hpp
/// Monte Carlo estimates of the (sub-Markovian) semigroup action
///   (T_t f)(x) = E_x[ f(X_t); t < exit ]
/// and of its dual with drift 2 beta - G, plus the statistical checks built
/// on them: co-excessive targets, invariance of a measure under the
/// semigroup, and the restart (two-stage) consistency identity.

#include <cstdint>
#include <vector>

#include "invlab/fields.hpp"
#include "invlab/linalg.hpp"
#include "invlab/sde.hpp"
#include "invlab/testfn.hpp"
#include "invlab/weak_form.hpp"

namespace invlab {

struct MCEstimate {
  double value = 0.0;
  double se = 0.0;
  std::int64_t paths = 0, alive = 0, exited = 0, stalled = 0;
};

// Killed and stalled paths contribute 0 to the mean.
MCEstimate estimate_Ptf(const CoefficientField& cf, const ScalarField& f,
                        const SimConfig& config, const DensitySpec* rho = nullptr);

// Same estimate, but the paths are restarted from their time-t_break states
// with fresh streams. Agreement with estimate_Ptf within noise is the
// two-stage consistency identity T_{t} = T_{t - t_break} T_{t_break}.
MCEstimate estimate_Ptf_restarted(const CoefficientField& cf, const ScalarField& f,
                                  const SimConfig& config, double t_break,
                                  const DensitySpec* rho = nullptr);

// ---------------------------------------------------------------------------
// Co-excessive targets
// ---------------------------------------------------------------------------

// h = numerator / denominator is the candidate; the simulated process is the
// dual with respect to the denominator density (drift 2 beta - G). For each
// start x the estimate of E_x[h(X_t); alive] is compared with h(x):
//   pass_upper : estimate <= h(x) + sigma_tol * se   (defining inequality)
//   pass_match : |estimate - h(x)| <= sigma_tol * se (exact fixed point)
struct CoexcessivePoint {
  Vec x;
  double target = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  bool pass_upper = false;
  bool pass_match = false;
};

struct CoexcessiveReport {
  std::vector<CoexcessivePoint> points;
  double sigma_tol = 3.0;
  CheckVerdict upper_verdict = CheckVerdict::Inconclusive;
  CheckVerdict match_verdict = CheckVerdict::Inconclusive;
};

CoexcessiveReport coexcessive_check(const CoefficientField& cf, const DensitySpec& numerator,
                                    const DensitySpec& denominator,
                                    const std::vector<Vec>& starts, const SimConfig& base,
                                    double sigma_tol = 3.0);

// ---------------------------------------------------------------------------
// Invariance under the semigroup
// ---------------------------------------------------------------------------

// Compares integral of (T_t f) d(mu) against integral of f d(mu) for a
// compactly supported f. The outer integral runs over the support box of f
// inflated by 6 sqrt(t Lambda) + t sup|G| (coefficient bounds sampled on the
// support), on a fixed composite Gauss-Legendre grid; each node value is a
// Monte Carlo estimate with its own stream. The quadrature error is gauged
// against a half-resolution grid, the Monte Carlo error by propagating
// per-node standard errors through the weights. Requires d <= 2.
struct SemigroupInvarianceOptions {
  double t = 0.5;
  double h = 1.0 / 1024.0;
  Scheme scheme = Scheme::Tamed;
  double r_kill = 50.0;
  std::int64_t paths_per_node = 4000;
  std::uint64_t seed = 2026;
  double panel_width = 1.0;
  double sigma_tol = 3.0;
};

struct SemigroupInvarianceResult {
  double lhs = 0.0;  // integral of (T_t f) rho dx over the inflated box
  double rhs = 0.0;  // integral of f rho dx
  double defect = 0.0;
  double quad_error = 0.0;
  double mc_se = 0.0;
  double tolerance = 0.0;
  int nodes = 0;
  Box box;
  bool pass = false;
};

SemigroupInvarianceResult invariance_under_semigroup_check(
    const CoefficientField& cf, const DensitySpec& rho, const TestFunction& f,
    const SemigroupInvarianceOptions& opt);

} // namespace invlab

#pragma once

/// @file criteria.hpp
/// Sampled drift criteria and the recurrence/transience/conservativeness
/// classifier.
///
/// All checks here are sampled certificates: inequalities are verified on
/// log-spaced shells of low-discrepancy points outside a ball. A failing
/// sufficient criterion is never treated as a disproof; "transient" is only
/// asserted through the dichotomy plus a positive transience indicator
/// (two essentially different invariant densities, a convergent volume-growth
/// integral test in the symmetric case, or a certified non-conservative
/// semigroup).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "invlab/fields.hpp"
#include "invlab/operators.hpp"
#include "invlab/volume.hpp"
#include "invlab/weak_form.hpp"

namespace invlab {

struct ShellConfig {
  double r_min = 1.0;
  double r_max = 100.0;
  int shells = 8; // log-spaced radii
  int samples_per_shell = 256;
  std::uint64_t seed = 7;
};

struct ShellSample {
  double r = 0.0;
  double worst = 0.0; // max over the shell of (lhs - rhs); <= 0 passes
  Vec arg_worst;
  double inf_V = 0.0;
  bool ok = false;
};

// ------------------------------------------------------------ Lyapunov side

enum class LyapunovTarget {
  RecurrenceDrift, // L V <= -c outside B_N0, with inf_shell V increasing
  DualAntiDrift,   // L' V >= alpha V  (V > 0): dual semigroup loses mass
  PrimalAntiDrift, // L V >= alpha V   (V > 0): primal semigroup loses mass
};

struct LyapunovSpec {
  C2Field V;
  double N0 = 1.0;
  LyapunovTarget target = LyapunovTarget::RecurrenceDrift;
  double c = 0.0;     // RecurrenceDrift margin; c > 0 also certifies finite mass
  double alpha = 0.0; // anti-drift rate
  bool require_growth = true;
  std::string name;
};

struct LyapunovReport {
  std::vector<ShellSample> shells;
  bool growth_ok = true;
  CheckVerdict verdict = CheckVerdict::Inconclusive;
  std::string description;
};

// rho is required for DualAntiDrift and ignored otherwise.
LyapunovReport lyapunov_shell_check(const CoefficientField& cf, const DensitySpec* rho,
                                    const LyapunovSpec& spec, const ShellConfig& shells);

// V(x) = 1/2 ln(max(|x|^2, N0^2)) + 2, with analytic derivatives outside B_N0.
C2Field radial_log_lyapunov(int d, double N0);
// V(x) = 1 + |x|^2.
C2Field quadratic_lyapunov(int d);

// ----------------------------------------------------- closed-form criteria

struct SampledInequality {
  CheckVerdict verdict = CheckVerdict::Inconclusive;
  double worst_margin = 0.0; // max over samples of lhs - rhs
  Vec arg_worst;
  std::string description;
};

// -<A(x)x,x>/|x|^2 + tr A(x)/2 + <G(x),x> <= -c |x|^2 outside B_{r_min}.
// Passing with c = 0 certifies recurrence; c > 0 additionally certifies a
// finite invariant mass.
SampledInequality radial_drift_bound(const CoefficientField& cf, double c,
                                     const ShellConfig& shells);

// d = 2 only: |lambda_1(A) - lambda_2(A)|/2 + <G(x),x> <= -c |x|^2.
SampledInequality eigen_gap_bound(const CoefficientField& cf, double c,
                                  const ShellConfig& shells);

// -<A(x)x,x>/|x|^2 + tr A(x)/2 + <drift,x> <= M |x|^2 (ln|x| + 1):
// no finite-time escape to infinity (conservativeness certificate).
SampledInequality conservativeness_growth_bound(const CoefficientField& cf,
                                                const VectorField& drift, double M,
                                                const ShellConfig& shells);

// <A(x)x,x>/|x|^2 + |<B(x),x>| <= M |x|^2 ln(|x| + 1); with a finite measure
// this certifies recurrence.
SampledInequality coefficient_growth_bound(const CoefficientField& cf,
                                           const DensitySpec& rho, double M,
                                           const ShellConfig& shells);

// -------------------------------------------------------- a_n divergence

struct AnDivergenceOptions {
  double n_min = 2.0;
  double n_max = 100.0;
  int grid = 9; // log-spaced evaluation points
  std::int64_t mc_samples = 400000;
  double mc_se_cap = 0.05; // relative SE above this -> inconclusive
  std::uint64_t seed = 11;
};

struct AnDivergenceResult {
  std::vector<double> n;
  std::vector<double> a;     // a_n = integral_1^n r / D(r) dr
  std::vector<double> ratio; // ln(max(N(n),1)) / a_n
  bool a_diverges = false;
  bool ratio_vanishes = false;
  CheckVerdict verdict = CheckVerdict::Inconclusive;
  std::string method;
};

// D(r) = integral over B_r of (<Ax,x>/|x|^2 + |<B,x>|) dmu and
// N(r) = integral over B_r of |<B,x>| dmu; radial quadrature when the
// integrand is radial, Monte Carlo with an SE cap otherwise. Passing
// (a_n diverging, ratio -> 0) certifies recurrence without symmetry.
AnDivergenceResult an_divergence_check(const CoefficientField& cf, const DensitySpec& rho,
                                       const AnDivergenceOptions& options = {});

// ------------------------------------------------- L1 coefficient integrals

struct IntegrabilityResult {
  CheckVerdict verdict = CheckVerdict::Inconclusive;
  double tail_fraction = 0.0; // last-decade share of the integral
  std::string description;
};

// Checks tr A and |B| integrable against mu; radial densities only, anything
// else is reported inconclusive ("unsupported").
IntegrabilityResult coefficient_integrability_check(const CoefficientField& cf,
                                                    const DensitySpec& rho,
                                                    double r_max = 1000.0);

// ----------------------------------------------------------- classification

enum class TriState { Yes, No, Unknown };
const char* to_string(TriState t);

// Facts certified outside this call (gallery metadata, Lyapunov runs).
struct ExternalEvidence {
  int invariant_density_count = 1;
  TriState dual_nonconservative = TriState::Unknown;
  TriState primal_nonconservative = TriState::Unknown;
};

struct CriterionOutcome {
  std::string name;
  CheckVerdict verdict = CheckVerdict::Inconclusive;
  double numeric = 0.0;
  std::string note;
};

struct Verdict {
  TriState recurrent = TriState::Unknown; // No means transient (dichotomy)
  TriState conservative_primal = TriState::Unknown;
  TriState conservative_dual = TriState::Unknown;
  TriState finite_mass = TriState::Unknown;
  TriState invariant_for_primal = TriState::Unknown; // rho dx invariant for T_t
  TriState invariant_for_dual = TriState::Unknown;   // rho dx invariant for T'_t
  TriState unique_invariant_density = TriState::Unknown;
  bool inconsistent = false;
  std::vector<CriterionOutcome> criteria;
  std::vector<std::string> evidence; // implication rules fired, human readable
};

struct ClassifyOptions {
  ShellConfig shells;
  double drift_c = 0.0;
  double finite_drift_c = 0.01;
  double conservativeness_M = 10.0;
  VolumeOptions volume;
  double integral_test_margin = 0.1;
  AnDivergenceOptions an;
  bool run_volume_test = true;
  bool run_an_check = true;
  ExternalEvidence external;
};

Verdict classify(const CoefficientField& cf, const DensitySpec& rho,
                 const ClassifyOptions& options = {});

} // namespace invlab

#pragma once

/// @file ou.hpp
/// Closed-form transition data for the linear diffusion
///   L f = tr(Q grad^2 f) + <B x, grad f>,
/// i.e. A = 2Q, G(x) = B x. X_t from x is Gaussian with mean e^{tB} x and
/// covariance Sigma_t = 2 integral_0^t e^{sB} Q e^{sB^T} ds, which gives an
/// independent oracle for Monte Carlo semigroup estimates.

#include "invlab/fields.hpp"
#include "invlab/linalg.hpp"

namespace invlab {

struct OUSpec {
  int d = 1;
  Mat Q; // symmetric positive definite
  Mat B;
};

CoefficientField ou_coefficient_field(const OUSpec& spec);

Mat matrix_exponential(const Mat& M);

// Mean e^{tB} x and covariance Sigma_t (adaptive Simpson, entrywise tol 1e-12).
Vec ou_mean(const OUSpec& spec, const Vec& x, double t);
Mat ou_covariance(const OUSpec& spec, double t);

// E_x f(X_t) by tensor Gauss-Hermite after whitening (d <= 4).
double ou_expectation(const OUSpec& spec, const ScalarField& f, const Vec& x, double t,
                      int nodes_per_axis = 40);

// Closed forms for specific observables.
double ou_expectation_coordinate(const OUSpec& spec, int i, const Vec& x, double t);
double ou_expectation_squared_norm(const OUSpec& spec, const Vec& x, double t);
// E_x exp(-gamma |X_t|^2) = det(I + 2 gamma Sigma)^{-1/2}
//                           * exp(-gamma m^T (I + 2 gamma Sigma)^{-1} m).
double ou_expectation_gaussian(const OUSpec& spec, double gamma, const Vec& x, double t);

// Gauss-Hermite rule for weight e^{-u^2} on the line (Golub-Welsch).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights; // sum to sqrt(pi)
};
GaussHermiteRule gauss_hermite(int n);

} // namespace invlab

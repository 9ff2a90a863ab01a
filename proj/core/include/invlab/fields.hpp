#pragma once

/// @file fields.hpp
/// Scalar/vector/matrix fields on R^d, finite-difference fallbacks, diffusion
/// coefficient pairs (A, G) and reference densities.

#include <functional>
#include <optional>
#include <string>

#include "invlab/errors.hpp"
#include "invlab/expr.hpp"
#include "invlab/linalg.hpp"

namespace invlab {

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;
using MatrixField = std::function<Mat(const Vec&)>;

// Central finite differences. Step sizes follow the usual truncation vs
// roundoff tradeoff: h ~ eps^(1/3) for first derivatives, eps^(1/4) for
// second, both scaled by max(1, |x_i|).
double fd_step_first(double xi);
double fd_step_second(double xi);
Vec fd_gradient(const ScalarField& f, const Vec& x);
Mat fd_hessian(const ScalarField& f, const Vec& x);

// A twice-differentiable scalar field. Derivatives are analytic when the
// caller has them and finite-difference fallbacks otherwise.
struct C2Field {
  ScalarField value;
  VectorField gradient;
  MatrixField hessian;

  static C2Field from_value(ScalarField f);
  static C2Field analytic(ScalarField f, VectorField grad, MatrixField hess);
};

// Diffusion matrix A (symmetric, stored as its upper triangle) plus drift G.
struct CoefficientField {
  int d = 0;
  std::string name;
  std::string description;

  // Writes the upper triangle (i <= j) of A(x); the lower is mirrored.
  std::function<void(const Vec&, Mat&)> fill_upper;
  VectorField G;

  // Optional analytic row divergence: (div A)_i = sum_j d_j a_ij.
  VectorField div_A;
  // Set when A does not depend on x; steppers then factor it once.
  bool constant_A = false;

  Mat A(const Vec& x) const;
  Vec row_divergence(const Vec& x) const;

  static CoefficientField constant(int d, const Mat& A, VectorField G, std::string name = {});
  // A(x) = phi(x) * Id. grad_phi may be null (finite differences).
  static CoefficientField isotropic(int d, ScalarField phi, VectorField grad_phi,
                                    VectorField G, std::string name = {});
};

enum class Finiteness { Finite, Infinite, Unknown };

// Density rho of a reference measure rho dx. Must be strictly positive;
// value() enforces this.
struct DensitySpec {
  ScalarField rho;
  VectorField grad_rho; // null -> finite differences
  // Gradient of ln(rho). Optional, but drift decompositions prefer it: the
  // ratio grad_rho / rho breaks down where rho underflows while the score
  // stays perfectly finite.
  VectorField score;
  Finiteness finiteness = Finiteness::Unknown;
  std::optional<double> total_mass;
  // For radial densities: rho as a function of r = |x|, used by the
  // closed-form volume routines.
  std::function<double(double)> radial_profile;
  // Radii where the profile (or the drift built from it) loses smoothness;
  // quadratures split their domains here instead of hunting for the kink.
  std::vector<double> profile_breakpoints;
  // Exact ball mass r -> mu(B_r) when a closed form is known.
  std::function<double(double)> ball_mass;
  // ln(rho), for densities whose exponent leaves the double range on the
  // region of interest. Quadratures that only need rho up to a constant
  // factor evaluate exp(log_density - shift) with a locally chosen shift
  // instead of overflowing in rho itself.
  ScalarField log_density;
  std::string name;

  double value(const Vec& x) const;
  // Raw density for Monte Carlo / quadrature weights: underflow to zero is
  // fine there, negative values still throw.
  double weight(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Vec log_gradient(const Vec& x) const; // score if set, else gradient / value

  static DensitySpec from_expression(const Expression& e, Finiteness fin = Finiteness::Unknown,
                                     std::string name = {});
};

// Wraps parsed expressions into field callables.
ScalarField field_from_expression(const Expression& e);
VectorField vector_field_from_expressions(const std::vector<Expression>& components);

} // namespace invlab

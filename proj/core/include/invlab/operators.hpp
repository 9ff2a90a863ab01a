#pragma once

/// @file operators.hpp
/// The generator L f = 1/2 tr(A grad^2 f) + <G, grad f>, its decomposition
/// with respect to a reference density rho, and the rho-dual generator.
///
/// With beta = 1/2 div A + (1/(2 rho)) A grad rho the drift splits as
/// G = beta + B; the dual generator keeps the second-order part and flips
/// the non-symmetric drift: L' f = 1/2 tr(A grad^2 f) + <2 beta - G, grad f>.

#include <cstdint>

#include "invlab/fields.hpp"
#include "invlab/linalg.hpp"

namespace invlab {

struct DriftDecomposition {
  VectorField beta; // symmetric part of the drift w.r.t. rho
  VectorField B;    // G - beta, the divergence-free-in-measure remainder
};

DriftDecomposition drift_decomposition(const CoefficientField& cf, const DensitySpec& rho);

// L f at x.
double apply_L(const CoefficientField& cf, const C2Field& f, const Vec& x);

// Dual generator at x: 1/2 tr(A grad^2 f) + <2 beta - G, grad f>.
double apply_L_dual(const CoefficientField& cf, const DensitySpec& rho, const C2Field& f,
                    const Vec& x);

// Symmetric part only: 1/2 tr(A grad^2 f) + <beta, grad f>.
double apply_L_sym(const CoefficientField& cf, const DensitySpec& rho, const C2Field& f,
                   const Vec& x);

struct EllipticityReport {
  bool positive_definite = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  Vec argmin;
  int samples = 0;
};

// Samples A(x) at low-discrepancy points in B_radius(center) and bounds its
// spectrum. positive_definite is a sampled certificate, not a proof.
EllipticityReport check_ellipticity(const CoefficientField& cf, const Vec& center,
                                    double radius, int samples, std::uint64_t seed);

// Lower-triangular L with L L^T = a. Throws FactorizationError naming the
// first non-positive pivot if a is not positive definite.
Mat cholesky_lower(const Mat& a);

// Cholesky factor of A(x).
Mat diffusion_factor(const CoefficientField& cf, const Vec& x);

} // namespace invlab

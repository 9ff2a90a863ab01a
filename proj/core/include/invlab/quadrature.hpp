#pragma once

/// @file quadrature.hpp
/// Adaptive tensor-product Gauss-Legendre quadrature on axis-aligned boxes.
///
/// Each cell's value is the sum of order-7 Gauss-Legendre rules over its two
/// halves; the order-7 rule on the whole cell provides the error estimate by
/// comparison. Differencing two node spacings keeps the estimate honest for
/// sharply localized integrands, where two same-width rules of different
/// order can agree while both miss the feature. The box is first split
/// uniformly into a minimum number of cells, then cells are split dyadically
/// along their longest edge, worst cell first, until the summed error
/// estimate meets the requested tolerance or the cell budget runs out.
/// Integrands may be vector-valued so related integrals share every
/// evaluation point.

#include <functional>
#include <vector>

#include "invlab/errors.hpp"
#include "invlab/fields.hpp"
#include "invlab/linalg.hpp"

namespace invlab {

struct Box {
  Vec lo, hi;
  int dim() const { return int(lo.size()); }
};

// Writes `components` values at x into out[0..components).
using BoxIntegrand = std::function<void(const Vec& x, double* out)>;

struct QuadratureControl {
  double abs_tol = 1e-10;
  // When rel_component >= 0 the effective tolerance is
  // max(abs_tol, rel_tol * |current integral of that component|).
  int rel_component = -1;
  double rel_tol = 0.0;
  int max_cells = 20000;
  // The box is split uniformly into at least this many cells before
  // error-driven refinement starts. A single wide cell can sample a sharply
  // localized integrand only in its tails, where coarse rules agree and the
  // error estimate is deceptively small; the forced subdivision makes sure
  // every region is judged from a reasonably fine stencil before the
  // priority queue decides it is done.
  int min_cells = 32;
};

struct QuadratureResult {
  std::vector<double> value;
  std::vector<double> error;
  int cells = 0;
  bool converged = false;
};

// Single-cell estimate: two-half order-7 value, whole-cell rule as the error
// reference.
void gauss_box_estimate(const BoxIntegrand& f, int components, const Box& box,
                        double* value, double* error);

// Order-7 Gauss-Legendre rule on [-1, 1], for callers building fixed
// composite grids (for example around Monte Carlo node values).
struct GaussLegendre7 {
  const double* nodes;   // 7 entries
  const double* weights; // 7 entries, sum to 2
};
GaussLegendre7 gauss_legendre_7();

// Boxes up to dimension 4 (tensor grids grow as 7^d).
QuadratureResult adaptive_box_quadrature(const BoxIntegrand& f, int components,
                                         const Box& box, const QuadratureControl& ctl);

double integrate_box(const ScalarField& f, const Box& box, double abs_tol,
                     int max_cells = 20000);

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double abs_tol, int max_cells = 20000);

} // namespace invlab

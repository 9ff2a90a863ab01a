#include "invlab/operators.hpp"

#include <cmath>

#include "invlab/lowdisc.hpp"

namespace invlab {

DriftDecomposition drift_decomposition(const CoefficientField& cf, const DensitySpec& rho) {
  DriftDecomposition dec;
  dec.beta = [cf, rho](const Vec& x) -> Vec {
    return 0.5 * cf.row_divergence(x) + 0.5 * (cf.A(x) * rho.log_gradient(x));
  };
  VectorField beta = dec.beta;
  VectorField G = cf.G;
  dec.B = [G, beta](const Vec& x) -> Vec { return G(x) - beta(x); };
  return dec;
}

namespace {

double half_trace_term(const CoefficientField& cf, const C2Field& f, const Vec& x) {
  const Mat a = cf.A(x);
  const Mat h = f.hessian(x);
  return 0.5 * a.cwiseProduct(h).sum();
}

} // namespace

double apply_L(const CoefficientField& cf, const C2Field& f, const Vec& x) {
  return half_trace_term(cf, f, x) + cf.G(x).dot(f.gradient(x));
}

double apply_L_dual(const CoefficientField& cf, const DensitySpec& rho, const C2Field& f,
                    const Vec& x) {
  const Vec beta = 0.5 * cf.row_divergence(x) + 0.5 * (cf.A(x) * rho.log_gradient(x));
  const Vec drift = 2.0 * beta - cf.G(x);
  return half_trace_term(cf, f, x) + drift.dot(f.gradient(x));
}

double apply_L_sym(const CoefficientField& cf, const DensitySpec& rho, const C2Field& f,
                   const Vec& x) {
  const Vec beta = 0.5 * cf.row_divergence(x) + 0.5 * (cf.A(x) * rho.log_gradient(x));
  return half_trace_term(cf, f, x) + beta.dot(f.gradient(x));
}

EllipticityReport check_ellipticity(const CoefficientField& cf, const Vec& center,
                                    double radius, int samples, std::uint64_t seed) {
  EllipticityReport rep;
  rep.samples = samples;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  rep.max_eigenvalue = 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> solver;
  for (const Vec& x : low_discrepancy_ball(center, radius, samples, seed)) {
    solver.compute(cf.A(x), Eigen::EigenvaluesOnly);
    const double lo = solver.eigenvalues().minCoeff();
    const double hi = solver.eigenvalues().maxCoeff();
    if (lo < rep.min_eigenvalue) {
      rep.min_eigenvalue = lo;
      rep.argmin = x;
    }
    rep.max_eigenvalue = std::max(rep.max_eigenvalue, hi);
  }
  rep.positive_definite = rep.min_eigenvalue > 0.0;
  return rep;
}

Mat cholesky_lower(const Mat& a) {
  const int d = int(a.rows());
  Mat l = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    double pivot = a(j, j);
    for (int k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > 0.0))
      throw FactorizationError("matrix is not positive definite: pivot " +
                                   std::to_string(j) + " is " + std::to_string(pivot),
                               j);
    l(j, j) = std::sqrt(pivot);
    for (int i = j + 1; i < d; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

Mat diffusion_factor(const CoefficientField& cf, const Vec& x) {
  return cholesky_lower(cf.A(x));
}

} // namespace invlab

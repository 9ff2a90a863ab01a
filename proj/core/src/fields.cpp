#include "invlab/fields.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace invlab {

namespace {
const double kEps = std::numeric_limits<double>::epsilon();
const double kStep1 = std::cbrt(kEps);
const double kStep2 = std::pow(kEps, 0.25);
} // namespace

double fd_step_first(double xi) { return kStep1 * std::max(1.0, std::abs(xi)); }
double fd_step_second(double xi) { return kStep2 * std::max(1.0, std::abs(xi)); }

Vec fd_gradient(const ScalarField& f, const Vec& x) {
  const int d = int(x.size());
  Vec g(d);
  Vec xp = x, xm = x;
  for (int i = 0; i < d; ++i) {
    const double h = fd_step_first(x[i]);
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

Mat fd_hessian(const ScalarField& f, const Vec& x) {
  const int d = int(x.size());
  Mat h(d, d);
  const double f0 = f(x);
  Vec y = x;
  for (int i = 0; i < d; ++i) {
    const double hi = fd_step_second(x[i]);
    y[i] = x[i] + hi;
    const double fp = f(y);
    y[i] = x[i] - hi;
    const double fm = f(y);
    y[i] = x[i];
    h(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double hi = fd_step_second(x[i]);
      const double hj = fd_step_second(x[j]);
      y[i] = x[i] + hi; y[j] = x[j] + hj; const double fpp = f(y);
      y[j] = x[j] - hj; const double fpm = f(y);
      y[i] = x[i] - hi; const double fmm = f(y);
      y[j] = x[j] + hj; const double fmp = f(y);
      y[i] = x[i]; y[j] = x[j];
      h(i, j) = h(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
    }
  }
  return h;
}

C2Field C2Field::from_value(ScalarField f) {
  C2Field c;
  c.value = f;
  c.gradient = [f](const Vec& x) { return fd_gradient(f, x); };
  c.hessian = [f](const Vec& x) { return fd_hessian(f, x); };
  return c;
}

C2Field C2Field::analytic(ScalarField f, VectorField grad, MatrixField hess) {
  return C2Field{std::move(f), std::move(grad), std::move(hess)};
}

// ---------------------------------------------------------- CoefficientField

Mat CoefficientField::A(const Vec& x) const {
  if (int(x.size()) != d)
    throw DimensionError("coefficient field '" + name + "' has dimension " +
                         std::to_string(d) + ", point has " + std::to_string(x.size()));
  Mat a(d, d);
  fill_upper(x, a);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j) a(i, j) = a(j, i);
  return a;
}

Vec CoefficientField::row_divergence(const Vec& x) const {
  if (div_A) return div_A(x);
  if (constant_A) return Vec::Zero(d);
  Vec div = Vec::Zero(d);
  Vec y = x;
  for (int j = 0; j < d; ++j) {
    const double h = fd_step_first(x[j]);
    y[j] = x[j] + h;
    const Mat ap = A(y);
    y[j] = x[j] - h;
    const Mat am = A(y);
    y[j] = x[j];
    for (int i = 0; i < d; ++i) div[i] += (ap(i, j) - am(i, j)) / (2.0 * h);
  }
  return div;
}

CoefficientField CoefficientField::constant(int d, const Mat& A, VectorField G,
                                            std::string name) {
  if (A.rows() != d || A.cols() != d)
    throw DimensionError("constant coefficient matrix has wrong shape");
  CoefficientField cf;
  cf.d = d;
  cf.name = std::move(name);
  cf.fill_upper = [A](const Vec&, Mat& out) { out = A; };
  cf.G = std::move(G);
  cf.div_A = [d](const Vec&) { return Vec::Zero(d); };
  cf.constant_A = true;
  return cf;
}

CoefficientField CoefficientField::isotropic(int d, ScalarField phi, VectorField grad_phi,
                                             VectorField G, std::string name) {
  CoefficientField cf;
  cf.d = d;
  cf.name = std::move(name);
  cf.fill_upper = [phi](const Vec& x, Mat& out) {
    out.setZero();
    const double v = phi(x);
    for (int i = 0; i < out.rows(); ++i) out(i, i) = v;
  };
  cf.G = std::move(G);
  if (grad_phi) {
    // (div A)_i = sum_j d_j (phi delta_ij) = d_i phi
    cf.div_A = std::move(grad_phi);
  }
  return cf;
}

// --------------------------------------------------------------- DensitySpec

double DensitySpec::value(const Vec& x) const {
  const double v = rho(x);
  if (!(v > 0.0))
    throw PreconditionError("density '" + name + "' is not strictly positive at a sample point");
  return v;
}

double DensitySpec::weight(const Vec& x) const {
  const double v = rho(x);
  if (v < 0.0)
    throw PreconditionError("density '" + name + "' is negative at a sample point");
  return v;
}

Vec DensitySpec::gradient(const Vec& x) const {
  if (grad_rho) return grad_rho(x);
  return fd_gradient(rho, x);
}

Vec DensitySpec::log_gradient(const Vec& x) const {
  if (score) return score(x);
  return gradient(x) / value(x);
}

DensitySpec DensitySpec::from_expression(const Expression& e, Finiteness fin, std::string name) {
  DensitySpec spec;
  spec.rho = field_from_expression(e);
  spec.finiteness = fin;
  spec.name = std::move(name);
  return spec;
}

// ------------------------------------------------------- expression wrappers

ScalarField field_from_expression(const Expression& e) {
  return [e](const Vec& x) { return e(x); };
}

VectorField vector_field_from_expressions(const std::vector<Expression>& components) {
  return [components](const Vec& x) {
    Vec v(components.size());
    for (std::size_t i = 0; i < components.size(); ++i) v[int(i)] = components[i](x);
    return v;
  };
}

} // namespace invlab

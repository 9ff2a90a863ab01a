#include "invlab/ou.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "invlab/errors.hpp"

namespace invlab {

CoefficientField ou_coefficient_field(const OUSpec& spec) {
  const Mat A = 2.0 * spec.Q;
  const Mat B = spec.B;
  CoefficientField cf = CoefficientField::constant(spec.d, A, [B](const Vec& x) -> Vec {
    return B * x;
  });
  cf.name = "linear-drift";
  return cf;
}

Mat matrix_exponential(const Mat& M) {
  Eigen::MatrixXd full = M;
  Eigen::MatrixXd e = full.exp();
  return Mat(e);
}

Vec ou_mean(const OUSpec& spec, const Vec& x, double t) {
  if (int(x.size()) != spec.d)
    throw DimensionError("ou_mean: x has " + std::to_string(x.size()) +
                         " coordinates, the spec needs " + std::to_string(spec.d));
  return matrix_exponential(Mat(t * spec.B)) * x;
}

namespace {

// Matrix-valued adaptive Simpson for s -> e^{sB} Q e^{sB^T} on [0, t].
struct SimpsonIntegrator {
  std::function<Mat(double)> f;
  double tol;

  Mat run(double a, double b) {
    const Mat fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const Mat whole = simpson(fa, fm, fb, b - a);
    return recurse(a, b, fa, fm, fb, whole, 24);
  }

  static Mat simpson(const Mat& fa, const Mat& fm, const Mat& fb, double h) {
    return (h / 6.0) * (fa + 4.0 * fm + fb);
  }

  Mat recurse(double a, double b, const Mat& fa, const Mat& fm, const Mat& fb,
              const Mat& whole, int depth) {
    const double m = 0.5 * (a + b);
    const Mat fl = f(0.5 * (a + m));
    const Mat fr = f(0.5 * (m + b));
    const Mat left = simpson(fa, fl, fm, m - a);
    const Mat right = simpson(fm, fr, fb, b - m);
    const Mat diff = left + right - whole;
    if (depth <= 0 || diff.cwiseAbs().maxCoeff() < 15.0 * tol)
      return left + right + diff / 15.0;
    return recurse(a, m, fa, fl, fm, left, depth - 1) +
           recurse(m, b, fm, fr, fb, right, depth - 1);
  }
};

} // namespace

Mat ou_covariance(const OUSpec& spec, double t) {
  if (t < 0.0) throw PreconditionError("ou_covariance: t must be nonnegative");
  if (t == 0.0) return Mat(Mat::Zero(spec.d, spec.d));
  const Mat Q = spec.Q;
  const Mat B = spec.B;
  SimpsonIntegrator integ{
      [&](double s) -> Mat {
        const Mat E = matrix_exponential(Mat(s * B));
        return E * Q * E.transpose();
      },
      1e-12 * std::max(1.0, Q.cwiseAbs().maxCoeff())};
  Mat Qt = integ.run(0.0, t);
  return Mat(Qt + Qt.transpose()); // symmetrize and fold in the factor 2
}

double ou_expectation(const OUSpec& spec, const ScalarField& f, const Vec& x, double t,
                      int nodes_per_axis) {
  if (spec.d > 4) throw PreconditionError("ou_expectation: tensor rule limited to d <= 4");
  const Vec m = ou_mean(spec, x, t);
  const Mat Sigma = ou_covariance(spec, t);

  Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(Sigma)};
  Eigen::MatrixXd L;
  if (llt.info() == Eigen::Success) {
    L = llt.matrixL();
  } else {
    // t = 0 or a degenerate direction: fall back to an eigen square root.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((Eigen::MatrixXd(Sigma)));
    L = es.eigenvectors() *
        es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  const GaussHermiteRule rule = gauss_hermite(nodes_per_axis);
  const int d = spec.d;
  const int n = nodes_per_axis;
  std::int64_t total = 1;
  for (int k = 0; k < d; ++k) total *= n;

  const double norm = std::pow(M_PI, -0.5 * d);
  const double sqrt2 = std::sqrt(2.0);
  double acc = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Vec u = zero_vec(d);
  for (std::int64_t flat = 0; flat < total; ++flat) {
    std::int64_t rem = flat;
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      const int ik = static_cast<int>(rem % n);
      rem /= n;
      u[k] = rule.nodes[static_cast<std::size_t>(ik)];
      w *= rule.weights[static_cast<std::size_t>(ik)];
    }
    const Vec y = m + sqrt2 * (L * u);
    acc += w * f(y);
  }
  return norm * acc;
}

double ou_expectation_coordinate(const OUSpec& spec, int i, const Vec& x, double t) {
  return ou_mean(spec, x, t)[i];
}

double ou_expectation_squared_norm(const OUSpec& spec, const Vec& x, double t) {
  const Vec m = ou_mean(spec, x, t);
  return m.squaredNorm() + ou_covariance(spec, t).trace();
}

double ou_expectation_gaussian(const OUSpec& spec, double gamma, const Vec& x, double t) {
  const Vec m = ou_mean(spec, x, t);
  const Mat Sigma = ou_covariance(spec, t);
  const Eigen::MatrixXd M =
      Eigen::MatrixXd::Identity(spec.d, spec.d) + 2.0 * gamma * Eigen::MatrixXd(Sigma);
  const Eigen::MatrixXd Minv = M.inverse();
  const double quad = gamma * (Eigen::VectorXd(m).transpose() * Minv * Eigen::VectorXd(m))(0);
  return std::exp(-quad) / std::sqrt(M.determinant());
}

GaussHermiteRule gauss_hermite(int n) {
  if (n < 1) throw PreconditionError("gauss_hermite: need at least one node");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(0.5 * k);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussHermiteRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double sqrt_pi = std::sqrt(M_PI);
  for (int k = 0; k < n; ++k) {
    rule.nodes[static_cast<std::size_t>(k)] = es.eigenvalues()[k];
    const double v0 = es.eigenvectors()(0, k);
    rule.weights[static_cast<std::size_t>(k)] = sqrt_pi * v0 * v0;
  }
  return rule;
}

} // namespace invlab

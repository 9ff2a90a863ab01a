#include "invlab/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Eigenvalues>

#include "invlab/errors.hpp"
#include "invlab/quadrature.hpp"

namespace invlab {

namespace {

MCEstimate reduce_mean(const EnsembleResult& ens, const ScalarField& f) {
  const std::size_t n = ens.status.size();
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = ens.status[i] == PathStatus::Alive ? f(ens.terminal[i]) : 0.0;
    sum += v;
    sum2 += v * v;
  }
  MCEstimate est;
  est.paths = static_cast<std::int64_t>(n);
  est.alive = ens.alive;
  est.exited = ens.exited;
  est.stalled = ens.stalled;
  est.value = sum / double(n);
  const double var = std::max(sum2 / double(n) - est.value * est.value, 0.0);
  est.se = std::sqrt(var / double(n));
  return est;
}

} // namespace

MCEstimate estimate_Ptf(const CoefficientField& cf, const ScalarField& f,
                        const SimConfig& config, const DensitySpec* rho) {
  return reduce_mean(simulate(cf, config, rho), f);
}

MCEstimate estimate_Ptf_restarted(const CoefficientField& cf, const ScalarField& f,
                                  const SimConfig& config, double t_break,
                                  const DensitySpec* rho) {
  if (!(t_break > 0.0 && t_break < config.horizon))
    throw PreconditionError("estimate_Ptf_restarted: t_break must lie in (0, horizon)");
  SimConfig first = config;
  first.horizon = t_break;
  EnsembleResult stage1 = simulate(cf, first, rho);

  SimConfig second = config;
  second.horizon = config.horizon - t_break;
  second.stream_offset = config.stream_offset + static_cast<std::uint64_t>(config.paths);
  EnsembleResult stage2 = simulate(cf, second, stage1.terminal, rho);

  // A path counts only if it survived both stages. Stage-1 exits restart
  // outside the kill ball and exit immediately; stage-1 stalls are masked.
  EnsembleResult merged = stage2;
  merged.alive = merged.exited = merged.stalled = 0;
  for (std::size_t i = 0; i < merged.status.size(); ++i) {
    if (stage1.status[i] != PathStatus::Alive) merged.status[i] = stage1.status[i];
    switch (merged.status[i]) {
      case PathStatus::Alive: ++merged.alive; break;
      case PathStatus::Exited: ++merged.exited; break;
      case PathStatus::Stalled: ++merged.stalled; break;
    }
  }
  return reduce_mean(merged, f);
}

CoexcessiveReport coexcessive_check(const CoefficientField& cf, const DensitySpec& numerator,
                                    const DensitySpec& denominator,
                                    const std::vector<Vec>& starts, const SimConfig& base,
                                    double sigma_tol) {
  // weight() rather than value(): paths may wander into regions where the
  // numerator density underflows to zero, and h -> 0 is the correct limit
  // there. The denominator must stay positive wherever paths are evaluated.
  ScalarField h = [&numerator, &denominator](const Vec& x) {
    const double den = denominator.weight(x);
    if (!(den > 0.0))
      throw PreconditionError("coexcessive_check: reference density vanished at a path terminal");
    return numerator.weight(x) / den;
  };

  CoexcessiveReport rep;
  rep.sigma_tol = sigma_tol;
  bool all_upper = true, all_match = true;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    SimConfig cfg = base;
    cfg.side = DriftSide::Dual;
    cfg.x0 = starts[k];
    cfg.stream_offset =
        base.stream_offset + static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(base.paths);
    const MCEstimate est = estimate_Ptf(cf, h, cfg, &denominator);

    CoexcessivePoint pt;
    pt.x = starts[k];
    pt.target = h(starts[k]);
    pt.estimate = est.value;
    pt.se = est.se;
    pt.pass_upper = est.value <= pt.target + sigma_tol * est.se;
    pt.pass_match = std::abs(est.value - pt.target) <= sigma_tol * est.se;
    all_upper = all_upper && pt.pass_upper;
    all_match = all_match && pt.pass_match;
    rep.points.push_back(pt);
  }
  rep.upper_verdict = all_upper ? CheckVerdict::Pass : CheckVerdict::Fail;
  rep.match_verdict = all_match ? CheckVerdict::Pass : CheckVerdict::Fail;
  return rep;
}

namespace {

struct WeightedNodes {
  std::vector<Vec> x;
  std::vector<double> w;
};

// Composite order-7 Gauss-Legendre grid with panels_k panels along axis k.
WeightedNodes composite_grid(const Box& box, const std::vector<int>& panels) {
  const GaussLegendre7 rule = gauss_legendre_7();
  const int d = box.dim();
  std::vector<std::vector<double>> axis_x(static_cast<std::size_t>(d));
  std::vector<std::vector<double>> axis_w(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const double len = box.hi[k] - box.lo[k];
    const double pw = len / panels[static_cast<std::size_t>(k)];
    for (int p = 0; p < panels[static_cast<std::size_t>(k)]; ++p) {
      const double mid = box.lo[k] + (p + 0.5) * pw;
      for (int j = 0; j < 7; ++j) {
        axis_x[static_cast<std::size_t>(k)].push_back(mid + 0.5 * pw * rule.nodes[j]);
        axis_w[static_cast<std::size_t>(k)].push_back(0.5 * pw * rule.weights[j]);
      }
    }
  }
  WeightedNodes out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    Vec x = zero_vec(d);
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      x[k] = axis_x[static_cast<std::size_t>(k)][idx[static_cast<std::size_t>(k)]];
      w *= axis_w[static_cast<std::size_t>(k)][idx[static_cast<std::size_t>(k)]];
    }
    out.x.push_back(x);
    out.w.push_back(w);
    int k = 0;
    while (k < d) {
      if (++idx[static_cast<std::size_t>(k)] < axis_x[static_cast<std::size_t>(k)].size()) break;
      idx[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == d) break;
  }
  return out;
}

} // namespace

SemigroupInvarianceResult invariance_under_semigroup_check(
    const CoefficientField& cf, const DensitySpec& rho, const TestFunction& f,
    const SemigroupInvarianceOptions& opt) {
  const int d = cf.d;
  if (d > 2)
    throw PreconditionError("invariance_under_semigroup_check: node grids limited to d <= 2");

  const Box supp = f.support();

  // Coefficient bounds sampled on the support of f fix the inflation length:
  // 6 standard deviations of the diffusion plus the drift displacement.
  double lam = 0.0, gsup = 0.0;
  {
    const int per_axis = 5;
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
      Vec x = zero_vec(d);
      for (int k = 0; k < d; ++k) {
        const double s = double(idx[static_cast<std::size_t>(k)]) / (per_axis - 1);
        x[k] = supp.lo[k] + s * (supp.hi[k] - supp.lo[k]);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((Eigen::MatrixXd(cf.A(x))));
      lam = std::max(lam, es.eigenvalues().maxCoeff());
      gsup = std::max(gsup, cf.G(x).norm());
      int k = 0;
      while (k < d && ++idx[static_cast<std::size_t>(k)] == per_axis) {
        idx[static_cast<std::size_t>(k)] = 0;
        ++k;
      }
      if (k == d) break;
    }
  }
  const double inflate = 6.0 * std::sqrt(opt.t * lam) + opt.t * gsup;

  SemigroupInvarianceResult res;
  res.box.lo = Vec(supp.lo.array() - inflate);
  res.box.hi = Vec(supp.hi.array() + inflate);

  std::vector<int> panels_fine(static_cast<std::size_t>(d));
  std::vector<int> panels_coarse(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const double len = res.box.hi[k] - res.box.lo[k];
    panels_fine[static_cast<std::size_t>(k)] =
        std::max(2, int(std::ceil(len / opt.panel_width)));
    panels_coarse[static_cast<std::size_t>(k)] =
        std::max(1, panels_fine[static_cast<std::size_t>(k)] / 2);
  }

  // Every node consumes a fresh block of path streams.
  std::uint64_t next_offset = 0;
  ScalarField fval = [&f](const Vec& y) { return f.value(y); };
  auto integrate_grid = [&](const std::vector<int>& panels, double* se_out, int* nodes_out) {
    const WeightedNodes grid = composite_grid(res.box, panels);
    if (nodes_out) *nodes_out = int(grid.x.size());
    double acc = 0.0, var = 0.0;
    for (std::size_t i = 0; i < grid.x.size(); ++i) {
      SimConfig cfg;
      cfg.x0 = grid.x[i];
      cfg.horizon = opt.t;
      cfg.h = opt.h;
      cfg.scheme = opt.scheme;
      cfg.side = DriftSide::Primal;
      cfg.r_kill = opt.r_kill;
      cfg.paths = opt.paths_per_node;
      cfg.seed = opt.seed;
      cfg.stream_offset = next_offset;
      next_offset += static_cast<std::uint64_t>(opt.paths_per_node);
      const MCEstimate est = estimate_Ptf(cf, fval, cfg);
      const double wr = grid.w[i] * rho.weight(grid.x[i]);
      acc += wr * est.value;
      var += wr * wr * est.se * est.se;
    }
    *se_out = std::sqrt(var);
    return acc;
  };

  double se_fine = 0.0, se_coarse = 0.0;
  int nodes_fine = 0;
  const double lhs_fine = integrate_grid(panels_fine, &se_fine, &nodes_fine);
  const double lhs_coarse = integrate_grid(panels_coarse, &se_coarse, nullptr);

  QuadratureControl ctl;
  ctl.abs_tol = 1e-300;
  ctl.rel_component = 0;
  ctl.rel_tol = 1e-10;
  const QuadratureResult rhs = adaptive_box_quadrature(
      [&](const Vec& x, double* out) { out[0] = f.value(x) * rho.weight(x); }, 1, supp, ctl);

  res.lhs = lhs_fine;
  res.rhs = rhs.value[0];
  res.defect = res.lhs - res.rhs;
  res.mc_se = se_fine;
  res.quad_error = std::abs(lhs_fine - lhs_coarse) + rhs.error[0];
  res.tolerance = res.quad_error + opt.sigma_tol * res.mc_se;
  res.nodes = nodes_fine;
  res.pass = std::abs(res.defect) <= res.tolerance;
  return res;
}

} // namespace invlab

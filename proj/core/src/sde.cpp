#include "invlab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "invlab/errors.hpp"
#include "invlab/operators.hpp"
#include "invlab/rng.hpp"
#include "invlab/util.hpp"

namespace invlab {

Scheme scheme_from_string(const std::string& s) {
  if (s == "euler") return Scheme::Euler;
  if (s == "tamed") return Scheme::Tamed;
  if (s == "adaptive") return Scheme::Adaptive;
  throw PreconditionError("unknown scheme '" + s + "' (euler|tamed|adaptive)");
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Euler: return "euler";
    case Scheme::Tamed: return "tamed";
    case Scheme::Adaptive: return "adaptive";
  }
  return "?";
}

namespace {

struct StepperContext {
  const CoefficientField* cf = nullptr;
  VectorField drift;   // primal G, or the dual drift 2 beta - G
  Mat sigma_const;     // valid when cf->constant_A
  bool have_const = false;
};

Vec drift_at(const StepperContext& ctx, const Vec& x) { return ctx.drift(x); }

Mat sigma_at(const StepperContext& ctx, const Vec& x) {
  if (ctx.have_const) return ctx.sigma_const;
  return cholesky_lower(ctx.cf->A(x));
}

struct PathOutcome {
  PathStatus status = PathStatus::Alive;
  double exit_time = std::numeric_limits<double>::quiet_NaN();
  Vec terminal;
  std::int64_t steps = 0;
};

// Observer is called once per accepted step with (state_before, dt).
template <typename Observer>
PathOutcome run_path(const StepperContext& ctx, const SimConfig& cfg, std::uint64_t path_index,
                     const Vec& x0, Observer&& observe) {
  RandomStream rng(cfg.seed, cfg.stream_offset + path_index);
  const int d = static_cast<int>(x0.size());
  Vec x = x0;
  Vec z = zero_vec(d);
  double t = 0.0;
  PathOutcome out;
  const double h_floor = cfg.h * cfg.floor_factor;

  if (!x.allFinite() || x.norm() >= cfg.r_kill) {
    out.status = PathStatus::Exited;
    out.exit_time = 0.0;
    out.terminal = x;
    return out;
  }

  while (t < cfg.horizon) {
    if (out.steps >= cfg.max_steps_per_path) {
      out.status = PathStatus::Stalled;
      out.terminal = x;
      return out;
    }
    const Vec b = drift_at(ctx, x);
    const Mat sig = sigma_at(ctx, x);
    // stableNorm: b.norm() squares the entries first, which overflows to inf
    // once |b_i| exceeds ~1e154 and would silently freeze tamed paths in
    // place (increment -> 0) while reporting them Alive.
    const double bn = b.stableNorm();
    const double sfn =
        Eigen::Map<const Eigen::VectorXd>(sig.data(), sig.size()).stableNorm();
    const double sf2 = sfn * sfn;

    double dt = cfg.h;
    double tame = 1.0;
    if (cfg.scheme == Scheme::Tamed) {
      tame = 1.0 + cfg.h * bn + cfg.h * sf2;
      if (!std::isfinite(tame)) {
        out.status = PathStatus::Stalled;
        out.terminal = x;
        return out;
      }
    } else if (cfg.scheme == Scheme::Adaptive) {
      dt = cfg.h / (1.0 + bn + sf2);
      if (!(dt >= h_floor)) {
        out.status = PathStatus::Stalled;
        out.terminal = x;
        return out;
      }
    }
    dt = std::min(dt, cfg.horizon - t);

    observe(x, dt);

    for (int i = 0; i < d; ++i) z[i] = rng.normal();
    x += (b * dt + sig * (std::sqrt(dt) * z)) / tame;
    t += dt;
    ++out.steps;

    if (!x.allFinite() || x.norm() >= cfg.r_kill) {
      out.status = PathStatus::Exited;
      out.exit_time = t;
      out.terminal = x;
      return out;
    }
  }
  out.status = PathStatus::Alive;
  out.terminal = x;
  return out;
}

StepperContext make_context(const CoefficientField& cf, const SimConfig& cfg,
                            const DensitySpec* rho) {
  if (cfg.side == DriftSide::Dual && rho == nullptr)
    throw PreconditionError("dual drift requires a reference density");
  StepperContext ctx;
  ctx.cf = &cf;
  if (cfg.side == DriftSide::Primal) {
    ctx.drift = cf.G;
  } else {
    const VectorField beta = drift_decomposition(cf, *rho).beta;
    const VectorField G = cf.G;
    ctx.drift = [beta, G](const Vec& x) -> Vec { return 2.0 * beta(x) - G(x); };
  }
  if (cf.constant_A) {
    ctx.sigma_const = cholesky_lower(cf.A(zero_vec(cf.d)));
    ctx.have_const = true;
  }
  return ctx;
}

EnsembleResult run_ensemble(const CoefficientField& cf, const SimConfig& cfg,
                            const DensitySpec* rho, const std::vector<Vec>* x0s) {
  const StepperContext ctx = make_context(cf, cfg, rho);
  const auto n = static_cast<std::size_t>(cfg.paths);
  if (x0s != nullptr && x0s->size() != n)
    throw PreconditionError("simulate: x0s.size() must equal config.paths");
  if (x0s == nullptr && int(cfg.x0.size()) != cf.d)
    throw DimensionError("simulate: x0 has " + std::to_string(cfg.x0.size()) +
                         " coordinates, the field needs " + std::to_string(cf.d));

  EnsembleResult res;
  res.seed = cfg.seed;
  res.status.resize(n);
  res.exit_time.resize(n);
  res.terminal.resize(n);
  std::vector<std::int64_t> steps(n);

  parallel_for(n, [&](std::size_t i) {
    const Vec& start = x0s ? (*x0s)[i] : cfg.x0;
    PathOutcome out = run_path(ctx, cfg, static_cast<std::uint64_t>(i), start,
                               [](const Vec&, double) {});
    res.status[i] = out.status;
    res.exit_time[i] = out.exit_time;
    res.terminal[i] = out.terminal;
    steps[i] = out.steps;
  });

  for (std::size_t i = 0; i < n; ++i) {
    res.total_steps += steps[i];
    switch (res.status[i]) {
      case PathStatus::Alive: ++res.alive; break;
      case PathStatus::Exited: ++res.exited; break;
      case PathStatus::Stalled: ++res.stalled; break;
    }
  }
  return res;
}

} // namespace

EnsembleResult simulate(const CoefficientField& cf, const SimConfig& cfg,
                        const DensitySpec* rho) {
  return run_ensemble(cf, cfg, rho, nullptr);
}

EnsembleResult simulate(const CoefficientField& cf, const SimConfig& cfg,
                        const std::vector<Vec>& x0s, const DensitySpec* rho) {
  return run_ensemble(cf, cfg, rho, &x0s);
}

SurvivalReport survival_probability(const CoefficientField& cf, const SimConfig& cfg,
                                    const DensitySpec* rho) {
  auto one = [&](double r) {
    SimConfig c = cfg;
    c.r_kill = r;
    EnsembleResult ens = simulate(cf, c, rho);
    SurvivalEstimate est;
    est.total = cfg.paths;
    est.alive = ens.alive;
    est.p = double(ens.alive) / double(ens.status.size());
    est.se = std::sqrt(std::max(est.p * (1.0 - est.p), 0.0) / double(ens.status.size()));
    est.r_kill = r;
    return est;
  };
  SurvivalReport rep;
  rep.at_r = one(cfg.r_kill);
  rep.at_2r = one(2.0 * cfg.r_kill);
  return rep;
}

int OccupationHistogram::cells() const {
  const int d = grid.window.dim();
  int n = 1;
  for (int k = 0; k < d; ++k) n *= grid.bins_per_axis;
  return n;
}

double OccupationHistogram::cell_volume() const {
  const int d = grid.window.dim();
  double v = 1.0;
  for (int k = 0; k < d; ++k)
    v *= (grid.window.hi[k] - grid.window.lo[k]) / grid.bins_per_axis;
  return v;
}

Vec OccupationHistogram::cell_center(int flat_index) const {
  const int d = grid.window.dim();
  Vec c = zero_vec(d);
  int rem = flat_index;
  for (int k = 0; k < d; ++k) {
    const int ik = rem % grid.bins_per_axis;
    rem /= grid.bins_per_axis;
    const double w = (grid.window.hi[k] - grid.window.lo[k]) / grid.bins_per_axis;
    c[k] = grid.window.lo[k] + (ik + 0.5) * w;
  }
  return c;
}

OccupationHistogram occupation_histogram(const CoefficientField& cf, const SimConfig& cfg,
                                         const OccupationGrid& grid,
                                         const DensitySpec* rho) {
  const StepperContext ctx = make_context(cf, cfg, rho);
  const int d = grid.window.dim();
  if (d != cf.d)
    throw DimensionError("occupation_histogram: window dimension " + std::to_string(d) +
                         " does not match the field dimension " + std::to_string(cf.d));
  if (int(cfg.x0.size()) != cf.d)
    throw DimensionError("occupation_histogram: x0 has " + std::to_string(cfg.x0.size()) +
                         " coordinates, the field needs " + std::to_string(cf.d));

  OccupationHistogram hist;
  hist.grid = grid;
  hist.paths = cfg.paths;
  const int ncells = hist.cells();
  const int nb = grid.bins_per_axis;

  const auto n = static_cast<std::size_t>(cfg.paths);
  // Per-path sparse occupation (cell -> time fraction), merged sequentially so
  // the result does not depend on the worker count.
  std::vector<std::vector<std::pair<int, double>>> per_path(n);
  std::vector<double> window_time(n, 0.0);

  parallel_for(n, [&](std::size_t i) {
    std::vector<double> local; // lazily allocated dense grid per path
    double inside = 0.0;
    run_path(ctx, cfg, static_cast<std::uint64_t>(i), cfg.x0, [&](const Vec& x, double dt) {
      int flat = 0, stride = 1;
      for (int k = 0; k < d; ++k) {
        const double w = (grid.window.hi[k] - grid.window.lo[k]) / nb;
        const double rel = (x[k] - grid.window.lo[k]) / w;
        if (rel < 0.0 || rel >= nb) return;
        flat += stride * static_cast<int>(rel);
        stride *= nb;
      }
      if (local.empty()) local.assign(static_cast<std::size_t>(ncells), 0.0);
      local[static_cast<std::size_t>(flat)] += dt;
      inside += dt;
    });
    window_time[i] = inside / cfg.horizon;
    if (!local.empty()) {
      auto& sparse = per_path[i];
      for (int c = 0; c < ncells; ++c)
        if (local[static_cast<std::size_t>(c)] > 0.0)
          sparse.emplace_back(c, local[static_cast<std::size_t>(c)] / cfg.horizon);
    }
  });

  std::vector<double> sum(static_cast<std::size_t>(ncells), 0.0);
  std::vector<double> sum2(static_cast<std::size_t>(ncells), 0.0);
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    wsum += window_time[i];
    for (const auto& [c, v] : per_path[i]) {
      sum[static_cast<std::size_t>(c)] += v;
      sum2[static_cast<std::size_t>(c)] += v * v;
    }
  }
  hist.window_fraction = wsum / double(n);
  const double vol = hist.cell_volume();
  const double denom = std::max(hist.window_fraction, 1e-300) * vol;

  hist.density.resize(static_cast<std::size_t>(ncells));
  hist.se.resize(static_cast<std::size_t>(ncells));
  for (int c = 0; c < ncells; ++c) {
    const double mean = sum[static_cast<std::size_t>(c)] / double(n);
    const double var =
        std::max(sum2[static_cast<std::size_t>(c)] / double(n) - mean * mean, 0.0);
    hist.density[static_cast<std::size_t>(c)] = mean / denom;
    hist.se[static_cast<std::size_t>(c)] = std::sqrt(var / double(n)) / denom;
  }
  return hist;
}

} // namespace invlab

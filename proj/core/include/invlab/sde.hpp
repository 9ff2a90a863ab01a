#pragma once

/// @file sde.hpp
/// Monte Carlo paths of dX = b(X) dt + sigma(X) dW with sigma sigma^T = A,
/// b = G (primal) or b = 2 beta - G (dual). Paths are killed (frozen, exit
/// time recorded) on leaving the ball of radius r_kill; estimators treat
/// killed and stalled paths as contributing 0, matching a sub-Markovian
/// semigroup.
///
/// Path i draws from the counter-based stream (seed, stream_offset + i), so
/// ensembles are reproducible bit-for-bit for any worker count.

#include <cstdint>
#include <string>
#include <vector>

#include "invlab/fields.hpp"
#include "invlab/linalg.hpp"
#include "invlab/quadrature.hpp" // Box

namespace invlab {

enum class Scheme { Euler, Tamed, Adaptive };
enum class DriftSide { Primal, Dual };

Scheme scheme_from_string(const std::string& s);
std::string to_string(Scheme s);

struct SimConfig {
  Vec x0;
  double horizon = 1.0;
  double h = 1.0 / 256.0;
  Scheme scheme = Scheme::Tamed;
  DriftSide side = DriftSide::Primal;
  double r_kill = 50.0;
  std::int64_t paths = 10000;
  std::uint64_t seed = 1;
  std::uint64_t stream_offset = 0;
  // Adaptive scheme: step h_k = h / (1 + |b| + |sigma|_F^2), floored at
  // h * floor_factor; a path that needs a smaller step is flagged stalled.
  double floor_factor = 1.0 / double(1 << 20);
  std::int64_t max_steps_per_path = 20'000'000;
};

enum class PathStatus : std::uint8_t { Alive, Exited, Stalled };

struct EnsembleResult {
  std::vector<PathStatus> status;
  std::vector<double> exit_time; // quiet NaN unless exited
  std::vector<Vec> terminal;     // state at the horizon, or frozen at exit/stall
  std::int64_t alive = 0, exited = 0, stalled = 0;
  std::int64_t total_steps = 0;
  std::uint64_t seed = 0; // echo
};

// rho is required for the dual drift side and ignored otherwise.
EnsembleResult simulate(const CoefficientField& cf, const SimConfig& config,
                        const DensitySpec* rho = nullptr);

// Per-path initial states (x0s.size() == config.paths); config.x0 is ignored.
// A start already outside the kill ball exits at time 0.
EnsembleResult simulate(const CoefficientField& cf, const SimConfig& config,
                        const std::vector<Vec>& x0s, const DensitySpec* rho = nullptr);

struct SurvivalEstimate {
  double p = 0.0;
  double se = 0.0;
  std::int64_t alive = 0, total = 0;
  double r_kill = 0.0;
};

struct SurvivalReport {
  SurvivalEstimate at_r;
  SurvivalEstimate at_2r; // sensitivity row: same seed, doubled kill radius
};

SurvivalReport survival_probability(const CoefficientField& cf, const SimConfig& config,
                                    const DensitySpec* rho = nullptr);

struct OccupationGrid {
  Box window;
  int bins_per_axis = 32;
};

struct OccupationHistogram {
  OccupationGrid grid;
  // Row-major over cells, axis 0 fastest.
  std::vector<double> density; // normalized: sums * cell_volume to 1 over the window
  std::vector<double> se;      // delta-method per-cell standard error
  double window_fraction = 0.0; // mean fraction of path time spent in the window
  std::int64_t paths = 0;

  int cells() const;
  double cell_volume() const;
  Vec cell_center(int flat_index) const;
};

OccupationHistogram occupation_histogram(const CoefficientField& cf, const SimConfig& config,
                                         const OccupationGrid& grid,
                                         const DensitySpec* rho = nullptr);

} // namespace invlab

#pragma once

/// @file lowdisc.hpp
/// Deterministic low-discrepancy point sets (Halton) for sample-based checks.

#include <cstdint>
#include <vector>

#include "invlab/linalg.hpp"

namespace invlab {

// Halton sequence in [0,1)^dim with a seed-derived start offset.
class Halton {
 public:
  Halton(int dim, std::uint64_t seed);
  Vec next();

 private:
  int dim_;
  std::uint64_t index_;
};

// n points inside the closed ball B_radius(center) (Halton + rejection).
std::vector<Vec> low_discrepancy_ball(const Vec& center, double radius, int n,
                                      std::uint64_t seed);

// n points on the sphere of given radius about the origin.
std::vector<Vec> low_discrepancy_sphere(int d, double radius, int n, std::uint64_t seed);

} // namespace invlab

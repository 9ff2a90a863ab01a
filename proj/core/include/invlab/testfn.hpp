#pragma once

/// @file testfn.hpp
/// Compactly supported smooth test functions with closed-form derivatives.
///
/// The base bump on the ball B_r(c) is psi(x) = exp(-1 / (1 - s)) with
/// s = |x - c|^2 / r^2 < 1, extended by 0 outside. Optionally multiplied by a
/// monomial in (x - c) of total degree <= 2. psi and all derivatives vanish
/// on the boundary faster than any polynomial.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "invlab/fields.hpp"
#include "invlab/linalg.hpp"
#include "invlab/quadrature.hpp"

namespace invlab {

struct TestFunction {
  Vec center;
  double radius = 1.0;
  // monomial exponents on (x - center); all zero for a plain bump
  std::array<int, kMaxDim> powers{};
  int degree = 0;

  int dim() const { return int(center.size()); }
  Box support() const;

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;

  C2Field as_c2() const;
  std::string label() const;
};

TestFunction make_bump(Vec center, double radius);
TestFunction make_bump_monomial(Vec center, double radius, std::array<int, kMaxDim> powers);

struct BatteryConfig {
  int bumps = 20;
  int bump_monomials = 10;
  double center_radius = 3.0; // centers drawn from B_{center_radius}(0)
  double min_radius = 0.3;
  double max_radius = 1.0;
  std::uint64_t seed = 20260813;
};

// The default certification battery: `bumps` plain bumps plus
// `bump_monomials` bump-times-monomial functions, centers low-discrepancy.
std::vector<TestFunction> make_battery(int d, const BatteryConfig& config = {});

} // namespace invlab

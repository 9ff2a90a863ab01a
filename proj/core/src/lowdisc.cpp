#include "invlab/lowdisc.hpp"

#include "invlab/errors.hpp"

namespace invlab {

namespace {

constexpr int kBases[] = {2, 3, 5, 7, 11, 13};

double radical_inverse(int base, std::uint64_t i) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * double(i % std::uint64_t(base));
    i /= std::uint64_t(base);
    f *= inv;
  }
  return r;
}

} // namespace

Halton::Halton(int dim, std::uint64_t seed) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw DimensionError("Halton: unsupported dimension");
  // Seed enters as a start offset; index 0 (the all-zero point) is skipped.
  index_ = 1 + (seed * 0x9E3779B97F4A7C15ull) % 65521ull;
}

Vec Halton::next() {
  Vec p(dim_);
  for (int k = 0; k < dim_; ++k) p[k] = radical_inverse(kBases[k], index_);
  ++index_;
  return p;
}

std::vector<Vec> low_discrepancy_ball(const Vec& center, double radius, int n,
                                      std::uint64_t seed) {
  const int d = int(center.size());
  Halton seq(d, seed);
  std::vector<Vec> pts;
  pts.reserve(std::size_t(n));
  while (int(pts.size()) < n) {
    Vec u = seq.next();
    for (int k = 0; k < d; ++k) u[k] = 2.0 * u[k] - 1.0;
    if (u.squaredNorm() <= 1.0) pts.push_back(center + radius * u);
  }
  return pts;
}

std::vector<Vec> low_discrepancy_sphere(int d, double radius, int n, std::uint64_t seed) {
  Halton seq(d, seed);
  std::vector<Vec> pts;
  pts.reserve(std::size_t(n));
  while (int(pts.size()) < n) {
    Vec u = seq.next();
    for (int k = 0; k < d; ++k) u[k] = 2.0 * u[k] - 1.0;
    const double norm2 = u.squaredNorm();
    if (norm2 > 1.0 || norm2 < 1e-12) continue;
    pts.push_back(u * (radius / std::sqrt(norm2)));
  }
  return pts;
}

} // namespace invlab

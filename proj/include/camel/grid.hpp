#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace camel {

namespace detail {

// Fixed-tree pairwise summation. Deterministic (the tree depends only on the
// length) and keeps rounding growth at O(log n) instead of O(n).
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

} // namespace detail

// Uniform 1-D grid of family momenta in photon-momentum (hbar k) units.
// A single-point grid is the degenerate "definite momentum" mode: sums,
// not integrals, with quadrature weight 1.
class MomentumGrid {
public:
  MomentumGrid(double p_min, double dp, std::size_t n_points)
      : p_min_(p_min), dp_(dp), n_(n_points) {
    if (n_ == 0) throw std::invalid_argument("grid: n_points must be >= 1");
    if (!(dp_ > 0.0)) throw std::invalid_argument("grid: dp must be positive");
  }

  std::size_t size() const { return n_; }
  double p_min() const { return p_min_; }
  double p_max() const { return n_ == 1 ? p_min_ : p_min_ + dp_ * (n_ - 1); }
  double dp() const { return dp_; }
  bool single_point() const { return n_ == 1; }

  double point(std::size_t j) const { return p_min_ + dp_ * static_cast<double>(j); }

  // Trapezoid weight; 1 in single-point mode.
  double weight(std::size_t j) const {
    if (n_ == 1) return 1.0;
    return (j == 0 || j == n_ - 1) ? 0.5 * dp_ : dp_;
  }

  friend bool operator==(const MomentumGrid&, const MomentumGrid&) = default;

private:
  double p_min_;
  double dp_;
  std::size_t n_;
};

// Symmetric grid spanning [center - half_width, center + half_width].
inline MomentumGrid build_grid(double center, double half_width,
                               std::size_t n_points) {
  if (n_points == 0)
    throw std::invalid_argument("grid: n_points must be >= 1");
  if (n_points == 1) {
    if (half_width != 0.0)
      throw std::invalid_argument(
          "grid: a single-point grid requires half_width = 0");
    return MomentumGrid(center, 1.0, 1); // spacing is unused in this mode
  }
  if (!(half_width > 0.0))
    throw std::invalid_argument("grid: half_width must be positive");
  const double dp = 2.0 * half_width / static_cast<double>(n_points - 1);
  return MomentumGrid(center - half_width, dp, n_points);
}

// Trapezoidal quadrature of sampled values over the grid.
inline double integrate(std::span<const double> samples,
                        const MomentumGrid& grid) {
  if (samples.size() != grid.size())
    throw std::invalid_argument("integrate: sample count does not match grid");
  if (grid.single_point()) return samples[0];
  std::vector<double> weighted(samples.begin(), samples.end());
  weighted.front() *= 0.5;
  weighted.back() *= 0.5;
  return grid.dp() * detail::pairwise_sum(weighted);
}

} // namespace camel

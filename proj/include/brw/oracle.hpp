#pragma once

// Exact and brute-force reference computations. Nothing here calls into the
// simulation, martingale or moment code it is used to check.

#include "brw/env.hpp"
#include "brw/interval_set.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace brw::oracle {

/// Distinct outcome values with exact probabilities, sorted by value.
struct ExactDistribution {
  std::vector<std::pair<double, double>> outcomes;

  double mean() const;
  double total_probability() const;
};

enum class Statistic { Count, W, N1, N2 };

struct StatisticSpec {
  Statistic kind = Statistic::W;
  IntervalSet set = IntervalSet::real_line();  ///< used by Count
};

inline constexpr std::uint64_t kMaxOutcomes = 10'000'000;

/// Exhaustive enumeration of all offspring counts and displacements along a
/// fixed state path of length n <= 3. Laws must have finite support
/// (finite-support / binomial offspring, two-point / finite-lattice steps).
/// Throws std::length_error once more than kMaxOutcomes branches are visited.
ExactDistribution enumerate_exact(const EnvironmentSpec& spec, const std::vector<int>& state_path,
                                  int n, const StatisticSpec& statistic);

/// CDF of the sum of n independent Uniform(0,1), 1 <= n <= 30.
double irwin_hall_cdf(int n, double x);
/// CDF of (sum of n centred uniforms) / sqrt(n / 12) at z.
double irwin_hall_standardized_cdf(int n, double z);

/// CDF of Gamma(n, 1) - n at x (sum of n centred unit exponentials).
double gamma_sum_cdf(int n, double x);
/// CDF of (Gamma(n, 1) - n) / sqrt(n) at z.
double gamma_sum_standardized_cdf(int n, double z);

/// Central moments 2..6 by adaptive quadrature against the density, or by
/// direct finite sums for discrete laws. Throws std::runtime_error if the
/// quadrature does not converge.
Eigen::Matrix<double, 5, 1> numeric_central_moments(const DisplacementLaw& law);

}  // namespace brw::oracle

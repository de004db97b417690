#pragma once

// Summary statistics and goodness-of-fit helpers used by the harness and tests.

#include <span>
#include <vector>

namespace brw::stats {

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double stddev(std::span<const double> x);
double median(std::span<const double> x);

/// Regularised upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);
/// P(chi^2_dof >= stat).
double chi_square_sf(double stat, double dof);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit of observed counts against exact cell
/// probabilities. Cells with expected count below `min_expected` are pooled
/// (in order) with their neighbours before the statistic is formed.
ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> probs,
                               double min_expected = 5.0);

}  // namespace brw::stats

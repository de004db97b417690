#include "brw/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace brw::stats;

TEST_CASE("summary statistics") {
  const std::vector<double> x = {3, 1, 4, 1, 5};
  CHECK(mean(x) == doctest::Approx(2.8));
  CHECK(median(x) == 3.0);
  CHECK(median(std::vector<double>{4, 1, 3, 2}) == 2.5);
  CHECK(stddev(x) == doctest::Approx(std::sqrt(3.2)));
  CHECK(stddev(std::vector<double>{1.0}) == 0.0);
}

TEST_CASE("incomplete gamma and chi-square tail") {
  for (double x : {0.1, 1.0, 7.5, 40.0}) {
    CHECK(gamma_q(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-13));
    CHECK(chi_square_sf(x, 2.0) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-13));
    // dof 4: exp(-x/2) (1 + x/2).
    CHECK(chi_square_sf(x, 4.0) == doctest::Approx(std::exp(-x / 2) * (1 + x / 2)).epsilon(1e-13));
  }
  CHECK(chi_square_sf(0.0, 3.0) == 1.0);
  // chi^2_1 tail at 3.841458820694124 is 0.05.
  CHECK(chi_square_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("goodness of fit") {
  const std::vector<double> probs(6, 1.0 / 6);
  const auto fair = chi_square_gof(std::vector<double>{100, 98, 105, 97, 101, 99}, probs);
  CHECK(fair.dof == 5);
  CHECK(fair.p_value > 0.9);
  const auto loaded = chi_square_gof(std::vector<double>{200, 60, 60, 60, 60, 60}, probs);
  CHECK(loaded.p_value < 1e-10);
  // Rare cells are pooled rather than inflating the statistic.
  const auto pooled = chi_square_gof(std::vector<double>{495, 504, 1, 0}, std::vector<double>{0.4995, 0.4995, 0.0005, 0.0005});
  CHECK(pooled.dof == 1);
}

#include "brw/oracle.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace brw;
using namespace brw::oracle;
using namespace testing_support;

TEST_CASE("exact enumeration") {
  SUBCASE("W_1 under {1, 2} offspring") {
    const auto spec = one_state(R"({"family":"finite-support","points":[[1,0.5],[2,0.5]]})", point_mass(0.0));
    const auto d = enumerate_exact(spec, {0}, 1, {Statistic::W, {}});
    REQUIRE(d.outcomes.size() == 2);
    CHECK(d.outcomes[0].first == doctest::Approx(1 / 1.5));
    CHECK(d.outcomes[0].second == doctest::Approx(0.5));
    CHECK(d.outcomes[1].first == doctest::Approx(2 / 1.5));
    CHECK(d.mean() == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("N1_1 and N2_1 under +-1 displacements") {
    const auto spec = one_state(constant_offspring(2), kSign);
    const auto n1 = enumerate_exact(spec, {0}, 1, {Statistic::N1, {}});
    REQUIRE(n1.outcomes.size() == 3);
    const double v[3] = {-1, 0, 1}, p[3] = {0.25, 0.5, 0.25};
    for (int i = 0; i < 3; ++i) {
      CHECK(n1.outcomes[i].first == v[i]);
      CHECK(n1.outcomes[i].second == doctest::Approx(p[i]));
    }
    const auto n2 = enumerate_exact(spec, {0}, 1, {Statistic::N2, {}});
    REQUIRE(n2.outcomes.size() == 1);
    CHECK(n2.outcomes[0].first == 0.0);
    CHECK(n2.outcomes[0].second == doctest::Approx(1.0));
  }
  SUBCASE("martingale means over three generations") {
    const auto spec = parse_spec(R"({"states":[)" +
                                 state_json(R"({"family":"finite-support","points":[[0,0.2],[1,0.3],[3,0.5]]})",
                                            R"({"family":"two-point","a":-1,"b":2,"p":0.4})", 0.5) +
                                 "," + state_json(R"({"family":"binomial","n":2,"p":0.8})",
                                                  R"({"family":"finite-lattice","points":[[-1,0.3],[0,0.3],[1,0.4]]})", 0.5) +
                                 "]}");
    const std::vector<int> path = {0, 1, 0};
    const auto W = enumerate_exact(spec, path, 3, {Statistic::W, {}});
    CHECK(W.total_probability() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(W.mean() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(enumerate_exact(spec, path, 3, {Statistic::N1, {}}).mean() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(enumerate_exact(spec, path, 3, {Statistic::N2, {}}).mean() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    const auto Z = enumerate_exact(spec, path, 3, {Statistic::Count, IntervalSet::half_line(0.0)});
    for (const auto& [value, prob] : Z.outcomes) CHECK(value == std::floor(value));
  }
  SUBCASE("rejects unsupported input") {
    CHECK_THROWS(enumerate_exact(one_state(kPoisson2, kSign), {0}, 1, {Statistic::W, {}}));
    CHECK_THROWS(enumerate_exact(one_state(constant_offspring(2), kStdGaussian), {0}, 1, {Statistic::W, {}}));
    CHECK_THROWS(enumerate_exact(one_state(constant_offspring(2), kSign), {0, 0, 0, 0}, 4, {Statistic::W, {}}));
  }
}

TEST_CASE("Irwin-Hall distribution") {
  CHECK(irwin_hall_cdf(1, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(irwin_hall_cdf(2, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(irwin_hall_cdf(3, 1.0) == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(irwin_hall_cdf(4, -0.1) == 0.0);
  CHECK(irwin_hall_cdf(4, 4.1) == 1.0);
  for (int n : {5, 12, 24, 30})
    for (double x : {0.3, 1.7, 0.5 * n - 0.4}) CHECK(irwin_hall_cdf(n, x) + irwin_hall_cdf(n, n - x) == doctest::Approx(1.0).epsilon(1e-12));
  // Density check: the n = 3 piece on [1, 2] integrates the quadratic spline.
  const double ref = 1.0 / 6 + simpson([](double x) { return 0.5 * (-2 * x * x + 6 * x - 3); }, 1.0, 1.4, 50);
  CHECK(irwin_hall_cdf(3, 1.4) == doctest::Approx(ref).epsilon(1e-13));
  CHECK(irwin_hall_standardized_cdf(12, 0.0) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("gamma sums") {
  CHECK(gamma_sum_cdf(1, 0.0) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-15));
  CHECK(gamma_sum_cdf(2, 0.0) == doctest::Approx(1 - 3 * std::exp(-2.0)).epsilon(1e-15));
  CHECK(gamma_sum_cdf(5, -5.0) == 0.0);
  CHECK(gamma_sum_cdf(5, -4.999999) == doctest::Approx(0.0).scale(1.0).epsilon(1e-20));
  for (double x : {-2.0, 0.5, 3.0}) {
    const double y = x + 3;
    CHECK(gamma_sum_cdf(3, x) == doctest::Approx(1 - std::exp(-y) * (1 + y + y * y / 2)).epsilon(1e-14));
  }
  CHECK(gamma_sum_cdf(200, 300.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gamma_sum_standardized_cdf(16, 1.0) == doctest::Approx(gamma_sum_cdf(16, 4.0)).epsilon(1e-15));
}

TEST_CASE("numeric central moments") {
  const auto g = numeric_central_moments(GaussianStep{0.0, 1.0});
  const double gv[5] = {1, 0, 3, 0, 15};
  for (int k = 0; k < 5; ++k) CHECK(g[k] == doctest::Approx(gv[k]).scale(1.0).epsilon(1e-10));
  const auto u = numeric_central_moments(UniformStep{-0.5, 0.5});
  const double uv[5] = {1.0 / 12, 0, 1.0 / 80, 0, 1.0 / 448};
  for (int k = 0; k < 5; ++k) CHECK(u[k] == doctest::Approx(uv[k]).scale(1e-3).epsilon(1e-10));
  const auto t = numeric_central_moments(TwoPointStep{-1.0, 1.0, 0.5});
  const double tv[5] = {1, 0, 1, 0, 1};
  for (int k = 0; k < 5; ++k) CHECK(t[k] == doctest::Approx(tv[k]).scale(1.0).epsilon(1e-14));
}

#include "brw/special.hpp"

#include "support.hpp"

#include <doctest.h>

#include <functional>
#include <vector>

using namespace brw;

namespace {

// Probabilists' Hermite polynomials H_0..H_8 written out term by term.
const std::vector<std::function<double(double)>> kListed = {
    [](double) { return 1.0; },
    [](double x) { return x; },
    [](double x) { return x * x - 1; },
    [](double x) { return x * x * x - 3 * x; },
    [](double x) { return std::pow(x, 4) - 6 * x * x + 3; },
    [](double x) { return std::pow(x, 5) - 10 * std::pow(x, 3) + 15 * x; },
    [](double x) { return std::pow(x, 6) - 15 * std::pow(x, 4) + 45 * x * x - 15; },
    [](double x) { return std::pow(x, 7) - 21 * std::pow(x, 5) + 105 * std::pow(x, 3) - 105 * x; },
    [](double x) {
      return std::pow(x, 8) - 28 * std::pow(x, 6) + 210 * std::pow(x, 4) - 420 * x * x + 105;
    },
};

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TEST_CASE("hermite values at small arguments") {
  CHECK(hermite(2, 0.0) == -1.0);
  CHECK(hermite(4, 1.0) == -2.0);
  CHECK(hermite(8, 1.0) == -132.0);
  CHECK(kListed[8](1.0) == -132.0);
}

TEST_CASE("hermite table, closed form and recurrence agree on [-6, 6]") {
  for (int m = 0; m <= 8; ++m) {
    for (int i = -60; i <= 60; ++i) {
      const double x = 0.1 * i;
      const double listed = kListed[static_cast<std::size_t>(m)](x);
      CHECK(close_rel(hermite(m, x), listed, 1e-10));
      CHECK(close_rel(hermite_recurrence(m, x), listed, 1e-10));
    }
  }
}

TEST_CASE("recurrence matches the closed form up to degree 12") {
  for (int m = 9; m <= 12; ++m)
    for (int i = -60; i <= 60; ++i) {
      const double x = 0.1 * i;
      CHECK(close_rel(hermite(m, x), hermite_recurrence(m, x), 1e-10));
    }
}

TEST_CASE("hermite coefficients satisfy H_{m+1} = x H_m - m H_{m-1}") {
  // hermite_coefficient(m, k) multiplies x^{m-2k}.
  for (int m = 1; m < 12; ++m)
    for (int k = 0; 2 * k <= m + 1; ++k) {
      const std::int64_t from_xH = 2 * k <= m ? hermite_coefficient(m, k) : 0;
      const std::int64_t from_prev = k >= 1 ? hermite_coefficient(m - 1, k - 1) : 0;
      CHECK(hermite_coefficient(m + 1, k) == from_xH - m * from_prev);
    }
}

TEST_CASE("normal density and distribution function") {
  CHECK(phi(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-16));
  CHECK(Phi(0.0) == 0.5);
  // Independent reference: Simpson on [0, 1.96] of the density.
  const double ref = 0.5 + testing_support::simpson(testing_support::std_normal_density, 0.0, 1.96, 2000);
  CHECK(std::abs(ref - 0.9750021048517795) < 1e-14);
  CHECK(std::abs(Phi(1.96) - 0.9750021048517795) < 1e-15);
  for (int i = 0; i <= 600; ++i) {
    const double x = 0.01 * i;
    CHECK(std::abs(Phi(-x) + Phi(x) - 1.0) <= 1e-12);
  }
  // Lower tail against the asymptotic series phi(x)/|x| (1 - 1/x^2 + 3/x^4 - 15/x^6).
  for (double x : {-10.0, -20.0, -35.0}) {
    const double x2 = x * x;
    const double mills = phi(x) / -x * (1 - 1 / x2 + 3 / (x2 * x2) - 15 / (x2 * x2 * x2));
    CHECK(Phi(x) == doctest::Approx(mills).epsilon(1e-6));
  }
}

TEST_CASE("derivative identity residuals") {
  CHECK(derivative_identity_check(0, 0.3, 1e-3) <= 1e-8);
  CHECK(derivative_identity_check(1, 1.0, 1e-3) <= 1e-6);
  CHECK(derivative_identity_check(3, 0.5, 1e-3) <= 1e-4);
  for (int m = 0; m <= 3; ++m)
    for (double h : {1e-2, 1e-3}) CHECK(derivative_identity_check(m, -0.7, h) <= 1e-4);
  // Higher orders are limited by rounding in the m-th difference, roughly
  // 4^m eps / h^m; away from that floor the fourth-order truncation is small.
  for (int m = 4; m <= 6; ++m) {
    const double h = 1e-2;
    CHECK(derivative_identity_check(m, -0.7, h) <= 1e-8 + std::pow(4.0, m) * 1e-16 / std::pow(h, m));
  }
  CHECK_THROWS_AS(derivative_identity_check(7, 0.0, 1e-3), std::out_of_range);
  CHECK_THROWS_AS(derivative_identity_check(1, 0.0, 1e-6), std::out_of_range);
}

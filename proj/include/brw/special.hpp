#pragma once

// Chebyshev-Hermite polynomials and standard normal density / CDF.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace brw {

namespace detail {

// Integer coefficients of H_0..H_8, lowest degree first.
inline constexpr std::array<std::array<std::int64_t, 9>, 9> kHermiteTable = {{
    {1, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 1, 0, 0, 0, 0, 0, 0, 0},
    {-1, 0, 1, 0, 0, 0, 0, 0, 0},
    {0, -3, 0, 1, 0, 0, 0, 0, 0},
    {3, 0, -6, 0, 1, 0, 0, 0, 0},
    {0, 15, 0, -10, 0, 1, 0, 0, 0},
    {-15, 0, 45, 0, -15, 0, 1, 0, 0},
    {0, -105, 0, 105, 0, -21, 0, 1, 0},
    {105, 0, -420, 0, 210, 0, -28, 0, 1},
}};

inline std::int64_t factorial(int k) {
  std::int64_t f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace detail

inline constexpr int kMaxHermiteDegree = 20;

/// Coefficient of x^(m-2k) in H_m: m! (-1)^k / (k! (m-2k)! 2^k).
/// Exact in 64-bit integers for m <= 20.
inline std::int64_t hermite_coefficient(int m, int k) {
  // m!/(k!(m-2k)!) fits for m <= 20; divide by 2^k last (always exact).
  const std::int64_t num = detail::factorial(m) / (detail::factorial(k) * detail::factorial(m - 2 * k));
  const std::int64_t c = num >> k;
  return (k % 2 == 0) ? c : -c;
}

/// Probabilists' Hermite polynomial H_m(x) from its explicit closed form.
/// Degrees 0..8 use the precomputed table; up to 20 the general sum.
template <typename Scalar>
Scalar hermite(int m, Scalar x) {
  if (m < 0 || m > kMaxHermiteDegree) throw std::out_of_range("hermite: degree out of range");
  Scalar acc(0);
  if (m <= 8) {
    const auto& c = detail::kHermiteTable[static_cast<std::size_t>(m)];
    for (int j = m; j >= 0; --j) acc = acc * x + Scalar(c[static_cast<std::size_t>(j)]);
    return acc;
  }
  // Horner in x^2 over the terms x^(m-2k), k = floor(m/2) .. 0.
  const Scalar x2 = x * x;
  for (int k = 0; k <= m / 2; ++k) acc = acc * x2 + Scalar(hermite_coefficient(m, k));
  return (m % 2 == 0) ? acc : acc * x;
}

/// Same polynomial via H_{m+1} = x H_m - m H_{m-1}.
template <typename Scalar>
Scalar hermite_recurrence(int m, Scalar x) {
  if (m < 0) throw std::out_of_range("hermite_recurrence: negative degree");
  Scalar prev(1);
  if (m == 0) return prev;
  Scalar cur = x;
  for (int k = 1; k < m; ++k) {
    Scalar next = x * cur - Scalar(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

template <typename Scalar>
Scalar phi(Scalar x) {
  return std::exp(-x * x / Scalar(2)) * Scalar(std::numbers::inv_sqrtpi * std::numbers::sqrt2 / 2);
}

/// Standard normal CDF through erfc so both tails keep relative accuracy.
template <typename Scalar>
Scalar Phi(Scalar x) {
  return Scalar(0.5) * std::erfc(-x / Scalar(std::numbers::sqrt2));
}

/// m-th derivative of f at x by a fourth-order-accurate central stencil
/// (m <= 6).
template <typename F>
double central_derivative(F&& f, int m, double x, double h) {
  // Richardson on the second-order binomial stencil: (4 D(h/2) - D(h)) / 3.
  auto stencil = [&](double step) {
    double acc = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= m; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      acc += sign * binom * f(x + (0.5 * m - j) * step);
      binom = binom * (m - j) / (j + 1);
    }
    return acc / std::pow(step, m);
  };
  if (m == 0) return f(x);
  return (4.0 * stencil(h / 2) - stencil(h)) / 3.0;
}

/// |finite-difference d^{m+1}/dx^{m+1} Phi(x) - (-1)^m phi(x) H_m(x)|.
/// For m = 0 the difference is taken on Phi itself, otherwise as the m-th
/// central difference of phi.
inline double derivative_identity_check(int m, double x, double h) {
  if (m < 0 || m > 6) throw std::out_of_range("derivative_identity_check: m must be in [0, 6]");
  if (h < 1e-4 || h > 1e-2) throw std::out_of_range("derivative_identity_check: h must be in [1e-4, 1e-2]");
  double fd;
  if (m == 0) {
    // Phi' itself by a central difference of Phi.
    fd = (Phi(x + h) - Phi(x - h)) / (2 * h);
    fd = (4.0 * (Phi(x + h / 2) - Phi(x - h / 2)) / h - fd) / 3.0;
  } else {
    fd = central_derivative([](double y) { return phi(y); }, m, x, h);
  }
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  return std::abs(fd - sign * phi(x) * hermite(m, x));
}

}  // namespace brw

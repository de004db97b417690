#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.

#include <array>
#include <cmath>
#include <stdexcept>

namespace brw {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
void gk15(F& f, double a, double b, double& kronrod, double& gauss) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  kronrod = kKronrodWeights[7] * fc;
  gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kKronrodNodes[static_cast<std::size_t>(i)];
    const double sum = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[static_cast<std::size_t>(i)] * sum;
    if (i % 2 == 1) gauss += kGaussWeights[static_cast<std::size_t>(i / 2)] * sum;
  }
  kronrod *= h;
  gauss *= h;
}

template <typename F>
void adapt(F& f, double a, double b, double tol, int depth, QuadratureResult& out) {
  double k = 0.0, g = 0.0;
  gk15(f, a, b, k, g);
  const double err = std::abs(k - g);
  if (err <= tol || depth <= 0) {
    out.value += k;
    out.error += err;
    if (err > tol) out.converged = false;
    return;
  }
  const double mid = 0.5 * (a + b);
  adapt(f, a, mid, 0.5 * tol, depth - 1, out);
  adapt(f, mid, b, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

/// Integrates f over [a, b] to roughly max(abs_tol, rel_tol * |I|).
template <typename F>
QuadratureResult integrate(F&& f, double a, double b, double abs_tol = 1e-14,
                           double rel_tol = 1e-12, int max_depth = 40) {
  if (!(b > a)) return {};
  double k = 0.0, g = 0.0;
  detail::gk15(f, a, b, k, g);
  const double tol = std::max(abs_tol, rel_tol * std::abs(k));
  QuadratureResult out;
  detail::adapt(f, a, b, tol, max_depth, out);
  return out;
}

/// Splits [a, b] into `segments` equal pieces, estimates the total with one
/// GK15 rule per piece, then refines each piece to its share of the tolerance.
/// Suited to integrands concentrated in a small part of a wide range.
template <typename F>
QuadratureResult integrate_segments(F&& f, double a, double b, int segments,
                                    double rel_tol = 1e-13, double abs_tol = 1e-300,
                                    int max_depth = 40) {
  if (!(b > a) || segments < 1) return {};
  const double width = (b - a) / segments;
  double rough = 0.0;
  for (int i = 0; i < segments; ++i) {
    double k = 0.0, g = 0.0;
    detail::gk15(f, a + i * width, a + (i + 1) * width, k, g);
    rough += std::abs(k);
  }
  const double tol = std::max(abs_tol, rel_tol * rough) / segments;
  QuadratureResult out;
  for (int i = 0; i < segments; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == segments) ? b : a + (i + 1) * width;
    detail::adapt(f, lo, hi, tol, max_depth, out);
  }
  return out;
}

}  // namespace brw

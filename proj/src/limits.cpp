#include "brw/limits.hpp"

#include "brw/special.hpp"

#include <cmath>
#include <numbers>

namespace brw {

namespace {
void require_variance(const RateInputs& in) {
  if (!(in.e_sigma2 > 0.0)) throw DegenerateError("rate inputs: E sigma^(2) must be > 0");
}
}  // namespace

double v_rate_skew_term(double t, const RateInputs& in) {
  require_variance(in);
  return in.e_sigma3 * (1.0 - t * t) * phi(t) * in.W / (6.0 * std::pow(in.e_sigma2, 1.5));
}

double v_rate(double t, const RateInputs& in) {
  require_variance(in);
  return -phi(t) * in.V1 / std::sqrt(in.e_sigma2) + v_rate_skew_term(t, in);
}

SetGeometry set_geometry(const IntervalSet& A) {
  SetGeometry g;
  double first_moment = 0.0;
  for (const auto& [a, b] : A.intervals()) {
    g.measure += b - a;
    first_moment += 0.5 * (b * b - a * a);
  }
  if (!(g.measure > 0.0) || !std::isfinite(g.measure) || !std::isfinite(first_moment))
    throw DegenerateError("set_geometry: set must be bounded with positive measure");
  g.mean = first_moment / g.measure;
  return g;
}

double c_of_A(const IntervalSet& A, const RateInputs& in) {
  require_variance(in);
  const SetGeometry g = set_geometry(A);
  return in.W * in.e_sigma4_excess + 4.0 * in.e_sigma3 * (in.V1 - g.mean * in.W) -
         5.0 * in.e_sigma3 * in.e_sigma3 * in.W / (3.0 * in.e_sigma2);
}

double mu_rate(const IntervalSet& A, const RateInputs& in) {
  require_variance(in);
  const SetGeometry g = set_geometry(A);
  return g.measure / (2.0 * in.e_sigma2) * (in.V2 + 2.0 * g.mean * in.V1) +
         g.measure * c_of_A(A, in) / (8.0 * in.e_sigma2 * in.e_sigma2);
}

double gaussian_window_integral(const IntervalSet& A, double s) {
  if (!(s > 0.0)) throw DegenerateError("gaussian_window_integral: s must be > 0");
  const double scale = s * std::sqrt(2.0 * std::numbers::pi);
  double acc = 0.0;
  for (const auto& [a, b] : A.intervals()) {
    // Difference taken on the tail nearer to the interval for accuracy.
    const double za = a / s, zb = b / s;
    const double diff = (za > 0.0) ? Phi(-za) - Phi(-zb) : Phi(zb) - Phi(za);
    acc += scale * diff;
  }
  return acc;
}

}  // namespace brw

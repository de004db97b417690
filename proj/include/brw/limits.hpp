#pragma once

// Closed-form limit rate functions of the CLT and the local limit theorem.

#include "brw/env.hpp"
#include "brw/interval_set.hpp"
#include "brw/martingales.hpp"

namespace brw {

struct RateInputs {
  double e_sigma2 = 1.0;
  double e_sigma3 = 0.0;
  double e_sigma4_excess = 0.0;
  double W = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;

  static RateInputs from(const ExpectedMoments& e, const LimitEstimates& est) {
    return {e.e_sigma2, e.e_sigma3, e.e_sigma4_excess, est.W_hat, est.V1_hat, est.V2_hat};
  }
};

/// V(t) = -phi(t) V_1 / sqrt(E s2) + E s3 (1 - t^2) phi(t) W / (6 (E s2)^{3/2}).
double v_rate(double t, const RateInputs& in);
/// The second (skewness) term of v_rate alone.
double v_rate_skew_term(double t, const RateInputs& in);

struct SetGeometry {
  double measure = 0.0;  ///< |A|
  double mean = 0.0;     ///< (1/|A|) int_A x dx
};

/// Throws DegenerateError for zero or infinite measure.
SetGeometry set_geometry(const IntervalSet& A);

double c_of_A(const IntervalSet& A, const RateInputs& in);
double mu_rate(const IntervalSet& A, const RateInputs& in);

/// int_A exp(-x^2 / (2 s^2)) dx.
double gaussian_window_integral(const IntervalSet& A, double s);

}  // namespace brw

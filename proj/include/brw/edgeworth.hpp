#pragma once

// Edgeworth expansion terms for sums of independent, non-identically
// distributed steps, and the windowed correction terms built from them.

#include "brw/env.hpp"

#include <functional>
#include <utility>

namespace brw {

using Cumulants = Eigen::Matrix<double, 5, 1>;  ///< gamma_2..gamma_6

/// Cumulants 2..6 from central moments mu_2..mu_6. The mean does not enter.
Cumulants central_to_cumulants(double mean, const Eigen::Matrix<double, 5, 1>& central);

/// Per-step cumulants over steps 0..n-1. Steps before k_n are zero rows, so
/// the window [k_n, n) sits inside a padded sequence of length n.
struct CumulantSet {
  Eigen::Matrix<double, Eigen::Dynamic, 5> gamma;
  int k_n = 0;
  int n = 0;
};

CumulantSet window_cumulants(const EnvironmentRealization& realization, int k_n, int n);
/// n i.i.d. steps with the given moments, no padding.
CumulantSet iid_cumulants(const StepMoments& step, int n);

/// How the n-powers inside lambda_{nu,n} are normalised.
enum class Normalization {
  Padded,        ///< full n including the zero prefix
  WindowLength,  ///< n - k_n
};

struct EdgeworthTerms {
  double B2 = 0.0;  ///< sum of gamma_2 over the window
  /// lambda_{nu,n} for nu = 3..6 (index nu-3).
  Eigen::Vector4d lambda = Eigen::Vector4d::Zero();
  double n_norm = 0.0;  ///< the n used in lambda and in n^{-nu/2}
  int order = 0;

  double lambda_at(int nu) const { return lambda[nu - 3]; }
};

/// Throws DegenerateError when the window variance is zero.
EdgeworthTerms build_terms(const CumulantSet& cumulants, int order,
                           Normalization norm = Normalization::Padded);
EdgeworthTerms build_terms(const EnvironmentRealization& realization, int k_n, int n, int order,
                           Normalization norm = Normalization::Padded);

/// Q_{nu,n}(x) by exhaustive enumeration of the nonnegative solutions of
/// k_1 + ... + k_nu = s, k_1 + 2 k_2 + ... + nu k_nu = nu. nu must be 1..3.
double q_term(const EdgeworthTerms& terms, int nu, double x);

/// Hand-expanded closed forms of Q_1..Q_3, used to cross-check q_term.
double q_term_closed_form(const EdgeworthTerms& terms, int nu, double x);

/// Phi(x) + sum_{nu=1}^{order} Q_{nu,n}(x) n^{-nu/2}; order 0 gives Phi(x).
double expansion_cdf(const EdgeworthTerms& terms, double x, int order);

/// The windowed correction scalars and remainder over [k_n, n).
struct CorrectionTerms {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
  // Window sums feeding the remainder.
  double var = 0.0;   ///< s_n^2 - s_{k_n}^2
  double sum3 = 0.0;  ///< s_n^(3) - s_{k_n}^(3)
  double cum4 = 0.0;  ///< sum of sigma^(4) - 3 (sigma^(2))^2
  double cum5 = 0.0;  ///< sum of sigma^(5) - 10 sigma^(3) sigma^(2)

  /// R_n(x).
  double remainder(double x) const;
  /// Phi(x) + sum kappa_nu D_nu(x) + R_n(x).
  double cdf(double x) const;
};

double D1(double x);  ///< -H_2(x) phi(x)
double D2(double x);  ///< -H_5(x) phi(x)
double D3(double x);  ///< -H_3(x) phi(x)

CorrectionTerms kappa_terms(const MomentProfile& profile, int n, int k_n);
double remainder_R(const MomentProfile& profile, int n, int k_n, double x);

/// k_n = floor(n^beta).
int choose_k(int n, double beta);

/// Admissible open interval for beta: (max{2/lambda, 3/eta}, 1/4) for
/// theorem 1, (max{4/lambda, 4/eta}, 1/4) for theorem 2. Throws
/// HypothesisError when the interval is empty.
std::pair<double, double> validate_beta(double lambda, double eta, int theorem_id);
/// As above and additionally rejects beta outside the interval.
std::pair<double, double> validate_beta(double lambda, double eta, int theorem_id, double beta);

}  // namespace brw

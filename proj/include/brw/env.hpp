#pragma once

// Environment families, i.i.d. environment sequences and their exact
// moment profiles.

#include "brw/core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace brw {

// ---- offspring laws ------------------------------------------------------

struct PoissonOffspring {
  double mean;
};
/// Geometric on {0, 1, 2, ...} parameterised by its mean.
struct GeometricOffspring {
  double mean;
};
struct BinomialOffspring {
  int trials;
  double p;
};
struct FiniteOffspring {
  std::vector<std::pair<int, double>> points;  // (value, probability)
};

using OffspringLaw =
    std::variant<PoissonOffspring, GeometricOffspring, BinomialOffspring, FiniteOffspring>;

// ---- displacement laws ---------------------------------------------------

struct GaussianStep {
  double mean;
  double var;
};
struct UniformStep {
  double a;
  double b;
};
struct LaplaceStep {
  double mean;
  double scale;
};
/// shift + Exp(rate).
struct ShiftedExponentialStep {
  double rate;
  double shift;
};
/// a with probability p, b otherwise.
struct TwoPointStep {
  double a;
  double b;
  double p;
};
struct LatticeStep {
  std::vector<std::pair<double, double>> points;  // (value, probability)
};

using DisplacementLaw = std::variant<GaussianStep, UniformStep, LaplaceStep,
                                     ShiftedExponentialStep, TwoPointStep, LatticeStep>;

struct EnvironmentState {
  double weight = 1.0;
  OffspringLaw offspring;
  DisplacementLaw displacement;
};

struct EnvironmentSpec {
  std::vector<EnvironmentState> states;
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;
};

std::string_view family_name(const OffspringLaw& law);
std::string_view family_name(const DisplacementLaw& law);

/// Throws ConfigError when a law or the state weights violate their invariants.
void validate(const OffspringLaw& law);
void validate(const DisplacementLaw& law);
void validate(const EnvironmentSpec& spec);

/// Parses the JSON config document (keys `states`, `seed`, `horizon`).
EnvironmentSpec parse_spec(std::string_view document);

// ---- moments -------------------------------------------------------------

/// Exact per-step moments of one environment state.
struct StepMoments {
  double m = 0.0;     ///< mean offspring count
  double ln_m = 0.0;  ///< log m
  double l = 0.0;     ///< displacement mean
  /// Central displacement moments of orders 2..6.
  Eigen::Matrix<double, 5, 1> central = Eigen::Matrix<double, 5, 1>::Zero();

  double sigma(int order) const { return central[order - 2]; }
};

double offspring_mean(const OffspringLaw& law);
/// Displacement mean and central moments 2..6 in closed form.
std::pair<double, Eigen::Matrix<double, 5, 1>> displacement_moments(const DisplacementLaw& law);

StepMoments step_moments(const OffspringLaw& offspring, const DisplacementLaw& displacement);
inline StepMoments step_moments(const EnvironmentState& s) {
  return step_moments(s.offspring, s.displacement);
}

struct EnvironmentRealization {
  std::vector<int> state_indices;
  std::vector<StepMoments> per_step;

  int size() const { return static_cast<int>(state_indices.size()); }
};

/// Draws n i.i.d. state indices from the spec weights.
EnvironmentRealization sample_environment(const EnvironmentSpec& spec, int n, std::uint64_t seed);

/// Realization with the given state path (no sampling).
EnvironmentRealization fixed_environment(const EnvironmentSpec& spec, std::vector<int> state_indices);

/// Cumulative quantities over generations 0..n. Row k holds the value after
/// k steps (sums over steps 0..k-1).
struct MomentProfile {
  int n = 0;
  Array log_Pi;  ///< log of Pi_k = m_0 ... m_{k-1}
  /// Pi_k in linear form; entries whose log exceeds kLinearLogLimit are NaN
  /// and `linear_overflow` is set.
  Array Pi;
  bool linear_overflow = false;
  Array ell;  ///< sum of displacement means
  /// Column nu-2 holds s_k^(nu), nu = 2..6.
  Eigen::Matrix<double, Eigen::Dynamic, 5> s_nu;
  Array s;  ///< sqrt(s_k^(2))
  /// Partial sums of the per-step fourth and fifth cumulants,
  /// sigma^(4) - 3 (sigma^(2))^2 and sigma^(5) - 10 sigma^(3) sigma^(2).
  Array cum4;
  Array cum5;

  static constexpr double kLinearLogLimit = 700.0;

  double s2(int k) const { return s_nu(k, 0); }
  double s_order(int k, int nu) const { return s_nu(k, nu - 2); }
  /// Pi_k^{-1}, computed from the log form.
  double inv_Pi(int k) const;
};

MomentProfile cumulative_profile(const EnvironmentRealization& realization, int n);

/// Weight-averaged exact per-state values.
struct ExpectedMoments {
  double e_ln_m = 0.0;
  double e_m = 0.0;
  double e_l = 0.0;
  double e_sigma2 = 0.0;
  double e_sigma3 = 0.0;
  double e_sigma4_excess = 0.0;  ///< E(sigma^(4) - 3 (sigma^(2))^2)
  double e_sigma5_excess = 0.0;  ///< E(sigma^(5) - 10 sigma^(3) sigma^(2))
};

ExpectedMoments expected_moments(const EnvironmentSpec& spec);

// ---- standing conditions -------------------------------------------------

struct ConditionReport {
  double lambda = 0.0;
  double eta = 0.0;
  double delta = 0.0;

  double e_ln_m0 = 0.0;
  /// E[(N/m) (ln+ N)^{1+lambda}], infinite when not finite.
  double branching_moment = 0.0;
  /// E|L|^eta.
  double displacement_moment = 0.0;
  /// E m^{-delta}.
  double negative_moment = 0.0;
  double e_sigma2 = 0.0;
  std::vector<bool> cramer_ok_per_state;
  bool cramer_ok = false;  ///< Cramer holds for some state of positive weight

  bool supercritical_pass = false;
  bool branching_pass = false;
  bool displacement_pass = false;
  bool negative_pass = false;
  bool nondegenerate_pass = false;  ///< E sigma^(2) > 0

  std::vector<std::string> warnings;

  bool all_pass() const {
    return supercritical_pass && branching_pass && displacement_pass && negative_pass &&
           cramer_ok && nondegenerate_pass;
  }
};

/// True for continuous families with positive variance.
bool cramer_holds(const DisplacementLaw& law);

ConditionReport check_conditions(const EnvironmentSpec& spec, double lambda, double eta,
                                 double delta);

}  // namespace brw

#pragma once

// Seeded, replicate-parallel experiment runner.

#include "brw/edgeworth.hpp"
#include "brw/env.hpp"
#include "brw/interval_set.hpp"
#include "brw/limits.hpp"
#include "brw/martingales.hpp"
#include "brw/popsim.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace brw {

struct ExperimentConfig {
  EnvironmentSpec spec;
  std::vector<int> schedule = {6, 10, 14, 18};
  int n_max = 18;
  int replicates = 200;
  std::vector<double> t_grid = {0.0, 1.0};
  IntervalSet A = IntervalSet({{-1.0, 1.0}});
  int theorem = 1;
  double beta = 0.24;
  /// Moment exponents of the hypotheses; unset means the default of the
  /// selected theorem (9, 13 for theorem 1 and 17, 17 for theorem 2).
  std::optional<double> lambda;
  std::optional<double> eta;
  double delta = 0.5;
  std::uint64_t seed = 0;
  CapPolicy cap;
  int threads = 1;
  /// Regrowths per frozen population in the martingale suite.
  int conditional_replicates = 10'000;

  double lambda_value() const { return lambda.value_or(theorem == 1 ? 9.0 : 17.0); }
  double eta_value() const { return eta.value_or(theorem == 1 ? 13.0 : 17.0); }
};

/// Reads the environment keys plus the optional `experiment` object.
/// Throws ConfigError on malformed input.
ExperimentConfig parse_experiment(std::string_view document);

/// Checks schedule bounds, replicate count and (for theorem runs) the beta
/// window. Throws ConfigError / HypothesisError.
void validate(const ExperimentConfig& config, bool check_beta);

/// Runs body(i) for i in [0, count) on `threads` workers. Results must be
/// written to per-index slots so that the outcome is thread-count independent.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

/// Stream seed of replicate r.
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t experiment_tag, std::uint64_t r);

// ---- reports -------------------------------------------------------------

struct ResidualSummary {
  int n = 0;
  double t = 0.0;  ///< unused by the local limit report
  int replicates_used = 0;
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double median_abs = 0.0;
  int extinct = 0;
  int capped = 0;
};

struct ReplicateEstimates {
  std::uint64_t replicate = 0;
  bool capped = false;
  bool extinct = false;
  LimitEstimates limits;
};

struct CltReport {
  std::vector<ResidualSummary> rows;  ///< ordered by (n, t)
  std::vector<ReplicateEstimates> replicates;
};

struct LltReport {
  IntervalSet A;
  std::vector<ResidualSummary> rows;  ///< ordered by n
  std::vector<ReplicateEstimates> replicates;
};

struct MartingaleRow {
  int n = 0;
  std::string test;       ///< "population" or "conditional"
  std::string statistic;  ///< "W", "N1", "N2"
  double target = 0.0;
  double mean = 0.0;
  double se = 0.0;
  double z = 0.0;
  int replicates = 0;
  bool pass = false;
};

struct MartingaleReport {
  std::vector<MartingaleRow> rows;
  int capped = 0;

  bool all_pass() const;
};

struct EdgeworthRow {
  int n = 0;
  int order = 0;
  double sup_error = 0.0;
};

struct EdgeworthReport {
  std::string family;
  std::vector<EdgeworthRow> rows;

  double sup_error(int n, int order) const;
};

struct ExpansionTableRow {
  double x = 0.0;
  double Phi = 0.0;
  double q1 = 0.0;  ///< Q_1 n^{-1/2}
  double q2 = 0.0;  ///< Q_2 n^{-1}
  double q3 = 0.0;  ///< Q_3 n^{-3/2}
  double expansion = 0.0;
  double oracle = 0.0;
  double abs_error = 0.0;
};

/// Residuals D_n(t) - V_hat(t) per (n, t), each path using its own limit
/// estimates. Throws HypothesisError on failed standing conditions or beta,
/// AllCappedError when no replicate survives the cap.
CltReport run_clt(const ExperimentConfig& config);

/// Residuals Lambda_n - mu_hat(A) per n.
LltReport run_llt(const ExperimentConfig& config);

/// Population tests of E W_n = 1, E N_1n = 0, E N_2n = 0 and one-step
/// conditional tests at each scheduled n. Throws HypothesisError when the
/// process is not supercritical.
MartingaleReport run_martingale_suite(const ExperimentConfig& config);

/// Sup over x in [-5, 5] (step 0.01) of |oracle CDF - expansion| for orders
/// 0..3 at each scheduled n. Requires a single-state spec whose displacement
/// has an exact sum oracle (gaussian, uniform, shifted-exponential).
EdgeworthReport run_edgeworth_validation(const ExperimentConfig& config);

/// Per-x expansion table at one n, expansion of order 3.
std::vector<ExpansionTableRow> edgeworth_table(const ExperimentConfig& config, int n);

// ---- output --------------------------------------------------------------

enum class Format { Csv, Json };

std::string to_csv(const CltReport& r);
std::string to_csv(const LltReport& r);
std::string to_csv(const MartingaleReport& r);
std::string to_csv(const EdgeworthReport& r);
std::string to_csv(const std::vector<ExpansionTableRow>& rows);
std::string to_csv(const ConditionReport& r);

nlohmann::json to_json(const CltReport& r);
nlohmann::json to_json(const LltReport& r);
nlohmann::json to_json(const MartingaleReport& r);
nlohmann::json to_json(const EdgeworthReport& r);
nlohmann::json to_json(const std::vector<ExpansionTableRow>& rows);
nlohmann::json to_json(const ConditionReport& r);

/// Serialises and writes the report; throws std::runtime_error on I/O failure.
template <typename Report>
void emit(const Report& report, Format format, const std::string& path);

std::string render(const nlohmann::json& j);
void write_file(const std::string& path, const std::string& content);

template <typename Report>
void emit(const Report& report, Format format, const std::string& path) {
  write_file(path, format == Format::Csv ? to_csv(report) : render(to_json(report)));
}

}  // namespace brw

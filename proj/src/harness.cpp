#include "brw/harness.hpp"

#include "brw/core.hpp"
#include "brw/oracle.hpp"
#include "brw/overloaded.hpp"
#include "brw/special.hpp"
#include "brw/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace brw {

using nlohmann::json;

namespace {

// Stream tags keep the experiments' replicate seeds apart.
constexpr std::uint64_t kTagClt = 1;
constexpr std::uint64_t kTagLlt = 2;
constexpr std::uint64_t kTagPopulation = 3;
constexpr std::uint64_t kTagConditional = 4;

const std::vector<std::string> kExperimentKeys = {
    "schedule", "n_max",   "replicates", "t_grid", "A",       "theorem",
    "beta",     "lambda",  "eta",        "delta",  "cap",     "threads",
    "conditional_replicates"};

double number_at(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(std::string("experiment: '") + key + "' must be a number");
  return v.get<double>();
}

int int_at(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string("experiment: '") + key + "' must be an integer");
  return v.get<int>();
}

IntervalSet parse_set(const json& v) {
  if (v.is_string()) return IntervalSet::parse(v.get<std::string>());
  if (!v.is_array()) throw ConfigError("experiment: 'A' must be a list of [a, b] pairs or \"a:b;c:d\"");
  std::vector<std::pair<double, double>> parts;
  for (const auto& item : v) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number())
      throw ConfigError("experiment: each interval of 'A' must be [a, b]");
    parts.emplace_back(item[0].get<double>(), item[1].get<double>());
  }
  return IntervalSet(std::move(parts));
}

void require_conditions(const ExperimentConfig& config) {
  const ConditionReport c =
      check_conditions(config.spec, config.lambda_value(), config.eta_value(), config.delta);
  if (!c.supercritical_pass)
    throw HypothesisError("E ln m_0 = " + std::to_string(c.e_ln_m0) + " <= 0: process is not supercritical");
  if (!c.nondegenerate_pass) throw HypothesisError("E sigma^(2) = 0: degenerate displacement");
  if (!c.cramer_ok) throw HypothesisError("Cramer condition fails for every state (lattice case)");
  if (!c.branching_pass) throw HypothesisError("branching moment condition fails");
  if (!c.displacement_pass) throw HypothesisError("displacement moment condition fails");
  if (!c.negative_pass) throw HypothesisError("negative moment condition E m^-delta fails");
}

ResidualSummary summarise(int n, double t, std::vector<double>& residuals, int extinct, int capped) {
  ResidualSummary s;
  s.n = n;
  s.t = t;
  s.replicates_used = static_cast<int>(residuals.size());
  s.extinct = extinct;
  s.capped = capped;
  if (residuals.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.mean = s.median = s.stddev = s.ci_lo = s.ci_hi = s.median_abs = nan;
    return s;
  }
  s.mean = stats::mean(residuals);
  s.stddev = residuals.size() > 1 ? stats::stddev(residuals) : 0.0;
  const double half = 1.959963984540054 * s.stddev / std::sqrt(static_cast<double>(residuals.size()));
  s.ci_lo = s.mean - half;
  s.ci_hi = s.mean + half;
  std::vector<double> abs(residuals.size());
  std::transform(residuals.begin(), residuals.end(), abs.begin(), [](double x) { return std::fabs(x); });
  s.median_abs = stats::median(abs);
  s.median = stats::median(residuals);
  return s;
}

// Per-replicate outcome of a theorem run: residuals indexed [n][point].
struct ReplicateResiduals {
  ReplicateEstimates estimates;
  std::vector<std::vector<double>> residuals;
};

template <typename Fn>
std::vector<ReplicateResiduals> run_replicates(const ExperimentConfig& config, std::uint64_t tag,
                                               Fn&& residual) {
  std::vector<ReplicateResiduals> out(static_cast<std::size_t>(config.replicates));
  parallel_for(out.size(), config.threads, [&](std::size_t r) {
    ReplicateResiduals& rec = out[r];
    rec.estimates.replicate = r;
    const Trajectory traj =
        simulate(config.spec, config.n_max, replicate_seed(config.seed, tag, r), {config.cap, {}});
    if (traj.cap_hit) {
      rec.estimates.capped = true;
      return;
    }
    rec.estimates.extinct = traj.extinct_at.has_value();
    rec.estimates.limits = estimate_limits(track(traj), config.n_max);
    for (int n : config.schedule) rec.residuals.push_back(residual(traj, n, rec.estimates.limits));
  });
  return out;
}

template <typename Report>
void aggregate(const ExperimentConfig& config, const std::vector<ReplicateResiduals>& reps,
               const std::vector<double>& points, Report& report) {
  int capped = 0;
  int extinct = 0;
  for (const auto& rec : reps) {
    capped += rec.estimates.capped ? 1 : 0;
    extinct += rec.estimates.extinct ? 1 : 0;
    report.replicates.push_back(rec.estimates);
  }
  if (capped == static_cast<int>(reps.size()) && !reps.empty())
    throw AllCappedError("all " + std::to_string(capped) + " replicates hit the particle cap");
  for (std::size_t i = 0; i < config.schedule.size(); ++i) {
    for (std::size_t j = 0; j < points.size(); ++j) {
      std::vector<double> values;
      values.reserve(reps.size());
      for (const auto& rec : reps)
        if (!rec.estimates.capped) values.push_back(rec.residuals[i][j]);
      report.rows.push_back(summarise(config.schedule[i], points[j], values, extinct, capped));
    }
  }
}

std::function<double(double)> oracle_for(const DisplacementLaw& law, int n) {
  return std::visit(
      overloaded{
          [](const GaussianStep&) -> std::function<double(double)> { return [](double x) { return Phi(x); }; },
          [n](const UniformStep&) -> std::function<double(double)> {
            return [n](double x) { return oracle::irwin_hall_standardized_cdf(n, x); };
          },
          [n](const ShiftedExponentialStep&) -> std::function<double(double)> {
            return [n](double x) { return oracle::gamma_sum_standardized_cdf(n, x); };
          },
          [](const auto& other) -> std::function<double(double)> {
            throw ConfigError("edgeworth: no exact oracle for displacement family '" +
                              std::string(family_name(DisplacementLaw(other))) + "'");
          }},
      law);
}

const EnvironmentState& single_state(const ExperimentConfig& config) {
  if (config.spec.states.size() != 1)
    throw ConfigError("edgeworth: validation needs a single-state environment");
  return config.spec.states.front();
}

constexpr int kGridPoints = 1001;  // x = -5, -4.99, ..., 5

double grid_x(int i) { return -5.0 + 0.01 * i; }

}  // namespace

ExperimentConfig parse_experiment(std::string_view document) {
  ExperimentConfig config;
  config.spec = parse_spec(document);
  const json doc = json::parse(document);  // already validated by parse_spec
  if (config.spec.seed) config.seed = *config.spec.seed;

  bool n_max_given = false;
  if (doc.contains("experiment")) {
    const json& e = doc.at("experiment");
    if (!e.is_object()) throw ConfigError("experiment: must be an object");
    for (const auto& item : e.items())
      if (std::find(kExperimentKeys.begin(), kExperimentKeys.end(), item.key()) == kExperimentKeys.end())
        throw ConfigError("experiment: unknown key '" + item.key() + "'");
    if (e.contains("schedule")) {
      if (!e.at("schedule").is_array()) throw ConfigError("experiment: 'schedule' must be a list");
      config.schedule.clear();
      for (const auto& v : e.at("schedule")) {
        if (!v.is_number_integer()) throw ConfigError("experiment: schedule entries must be integers");
        config.schedule.push_back(v.get<int>());
      }
    }
    if (e.contains("n_max")) {
      config.n_max = int_at(e, "n_max");
      n_max_given = true;
    }
    if (e.contains("replicates")) config.replicates = int_at(e, "replicates");
    if (e.contains("t_grid")) {
      if (!e.at("t_grid").is_array()) throw ConfigError("experiment: 't_grid' must be a list");
      config.t_grid.clear();
      for (const auto& v : e.at("t_grid")) {
        if (!v.is_number()) throw ConfigError("experiment: t_grid entries must be numbers");
        config.t_grid.push_back(v.get<double>());
      }
    }
    if (e.contains("A")) config.A = parse_set(e.at("A"));
    if (e.contains("theorem")) config.theorem = int_at(e, "theorem");
    if (e.contains("beta")) config.beta = number_at(e, "beta");
    if (e.contains("lambda")) config.lambda = number_at(e, "lambda");
    if (e.contains("eta")) config.eta = number_at(e, "eta");
    if (e.contains("delta")) config.delta = number_at(e, "delta");
    if (e.contains("cap")) {
      const json& v = e.at("cap");
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0)
        throw ConfigError("experiment: 'cap' must be a positive integer");
      config.cap.max_particles = v.get<std::size_t>();
    }
    if (e.contains("threads")) config.threads = int_at(e, "threads");
    if (e.contains("conditional_replicates"))
      config.conditional_replicates = int_at(e, "conditional_replicates");
  }
  if (!n_max_given) {
    if (config.spec.horizon)
      config.n_max = *config.spec.horizon;
    else
      config.n_max = config.schedule.empty() ? 1 : config.schedule.back();
  }
  validate(config, false);
  return config;
}

void validate(const ExperimentConfig& config, bool check_beta) {
  validate(config.spec);
  if (config.n_max < 1) throw ConfigError("experiment: n_max must be >= 1");
  for (std::size_t i = 0; i < config.schedule.size(); ++i) {
    const int n = config.schedule[i];
    if (n < 1 || n > config.n_max)
      throw ConfigError("experiment: schedule entry " + std::to_string(n) + " outside [1, n_max]");
    if (i > 0 && n <= config.schedule[i - 1]) throw ConfigError("experiment: schedule must be increasing");
  }
  if (config.replicates < 1) throw ConfigError("experiment: replicates must be >= 1");
  if (config.conditional_replicates < 2) throw ConfigError("experiment: conditional_replicates must be >= 2");
  if (config.threads < 1) throw ConfigError("experiment: threads must be >= 1");
  if (config.theorem != 1 && config.theorem != 2) throw ConfigError("experiment: theorem must be 1 or 2");
  for (double t : config.t_grid)
    if (!std::isfinite(t)) throw ConfigError("experiment: t_grid entries must be finite");
  if (!(config.delta > 0.0)) throw ConfigError("experiment: delta must be positive");
  if (check_beta) validate_beta(config.lambda_value(), config.eta_value(), config.theorem, config.beta);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(count);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t experiment_tag, std::uint64_t r) {
  return derive_seed(derive_seed(master, experiment_tag), r);
}

bool MartingaleReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const MartingaleRow& r) { return r.pass; });
}

double EdgeworthReport::sup_error(int n, int order) const {
  for (const auto& r : rows)
    if (r.n == n && r.order == order) return r.sup_error;
  throw std::out_of_range("sup_error: no row for that (n, order)");
}

CltReport run_clt(const ExperimentConfig& config) {
  if (config.theorem != 1) throw ConfigError("clt: theorem must be 1");
  validate(config, true);
  require_conditions(config);
  const ExpectedMoments expected = expected_moments(config.spec);

  auto reps = run_replicates(config, kTagClt, [&](const Trajectory& traj, int n, const LimitEstimates& est) {
    const RateInputs in = RateInputs::from(expected, est);
    std::vector<double> out;
    for (double t : config.t_grid) {
      const double D = std::sqrt(static_cast<double>(n)) * (normalized_cdf_count(traj, n, t) - Phi(t) * est.W_hat);
      out.push_back(D - v_rate(t, in));
    }
    return out;
  });
  CltReport report;
  aggregate(config, reps, config.t_grid, report);
  return report;
}

LltReport run_llt(const ExperimentConfig& config) {
  if (config.theorem != 2) throw ConfigError("llt: theorem must be 2");
  validate(config, true);
  if (config.A.empty()) throw ConfigError("llt: interval set A is empty");
  for (const auto& [a, b] : config.A.intervals())
    if (!std::isfinite(a) || !std::isfinite(b)) throw ConfigError("llt: interval set A must be bounded");
  require_conditions(config);
  const ExpectedMoments expected = expected_moments(config.spec);
  const double root_two_pi = std::sqrt(2.0 * M_PI);

  auto reps = run_replicates(config, kTagLlt, [&](const Trajectory& traj, int n, const LimitEstimates& est) {
    const RateInputs in = RateInputs::from(expected, est);
    const MomentProfile& p = traj.profile;
    const double s = p.s[n];
    if (!(s > 0.0)) throw DegenerateError("zero variance window");
    const auto Z = static_cast<double>(count_in(traj.generations[static_cast<std::size_t>(n)],
                                                config.A.shifted(p.ell[n])));
    const double Lambda =
        n * (root_two_pi * s * p.inv_Pi(n) * Z - est.W_hat * gaussian_window_integral(config.A, s));
    return std::vector<double>{Lambda - mu_rate(config.A, in)};
  });
  LltReport report;
  report.A = config.A;
  aggregate(config, reps, {0.0}, report);
  return report;
}

MartingaleReport run_martingale_suite(const ExperimentConfig& config) {
  validate(config, false);
  const ExpectedMoments expected = expected_moments(config.spec);
  if (!(expected.e_ln_m > 0.0))
    throw HypothesisError("E ln m_0 = " + std::to_string(expected.e_ln_m) +
                          " <= 0: process is not supercritical");
  MartingaleReport report;
  if (config.schedule.empty()) return report;
  const int n_top = config.schedule.back();
  const std::size_t S = config.schedule.size();

  // Population tests: each replicate path is read at every scheduled n.
  const auto R = static_cast<std::size_t>(config.replicates);
  std::vector<std::vector<MartingaleValues>> values(R);
  std::vector<char> capped(R, 0);
  parallel_for(R, config.threads, [&](std::size_t r) {
    const Trajectory traj = simulate(config.spec, n_top, replicate_seed(config.seed, kTagPopulation, r),
                                     {config.cap, {}});
    if (traj.cap_hit) {
      capped[r] = 1;
      return;
    }
    for (int n : config.schedule)
      values[r].push_back(martingale_values(traj.generations[static_cast<std::size_t>(n)], traj.profile, n));
  });

  // Conditional one-step tests on one frozen population per scheduled n.
  std::vector<std::optional<ConditionalTestReport>> conditional(S);
  parallel_for(S, config.threads, [&](std::size_t i) {
    const int n = config.schedule[i];
    const std::uint64_t s = replicate_seed(config.seed, kTagConditional, static_cast<std::uint64_t>(n));
    const EnvironmentRealization env = sample_environment(config.spec, n + 1, derive_seed(s, 0));
    const Trajectory traj = simulate(config.spec, env, n, derive_seed(s, 1), {config.cap, {}});
    if (traj.cap_hit) return;
    Rng rng(derive_seed(s, 2));
    conditional[i] = conditional_martingale_test(
        traj.generations[static_cast<std::size_t>(n)], traj.profile, n,
        config.spec.states[static_cast<std::size_t>(env.state_indices[static_cast<std::size_t>(n)])],
        config.conditional_replicates, rng);
  });

  report.capped = static_cast<int>(std::count(capped.begin(), capped.end(), 1));
  if (report.capped == static_cast<int>(R)) throw AllCappedError("all replicates hit the particle cap");
  const char* names[3] = {"W", "N1", "N2"};
  const double targets[3] = {1.0, 0.0, 0.0};
  for (std::size_t i = 0; i < S; ++i) {
    const int n = config.schedule[i];
    for (int q = 0; q < 3; ++q) {
      std::vector<double> x;
      for (std::size_t r = 0; r < R; ++r) {
        if (capped[r]) continue;
        const MartingaleValues& v = values[r][i];
        x.push_back(q == 0 ? v.W : q == 1 ? v.N1 : v.N2);
      }
      MartingaleRow row;
      row.n = n;
      row.test = "population";
      row.statistic = names[q];
      row.target = targets[q];
      row.replicates = static_cast<int>(x.size());
      row.mean = stats::mean(x);
      row.se = x.size() > 1 ? stats::stddev(x) / std::sqrt(static_cast<double>(x.size())) : 0.0;
      const double diff = row.mean - row.target;
      if (row.se > 0.0)
        row.z = diff / row.se;
      else
        row.z = std::fabs(diff) <= 1e-12 * std::max(1.0, std::fabs(row.target)) ? 0.0
                                                                                : std::copysign(HUGE_VAL, diff);
      row.pass = std::fabs(row.z) < 3.0;
      report.rows.push_back(row);
    }
    if (!conditional[i]) continue;
    const ConditionalTestReport& c = *conditional[i];
    for (int q = 0; q < 3; ++q) {
      MartingaleRow row;
      row.n = n;
      row.test = "conditional";
      row.statistic = names[q];
      row.target = c.frozen[q];
      row.mean = c.mean[q];
      row.se = c.se[q];
      row.z = c.z[q];
      row.replicates = c.replicates;
      row.pass = std::fabs(c.z[q]) < 3.0;
      report.rows.push_back(row);
    }
  }
  return report;
}

EdgeworthReport run_edgeworth_validation(const ExperimentConfig& config) {
  validate(config, false);
  const EnvironmentState& state = single_state(config);
  EdgeworthReport report;
  report.family = std::string(family_name(state.displacement));
  const StepMoments step = step_moments(state);
  for (int n : config.schedule) {
    const auto oracle = oracle_for(state.displacement, n);
    const EdgeworthTerms terms = build_terms(iid_cumulants(step, n), 3);
    std::array<double, 4> sup{};
    for (int i = 0; i < kGridPoints; ++i) {
      const double x = grid_x(i);
      const double exact = oracle(x);
      for (int order = 0; order <= 3; ++order)
        sup[static_cast<std::size_t>(order)] =
            std::max(sup[static_cast<std::size_t>(order)], std::fabs(exact - expansion_cdf(terms, x, order)));
    }
    for (int order = 0; order <= 3; ++order) report.rows.push_back({n, order, sup[static_cast<std::size_t>(order)]});
  }
  return report;
}

std::vector<ExpansionTableRow> edgeworth_table(const ExperimentConfig& config, int n) {
  const EnvironmentState& state = single_state(config);
  if (n < 1) throw ConfigError("edgeworth: n must be >= 1");
  const auto oracle = oracle_for(state.displacement, n);
  const EdgeworthTerms terms = build_terms(iid_cumulants(step_moments(state), n), 3);
  std::vector<ExpansionTableRow> rows;
  rows.reserve(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    ExpansionTableRow row;
    row.x = grid_x(i);
    row.Phi = Phi(row.x);
    row.q1 = q_term(terms, 1, row.x) * std::pow(terms.n_norm, -0.5);
    row.q2 = q_term(terms, 2, row.x) / terms.n_norm;
    row.q3 = q_term(terms, 3, row.x) * std::pow(terms.n_norm, -1.5);
    row.expansion = expansion_cdf(terms, row.x, 3);
    row.oracle = oracle(row.x);
    row.abs_error = std::fabs(row.oracle - row.expansion);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace brw

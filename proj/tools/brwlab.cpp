// brwlab: command-line front end for the simulator and the experiment runner.

#include "brw/core.hpp"
#include "brw/harness.hpp"
#include "brw/martingales.hpp"
#include "brw/popsim.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigInvalid = 2, kHypothesis = 3, kAllCapped = 4 };

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::optional<int> threads;
  std::string out = "-";
  std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "master seed (overrides the config)");
  cmd->add_option("--replicates", c.replicates, "replicate count")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output path, '-' for stdout");
  cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw brw::ConfigError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

brw::ExperimentConfig load(const Common& c, int theorem) {
  brw::ExperimentConfig config = brw::parse_experiment(read_file(c.config_path));
  config.theorem = theorem;
  if (c.seed) config.seed = *c.seed;
  if (c.replicates) config.replicates = *c.replicates;
  if (c.threads) config.threads = *c.threads;
  return config;
}

brw::Format format_of(const Common& c) { return c.format == "json" ? brw::Format::Json : brw::Format::Csv; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branching random walk in a random environment: simulation and asymptotic checks"};
  app.require_subcommand(1);

  Common conditions_opts, simulate_opts, martingale_opts, edgeworth_opts, clt_opts, llt_opts;

  auto* conditions = app.add_subcommand("conditions", "check the standing moment conditions");
  add_common(conditions, conditions_opts);
  int conditions_theorem = 1;
  conditions->add_option("--theorem", conditions_theorem, "theorem whose default exponents are used")
      ->check(CLI::Range(1, 2));

  auto* simulate = app.add_subcommand("simulate", "simulate one trajectory");
  add_common(simulate, simulate_opts);
  std::optional<int> sim_n, ancestry_k;
  std::string track_out;
  simulate->add_option("--n", sim_n, "generations (default n_max)")->check(CLI::PositiveNumber);
  simulate->add_option("--ancestry-k", ancestry_k, "record each particle's generation-k ancestor");
  simulate->add_option("--track-out", track_out, "write the martingale track CSV here");

  auto* martingales = app.add_subcommand("martingales", "martingale population and one-step tests");
  add_common(martingales, martingale_opts);

  auto* edgeworth = app.add_subcommand("edgeworth", "Edgeworth expansion against an exact sum oracle");
  add_common(edgeworth, edgeworth_opts);
  std::optional<int> table_n;
  edgeworth->add_option("--table", table_n, "emit the per-x expansion table at this n")
      ->check(CLI::PositiveNumber);

  auto* clt = app.add_subcommand("clt", "central limit residuals along the schedule");
  add_common(clt, clt_opts);

  auto* llt = app.add_subcommand("llt", "local limit residuals along the schedule");
  add_common(llt, llt_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigInvalid;
  }

  try {
    if (conditions->parsed()) {
      const auto config = load(conditions_opts, conditions_theorem);
      const brw::ConditionReport report =
          brw::check_conditions(config.spec, config.lambda_value(), config.eta_value(), config.delta);
      for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      brw::emit(report, format_of(conditions_opts), conditions_opts.out);
      return report.all_pass() ? kOk : kHypothesis;
    }
    if (simulate->parsed()) {
      const auto config = load(simulate_opts, 1);
      const int n = sim_n.value_or(config.n_max);
      const brw::Trajectory traj = brw::simulate(config.spec, n, config.seed, {config.cap, ancestry_k});
      if (traj.cap_hit) std::fprintf(stderr, "warning: particle cap hit at generation %d\n", traj.last());
      const brw::MartingaleTrack tr = brw::track(traj);
      if (!track_out.empty()) brw::write_file(track_out, brw::track_csv(tr));
      if (format_of(simulate_opts) == brw::Format::Csv) {
        brw::write_file(simulate_opts.out, brw::trajectory_csv(traj));
      } else {
        nlohmann::json j = {{"generations", traj.last()},
                            {"counts", traj.counts},
                            {"state_indices", traj.realization.state_indices},
                            {"cap_hit", traj.cap_hit},
                            {"W", std::vector<double>(tr.W.begin(), tr.W.end())},
                            {"N1", std::vector<double>(tr.N1.begin(), tr.N1.end())},
                            {"N2", std::vector<double>(tr.N2.begin(), tr.N2.end())}};
        j["extinct_at"] = traj.extinct_at ? nlohmann::json(*traj.extinct_at) : nlohmann::json(nullptr);
        brw::write_file(simulate_opts.out, brw::render(j));
      }
      return kOk;
    }
    if (martingales->parsed()) {
      const auto config = load(martingale_opts, 1);
      const auto report = brw::run_martingale_suite(config);
      brw::emit(report, format_of(martingale_opts), martingale_opts.out);
      return kOk;
    }
    if (edgeworth->parsed()) {
      const auto config = load(edgeworth_opts, 1);
      if (table_n)
        brw::emit(brw::edgeworth_table(config, *table_n), format_of(edgeworth_opts), edgeworth_opts.out);
      else
        brw::emit(brw::run_edgeworth_validation(config), format_of(edgeworth_opts), edgeworth_opts.out);
      return kOk;
    }
    if (clt->parsed()) {
      const auto config = load(clt_opts, 1);
      brw::emit(brw::run_clt(config), format_of(clt_opts), clt_opts.out);
      return kOk;
    }
    if (llt->parsed()) {
      const auto config = load(llt_opts, 2);
      brw::emit(brw::run_llt(config), format_of(llt_opts), llt_opts.out);
      return kOk;
    }
  } catch (const brw::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigInvalid;
  } catch (const brw::HypothesisError& e) {
    std::fprintf(stderr, "hypothesis not met: %s\n", e.what());
    return kHypothesis;
  } catch (const brw::AllCappedError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kAllCapped;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kOk;
}

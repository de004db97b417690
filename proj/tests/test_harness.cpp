#include "brw/core.hpp"
#include "brw/harness.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace brw;
using namespace testing_support;

namespace {

std::string document(const std::string& offspring, const std::string& displacement, const std::string& experiment) {
  return R"({"states":[)" + state_json(offspring, displacement) + R"(],"seed":5,"experiment":)" + experiment + "}";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("brw_test_" + name)).string();
}

}  // namespace

TEST_CASE("parse_experiment") {
  const auto c = parse_experiment(document(kPoisson2, kStdGaussian,
                                           R"({"schedule":[2,4],"replicates":7,"t_grid":[0.5],"A":[[0,1],[2,3]],"threads":3,"beta":0.245})"));
  CHECK(c.schedule == std::vector<int>{2, 4});
  CHECK(c.n_max == 4);
  CHECK(c.replicates == 7);
  CHECK(c.t_grid == std::vector<double>{0.5});
  CHECK(c.A.serialize() == "0:1;2:3");
  CHECK(c.threads == 3);
  CHECK(c.seed == 5);
  CHECK(c.lambda_value() == 9.0);
  CHECK(c.eta_value() == 13.0);

  const auto d = parse_experiment(document(kPoisson2, kStdGaussian, "{}"));
  CHECK(d.schedule == std::vector<int>{6, 10, 14, 18});
  CHECK(d.n_max == 18);
  CHECK(d.beta == 0.24);

  CHECK_THROWS_AS(parse_experiment(document(kPoisson2, kStdGaussian, R"({"schedule":[4,2]})")), ConfigError);
  CHECK_THROWS_AS(parse_experiment(document(kPoisson2, kStdGaussian, R"({"schedule":[0,2]})")), ConfigError);
  CHECK_THROWS_AS(parse_experiment(document(kPoisson2, kStdGaussian, R"({"schedule":[2,9],"n_max":5})")), ConfigError);
  CHECK_THROWS_AS(parse_experiment(document(kPoisson2, kStdGaussian, R"({"replicates":0})")), ConfigError);
  CHECK_THROWS_AS(parse_experiment(document(kPoisson2, kStdGaussian, R"({"colour":1})")), ConfigError);

  auto bad_beta = parse_experiment(document(kPoisson2, kStdGaussian, R"({"schedule":[3],"beta":0.1})"));
  CHECK_THROWS_AS(run_clt(bad_beta), HypothesisError);
  bad_beta.theorem = 2;
  CHECK_THROWS_AS(run_llt(bad_beta), HypothesisError);
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }),
                  std::runtime_error);
}

TEST_CASE("run_clt") {
  SUBCASE("binary splitting, far tail: residuals vanish") {
    auto c = parse_experiment(document(constant_offspring(2), kStdGaussian,
                                       R"({"schedule":[4,8],"replicates":10,"t_grid":[1000]})"));
    const auto r = run_clt(c);
    REQUIRE(r.rows.size() == 2);
    const auto& last = r.rows.back();
    CHECK(last.n == 8);
    CHECK(last.replicates_used == 10);
    CHECK(std::abs(last.mean) <= std::max(last.ci_hi - last.ci_lo, 1e-12));
    CHECK(r.replicates.size() == 10);
    for (const auto& rep : r.replicates) CHECK(rep.limits.W_hat == 1.0);
  }
  SUBCASE("skewed steps at t = 1") {
    auto c = parse_experiment(document(kPoisson2, kCentredExp, R"({"schedule":[4,8],"replicates":30,"t_grid":[1]})"));
    const auto r = run_clt(c);
    CHECK(r.rows.size() == 2);
    for (const auto& row : r.rows) CHECK(std::isfinite(row.median));
  }
  SUBCASE("guards") {
    auto sub = parse_experiment(document(R"({"family":"poisson","mean":0.8})", kStdGaussian, R"({"schedule":[3]})"));
    CHECK_THROWS_AS(run_clt(sub), HypothesisError);
    auto lattice = parse_experiment(document(kPoisson2, kSign, R"({"schedule":[3]})"));
    CHECK_THROWS_AS(run_clt(lattice), HypothesisError);
    auto capped = parse_experiment(document(constant_offspring(2), kStdGaussian,
                                            R"({"schedule":[6,10],"replicates":3,"cap":100})"));
    CHECK_THROWS_AS(run_clt(capped), AllCappedError);
  }
  SUBCASE("extinct paths are counted and kept") {
    const std::string sometimes_dead = R"({"family":"finite-support","points":[[0,0.3],[3,0.7]]})";
    auto c = parse_experiment(document(sometimes_dead, kStdGaussian, R"({"schedule":[3,6],"replicates":60})"));
    const auto r = run_clt(c);
    CHECK(r.rows.front().extinct > 0);
    CHECK(r.rows.front().replicates_used == 60);
  }
}

TEST_CASE("run_llt") {
  auto c = parse_experiment(document(kPoisson2, kCentredExp, R"({"schedule":[4,7],"replicates":20,"A":[[0,2]]})"));
  c.theorem = 2;
  const auto r = run_llt(c);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].replicates_used == 20);
  CHECK(to_csv(r).find("\n4,0:2,20,") != std::string::npos);

  auto flat = parse_experiment(document(kPoisson2, point_mass(0.0), R"({"schedule":[3]})"));
  flat.theorem = 2;
  CHECK_THROWS_AS(run_llt(flat), HypothesisError);

  auto unbounded = parse_experiment(document(kPoisson2, kStdGaussian, R"({"schedule":[3],"A":"-inf:0"})"));
  unbounded.theorem = 2;
  CHECK_THROWS_AS(run_llt(unbounded), ConfigError);
}

TEST_CASE("martingale suite") {
  SUBCASE("binary splitting: W has no variance") {
    auto c = parse_experiment(document(constant_offspring(2), kStdGaussian,
                                       R"({"schedule":[2,5],"replicates":50,"conditional_replicates":200})"));
    const auto r = run_martingale_suite(c);
    for (const auto& row : r.rows) {
      if (row.statistic != "W") continue;
      CHECK(row.se == 0.0);
      CHECK(row.z == 0.0);
      CHECK(row.pass);
    }
  }
  SUBCASE("poisson(2) with gaussian steps") {
    auto c = parse_experiment(document(kPoisson2, kStdGaussian,
                                       R"({"schedule":[3,6],"replicates":2000,"conditional_replicates":1000})"));
    const auto r = run_martingale_suite(c);
    CHECK(r.rows.size() == 12);
    int passing = 0;
    for (const auto& row : r.rows) passing += row.pass ? 1 : 0;
    CHECK(passing >= 11);
  }
  SUBCASE("subcritical process is refused") {
    auto c = parse_experiment(document(R"({"family":"poisson","mean":0.8})", kStdGaussian, R"({"schedule":[3]})"));
    try {
      run_martingale_suite(c);
      FAIL("expected HypothesisError");
    } catch (const HypothesisError& e) {
      CHECK(std::string(e.what()).find("E ln m_0") != std::string::npos);
    }
  }
}

TEST_CASE("edgeworth validation") {
  SUBCASE("gaussian steps") {
    auto c = parse_experiment(document(kPoisson2, kStdGaussian, R"({"schedule":[5,10]})"));
    const auto r = run_edgeworth_validation(c);
    CHECK(r.rows.size() == 8);
    for (const auto& row : r.rows) CHECK(row.sup_error == 0.0);
  }
  SUBCASE("uniform steps") {
    auto c = parse_experiment(document(kPoisson2, kCentredUniform, R"({"schedule":[12]})"));
    const auto r = run_edgeworth_validation(c);
    CHECK(r.sup_error(12, 2) < r.sup_error(12, 0));
  }
  SUBCASE("exponential steps") {
    auto c = parse_experiment(document(kPoisson2, kCentredExp, R"({"schedule":[8,16,32]})"));
    const auto r = run_edgeworth_validation(c);
    CHECK(r.sup_error(16, 1) < r.sup_error(8, 1));
    CHECK(r.sup_error(32, 1) < r.sup_error(16, 1));
    const auto table = edgeworth_table(c, 16);
    CHECK(table.size() == 1001);
    CHECK(table.front().x == -5.0);
    CHECK(table.back().x == doctest::Approx(5.0));
  }
  SUBCASE("no oracle") {
    auto c = parse_experiment(document(kPoisson2, R"({"family":"laplace","mean":0,"scale":1})", R"({"schedule":[4]})"));
    CHECK_THROWS_AS(run_edgeworth_validation(c), ConfigError);
  }
}

TEST_CASE("emit") {
  SUBCASE("empty schedule gives a header-only CSV") {
    auto c = parse_experiment(document(kPoisson2, kStdGaussian, R"({"schedule":[],"n_max":3,"replicates":2})"));
    const auto r = run_clt(c);
    const std::string path = temp_path("empty.csv");
    emit(r, Format::Csv, path);
    CHECK(slurp(path) == "n,t,replicates_used,mean_residual,median_residual,std_residual,ci_lo,ci_hi,extinct,capped\n");
  }
  SUBCASE("same report twice, and across thread counts") {
    auto c = parse_experiment(document(kPoisson2, kStdGaussian, R"({"schedule":[3,6],"replicates":16})"));
    const auto a = run_clt(c);
    emit(a, Format::Csv, temp_path("a.csv"));
    emit(a, Format::Csv, temp_path("b.csv"));
    CHECK(slurp(temp_path("a.csv")) == slurp(temp_path("b.csv")));
    c.threads = 4;
    CHECK(to_csv(run_clt(c)) == to_csv(a));
  }
  SUBCASE("json numbers round-trip exactly") {
    auto c = parse_experiment(document(kPoisson2, kCentredExp, R"({"schedule":[3,5],"replicates":8,"t_grid":[0,0.1]})"));
    const auto r = run_clt(c);
    const std::string path = temp_path("r.json");
    emit(r, Format::Json, path);
    const auto back = nlohmann::json::parse(slurp(path));
    REQUIRE(back["rows"].size() == r.rows.size());
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      const double m = back["rows"][i]["mean_residual"].get<double>();
      const double s = back["rows"][i]["std_residual"].get<double>();
      CHECK(std::memcmp(&m, &r.rows[i].mean, sizeof m) == 0);
      CHECK(std::memcmp(&s, &r.rows[i].stddev, sizeof s) == 0);
    }
    for (std::size_t i = 0; i < r.replicates.size(); ++i)
      CHECK(back["replicates"][i]["V1_hat"].get<double>() == r.replicates[i].limits.V1_hat);
    CHECK(back["limit_proxy"].is_string());
    // The %.17g CSV text parses back to the same doubles as well.
    const std::string csv = to_csv(r);
    const auto line_start = csv.find('\n') + 1;
    std::istringstream row(csv.substr(line_start, csv.find('\n', line_start) - line_start));
    std::string cell;
    for (int k = 0; k < 4; ++k) std::getline(row, cell, ',');
    CHECK(std::strtod(cell.c_str(), nullptr) == r.rows[0].mean);
  }
  SUBCASE("unwritable path") {
    CHECK_THROWS_AS(write_file("/nonexistent-dir/x.csv", "a"), std::runtime_error);
  }
}

#include "brw/harness.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace brw {

using nlohmann::json;

namespace {

constexpr const char* kProxyNote =
    "W, V1, V2 are end-of-path martingale values at n_max; V1 and V2 carry no rate guarantee";

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string summary_tail(const ResidualSummary& s) {
  return std::to_string(s.replicates_used) + "," + num(s.mean) + "," + num(s.median) + "," + num(s.stddev) +
         "," + num(s.ci_lo) + "," + num(s.ci_hi) + "," + std::to_string(s.extinct) + "," +
         std::to_string(s.capped) + "\n";
}

json summary_json(const ResidualSummary& s) {
  return {{"n", s.n},
          {"replicates_used", s.replicates_used},
          {"mean_residual", s.mean},
          {"median_residual", s.median},
          {"std_residual", s.stddev},
          {"ci_lo", s.ci_lo},
          {"ci_hi", s.ci_hi},
          {"median_abs_residual", s.median_abs},
          {"extinct", s.extinct},
          {"capped", s.capped}};
}

json replicates_json(const std::vector<ReplicateEstimates>& reps) {
  json out = json::array();
  for (const auto& r : reps)
    out.push_back({{"replicate", r.replicate},
                   {"capped", r.capped},
                   {"extinct", r.extinct},
                   {"W_hat", r.limits.W_hat},
                   {"V1_hat", r.limits.V1_hat},
                   {"V2_hat", r.limits.V2_hat},
                   {"at_generation", r.limits.at_generation}});
  return out;
}

}  // namespace

std::string to_csv(const CltReport& r) {
  std::string out = "n,t,replicates_used,mean_residual,median_residual,std_residual,ci_lo,ci_hi,extinct,capped\n";
  for (const auto& s : r.rows) out += std::to_string(s.n) + "," + num(s.t) + "," + summary_tail(s);
  return out;
}

std::string to_csv(const LltReport& r) {
  std::string out = "n,A,replicates_used,mean_residual,median_residual,std_residual,ci_lo,ci_hi,extinct,capped\n";
  const std::string a = r.A.serialize();
  for (const auto& s : r.rows) out += std::to_string(s.n) + "," + a + "," + summary_tail(s);
  return out;
}

std::string to_csv(const MartingaleReport& r) {
  std::string out = "n,test,statistic,target,mean,se,z,replicates,pass\n";
  for (const auto& row : r.rows)
    out += std::to_string(row.n) + "," + row.test + "," + row.statistic + "," + num(row.target) + "," +
           num(row.mean) + "," + num(row.se) + "," + num(row.z) + "," + std::to_string(row.replicates) + "," +
           (row.pass ? "true" : "false") + "\n";
  return out;
}

std::string to_csv(const EdgeworthReport& r) {
  std::string out = "n,order,sup_error\n";
  for (const auto& row : r.rows)
    out += std::to_string(row.n) + "," + std::to_string(row.order) + "," + num(row.sup_error) + "\n";
  return out;
}

std::string to_csv(const std::vector<ExpansionTableRow>& rows) {
  std::string out = "x,Phi,Q1_term,Q2_term,Q3_term,expansion,oracle_cdf,abs_error\n";
  for (const auto& row : rows)
    out += num(row.x) + "," + num(row.Phi) + "," + num(row.q1) + "," + num(row.q2) + "," + num(row.q3) + "," +
           num(row.expansion) + "," + num(row.oracle) + "," + num(row.abs_error) + "\n";
  return out;
}

std::string to_csv(const ConditionReport& r) {
  std::string out = "quantity,value,pass\n";
  auto line = [&](const char* name, double v, bool pass) {
    out += std::string(name) + "," + num(v) + "," + (pass ? "true" : "false") + "\n";
  };
  line("e_ln_m0", r.e_ln_m0, r.supercritical_pass);
  line("branching_moment", r.branching_moment, r.branching_pass);
  line("displacement_moment", r.displacement_moment, r.displacement_pass);
  line("negative_moment", r.negative_moment, r.negative_pass);
  line("e_sigma2", r.e_sigma2, r.nondegenerate_pass);
  line("cramer", r.cramer_ok ? 1.0 : 0.0, r.cramer_ok);
  return out;
}

json to_json(const CltReport& r) {
  json rows = json::array();
  for (const auto& s : r.rows) {
    json j = summary_json(s);
    j["t"] = s.t;
    rows.push_back(std::move(j));
  }
  return {{"experiment", "clt"}, {"limit_proxy", kProxyNote}, {"rows", rows},
          {"replicates", replicates_json(r.replicates)}};
}

json to_json(const LltReport& r) {
  json rows = json::array();
  for (const auto& s : r.rows) {
    json j = summary_json(s);
    j["A"] = r.A.serialize();
    rows.push_back(std::move(j));
  }
  return {{"experiment", "llt"}, {"limit_proxy", kProxyNote}, {"rows", rows},
          {"replicates", replicates_json(r.replicates)}};
}

json to_json(const MartingaleReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n},
                    {"test", row.test},
                    {"statistic", row.statistic},
                    {"target", row.target},
                    {"mean", row.mean},
                    {"se", row.se},
                    {"z", row.z},
                    {"replicates", row.replicates},
                    {"pass", row.pass}});
  return {{"experiment", "martingales"}, {"capped", r.capped}, {"all_pass", r.all_pass()}, {"rows", rows}};
}

json to_json(const EdgeworthReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back({{"n", row.n}, {"order", row.order}, {"sup_error", row.sup_error}});
  return {{"experiment", "edgeworth"}, {"family", r.family}, {"rows", rows}};
}

json to_json(const std::vector<ExpansionTableRow>& table) {
  json rows = json::array();
  for (const auto& row : table)
    rows.push_back({{"x", row.x},
                    {"Phi", row.Phi},
                    {"Q1_term", row.q1},
                    {"Q2_term", row.q2},
                    {"Q3_term", row.q3},
                    {"expansion", row.expansion},
                    {"oracle_cdf", row.oracle},
                    {"abs_error", row.abs_error}});
  return {{"experiment", "edgeworth-table"}, {"rows", rows}};
}

json to_json(const ConditionReport& r) {
  return {{"lambda", r.lambda},
          {"eta", r.eta},
          {"delta", r.delta},
          {"e_ln_m0", r.e_ln_m0},
          {"branching_moment", r.branching_moment},
          {"displacement_moment", r.displacement_moment},
          {"negative_moment", r.negative_moment},
          {"e_sigma2", r.e_sigma2},
          {"cramer_ok_per_state", r.cramer_ok_per_state},
          {"cramer_ok", r.cramer_ok},
          {"supercritical_pass", r.supercritical_pass},
          {"branching_pass", r.branching_pass},
          {"displacement_pass", r.displacement_pass},
          {"negative_pass", r.negative_pass},
          {"nondegenerate_pass", r.nondegenerate_pass},
          {"all_pass", r.all_pass()},
          {"warnings", r.warnings}};
}

std::string render(const json& j) { return j.dump(2) + "\n"; }

void write_file(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace brw

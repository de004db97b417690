#pragma once

// Shared helpers for the test programs: config builders and a few
// independent numerical references.

#include "brw/env.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace testing_support {

inline std::string state_json(const std::string& offspring, const std::string& displacement,
                              double weight = 1.0) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", weight);
  return std::string(R"({"weight":)") + buf + R"(,"offspring":)" + offspring +
         R"(,"displacement":)" + displacement + "}";
}

inline brw::EnvironmentSpec one_state(const std::string& offspring, const std::string& displacement) {
  return brw::parse_spec(R"({"states":[)" + state_json(offspring, displacement) + "]}");
}

inline std::string constant_offspring(int k) {
  return R"({"family":"finite-support","points":[[)" + std::to_string(k) + ",1]]}";
}

inline std::string point_mass(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, R"({"family":"finite-lattice","points":[[%.17g,1]]})", x);
  return buf;
}

inline const std::string kPoisson2 = R"({"family":"poisson","mean":2})";
inline const std::string kStdGaussian = R"({"family":"gaussian","mean":0,"var":1})";
inline const std::string kCentredExp = R"({"family":"shifted-exponential","rate":1,"shift":-1})";
inline const std::string kCentredUniform = R"({"family":"uniform","a":-0.5,"b":0.5})";
inline const std::string kSign = R"({"family":"two-point","a":-1,"b":1,"p":0.5})";

/// Composite Simpson rule with 2*half_panels panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int half_panels) {
  const int n = 2 * half_panels;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double std_normal_density(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

}  // namespace testing_support

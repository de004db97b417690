#pragma once

// Variate generators for the environment families. Each sampler is built once
// per environment state and then drawn from in the hot loop.

#include "brw/env.hpp"
#include "brw/rng.hpp"

#include <vector>

namespace brw {

class OffspringSampler {
 public:
  explicit OffspringSampler(const OffspringLaw& law);
  int operator()(Rng& rng) const;
  /// True when the law is a point mass (no randomness consumed).
  bool deterministic() const { return kind_ == Kind::Constant; }

 private:
  enum class Kind { Constant, Poisson, Geometric, Binomial, Table };
  Kind kind_ = Kind::Constant;
  int constant_ = 0;
  double mean_ = 0.0;
  int poisson_parts_ = 1;
  double poisson_exp_ = 1.0;  // exp(-mean / parts)
  double log_q_ = 0.0;        // geometric: log(1 - p)
  int trials_ = 0;
  double p_ = 0.0;
  std::vector<int> values_;
  std::vector<double> cdf_;

  int poisson_inversion(Rng& rng) const;
};

class DisplacementSampler {
 public:
  explicit DisplacementSampler(const DisplacementLaw& law);
  double operator()(Rng& rng) const;
  bool deterministic() const { return kind_ == Kind::Constant; }

 private:
  enum class Kind { Constant, Gaussian, Uniform, Laplace, Exponential, Table };
  Kind kind_ = Kind::Constant;
  double a_ = 0.0;  // location / lower end / constant value
  double b_ = 0.0;  // scale / width / rate
  std::vector<double> values_;
  std::vector<double> cdf_;
};

}  // namespace brw

#include "brw/sampling.hpp"

#include "brw/overloaded.hpp"

#include <algorithm>
#include <cmath>

namespace brw {

namespace {

template <typename V>
void build_table(const std::vector<std::pair<V, double>>& pts, std::vector<V>& values,
                 std::vector<double>& cdf) {
  double acc = 0.0;
  for (const auto& [v, p] : pts) {
    if (p <= 0.0) continue;
    values.push_back(v);
    cdf.push_back(acc += p);
  }
  // Guard the last bucket against rounding in the cumulative sum.
  if (!cdf.empty()) cdf.back() = 2.0;
}

template <typename V>
V table_draw(const std::vector<V>& values, const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return values[static_cast<std::size_t>(it - cdf.begin())];
}

constexpr double kPoissonChunk = 16.0;

}  // namespace

OffspringSampler::OffspringSampler(const OffspringLaw& law) {
  std::visit(overloaded{
                 [&](const PoissonOffspring& l) {
                   if (l.mean == 0.0) return;  // constant 0
                   kind_ = Kind::Poisson;
                   mean_ = l.mean;
                   poisson_parts_ = std::max(1, static_cast<int>(std::ceil(l.mean / kPoissonChunk)));
                   poisson_exp_ = std::exp(-l.mean / poisson_parts_);
                 },
                 [&](const GeometricOffspring& l) {
                   if (l.mean == 0.0) return;
                   kind_ = Kind::Geometric;
                   log_q_ = std::log(l.mean / (1.0 + l.mean));
                 },
                 [&](const BinomialOffspring& l) {
                   if (l.p == 0.0 || l.trials == 0) return;
                   if (l.p == 1.0) {
                     constant_ = l.trials;
                     return;
                   }
                   kind_ = Kind::Binomial;
                   trials_ = l.trials;
                   p_ = l.p;
                 },
                 [&](const FiniteOffspring& l) {
                   build_table(l.points, values_, cdf_);
                   if (values_.size() == 1) {
                     constant_ = values_.front();
                   } else {
                     kind_ = Kind::Table;
                   }
                 },
             },
             law);
}

int OffspringSampler::poisson_inversion(Rng& rng) const {
  // Sequential search; the per-part mean is at most kPoissonChunk.
  int k = 0;
  double p = poisson_exp_;
  double cdf = p;
  const double lam = mean_ / poisson_parts_;
  const double u = rng.uniform();
  while (u >= cdf && p > 0.0) {
    ++k;
    p *= lam / k;
    cdf += p;
  }
  return k;
}

int OffspringSampler::operator()(Rng& rng) const {
  switch (kind_) {
    case Kind::Constant:
      return constant_;
    case Kind::Poisson: {
      int total = 0;
      for (int i = 0; i < poisson_parts_; ++i) total += poisson_inversion(rng);
      return total;
    }
    case Kind::Geometric:
      return static_cast<int>(std::floor(std::log(rng.uniform_open()) / log_q_));
    case Kind::Binomial: {
      int k = 0;
      for (int i = 0; i < trials_; ++i) k += rng.uniform() < p_ ? 1 : 0;
      return k;
    }
    case Kind::Table:
      return table_draw(values_, cdf_, rng);
  }
  return 0;
}

DisplacementSampler::DisplacementSampler(const DisplacementLaw& law) {
  std::visit(overloaded{
                 [&](const GaussianStep& l) {
                   a_ = l.mean;
                   if (l.var > 0.0) {
                     kind_ = Kind::Gaussian;
                     b_ = std::sqrt(l.var);
                   }
                 },
                 [&](const UniformStep& l) {
                   kind_ = Kind::Uniform;
                   a_ = l.a;
                   b_ = l.b - l.a;
                 },
                 [&](const LaplaceStep& l) {
                   kind_ = Kind::Laplace;
                   a_ = l.mean;
                   b_ = l.scale;
                 },
                 [&](const ShiftedExponentialStep& l) {
                   kind_ = Kind::Exponential;
                   a_ = l.shift;
                   b_ = l.rate;
                 },
                 [&](const TwoPointStep& l) {
                   const std::vector<std::pair<double, double>> pts = {{l.a, l.p}, {l.b, 1.0 - l.p}};
                   build_table(pts, values_, cdf_);
                   if (values_.size() == 1 || l.a == l.b) {
                     a_ = values_.front();
                   } else {
                     kind_ = Kind::Table;
                   }
                 },
                 [&](const LatticeStep& l) {
                   build_table(l.points, values_, cdf_);
                   if (values_.size() == 1) {
                     a_ = values_.front();
                   } else {
                     kind_ = Kind::Table;
                   }
                 },
             },
             law);
}

double DisplacementSampler::operator()(Rng& rng) const {
  switch (kind_) {
    case Kind::Constant:
      return a_;
    case Kind::Gaussian:
      return a_ + b_ * rng.normal();
    case Kind::Uniform:
      return a_ + b_ * rng.uniform();
    case Kind::Laplace: {
      const double u = rng.uniform_open() - 0.5;
      return a_ - b_ * std::copysign(std::log1p(-2.0 * std::abs(u)), u);
    }
    case Kind::Exponential:
      return a_ + rng.exponential() / b_;
    case Kind::Table:
      return table_draw(values_, cdf_, rng);
  }
  return 0.0;
}

}  // namespace brw

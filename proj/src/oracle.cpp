#include "brw/oracle.hpp"

#include "brw/overloaded.hpp"
#include "brw/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>

namespace brw::oracle {

double ExactDistribution::mean() const {
  double m = 0.0;
  for (const auto& [v, p] : outcomes) m += v * p;
  return m;
}

double ExactDistribution::total_probability() const {
  double t = 0.0;
  for (const auto& [v, p] : outcomes) t += p;
  return t;
}

namespace {

using Points = std::vector<std::pair<double, double>>;

Points offspring_points(const OffspringLaw& law) {
  return std::visit(
      overloaded{
          [](const FiniteOffspring& l) {
            Points pts;
            for (const auto& [v, p] : l.points)
              if (p > 0.0) pts.emplace_back(v, p);
            return pts;
          },
          [](const BinomialOffspring& l) {
            Points pts;
            double c = 1.0;  // C(trials, k)
            for (int k = 0; k <= l.trials; ++k) {
              const double p = c * std::pow(l.p, k) * std::pow(1.0 - l.p, l.trials - k);
              if (p > 0.0) pts.emplace_back(k, p);
              c = c * (l.trials - k) / (k + 1);
            }
            return pts;
          },
          [](const auto&) -> Points {
            throw std::invalid_argument("enumerate_exact: offspring law has unbounded support");
          },
      },
      law);
}

Points step_points(const DisplacementLaw& law) {
  return std::visit(overloaded{
                        [](const TwoPointStep& l) {
                          Points pts;
                          if (l.p > 0.0) pts.emplace_back(l.a, l.p);
                          if (l.p < 1.0) pts.emplace_back(l.b, 1.0 - l.p);
                          return pts;
                        },
                        [](const LatticeStep& l) {
                          Points pts;
                          for (const auto& [v, p] : l.points)
                            if (p > 0.0) pts.emplace_back(v, p);
                          return pts;
                        },
                        [](const auto&) -> Points {
                          throw std::invalid_argument("enumerate_exact: displacement law is not discrete");
                        },
                    },
                    law);
}

using Population = std::vector<double>;  // sorted positions
using PopulationLaw = std::map<Population, double>;

// Law of one particle's brood: sorted child displacements with probability.
PopulationLaw brood_law(const Points& offspring, const Points& steps, std::uint64_t& visited) {
  PopulationLaw law;
  Population draws;
  std::function<void(int, double)> rec = [&](int remaining, double prob) {
    if (remaining == 0) {
      if (++visited > kMaxOutcomes) throw std::length_error("enumerate_exact: outcome count exceeds guard");
      Population sorted = draws;
      std::sort(sorted.begin(), sorted.end());
      law[sorted] += prob;
      return;
    }
    for (const auto& [step, ps] : steps) {
      draws.push_back(step);
      rec(remaining - 1, prob * ps);
      draws.pop_back();
    }
  };
  for (const auto& [count, pc] : offspring) rec(static_cast<int>(count), pc);
  return law;
}

// Next-generation law, adding one parent's brood at a time and merging equal
// partial populations as it goes.
PopulationLaw next_generation(const PopulationLaw& current, const PopulationLaw& brood, std::uint64_t& visited) {
  PopulationLaw out;
  for (const auto& [parents, prob] : current) {
    PopulationLaw partial{{Population{}, prob}};
    for (double x : parents) {
      PopulationLaw grown;
      for (const auto& [kids, p] : partial)
        for (const auto& [offsets, q] : brood) {
          if (++visited > kMaxOutcomes) throw std::length_error("enumerate_exact: outcome count exceeds guard");
          Population merged = kids;
          for (double d : offsets) merged.push_back(x + d);
          std::sort(merged.begin(), merged.end());
          grown[merged] += p * q;
        }
      partial = std::move(grown);
    }
    for (const auto& [kids, p] : partial) out[kids] += p;
  }
  return out;
}

}  // namespace

ExactDistribution enumerate_exact(const EnvironmentSpec& spec, const std::vector<int>& state_path,
                                  int n, const StatisticSpec& statistic) {
  if (n < 1 || n > 3) throw std::invalid_argument("enumerate_exact: n must be in [1, 3]");
  if (static_cast<int>(state_path.size()) < n) throw std::invalid_argument("enumerate_exact: state path shorter than n");

  PopulationLaw law{{Population{0.0}, 1.0}};
  double pi = 1.0, ell = 0.0, s2 = 0.0;
  std::uint64_t visited = 0;
  for (int g = 0; g < n; ++g) {
    const auto& state = spec.states.at(static_cast<std::size_t>(state_path[static_cast<std::size_t>(g)]));
    const Points off = offspring_points(state.offspring);
    const Points steps = step_points(state.displacement);

    double m = 0.0, l = 0.0, l2 = 0.0;
    for (const auto& [v, p] : off) m += v * p;
    for (const auto& [v, p] : steps) {
      l += v * p;
      l2 += v * v * p;
    }
    pi *= m;
    ell += l;
    s2 += l2 - l * l;

    law = next_generation(law, brood_law(off, steps, visited), visited);
  }

  std::vector<std::pair<double, double>> raw;
  raw.reserve(law.size());
  for (const auto& [pop, prob] : law) {
    double value = 0.0;
    switch (statistic.kind) {
      case Statistic::Count:
        value = static_cast<double>(std::count_if(pop.begin(), pop.end(),
                                                  [&](double x) { return statistic.set.contains(x); }));
        break;
      case Statistic::W:
        value = pop.empty() ? 0.0 : pop.size() / pi;
        break;
      case Statistic::N1: {
        double acc = 0.0;
        for (double x : pop) acc += x - ell;
        value = pop.empty() ? 0.0 : acc / pi;
        break;
      }
      case Statistic::N2: {
        double acc = 0.0;
        for (double x : pop) acc += (x - ell) * (x - ell);
        value = pop.empty() ? 0.0 : s2 * (pop.size() / pi) - acc / pi;
        break;
      }
    }
    raw.emplace_back(value, prob);
  }
  std::sort(raw.begin(), raw.end());

  ExactDistribution dist;
  for (const auto& [v, p] : raw) {
    if (!dist.outcomes.empty()) {
      auto& back = dist.outcomes.back();
      if (std::abs(v - back.first) <= 1e-12 * std::max(1.0, std::abs(v))) {
        back.second += p;
        continue;
      }
    }
    dist.outcomes.emplace_back(v, p);
  }
  return dist;
}

// ---- exact sum CDFs ------------------------------------------------------

double irwin_hall_cdf(int n, double x) {
  if (n < 1 || n > 30) throw std::invalid_argument("irwin_hall_cdf: n must be in [1, 30]");
  if (x <= 0.0) return 0.0;
  if (x >= n) return 1.0;
  if (x > 0.5 * n) return 1.0 - irwin_hall_cdf(n, n - x);
  // (1/n!) sum_{k <= x} (-1)^k C(n,k) (x-k)^n, Kahan-compensated in long double.
  long double sum = 0.0L, comp = 0.0L;
  long double binom = 1.0L;
  long double nfact = 1.0L;
  for (int i = 2; i <= n; ++i) nfact *= i;
  const int kmax = static_cast<int>(std::floor(x));
  for (int k = 0; k <= kmax; ++k) {
    const long double term = ((k % 2 == 0) ? 1.0L : -1.0L) * binom *
                             std::pow(static_cast<long double>(x) - k, n) / nfact;
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    binom = binom * (n - k) / (k + 1);
  }
  return static_cast<double>(std::clamp(sum, 0.0L, 1.0L));
}

double irwin_hall_standardized_cdf(int n, double z) {
  return irwin_hall_cdf(n, 0.5 * n + z * std::sqrt(n / 12.0));
}

double gamma_sum_cdf(int n, double x) {
  if (n < 1) throw std::invalid_argument("gamma_sum_cdf: n must be >= 1");
  const double y = x + n;
  if (y <= 0.0) return 0.0;
  // Regularised lower incomplete gamma P(n, y) for integer n.
  if (y < n) {
    // e^{-y} sum_{k >= n} y^k / k!, terms decreasing.
    double term = std::exp(-y + n * std::log(y) - std::lgamma(n + 1.0));
    double acc = 0.0;
    for (int k = n; term > 1e-18 * acc || k == n; ++k) {
      acc += term;
      term *= y / (k + 1);
      if (k > n + 100000) break;
    }
    return acc;
  }
  // 1 - e^{-y} sum_{k < n} y^k / k!, summed from the largest term down.
  double term = std::exp(-y + (n - 1) * std::log(y) - std::lgamma(static_cast<double>(n)));
  double acc = 0.0;
  for (int k = n - 1; k >= 0; --k) {
    acc += term;
    term *= k / y;
  }
  return 1.0 - acc;
}

double gamma_sum_standardized_cdf(int n, double z) { return gamma_sum_cdf(n, z * std::sqrt(static_cast<double>(n))); }

// ---- quadrature moments --------------------------------------------------

namespace {

template <typename Density>
Eigen::Matrix<double, 5, 1> density_moments(Density&& density, double lo, double mid, double hi) {
  auto integral = [&](auto&& g) {
    auto f = [&](double x) { return g(x) * density(x); };
    const QuadratureResult left = integrate_segments(f, lo, mid, 64, 1e-14);
    const QuadratureResult right = integrate_segments(f, mid, hi, 64, 1e-14);
    if (!left.converged || !right.converged)
      throw std::runtime_error("numeric_central_moments: quadrature did not converge");
    return left.value + right.value;
  };
  const double mass = integral([](double) { return 1.0; });
  const double mean = integral([](double x) { return x; }) / mass;
  Eigen::Matrix<double, 5, 1> mu;
  for (int k = 2; k <= 6; ++k)
    mu[k - 2] = integral([&](double x) { return std::pow(x - mean, k); }) / mass;
  return mu;
}

Eigen::Matrix<double, 5, 1> discrete_central(const Points& pts) {
  double mean = 0.0;
  for (const auto& [v, p] : pts) mean += v * p;
  Eigen::Matrix<double, 5, 1> mu;
  for (int k = 2; k <= 6; ++k) {
    double acc = 0.0;
    for (const auto& [v, p] : pts) acc += p * std::pow(v - mean, k);
    mu[k - 2] = acc;
  }
  return mu;
}

}  // namespace

Eigen::Matrix<double, 5, 1> numeric_central_moments(const DisplacementLaw& law) {
  return std::visit(
      overloaded{
          [](const GaussianStep& l) -> Eigen::Matrix<double, 5, 1> {
            if (l.var == 0.0) return Eigen::Matrix<double, 5, 1>::Zero();
            const double sd = std::sqrt(l.var);
            auto dens = [&](double x) {
              const double z = (x - l.mean) / sd;
              return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
            };
            return density_moments(dens, l.mean - 40 * sd, l.mean, l.mean + 40 * sd);
          },
          [](const UniformStep& l) {
            auto dens = [&](double) { return 1.0 / (l.b - l.a); };
            return density_moments(dens, l.a, 0.5 * (l.a + l.b), l.b);
          },
          [](const LaplaceStep& l) {
            auto dens = [&](double x) { return std::exp(-std::abs(x - l.mean) / l.scale) / (2 * l.scale); };
            return density_moments(dens, l.mean - 90 * l.scale, l.mean, l.mean + 90 * l.scale);
          },
          [](const ShiftedExponentialStep& l) {
            auto dens = [&](double x) { return l.rate * std::exp(-l.rate * (x - l.shift)); };
            const double mean = l.shift + 1.0 / l.rate;
            return density_moments(dens, l.shift, mean, l.shift + 100.0 / l.rate);
          },
          [](const TwoPointStep& l) { return discrete_central(Points{{l.a, l.p}, {l.b, 1.0 - l.p}}); },
          [](const LatticeStep& l) { return discrete_central(l.points); },
      },
      law);
}

}  // namespace brw::oracle

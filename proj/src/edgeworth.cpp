#include "brw/edgeworth.hpp"

#include "brw/special.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace brw {

Cumulants central_to_cumulants(double /*mean*/, const Eigen::Matrix<double, 5, 1>& mu) {
  const double m2 = mu[0], m3 = mu[1], m4 = mu[2], m5 = mu[3], m6 = mu[4];
  Cumulants g;
  g << m2, m3, m4 - 3 * m2 * m2, m5 - 10 * m3 * m2,
      m6 - 15 * m4 * m2 - 10 * m3 * m3 + 30 * m2 * m2 * m2;
  return g;
}

CumulantSet window_cumulants(const EnvironmentRealization& realization, int k_n, int n) {
  if (!(0 <= k_n && k_n < n)) throw std::invalid_argument("window_cumulants: need 0 <= k_n < n");
  if (realization.size() < n) throw std::invalid_argument("window_cumulants: realization shorter than n");
  CumulantSet c;
  c.k_n = k_n;
  c.n = n;
  c.gamma = Eigen::Matrix<double, Eigen::Dynamic, 5>::Zero(n, 5);
  for (int j = k_n; j < n; ++j) {
    const StepMoments& sm = realization.per_step[static_cast<std::size_t>(j)];
    c.gamma.row(j) = central_to_cumulants(sm.l, sm.central).transpose();
  }
  return c;
}

CumulantSet iid_cumulants(const StepMoments& step, int n) {
  if (n < 1) throw std::invalid_argument("iid_cumulants: n must be >= 1");
  CumulantSet c;
  c.k_n = 0;
  c.n = n;
  c.gamma = central_to_cumulants(step.l, step.central).transpose().replicate(n, 1);
  return c;
}

EdgeworthTerms build_terms(const CumulantSet& cumulants, int order, Normalization norm) {
  if (order < 0 || order > 3) throw std::invalid_argument("build_terms: order must be in [0, 3]");
  const Cumulants sums = cumulants.gamma.colwise().sum().transpose();
  EdgeworthTerms t;
  t.order = order;
  t.B2 = sums[0];
  if (!(t.B2 > 0.0)) throw DegenerateError("build_terms: zero window variance");
  t.n_norm = norm == Normalization::Padded ? cumulants.n : cumulants.n - cumulants.k_n;
  const double B = std::sqrt(t.B2);
  for (int nu = 3; nu <= 6; ++nu)
    t.lambda[nu - 3] = std::pow(t.n_norm, 0.5 * (nu - 2)) * std::pow(B, -nu) * sums[nu - 2];
  return t;
}

EdgeworthTerms build_terms(const EnvironmentRealization& realization, int k_n, int n, int order,
                           Normalization norm) {
  return build_terms(window_cumulants(realization, k_n, n), order, norm);
}

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Calls visit(k) for every k = (k_1..k_nu) >= 0 with sum_m m k_m = nu.
template <typename Visit>
void for_each_solution(int nu, std::vector<int>& k, int m, int remaining, Visit&& visit) {
  if (m > nu) {
    if (remaining == 0) visit(k);
    return;
  }
  for (int c = 0; c * m <= remaining; ++c) {
    k[static_cast<std::size_t>(m - 1)] = c;
    for_each_solution(nu, k, m + 1, remaining - c * m, visit);
  }
  k[static_cast<std::size_t>(m - 1)] = 0;
}

}  // namespace

double q_term(const EdgeworthTerms& terms, int nu, double x) {
  if (nu < 1 || nu > 3) throw std::invalid_argument("q_term: nu must be 1, 2 or 3");
  std::vector<int> k(static_cast<std::size_t>(nu), 0);
  double acc = 0.0;
  for_each_solution(nu, k, 1, nu, [&](const std::vector<int>& sol) {
    int s = 0;
    double weight = 1.0;
    for (int m = 1; m <= nu; ++m) {
      const int km = sol[static_cast<std::size_t>(m - 1)];
      s += km;
      weight *= std::pow(terms.lambda_at(m + 2) / factorial(m + 2), km) / factorial(km);
    }
    acc += hermite(nu + 2 * s - 1, x) * weight;
  });
  return -phi(x) * acc;
}

double q_term_closed_form(const EdgeworthTerms& t, int nu, double x) {
  const double l3 = t.lambda_at(3), l4 = t.lambda_at(4), l5 = t.lambda_at(5);
  switch (nu) {
    case 1:
      return -phi(x) * hermite(2, x) * l3 / 6.0;
    case 2:
      return -phi(x) * (hermite(5, x) * l3 * l3 / 72.0 + hermite(3, x) * l4 / 24.0);
    case 3:
      return -phi(x) * (hermite(8, x) * l3 * l3 * l3 / 1296.0 + hermite(6, x) * l3 * l4 / 144.0 +
                        hermite(4, x) * l5 / 120.0);
    default:
      throw std::invalid_argument("q_term_closed_form: nu must be 1, 2 or 3");
  }
}

double expansion_cdf(const EdgeworthTerms& terms, double x, int order) {
  if (order < 0 || order > 3) throw std::invalid_argument("expansion_cdf: order must be in [0, 3]");
  double value = Phi(x);
  for (int nu = 1; nu <= order; ++nu) value += q_term(terms, nu, x) * std::pow(terms.n_norm, -0.5 * nu);
  return value;
}

// ---- windowed corrections ------------------------------------------------

double D1(double x) { return -hermite(2, x) * phi(x); }
double D2(double x) { return -hermite(5, x) * phi(x); }
double D3(double x) { return -hermite(3, x) * phi(x); }

CorrectionTerms kappa_terms(const MomentProfile& profile, int n, int k_n) {
  if (!(0 <= k_n && k_n < n) || n > profile.n)
    throw std::invalid_argument("kappa_terms: need 0 <= k_n < n <= profile length");
  CorrectionTerms c;
  c.var = profile.s2(n) - profile.s2(k_n);
  if (!(c.var > 0.0)) throw DegenerateError("kappa_terms: degenerate window");
  c.sum3 = profile.s_order(n, 3) - profile.s_order(k_n, 3);
  c.cum4 = profile.cum4[n] - profile.cum4[k_n];
  c.cum5 = profile.cum5[n] - profile.cum5[k_n];
  c.kappa1 = c.sum3 / (6.0 * std::pow(c.var, 1.5));
  c.kappa2 = c.sum3 * c.sum3 / (72.0 * std::pow(c.var, 3.0));
  c.kappa3 = c.cum4 / (24.0 * c.var * c.var);
  return c;
}

double CorrectionTerms::remainder(double x) const {
  const double p = phi(x);
  return -std::pow(sum3, 3) / (1296.0 * std::pow(var, 4.5)) * hermite(8, x) * p -
         cum5 / (120.0 * std::pow(var, 2.5)) * hermite(4, x) * p -
         sum3 * cum4 / (144.0 * std::pow(var, 3.5)) * hermite(6, x) * p;
}

double CorrectionTerms::cdf(double x) const {
  return Phi(x) + kappa1 * D1(x) + kappa2 * D2(x) + kappa3 * D3(x) + remainder(x);
}

double remainder_R(const MomentProfile& profile, int n, int k_n, double x) {
  return kappa_terms(profile, n, k_n).remainder(x);
}

int choose_k(int n, double beta) {
  if (n < 2) throw std::invalid_argument("choose_k: n must be >= 2");
  return static_cast<int>(std::floor(std::pow(static_cast<double>(n), beta)));
}

std::pair<double, double> validate_beta(double lambda, double eta, int theorem_id) {
  double lo = 0.0;
  if (theorem_id == 1) {
    lo = std::max(2.0 / lambda, 3.0 / eta);
  } else if (theorem_id == 2) {
    lo = std::max(4.0 / lambda, 4.0 / eta);
  } else {
    throw std::invalid_argument("validate_beta: theorem_id must be 1 or 2");
  }
  const double hi = 0.25;
  if (!(lo < hi)) {
    std::ostringstream os;
    os << "beta window (" << lo << ", " << hi << ") is empty for lambda=" << lambda
       << ", eta=" << eta << " (theorem " << theorem_id << ")";
    throw HypothesisError(os.str());
  }
  return {lo, hi};
}

std::pair<double, double> validate_beta(double lambda, double eta, int theorem_id, double beta) {
  const auto window = validate_beta(lambda, eta, theorem_id);
  if (!(beta > window.first && beta < window.second)) {
    std::ostringstream os;
    os << "beta=" << beta << " outside (" << window.first << ", " << window.second << ")";
    throw HypothesisError(os.str());
  }
  return window;
}

}  // namespace brw

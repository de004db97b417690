#include "brw/popsim.hpp"

#include "brw/core.hpp"
#include "brw/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace brw {

// ---- IntervalSet ---------------------------------------------------------

IntervalSet::IntervalSet(std::vector<std::pair<double, double>> intervals)
    : intervals_(std::move(intervals)) {
  for (const auto& [a, b] : intervals_) {
    if (std::isnan(a) || std::isnan(b) || a > b)
      throw ConfigError("interval set: each interval needs a <= b");
  }
  std::sort(intervals_.begin(), intervals_.end());
  for (std::size_t i = 1; i < intervals_.size(); ++i) {
    if (intervals_[i].first <= intervals_[i - 1].second)
      throw ConfigError("interval set: intervals must be pairwise disjoint");
  }
}

bool IntervalSet::contains(double x) const {
  for (const auto& [a, b] : intervals_)
    if (x >= a && x <= b) return true;
  return false;
}

IntervalSet IntervalSet::shifted(double by) const {
  IntervalSet out;
  out.intervals_.reserve(intervals_.size());
  for (const auto& [a, b] : intervals_) out.intervals_.emplace_back(a + by, b + by);
  return out;
}

std::string IntervalSet::serialize() const {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (i) out += ';';
    std::snprintf(buf, sizeof buf, "%.17g:%.17g", intervals_[i].first, intervals_[i].second);
    out += buf;
  }
  return out;
}

IntervalSet IntervalSet::parse(const std::string& text) {
  std::vector<std::pair<double, double>> iv;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("interval set: expected 'a:b', got '" + item + "'");
    try {
      iv.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::logic_error&) {
      throw ConfigError("interval set: bad number in '" + item + "'");
    }
  }
  return IntervalSet(std::move(iv));
}

// ---- simulation ----------------------------------------------------------

AdvanceResult advance(const Generation& gen, const OffspringSampler& offspring,
                      const DisplacementSampler& displacement, Rng& rng, const CapPolicy& cap) {
  AdvanceResult out;
  out.next.index = gen.index + 1;
  const bool track = gen.ancestor_at_k.has_value();
  std::vector<double>& pos = out.next.positions;
  std::vector<std::int32_t> anc;
  pos.reserve(std::min<std::size_t>(cap.max_particles, 2 * gen.size() + 16));
  if (track) anc.reserve(pos.capacity());

  for (std::size_t u = 0; u < gen.size(); ++u) {
    const int children = offspring(rng);
    if (pos.size() + static_cast<std::size_t>(children) > cap.max_particles) {
      out.cap_hit = true;
      out.next.positions.clear();
      return out;
    }
    const double su = gen.positions[u];
    for (int i = 0; i < children; ++i) pos.push_back(su + displacement(rng));
    if (track) anc.insert(anc.end(), static_cast<std::size_t>(children), (*gen.ancestor_at_k)[u]);
  }
  if (track) out.next.ancestor_at_k = std::move(anc);
  return out;
}

AdvanceResult advance(const Generation& gen, const EnvironmentState& state, Rng& rng,
                      const CapPolicy& cap) {
  return advance(gen, OffspringSampler(state.offspring), DisplacementSampler(state.displacement),
                 rng, cap);
}

Trajectory simulate(const EnvironmentSpec& spec, const EnvironmentRealization& realization, int n,
                    std::uint64_t seed, const SimulateOptions& options) {
  if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
  if (realization.size() < n) throw std::invalid_argument("simulate: environment path shorter than n");
  if (options.track_ancestry_at && (*options.track_ancestry_at < 0 || *options.track_ancestry_at > n))
    throw std::invalid_argument("simulate: ancestry generation outside [0, n]");

  std::vector<OffspringSampler> offspring;
  std::vector<DisplacementSampler> displacement;
  for (const auto& s : spec.states) {
    offspring.emplace_back(s.offspring);
    displacement.emplace_back(s.displacement);
  }

  Trajectory traj;
  traj.realization = realization;
  traj.profile = cumulative_profile(realization, n);
  traj.ancestry_k = options.track_ancestry_at;
  traj.generations.reserve(static_cast<std::size_t>(n) + 1);

  Generation root;
  root.positions = {0.0};
  if (options.track_ancestry_at == 0) root.ancestor_at_k = std::vector<std::int32_t>{0};
  traj.generations.push_back(std::move(root));
  traj.counts.push_back(1);

  Rng rng(seed);
  for (int g = 0; g < n; ++g) {
    const auto state = static_cast<std::size_t>(realization.state_indices[static_cast<std::size_t>(g)]);
    AdvanceResult step = advance(traj.generations.back(), offspring[state], displacement[state], rng,
                                 options.cap);
    if (step.cap_hit) {
      traj.cap_hit = true;
      break;
    }
    Generation& next = step.next;
    if (options.track_ancestry_at == g + 1) {
      std::vector<std::int32_t> ids(next.size());
      for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::int32_t>(i);
      next.ancestor_at_k = std::move(ids);
    }
    traj.counts.push_back(static_cast<std::int64_t>(next.size()));
    if (next.size() == 0 && !traj.extinct_at) traj.extinct_at = g + 1;
    traj.generations.push_back(std::move(next));
  }
  return traj;
}

Trajectory simulate(const EnvironmentSpec& spec, int n, std::uint64_t seed,
                    const SimulateOptions& options) {
  const EnvironmentRealization env = sample_environment(spec, n, derive_seed(seed, 0));
  return simulate(spec, env, n, derive_seed(seed, 1), options);
}

std::int64_t count_in(const Generation& gen, const IntervalSet& set) {
  std::int64_t c = 0;
  for (const auto& [a, b] : set.intervals())
    c += (gen.view() >= a && gen.view() <= b).count();
  return c;
}

double normalized_cdf_count(const Trajectory& traj, int n, double t) {
  if (n < 0 || n > traj.last()) throw std::out_of_range("normalized_cdf_count: generation not simulated");
  const double s = traj.profile.s[n];
  if (!(s > 0.0)) throw DegenerateError("zero variance window");
  const double x = traj.profile.ell[n] + s * t;
  const Generation& gen = traj.generations[static_cast<std::size_t>(n)];
  const std::int64_t z = (gen.view() <= x).count();
  if (z == 0) return 0.0;
  return static_cast<double>(z) * traj.profile.inv_Pi(n);
}

DecompositionCheck decomposition_check(const Trajectory& traj, int n, const IntervalSet& set) {
  if (!traj.ancestry_k) throw std::invalid_argument("decomposition_check: ancestry missing");
  const int k = *traj.ancestry_k;
  if (k >= n || n > traj.last())
    throw std::invalid_argument("decomposition_check: need ancestry generation k < n");
  const Generation& gk = traj.generations[static_cast<std::size_t>(k)];
  const Generation& gn = traj.generations[static_cast<std::size_t>(n)];

  DecompositionCheck out;
  out.lhs = count_in(gn, set);

  // Bucket generation-n particles by ancestor, then count each subtree in B - S_u
  // using positions relative to the ancestor.
  std::vector<std::vector<double>> relative(gk.size());
  const auto& anc = *gn.ancestor_at_k;
  for (std::size_t i = 0; i < gn.size(); ++i) {
    const auto u = static_cast<std::size_t>(anc[i]);
    relative[u].push_back(gn.positions[i] - gk.positions[u]);
  }
  for (std::size_t u = 0; u < gk.size(); ++u) {
    const IntervalSet local = set.shifted(-gk.positions[u]);
    for (double r : relative[u])
      if (local.contains(r)) ++out.rhs;
  }
  return out;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "generation,particle_index,position,ancestor_at_k\n";
  char buf[96];
  for (const Generation& g : traj.generations) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.ancestor_at_k) {
        std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,%d\n", g.index, i, g.positions[i],
                      (*g.ancestor_at_k)[i]);
      } else {
        std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,\n", g.index, i, g.positions[i]);
      }
      out += buf;
    }
  }
  return out;
}

}  // namespace brw

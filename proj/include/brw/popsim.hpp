#pragma once

// Generation-by-generation simulation of the branching random walk.

#include "brw/env.hpp"
#include "brw/interval_set.hpp"
#include "brw/rng.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace brw {

/// Particles of one generation stored as a flat position array. The tree is
/// never materialised; `ancestor_at_k` (when tracked) maps each particle to the
/// index of its generation-k ancestor.
struct Generation {
  int index = 0;
  std::vector<double> positions;
  std::optional<std::vector<std::int32_t>> ancestor_at_k;

  std::size_t size() const { return positions.size(); }
  Eigen::Map<const Array> view() const {
    return {positions.data(), static_cast<Eigen::Index>(positions.size())};
  }
};

struct CapPolicy {
  std::size_t max_particles = 10'000'000;
};

struct AdvanceResult {
  Generation next;
  bool cap_hit = false;
};

class OffspringSampler;
class DisplacementSampler;

/// One generation step under a single environment state. Draw order: for each
/// particle in index order, its offspring count and then its children's
/// displacements.
AdvanceResult advance(const Generation& gen, const EnvironmentState& state, Rng& rng,
                      const CapPolicy& cap = {});
AdvanceResult advance(const Generation& gen, const OffspringSampler& offspring,
                      const DisplacementSampler& displacement, Rng& rng, const CapPolicy& cap);

struct Trajectory {
  EnvironmentRealization realization;
  std::vector<Generation> generations;  ///< 0..n, fewer when capped
  MomentProfile profile;
  std::vector<std::int64_t> counts;
  std::optional<int> extinct_at;
  bool cap_hit = false;
  std::optional<int> ancestry_k;

  /// Last generation actually simulated.
  int last() const { return static_cast<int>(generations.size()) - 1; }
};

struct SimulateOptions {
  CapPolicy cap;
  std::optional<int> track_ancestry_at;
};

/// Simulates n generations under a given environment path. The branching
/// randomness is drawn from one stream seeded by `seed`.
Trajectory simulate(const EnvironmentSpec& spec, const EnvironmentRealization& realization, int n,
                    std::uint64_t seed, const SimulateOptions& options = {});

/// Samples the environment path and then simulates. The environment and the
/// branching use separate streams derived from `seed`.
Trajectory simulate(const EnvironmentSpec& spec, int n, std::uint64_t seed,
                    const SimulateOptions& options = {});

std::int64_t count_in(const Generation& gen, const IntervalSet& set);

/// Z_n((-inf, ell_n + s_n t]) / Pi_n.
double normalized_cdf_count(const Trajectory& traj, int n, double t);

struct DecompositionCheck {
  std::int64_t lhs = 0;
  std::int64_t rhs = 0;
};

/// Z_n(B) counted directly against the sum over generation-k particles u of
/// Z_{n-k}(u, B - S_u), grouping generation-n particles by their ancestor.
DecompositionCheck decomposition_check(const Trajectory& traj, int n, const IntervalSet& set);

/// CSV dump with columns generation,particle_index,position,ancestor_at_k.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace brw

#pragma once

// The natural martingale W_n and the position-centred martingales N_{1,n},
// N_{2,n} along a trajectory.

#include "brw/popsim.hpp"

#include <array>
#include <string>

namespace brw {

struct MartingaleTrack {
  Array W;   ///< W_0..W_n
  Array N1;  ///< N_{1,0}..N_{1,n}
  Array N2;  ///< N_{2,0}..N_{2,n}
  Array I1;  ///< N_{1,k+1} - N_{1,k}, length n
  Array I2;  ///< N_{2,k+1} - N_{2,k}, length n

  int last() const { return static_cast<int>(W.size()) - 1; }
};

/// End-of-path proxies for the a.s. limits W, V_1, V_2.
struct LimitEstimates {
  double W_hat = 0.0;
  double V1_hat = 0.0;
  double V2_hat = 0.0;
  int at_generation = 0;
};

/// Martingale values of one generation. Zero population gives (0, 0, 0).
struct MartingaleValues {
  double W = 0.0;
  double N1 = 0.0;
  double N2 = 0.0;
};

MartingaleValues martingale_values(const Generation& gen, const MomentProfile& profile, int k);

MartingaleTrack track(const Trajectory& traj);

LimitEstimates estimate_limits(const MartingaleTrack& track, int n);

/// Columns n,W,N1,N2,I1,I2 (increments empty on the last row).
std::string track_csv(const MartingaleTrack& track);

/// One-step regrowth of a frozen generation-n population.
struct ConditionalTestReport {
  int n = 0;
  int replicates = 0;
  std::array<double, 3> frozen{};  ///< W_n, N_{1,n}, N_{2,n}
  std::array<double, 3> mean{};    ///< sample means of the generation-(n+1) values
  std::array<double, 3> se{};
  std::array<double, 3> z{};

  bool pass(double threshold = 3.0) const;
};

/// Regrows generation n+1 from `frozen` R times under `state` and compares the
/// sample means of W_{n+1}, N_{1,n+1}, N_{2,n+1} with the frozen values.
/// `profile` must cover generation n.
ConditionalTestReport conditional_martingale_test(const Generation& frozen,
                                                  const MomentProfile& profile, int n,
                                                  const EnvironmentState& state, int replicates,
                                                  Rng& rng);

}  // namespace brw

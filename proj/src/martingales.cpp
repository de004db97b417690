#include "brw/martingales.hpp"

#include "brw/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace brw {

MartingaleValues martingale_values(const Generation& gen, const MomentProfile& profile, int k) {
  if (gen.size() == 0) return {};
  const double inv = profile.inv_Pi(k);
  const Array centred = gen.view() - profile.ell[k];
  MartingaleValues v;
  v.W = static_cast<double>(gen.size()) * inv;
  v.N1 = centred.sum() * inv;
  v.N2 = profile.s2(k) * v.W - centred.square().sum() * inv;
  return v;
}

MartingaleTrack track(const Trajectory& traj) {
  const int n = traj.last();
  MartingaleTrack t;
  t.W.resize(n + 1);
  t.N1.resize(n + 1);
  t.N2.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    const MartingaleValues v = martingale_values(traj.generations[static_cast<std::size_t>(k)], traj.profile, k);
    t.W[k] = v.W;
    t.N1[k] = v.N1;
    t.N2[k] = v.N2;
  }
  t.I1 = t.N1.tail(n) - t.N1.head(n);
  t.I2 = t.N2.tail(n) - t.N2.head(n);
  return t;
}

LimitEstimates estimate_limits(const MartingaleTrack& track, int n) {
  if (n < 0 || n > track.last()) throw std::out_of_range("estimate_limits: generation outside track");
  return {track.W[n], track.N1[n], track.N2[n], n};
}

std::string track_csv(const MartingaleTrack& track) {
  std::string out = "n,W,N1,N2,I1,I2\n";
  char buf[160];
  for (int k = 0; k <= track.last(); ++k) {
    if (k < track.last()) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", k, track.W[k], track.N1[k],
                    track.N2[k], track.I1[k], track.I2[k]);
    } else {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,,\n", k, track.W[k], track.N1[k], track.N2[k]);
    }
    out += buf;
  }
  return out;
}

bool ConditionalTestReport::pass(double threshold) const {
  for (double v : z)
    if (!(std::abs(v) < threshold)) return false;
  return true;
}

ConditionalTestReport conditional_martingale_test(const Generation& frozen,
                                                  const MomentProfile& profile, int n,
                                                  const EnvironmentState& state, int replicates,
                                                  Rng& rng) {
  if (replicates < 2) throw std::invalid_argument("conditional_martingale_test: need at least 2 replicates");
  if (n < 0 || n > profile.n) throw std::out_of_range("conditional_martingale_test: profile does not cover n");

  const StepMoments sm = step_moments(state);
  const double inv_next = profile.inv_Pi(n) / sm.m;
  const double ell_next = profile.ell[n] + sm.l;
  const double s2_next = profile.s2(n) + sm.sigma(2);

  const MartingaleValues v0 = martingale_values(frozen, profile, n);
  ConditionalTestReport rep;
  rep.n = n;
  rep.replicates = replicates;
  rep.frozen = {v0.W, v0.N1, v0.N2};

  const OffspringSampler offspring(state.offspring);
  const DisplacementSampler displacement(state.displacement);

  // Welford accumulators for the three statistics.
  std::array<double, 3> mean{}, m2{};
  for (int r = 0; r < replicates; ++r) {
    double count = 0.0, sx = 0.0, sxx = 0.0;
    for (double su : frozen.positions) {
      const int children = offspring(rng);
      const double base = su - ell_next;
      for (int i = 0; i < children; ++i) {
        const double x = base + displacement(rng);
        sx += x;
        sxx += x * x;
      }
      count += children;
    }
    std::array<double, 3> v{};
    if (count > 0.0) {
      v[0] = count * inv_next;
      v[1] = sx * inv_next;
      v[2] = s2_next * v[0] - sxx * inv_next;
    }
    for (int j = 0; j < 3; ++j) {
      const double d = v[j] - mean[j];
      mean[j] += d / (r + 1);
      m2[j] += d * (v[j] - mean[j]);
    }
  }
  for (int j = 0; j < 3; ++j) {
    rep.mean[j] = mean[j];
    rep.se[j] = std::sqrt(m2[j] / (replicates - 1) / replicates);
    const double diff = mean[j] - rep.frozen[j];
    if (rep.se[j] > 0.0) {
      rep.z[j] = diff / rep.se[j];
    } else {
      const double scale = std::max(1.0, std::abs(rep.frozen[j]));
      rep.z[j] = std::abs(diff) <= 1e-12 * scale ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
  }
  return rep;
}

}  // namespace brw

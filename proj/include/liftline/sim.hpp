#pragma once

#include <cstdint>
#include <vector>

#include "liftline/model.hpp"

namespace liftline {

struct SimConfig {
  long horizon = 100000;  ///< cabin cycles per replication
  long warmup = -1;       ///< cycles discarded; -1 selects 10% of horizon
  int replications = 1;
  std::uint64_t seed = 1;
  int threads = 0;  ///< 0 = hardware concurrency
  /// Shuffle each station's outgoing cabin occupancies over the horizon.
  /// Keeps the exact occupancy marginal but breaks the serial correlation
  /// the closed-form chain ignores, making the simulator an oracle for the
  /// independent-capacity model. Off by default: the faithful line keeps the
  /// correlation, which raises downstream waits above the closed form.
  bool decorrelate_rides = false;
};

struct StationEstimate {
  double w_mean = 0.0, w_mean_hw = 0.0;
  double w_var = 0.0, w_var_hw = 0.0;
  double board_mean = 0.0, board_mean_hw = 0.0;  ///< passengers per cabin
  double cap_mean = 0.0, cap_var = 0.0;
  std::vector<double> queue_hist;  ///< arrival-seen queue length counts
  long long n_waits = 0;
  long long n_censored = 0;  ///< still queued at horizon end
  bool overload = false;     ///< queue grew past the storage guard
};

struct SimEstimate {
  std::vector<StationEstimate> stations;
  SimConfig config;
};

/// Event-driven run of the full line: cabins every beta seconds, per-station
/// deboarding, cap policy, gate closing at cabin arrival. Identical seed and
/// configuration reproduce the estimate bit for bit.
SimEstimate simulate(const Scenario& scenario, const SimConfig& config);

enum class Verdict { stable, unstable, inconclusive };

struct ProbeResult {
  double lambda = 0.0;
  std::vector<Verdict> verdicts;  ///< per station
  std::vector<double> slopes;     ///< queue growth [passengers/s]
};

/// Stability verdict per (rate, station) from the slope of queue length over
/// time; works for any supported arrival process.
std::vector<ProbeResult> stability_probe(const Scenario& scenario,
                                         const std::vector<double>& lambda_grid,
                                         ArrivalKind kind, long horizon,
                                         std::uint64_t seed);

}  // namespace liftline

#pragma once

#include "liftline/pmf.hpp"

namespace liftline {

/// Per-station distributions of one cabin cycle.
struct StationFlow {
  Pmf stay = Pmf::delta(0);      ///< riders keeping their seat
  Pmf capacity = Pmf::delta(0);  ///< seats offered to the queue
  Pmf board = Pmf::delta(0);     ///< passengers actually boarding
  Pmf ride = Pmf::delta(0);      ///< occupants leaving for the next station
  bool stable = true;
};

/// Capacity under the cap policy min(eta, gamma - stay).
Pmf capacity_dist(const Pmf& stay, int eta, int gamma);

/// Distribution of min(Z, C) for independent queue state Z and capacity C.
Pmf board_dist(const Pmf& z, const Pmf& capacity);

/// Occupants riding onward from a stable station: board + stay, with the
/// dependence between capacity and stay resolved through the cap policy.
/// `z` is the stationary queue-at-cabin-arrival pmf.
Pmf ride_dist_stable(const Pmf& z, const Pmf& stay, int eta, int gamma);

/// Occupants riding onward from a saturated station (the queue never runs
/// dry, so every offered seat is taken).
Pmf ride_dist_unstable(const Pmf& stay, int eta, int gamma);

Pmf ride_dist(const Pmf& z, const Pmf& stay, int eta, int gamma, bool stable);

}  // namespace liftline

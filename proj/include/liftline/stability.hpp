#pragma once

#include <vector>

#include "liftline/model.hpp"
#include "liftline/pmf.hpp"

namespace liftline {

struct StationStability {
  double lambda_m = 0.0;           ///< station arrival rate [1/s]
  double expected_capacity = 0.0;  ///< E[C_m], seats
  double capacity_variance = 0.0;
  double expected_board = 0.0;     ///< E[T_m], passengers per cabin
  double load_factor = 0.0;        ///< lambda_m * beta / E[C_m]
  double scaled_threshold = 0.0;   ///< E[C_m] / (nu_m * beta); inf if nu_m = 0
  bool stable = true;
};

struct StabilityReport {
  double lambda = 0.0;
  std::vector<StationStability> stations;
};

/// Station-by-station expectations at a fixed total arrival rate, driven by
/// the full distributional chain (stay, capacity, ride). Saturated stations
/// board exactly their capacity and forward full-cabin-law rides.
StabilityReport chain_expectations(const LineConfig& line, double lambda);

/// Closed-form scaled stability threshold of station m (0-based), valid when
/// the station applies no access control and is the scaled minimum of the
/// line. Returns +inf when no flow reaches the station's denominator.
double scaled_threshold_closed(const LineConfig& line, int station);

/// Numerical scaled thresholds for every station: the largest total rate at
/// which the station's flow-conservation balance still holds, with upstream
/// boardings capped by their access limits. Coincides with the closed form
/// whenever that form applies. +inf for stations with no arrivals.
std::vector<double> thresholds_bisect(const LineConfig& line);

}  // namespace liftline

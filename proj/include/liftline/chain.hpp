#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "liftline/batchq.hpp"
#include "liftline/coupling.hpp"
#include "liftline/model.hpp"
#include "liftline/stability.hpp"

namespace liftline {

class ChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StationSolution {
  StationFlow flow;
  StationStability stability;
  /// Absent when the station is saturated; the waiting time is undefined
  /// above the stability threshold.
  std::optional<QueueSolution> queue;
};

struct LineSolution {
  double lambda = 0.0;
  std::vector<StationSolution> stations;
};

/// Solves every station in line order: deboarding, capacity, stationary
/// queue, boarding, onward ride, waiting time. Analytics require Poisson
/// arrivals.
LineSolution solve_line(const Scenario& scenario);

enum class SweepAxis { lambda, eta };

struct SweepRow {
  double axis_value = 0.0;
  bool ok = true;
  std::string error;
  std::vector<double> thresholds;  ///< bisection scaled thresholds
  std::vector<StationStability> stations;
  std::vector<double> w_mean;  ///< NaN where undefined
  std::vector<double> w_var;
};

/// One row per grid point; per-point failures are recorded in the row and
/// the sweep continues. `station` selects the swept station for the eta
/// axis (0-based; ignored for lambda).
std::vector<SweepRow> sweep(const Scenario& scenario, SweepAxis axis,
                            int station, const std::vector<double>& grid);

/// Relative waiting-time gain h_m(i) at station m when the cap of station 1
/// is i, against the uncontrolled baseline i = gamma.
std::vector<double> relative_gain(const Scenario& scenario, int station,
                                  const std::vector<int>& eta1_values,
                                  double lambda);

/// Honors LIFTLINE_THREADS; defaults to hardware concurrency.
int sweep_parallelism();

}  // namespace liftline

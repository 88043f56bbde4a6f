#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "liftline/pmf.hpp"

namespace liftline {

class BatchqError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Roots of z^eta = A*(z) sum_j c(j) z^(eta-j) inside the closed unit disk,
/// for Poisson arrivals A*(z) = exp((z-1) load). roots[0] is the analytic
/// unit root; the remaining eta-1 lie strictly inside the disk.
struct RootSet {
  std::vector<std::complex<double>> roots;
  int eta() const { return static_cast<int>(roots.size()); }
  /// Non-unit roots, strictly inside the disk.
  std::vector<std::complex<double>> interior() const {
    return {roots.begin() + 1, roots.end()};
  }
};

/// `load` is the dimensionless offered load lambda_m * beta.
RootSet find_roots(double load, const Pmf& capacity);

/// Stationary queue at cabin arrivals, by generating-function inversion of
/// the spectral closed form on the unit circle. k_max < 0 selects the
/// smallest truncation with geometric tail below 1e-12.
Pmf z_stationary(double load, const Pmf& capacity, const RootSet& roots,
                 int k_max = -1);

/// Independent brute-force oracle: direct sparse solve of the stationary
/// equations of the imbedded chain Z' = max(Z - C, 0) + Poisson(load),
/// truncated to {0..k_max}.
Pmf z_oracle(double load, const Pmf& capacity, int k_max);

/// Passengers left behind after a departure: max(Z - C, 0), Z independent
/// of C.
Pmf left_behind(const Pmf& z, const Pmf& capacity);

/// Queue seen by a Poisson arrival: left-behind plus the arrivals that beat
/// it within the current headway.
Pmf queue_time_stationary(const Pmf& z, const Pmf& capacity, double lambda,
                          double beta);

struct WaitingTime {
  double mean = 0.0;
  double variance = 0.0;
  double grid_step = 0.0;
  std::vector<double> cdf;  ///< P[W <= i * grid_step]
};

/// Tagged-customer waiting time: residual headway plus one headway per extra
/// cabin needed to clear the queue ahead.
WaitingTime waiting_time(const Pmf& z, const Pmf& capacity, double lambda,
                         double beta);

struct QueueSolution {
  Pmf z = Pmf::delta(0);     ///< queue at cabin arrivals
  Pmf left = Pmf::delta(0);  ///< queue right after a departure
  Pmf q = Pmf::delta(0);     ///< queue seen by an arriving passenger
  WaitingTime wait;
};

/// Full single-station solve; requires lambda * beta < E[capacity].
QueueSolution solve_station(double lambda, double beta, const Pmf& capacity);

/// Smallest real x > 1 with exp((x-1) load) * C*(1/x) = 1; governs the
/// geometric tail of the stationary queue.
double tail_decay_root(double load, const Pmf& capacity);

/// Truncation point with estimated tail mass below `tol`.
int default_k_max(double load, const Pmf& capacity, double tol = 1e-12);

}  // namespace liftline

#include "liftline/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "liftline/batchq.hpp"
#include "liftline/coupling.hpp"

namespace liftline {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative headroom below which a stable station is numerically saturated;
// its ride law is then taken as the full-queue limit.
constexpr double kSaturationEps = 1e-7;
}  // namespace

StabilityReport chain_expectations(const LineConfig& line, double lambda) {
  if (!(lambda >= 0.0))
    throw std::invalid_argument("chain_expectations: negative arrival rate");
  StabilityReport report;
  report.lambda = lambda;
  Pmf ride = line.r0;
  double ride_mean = ride.mean();
  for (const auto& st : line.stations) {
    double keep = 1.0 - st.sigma;
    Pmf stay = ride.thin(keep);
    double stay_mean = keep * ride_mean;
    Pmf cap = capacity_dist(stay, st.eta, line.gamma);
    // no cap binding: E[C] = gamma - E[S] exactly, via the exact mean chain
    double ec = (st.eta == line.gamma) ? line.gamma - stay_mean : cap.mean();
    double lam_m = st.nu * lambda;
    double load = lam_m * line.beta;
    StationStability row;
    row.lambda_m = lam_m;
    row.expected_capacity = ec;
    row.capacity_variance = cap.variance();
    row.stable = load < ec;
    row.expected_board = std::min(load, ec);
    row.load_factor = ec > 0.0 ? load / ec : (load > 0.0 ? kInf : 0.0);
    row.scaled_threshold = st.nu > 0.0 ? ec / (st.nu * line.beta) : kInf;
    if (row.stable && (load <= 0.0 || (ec - load) > kSaturationEps * ec)) {
      Pmf z = Pmf::delta(0);
      if (load >= 1e-9) {
        RootSet roots = find_roots(load, cap);
        z = z_stationary(load, cap, roots);
      }
      ride = ride_dist_stable(z, stay, st.eta, line.gamma);
      ride_mean = row.expected_board + stay_mean;
    } else if (row.stable) {
      // numerically saturated: queue law indistinguishable from the
      // full-queue limit at this headroom
      ride = ride_dist_unstable(stay, st.eta, line.gamma);
      ride_mean = row.expected_board + stay_mean;
    } else {
      ride = ride_dist_unstable(stay, st.eta, line.gamma);
      ride_mean = ride.mean();
    }
    report.stations.push_back(row);
  }
  return report;
}

double scaled_threshold_closed(const LineConfig& line, int station) {
  if (station < 0 || station >= static_cast<int>(line.stations.size()))
    throw std::invalid_argument("scaled_threshold_closed: station out of range");
  bool any_nu = false;
  for (int j = 0; j <= station; ++j)
    if (line.stations[static_cast<size_t>(j)].nu > 0.0) any_nu = true;
  if (!any_nu)
    throw std::invalid_argument(
        "scaled_threshold_closed: no arrivals feed the station");
  double keep_prod = 1.0;  // prod_{i=1..m} (1 - sigma_i)
  for (int i = 0; i <= station; ++i)
    keep_prod *= 1.0 - line.stations[static_cast<size_t>(i)].sigma;
  double numerator = line.gamma - line.r0.mean() * keep_prod;
  double denominator = 0.0;
  for (int j = 0; j <= station; ++j) {
    double prod = 1.0;  // prod_{i=j+1..m} (1 - sigma_i)
    for (int i = j + 1; i <= station; ++i)
      prod *= 1.0 - line.stations[static_cast<size_t>(i)].sigma;
    denominator += line.stations[static_cast<size_t>(j)].nu * line.beta * prod;
  }
  if (denominator <= 0.0) return kInf;
  return std::max(0.0, numerator) / denominator;
}

namespace {
// Stability indicator of station m under line-wide flow conservation:
// every upstream station forwards its full arrival flow, hard-capped only
// by its access limit. This is the balance that defines the threshold
// curves; actual saturation dynamics are handled by chain_expectations.
bool flow_balance_stable(const LineConfig& line, int m, double lambda) {
  double ride_mean = line.r0.mean();
  for (int j = 0; j <= m; ++j) {
    const auto& st = line.stations[static_cast<size_t>(j)];
    double stay_mean = (1.0 - st.sigma) * ride_mean;
    double ec = std::min<double>(st.eta, line.gamma - stay_mean);
    double load = st.nu * lambda * line.beta;
    if (j == m) return load < ec;
    ride_mean = std::min(load, static_cast<double>(st.eta)) + stay_mean;
  }
  return true;
}
}  // namespace

std::vector<double> thresholds_bisect(const LineConfig& line) {
  std::vector<double> out;
  out.reserve(line.stations.size());
  for (int m = 0; m < static_cast<int>(line.stations.size()); ++m) {
    const auto& st = line.stations[static_cast<size_t>(m)];
    if (st.nu <= 0.0) {
      out.push_back(kInf);
      continue;
    }
    double lo = 0.0;
    double hi = line.gamma / (st.nu * line.beta) + 1.0;
    if (!flow_balance_stable(line, m, lo)) {
      out.push_back(0.0);
      continue;
    }
    for (int it = 0; it < 64; ++it) {
      double mid = 0.5 * (lo + hi);
      (flow_balance_stable(line, m, mid) ? lo : hi) = mid;
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

}  // namespace liftline

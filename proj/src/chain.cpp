#include "liftline/chain.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace liftline {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSaturationEps = 1e-7;
}  // namespace

LineSolution solve_line(const Scenario& scenario) {
  if (scenario.arrival.kind != ArrivalKind::poisson)
    throw ChainError("solve_line: analytics require Poisson arrivals");
  const LineConfig& line = scenario.line;
  auto violations = validate(line);
  if (!violations.empty())
    throw ChainError("solve_line: invalid line configuration (" +
                     violations.front().field + ")");
  LineSolution sol;
  sol.lambda = scenario.lambda;
  Pmf ride = line.r0;
  double ride_mean = ride.mean();
  for (size_t m = 0; m < line.stations.size(); ++m) {
    const auto& st = line.stations[m];
    StationSolution out;
    try {
      double keep = 1.0 - st.sigma;
      Pmf stay = ride.thin(keep);
      double stay_mean = keep * ride_mean;
      Pmf cap = capacity_dist(stay, st.eta, line.gamma);
      double ec = (st.eta == line.gamma) ? line.gamma - stay_mean : cap.mean();
      double lam_m = st.nu * scenario.lambda;
      double load = lam_m * line.beta;
      out.stability.lambda_m = lam_m;
      out.stability.expected_capacity = ec;
      out.stability.capacity_variance = cap.variance();
      out.stability.stable = load < ec;
      out.stability.expected_board = std::min(load, ec);
      out.stability.load_factor =
          ec > 0.0 ? load / ec : (load > 0.0 ? kInf : 0.0);
      out.stability.scaled_threshold =
          st.nu > 0.0 ? ec / (st.nu * line.beta) : kInf;
      out.flow.stay = stay;
      out.flow.capacity = cap;
      out.flow.stable = out.stability.stable;
      bool solvable =
          out.stability.stable &&
          (load <= 0.0 || (ec - load) > kSaturationEps * ec);
      if (solvable) {
        QueueSolution q;
        if (load < 1e-9) {
          q.z = Pmf::delta(0);
          q.left = left_behind(q.z, cap);
          q.q = queue_time_stationary(q.z, cap, lam_m, line.beta);
          q.wait = waiting_time(q.z, cap, lam_m, line.beta);
        } else {
          q = solve_station(lam_m, line.beta, cap);
        }
        out.flow.board = board_dist(q.z, cap);
        out.flow.ride = ride_dist_stable(q.z, stay, st.eta, line.gamma);
        ride = out.flow.ride;
        ride_mean = out.stability.expected_board + stay_mean;
        out.queue = std::move(q);
      } else {
        out.flow.board = cap;  // full queue: every offered seat taken
        out.flow.ride = ride_dist_unstable(stay, st.eta, line.gamma);
        ride = out.flow.ride;
        ride_mean = out.stability.stable ? out.stability.expected_board + stay_mean
                                         : ride.mean();
      }
    } catch (const std::exception& e) {
      throw ChainError("station " + std::to_string(m + 1) + ": " + e.what());
    }
    sol.stations.push_back(std::move(out));
  }
  return sol;
}

int sweep_parallelism() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("LIFTLINE_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && cap < static_cast<long>(hw)) hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(hw);
}

std::vector<SweepRow> sweep(const Scenario& scenario, SweepAxis axis,
                            int station, const std::vector<double>& grid) {
  if (grid.empty()) throw ChainError("sweep: empty grid");
  if (scenario.line.stations.empty()) throw ChainError("sweep: empty station list");
  if (axis == SweepAxis::eta &&
      (station < 0 || station >= static_cast<int>(scenario.line.stations.size())))
    throw ChainError("sweep: station index out of range");
  std::vector<SweepRow> rows(grid.size());
  auto run_point = [&](size_t i) {
    SweepRow& row = rows[i];
    row.axis_value = grid[i];
    try {
      Scenario s = scenario;
      if (axis == SweepAxis::lambda) {
        if (!(grid[i] >= 0.0)) throw ChainError("negative arrival rate");
        s.lambda = grid[i];
      } else {
        double v = grid[i];
        int eta = static_cast<int>(std::lround(v));
        if (std::abs(v - eta) > 1e-9 || eta < 1 || eta > s.line.gamma)
          throw ChainError("eta grid value outside [1, gamma]");
        s.line.stations[static_cast<size_t>(station)].eta = eta;
      }
      row.thresholds = thresholds_bisect(s.line);
      LineSolution ls = solve_line(s);
      for (const auto& st : ls.stations) {
        row.stations.push_back(st.stability);
        row.w_mean.push_back(st.queue ? st.queue->wait.mean : kNan);
        row.w_var.push_back(st.queue ? st.queue->wait.variance : kNan);
      }
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  };
  int threads = std::min<int>(sweep_parallelism(), static_cast<int>(grid.size()));
  if (threads <= 1) {
    for (size_t i = 0; i < grid.size(); ++i) run_point(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> cursor{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (size_t i = cursor.fetch_add(1); i < grid.size();
             i = cursor.fetch_add(1))
          run_point(i);
      });
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::vector<double> relative_gain(const Scenario& scenario, int station,
                                  const std::vector<int>& eta1_values,
                                  double lambda) {
  if (station < 0 || station >= static_cast<int>(scenario.line.stations.size()))
    throw ChainError("relative_gain: station index out of range");
  auto waiting_at = [&](int eta1) {
    Scenario s = scenario;
    s.lambda = lambda;
    s.line.stations[0].eta = eta1;
    LineSolution ls = solve_line(s);
    const auto& st = ls.stations[static_cast<size_t>(station)];
    if (!st.queue)
      throw ChainError("relative_gain: station " + std::to_string(station + 1) +
                       " unstable at eta_1 = " + std::to_string(eta1));
    return st.queue->wait.mean;
  };
  double baseline = waiting_at(scenario.line.gamma);
  std::vector<double> gains;
  gains.reserve(eta1_values.size());
  for (int i : eta1_values)
    gains.push_back((baseline - waiting_at(i)) / baseline);
  return gains;
}

}  // namespace liftline

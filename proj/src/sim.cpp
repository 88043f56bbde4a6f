#include "liftline/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

namespace liftline {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr size_t kQueueStorageCap = 4000000;
constexpr int kBatches = 30;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class Purpose : std::uint64_t {
  arrivals = 1,
  deboard = 2,
  r0_draw = 3,
  shuffle = 4
};

/// One independent generator per (seed, replication, station, purpose).
std::mt19937_64 make_stream(std::uint64_t seed, int rep, int station,
                            Purpose purpose) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(rep) + 0x1000));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(station) + 0x2000));
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  return std::mt19937_64(h);
}

class ArrivalStream {
 public:
  ArrivalStream(double rate, ArrivalKind kind, double shape,
                std::mt19937_64 rng)
      : rate_(rate), kind_(kind), rng_(std::move(rng)),
        gamma_(shape, rate > 0.0 ? 1.0 / (rate * shape) : 1.0) {
    if (rate_ <= 0.0) {
      next_ = kInf;
      return;
    }
    // random initial phase keeps deterministic streams off the cabin lattice
    std::uniform_real_distribution<double> u(0.0, 1.0);
    next_ = u(rng_) * mean_gap();
  }

  double peek() const { return next_; }

  double pop() {
    double t = next_;
    next_ += gap();
    return t;
  }

 private:
  double mean_gap() const { return 1.0 / rate_; }

  double gap() {
    switch (kind_) {
      case ArrivalKind::poisson: {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        return -std::log1p(-u(rng_)) / rate_;
      }
      case ArrivalKind::deterministic:
        return mean_gap();
      case ArrivalKind::gamma_renewal:
        return gamma_(rng_);
    }
    return mean_gap();
  }

  double rate_;
  ArrivalKind kind_;
  std::mt19937_64 rng_;
  std::gamma_distribution<double> gamma_;
  double next_ = kInf;
};

struct BatchAcc {
  double sum = 0.0, sum2 = 0.0;
  long long n = 0;
};

struct RepStationStats {
  std::vector<BatchAcc> wait_batches;
  std::vector<BatchAcc> board_batches;  ///< boarders per cabin
  double cap_sum = 0.0, cap_sum2 = 0.0;
  long long cap_n = 0;
  std::vector<double> queue_hist;
  long long n_censored = 0;
  bool overload = false;
};

struct StationState {
  std::deque<double> queue;  ///< arrival times of waiting passengers
  long long extra = 0;       ///< waiting passengers beyond the storage guard
};

void run_replication(const Scenario& sc, const SimConfig& cfg, int rep,
                     std::vector<RepStationStats>& stats) {
  const LineConfig& line = sc.line;
  const int n_st = static_cast<int>(line.stations.size());
  const double beta = line.beta;
  const long warmup = cfg.warmup;
  stats.assign(static_cast<size_t>(n_st), RepStationStats{});
  for (auto& s : stats) {
    s.wait_batches.assign(kBatches, BatchAcc{});
    s.board_batches.assign(kBatches, BatchAcc{});
  }

  std::vector<ArrivalStream> arrivals;
  std::vector<std::mt19937_64> deboard;
  for (int m = 0; m < n_st; ++m) {
    arrivals.emplace_back(line.stations[static_cast<size_t>(m)].nu * sc.lambda,
                          sc.arrival.kind, sc.arrival.shape,
                          make_stream(cfg.seed, rep, m, Purpose::arrivals));
    deboard.push_back(make_stream(cfg.seed, rep, m, Purpose::deboard));
  }
  auto r0_rng = make_stream(cfg.seed, rep, -1, Purpose::r0_draw);
  std::vector<double> r0_cdf;
  {
    double acc = 0.0;
    for (double p : line.r0.probs()) r0_cdf.push_back(acc += p);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw_r0 = [&]() {
    double u = unit(r0_rng);
    for (size_t k = 0; k < r0_cdf.size(); ++k)
      if (u <= r0_cdf[k]) return static_cast<int>(k);
    return static_cast<int>(r0_cdf.size()) - 1;
  };

  const long measured = cfg.horizon - warmup;
  // station-outer passes over an occupancy array: equivalent to the cabin-by-
  // cabin loop because every random stream is private to one station
  std::vector<int> occupancy(static_cast<size_t>(cfg.horizon));
  for (long cycle = 0; cycle < cfg.horizon; ++cycle)
    occupancy[static_cast<size_t>(cycle)] = draw_r0();
  for (int m = 0; m < n_st; ++m) {
    const auto& conf = line.stations[static_cast<size_t>(m)];
    StationState state;
    auto& acc = stats[static_cast<size_t>(m)];
    for (long cycle = 1; cycle <= cfg.horizon; ++cycle) {
      const double t = static_cast<double>(cycle) * beta;
      const bool record = cycle > warmup;
      const int batch = record ? static_cast<int>(((cycle - warmup - 1) * kBatches) / measured)
                               : 0;
      int riders = occupancy[static_cast<size_t>(cycle - 1)];
      // deboarding
      int stay = 0;
      for (int r = 0; r < riders; ++r)
        if (unit(deboard[static_cast<size_t>(m)]) >= conf.sigma) ++stay;
      int cap = std::min(conf.eta, line.gamma - stay);
      // admit arrivals up to the gate closing at t
      auto& arr = arrivals[static_cast<size_t>(m)];
      while (arr.peek() <= t) {
        double a = arr.pop();
        size_t seen = state.queue.size() + static_cast<size_t>(state.extra);
        if (record) {
          if (acc.queue_hist.size() <= seen && seen < 100000)
            acc.queue_hist.resize(seen + 1, 0.0);
          if (seen < acc.queue_hist.size()) acc.queue_hist[seen] += 1.0;
        }
        if (state.queue.size() < kQueueStorageCap) {
          state.queue.push_back(a);
        } else {
          acc.overload = true;
          ++state.extra;
        }
      }
      // boarding
      long long waiting = static_cast<long long>(state.queue.size()) + state.extra;
      int board = static_cast<int>(std::min<long long>(cap, waiting));
      for (int b = 0; b < board; ++b) {
        if (!state.queue.empty()) {
          double a = state.queue.front();
          state.queue.pop_front();
          if (record) {
            double w = t - a;
            auto& wb = acc.wait_batches[static_cast<size_t>(batch)];
            wb.sum += w;
            wb.sum2 += w * w;
            ++wb.n;
          }
        } else {
          --state.extra;
        }
      }
      if (record) {
        auto& bb = acc.board_batches[static_cast<size_t>(batch)];
        bb.sum += board;
        bb.sum2 += static_cast<double>(board) * board;
        ++bb.n;
        acc.cap_sum += cap;
        acc.cap_sum2 += static_cast<double>(cap) * cap;
        ++acc.cap_n;
      }
      occupancy[static_cast<size_t>(cycle - 1)] = stay + board;
    }
    acc.n_censored = static_cast<long long>(state.queue.size()) + state.extra;
    if (cfg.decorrelate_rides && m + 1 < n_st) {
      auto rng = make_stream(cfg.seed, rep, m, Purpose::shuffle);
      std::shuffle(occupancy.begin(), occupancy.end(), rng);
    }
  }
}

double t_quantile_975(long df) {
  if (df < 1) return kInf;
  return 1.96 + 2.4 / static_cast<double>(df);
}

}  // namespace

SimEstimate simulate(const Scenario& scenario, const SimConfig& config_in) {
  SimConfig cfg = config_in;
  if (cfg.warmup < 0) cfg.warmup = cfg.horizon / 10;
  if (cfg.horizon <= cfg.warmup)
    throw std::invalid_argument("simulate: horizon must exceed warmup");
  if (cfg.replications < 1)
    throw std::invalid_argument("simulate: replications must be >= 1");
  auto violations = validate(scenario.line);
  if (!violations.empty())
    throw std::invalid_argument("simulate: invalid line configuration");

  const int n_st = static_cast<int>(scenario.line.stations.size());
  std::vector<std::vector<RepStationStats>> reps(
      static_cast<size_t>(cfg.replications));
  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, cfg.replications);
  if (threads <= 1) {
    for (int r = 0; r < cfg.replications; ++r)
      run_replication(scenario, cfg, r, reps[static_cast<size_t>(r)]);
  } else {
    std::atomic<int> cursor{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int r = cursor.fetch_add(1); r < cfg.replications;
             r = cursor.fetch_add(1))
          run_replication(scenario, cfg, r, reps[static_cast<size_t>(r)]);
      });
    for (auto& th : pool) th.join();
  }

  SimEstimate est;
  est.config = cfg;
  for (int m = 0; m < n_st; ++m) {
    StationEstimate out;
    double wsum = 0.0, wsum2 = 0.0;
    long long wn = 0;
    double bsum = 0.0;
    long long bn = 0;
    std::vector<double> wait_means, board_means, wait_vars;
    for (const auto& rep : reps) {
      const auto& s = rep[static_cast<size_t>(m)];
      for (const auto& b : s.wait_batches) {
        wsum += b.sum;
        wsum2 += b.sum2;
        wn += b.n;
        if (b.n > 0) {
          double mu = b.sum / static_cast<double>(b.n);
          wait_means.push_back(mu);
          wait_vars.push_back(std::max(0.0, b.sum2 / static_cast<double>(b.n) - mu * mu));
        }
      }
      for (const auto& b : s.board_batches) {
        bsum += b.sum;
        bn += b.n;
        if (b.n > 0) board_means.push_back(b.sum / static_cast<double>(b.n));
      }
      out.cap_mean += s.cap_sum;
      out.cap_var += s.cap_sum2;
      out.n_censored += s.n_censored;
      out.overload = out.overload || s.overload;
      if (out.queue_hist.size() < s.queue_hist.size())
        out.queue_hist.resize(s.queue_hist.size(), 0.0);
      for (size_t k = 0; k < s.queue_hist.size(); ++k)
        out.queue_hist[k] += s.queue_hist[k];
    }
    long long cap_n = 0;
    for (const auto& rep : reps) cap_n += rep[static_cast<size_t>(m)].cap_n;
    if (cap_n > 0) {
      double cm = out.cap_mean / static_cast<double>(cap_n);
      out.cap_var = std::max(0.0, out.cap_var / static_cast<double>(cap_n) - cm * cm);
      out.cap_mean = cm;
    }
    out.n_waits = wn;
    if (wn > 0) {
      out.w_mean = wsum / static_cast<double>(wn);
      out.w_var = std::max(0.0, wsum2 / static_cast<double>(wn) - out.w_mean * out.w_mean);
    }
    auto halfwidth = [](const std::vector<double>& xs) {
      if (xs.size() < 2) return 0.0;
      double mu = 0.0;
      for (double x : xs) mu += x;
      mu /= static_cast<double>(xs.size());
      double v = 0.0;
      for (double x : xs) v += (x - mu) * (x - mu);
      v /= static_cast<double>(xs.size() - 1);
      return t_quantile_975(static_cast<long>(xs.size()) - 1) *
             std::sqrt(v / static_cast<double>(xs.size()));
    };
    out.w_mean_hw = halfwidth(wait_means);
    out.w_var_hw = halfwidth(wait_vars);
    out.board_mean = bn > 0 ? bsum / static_cast<double>(bn) : 0.0;
    out.board_mean_hw = halfwidth(board_means);
    est.stations.push_back(std::move(out));
  }
  return est;
}

std::vector<ProbeResult> stability_probe(const Scenario& scenario,
                                         const std::vector<double>& lambda_grid,
                                         ArrivalKind kind, long horizon,
                                         std::uint64_t seed) {
  std::vector<ProbeResult> results;
  const int n_st = static_cast<int>(scenario.line.stations.size());
  for (size_t gi = 0; gi < lambda_grid.size(); ++gi) {
    Scenario sc = scenario;
    sc.lambda = lambda_grid[gi];
    sc.arrival.kind = kind;
    const LineConfig& line = sc.line;
    long warmup = horizon / 10;
    std::vector<ArrivalStream> arrivals;
    std::vector<std::mt19937_64> deboard;
    for (int m = 0; m < n_st; ++m) {
      arrivals.emplace_back(line.stations[static_cast<size_t>(m)].nu * sc.lambda,
                            kind, sc.arrival.shape,
                            make_stream(seed, static_cast<int>(gi), m, Purpose::arrivals));
      deboard.push_back(make_stream(seed, static_cast<int>(gi), m, Purpose::deboard));
    }
    auto r0_rng = make_stream(seed, static_cast<int>(gi), -1, Purpose::r0_draw);
    std::vector<double> r0_cdf;
    {
      double acc = 0.0;
      for (double p : line.r0.probs()) r0_cdf.push_back(acc += p);
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // queue lengths only; regression sums per station
    std::vector<long long> qlen(static_cast<size_t>(n_st), 0);
    struct Reg {
      double n = 0, sx = 0, sxx = 0, sy = 0, sxy = 0, syy = 0;
    };
    std::vector<Reg> reg(static_cast<size_t>(n_st));
    for (long cycle = 1; cycle <= horizon; ++cycle) {
      double t = static_cast<double>(cycle) * line.beta;
      int riders = 0;
      {
        double u = unit(r0_rng);
        for (size_t k = 0; k < r0_cdf.size(); ++k)
          if (u <= r0_cdf[k]) {
            riders = static_cast<int>(k);
            break;
          }
      }
      for (int m = 0; m < n_st; ++m) {
        const auto& conf = line.stations[static_cast<size_t>(m)];
        int stay = 0;
        for (int r = 0; r < riders; ++r)
          if (unit(deboard[static_cast<size_t>(m)]) >= conf.sigma) ++stay;
        int cap = std::min(conf.eta, line.gamma - stay);
        auto& arr = arrivals[static_cast<size_t>(m)];
        while (arr.peek() <= t) {
          arr.pop();
          ++qlen[static_cast<size_t>(m)];
        }
        long long board = std::min<long long>(cap, qlen[static_cast<size_t>(m)]);
        qlen[static_cast<size_t>(m)] -= board;
        riders = stay + static_cast<int>(board);
        if (cycle > warmup) {
          auto& g = reg[static_cast<size_t>(m)];
          double y = static_cast<double>(qlen[static_cast<size_t>(m)]);
          g.n += 1;
          g.sx += t;
          g.sxx += t * t;
          g.sy += y;
          g.sxy += t * y;
          g.syy += y * y;
        }
      }
    }
    ProbeResult pr;
    pr.lambda = sc.lambda;
    for (int m = 0; m < n_st; ++m) {
      const auto& g = reg[static_cast<size_t>(m)];
      double sxx = g.sxx - g.sx * g.sx / g.n;
      double sxy = g.sxy - g.sx * g.sy / g.n;
      double syy = g.syy - g.sy * g.sy / g.n;
      double slope = sxx > 0.0 ? sxy / sxx : 0.0;
      double resid = std::max(0.0, syy - slope * sxy) / std::max(1.0, g.n - 2);
      double se = sxx > 0.0 ? std::sqrt(resid / sxx) : 0.0;
      double eps = 0.003 * line.stations[static_cast<size_t>(m)].nu * sc.lambda + 1e-6;
      Verdict v;
      if (slope - 2.0 * se > eps)
        v = Verdict::unstable;
      else if (slope + 2.0 * se < eps)
        v = Verdict::stable;
      else
        v = Verdict::inconclusive;
      pr.verdicts.push_back(v);
      pr.slopes.push_back(slope);
    }
    results.push_back(std::move(pr));
  }
  return results;
}

}  // namespace liftline

#include "liftline/report.hpp"

#include <cmath>
#include <cstdio>

#include "liftline/stability.hpp"

namespace liftline {

std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_thresholds_csv(std::ostream& os, const LineConfig& line) {
  os << "station,closed_form,bisect\n";
  auto bisected = thresholds_bisect(line);
  for (size_t m = 0; m < line.stations.size(); ++m) {
    double closed;
    try {
      closed = scaled_threshold_closed(line, static_cast<int>(m));
    } catch (const std::exception&) {
      closed = std::numeric_limits<double>::quiet_NaN();
    }
    os << (m + 1) << ',' << fmt_num(closed) << ',' << fmt_num(bisected[m])
       << '\n';
  }
}

void write_analyze_csv(std::ostream& os, const LineSolution& sol,
                       const LineConfig& line) {
  os << "station,lambda_m,expected_capacity,capacity_variance,"
        "scaled_threshold,load_factor,stable,w_mean_s,w_var_s2,e_t,e_r\n";
  for (size_t m = 0; m < sol.stations.size(); ++m) {
    const auto& st = sol.stations[m];
    double w_mean = st.queue ? st.queue->wait.mean
                             : std::numeric_limits<double>::quiet_NaN();
    double w_var = st.queue ? st.queue->wait.variance
                            : std::numeric_limits<double>::quiet_NaN();
    os << (m + 1) << ',' << fmt_num(st.stability.lambda_m) << ','
       << fmt_num(st.stability.expected_capacity) << ','
       << fmt_num(st.stability.capacity_variance) << ','
       << fmt_num(st.stability.scaled_threshold) << ','
       << fmt_num(st.stability.load_factor) << ','
       << (st.stability.stable ? 1 : 0) << ',' << fmt_num(w_mean) << ','
       << fmt_num(w_var) << ',' << fmt_num(st.stability.expected_board) << ','
       << fmt_num(st.flow.ride.mean()) << '\n';
  }
  (void)line;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const std::string& axis_name) {
  os << axis_name
     << ",station,scaled_threshold,expected_capacity,capacity_variance,e_t,"
        "stable,w_mean_s,error\n";
  for (const auto& row : rows) {
    if (!row.ok) {
      os << fmt_num(row.axis_value) << ",,,,,,,," << row.error << '\n';
      continue;
    }
    for (size_t m = 0; m < row.stations.size(); ++m) {
      const auto& st = row.stations[m];
      os << fmt_num(row.axis_value) << ',' << (m + 1) << ','
         << fmt_num(row.thresholds[m]) << ','
         << fmt_num(st.expected_capacity) << ','
         << fmt_num(st.capacity_variance) << ','
         << fmt_num(st.expected_board) << ',' << (st.stable ? 1 : 0) << ','
         << fmt_num(row.w_mean[m]) << ",\n";
    }
  }
}

void write_simulate_csv(std::ostream& os, const SimEstimate& est) {
  os << "station,w_mean_s,w_mean_hw,w_var_s2,w_var_hw,e_t,e_t_hw,cap_mean,"
        "cap_var,n_waits,n_censored,overload\n";
  for (size_t m = 0; m < est.stations.size(); ++m) {
    const auto& st = est.stations[m];
    os << (m + 1) << ',' << fmt_num(st.w_mean) << ',' << fmt_num(st.w_mean_hw)
       << ',' << fmt_num(st.w_var) << ',' << fmt_num(st.w_var_hw) << ','
       << fmt_num(st.board_mean) << ',' << fmt_num(st.board_mean_hw) << ','
       << fmt_num(st.cap_mean) << ',' << fmt_num(st.cap_var) << ','
       << st.n_waits << ',' << st.n_censored << ','
       << (st.overload ? 1 : 0) << '\n';
  }
}

}  // namespace liftline

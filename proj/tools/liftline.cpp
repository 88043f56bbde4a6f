#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "liftline/chain.hpp"
#include "liftline/report.hpp"
#include "liftline/sim.hpp"
#include "liftline/stability.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string command;
  std::string scenario_path;
  std::optional<double> lambda;
  std::string axis = "lambda";
  int station = 1;
  std::vector<double> grid;
  long horizon = 100000;
  long warmup = -1;
  int reps = 1;
  std::uint64_t seed = 1;
  bool decorrelate = false;
  std::string out;
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("bad grid token: " + tok);
    grid.push_back(v);
  }
  return grid;
}

void write_manifest(const Options& opt, double wall_s) {
  if (opt.out.empty()) return;
  nlohmann::json m;
  m["command"] = opt.command;
  m["scenario"] = opt.scenario_path;
  m["tool_version"] = kVersion;
  m["wall_clock_s"] = wall_s;
  m["out"] = opt.out;
  nlohmann::json overrides;
  if (opt.lambda) overrides["lambda"] = *opt.lambda;
  if (opt.command == "sweep") {
    overrides["axis"] = opt.axis;
    overrides["station"] = opt.station;
    overrides["grid"] = opt.grid;
  }
  if (opt.command == "simulate" || opt.command == "validate") {
    overrides["horizon"] = opt.horizon;
    overrides["warmup"] = opt.warmup;
    overrides["reps"] = opt.reps;
    overrides["seed"] = opt.seed;
  }
  m["overrides"] = overrides;
  std::ofstream f(opt.out + ".manifest.json");
  f << m.dump(2) << '\n';
}

class OutStream {
 public:
  explicit OutStream(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file: " + path);
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

liftline::Scenario load(const Options& opt) {
  auto s = liftline::load_scenario(opt.scenario_path);
  if (opt.lambda) {
    if (*opt.lambda < 0.0)
      throw CLI::ValidationError("--lambda", "arrival rate must be >= 0");
    s.lambda = *opt.lambda;
  }
  return s;
}

int cmd_thresholds(const Options& opt) {
  auto s = load(opt);
  OutStream os(opt.out);
  liftline::write_thresholds_csv(os.get(), s.line);
  return 0;
}

int cmd_analyze(const Options& opt) {
  auto s = load(opt);
  auto sol = liftline::solve_line(s);
  OutStream os(opt.out);
  liftline::write_analyze_csv(os.get(), sol, s.line);
  return 0;
}

int cmd_sweep(const Options& opt) {
  auto s = load(opt);
  if (opt.grid.empty())
    throw CLI::ValidationError("--grid", "sweep requires a grid");
  auto axis = opt.axis == "eta" ? liftline::SweepAxis::eta
                                : liftline::SweepAxis::lambda;
  auto rows = liftline::sweep(s, axis, opt.station - 1, opt.grid);
  OutStream os(opt.out);
  liftline::write_sweep_csv(os.get(), rows, opt.axis);
  return 0;
}

liftline::SimConfig sim_config(const Options& opt) {
  liftline::SimConfig cfg;
  cfg.horizon = opt.horizon;
  cfg.warmup = opt.warmup;
  cfg.replications = opt.reps;
  cfg.seed = opt.seed;
  cfg.decorrelate_rides = opt.decorrelate;
  return cfg;
}

int cmd_simulate(const Options& opt) {
  auto s = load(opt);
  auto est = liftline::simulate(s, sim_config(opt));
  OutStream os(opt.out);
  liftline::write_simulate_csv(os.get(), est);
  return 0;
}

int cmd_validate(const Options& opt) {
  auto s = load(opt);
  auto sol = liftline::solve_line(s);
  auto est = liftline::simulate(s, sim_config(opt));
  OutStream os(opt.out);
  auto& o = os.get();
  o << "station,metric,analytic,simulated,halfwidth,delta,pass\n";
  bool all_pass = true;
  for (size_t m = 0; m < sol.stations.size(); ++m) {
    const auto& a = sol.stations[m];
    const auto& e = est.stations[m];
    if (!a.queue || a.stability.lambda_m <= 0.0) continue;
    auto row = [&](const char* metric, double analytic, double sim, double hw) {
      double delta = std::abs(analytic - sim);
      bool pass = delta <= 3.0 * hw + 1e-9;
      all_pass = all_pass && pass;
      o << (m + 1) << ',' << metric << ',' << liftline::fmt_num(analytic)
        << ',' << liftline::fmt_num(sim) << ',' << liftline::fmt_num(hw) << ','
        << liftline::fmt_num(delta) << ',' << (pass ? 1 : 0) << '\n';
    };
    row("w_mean_s", a.queue->wait.mean, e.w_mean, e.w_mean_hw);
    row("e_t", a.stability.expected_board, e.board_mean, e.board_mean_hw);
  }
  return all_pass ? 0 : 1;
}

int cmd_fig5(const Options& opt) {
  auto s = load(opt);
  struct Law {
    const char* name;
    std::vector<double> pmf;
  };
  // All four laws have mean 4; variances 0, 4, 9, 16.
  const Law laws[] = {
      {"delta4", {0, 0, 0, 0, 1}},
      {"half_2_6", {0, 0, 0.5, 0, 0, 0, 0.5}},
      {"half_1_7", {0, 0.5, 0, 0, 0, 0, 0, 0.5}},
      {"half_0_8", {0.5, 0, 0, 0, 0, 0, 0, 0, 0.5}},
  };
  OutStream os(opt.out);
  auto& o = os.get();
  o << "law,r0_variance,station,w_mean_s,w_var_s2\n";
  for (const auto& law : laws) {
    liftline::Scenario sl = s;
    sl.line.r0 = liftline::Pmf(law.pmf);
    auto sol = liftline::solve_line(sl);
    for (size_t m = 0; m < sol.stations.size(); ++m) {
      const auto& st = sol.stations[m];
      if (!st.queue) continue;
      o << law.name << ',' << liftline::fmt_num(sl.line.r0.variance()) << ','
        << (m + 1) << ',' << liftline::fmt_num(st.queue->wait.mean) << ','
        << liftline::fmt_num(st.queue->wait.variance) << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analytical engine and simulator for cabin lines with static "
               "access control"};
  app.require_subcommand(1);
  Options opt;
  std::string grid_text;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", opt.scenario_path, "Scenario JSON file")
        ->required();
    sub->add_option("--lambda", opt.lambda, "Override total arrival rate");
    sub->add_option("--out", opt.out, "Output CSV path (default: stdout)");
    return sub;
  };

  add_common(app.add_subcommand("thresholds",
                                "Per-station scaled stability thresholds"));
  add_common(app.add_subcommand("analyze", "Full analytic solve at one rate"));
  auto* sweep = add_common(
      app.add_subcommand("sweep", "Solve across a grid of rates or caps"));
  sweep->add_option("--axis", opt.axis, "Swept axis")
      ->check(CLI::IsMember({"lambda", "eta"}));
  sweep->add_option("--station", opt.station, "Swept station (1-based)")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--grid", grid_text, "Comma-separated grid values");
  auto add_sim_opts = [&](CLI::App* sub) {
    sub->add_option("--horizon", opt.horizon, "Cabin cycles per replication")
        ->check(CLI::PositiveNumber);
    sub->add_option("--warmup", opt.warmup, "Warmup cycles (-1 = 10%)");
    sub->add_option("--reps", opt.reps, "Replications")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "Random seed");
    sub->add_flag("--decorrelate", opt.decorrelate,
                  "Shuffle inter-station cabin occupancies (independent-"
                  "capacity oracle mode)");
    return sub;
  };
  add_sim_opts(add_common(
      app.add_subcommand("simulate", "Discrete-event simulation estimates")));
  add_sim_opts(add_common(app.add_subcommand(
      "validate", "Compare analytic results against simulation")));
  add_common(app.add_subcommand(
      "fig5", "Waiting times under four initial-occupancy laws"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  opt.command = app.get_subcommands().front()->get_name();
  auto start = std::chrono::steady_clock::now();
  int rc = 2;
  try {
    if (!grid_text.empty()) opt.grid = parse_grid(grid_text);
    if (opt.command == "thresholds") rc = cmd_thresholds(opt);
    else if (opt.command == "analyze") rc = cmd_analyze(opt);
    else if (opt.command == "sweep") rc = cmd_sweep(opt);
    else if (opt.command == "simulate") rc = cmd_simulate(opt);
    else if (opt.command == "validate") rc = cmd_validate(opt);
    else if (opt.command == "fig5") rc = cmd_fig5(opt);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  write_manifest(opt, wall);
  return rc;
}

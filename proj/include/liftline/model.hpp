#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "liftline/pmf.hpp"

namespace liftline {

struct StationConfig {
  double nu = 0.0;     ///< fraction of total arrivals, in [0,1]
  double sigma = 0.0;  ///< per-passenger deboarding probability, in [0,1]
  int eta = 1;         ///< access cap in seats, in [1, gamma]
};

struct LineConfig {
  double beta = 1.0;  ///< cabin interarrival time [s]
  int gamma = 1;      ///< seats per cabin
  std::vector<StationConfig> stations;
  Pmf r0 = Pmf::delta(0);  ///< occupants of cabins arriving at station 1
};

enum class ArrivalKind { poisson, deterministic, gamma_renewal };

struct ArrivalProcess {
  ArrivalKind kind = ArrivalKind::poisson;
  double shape = 1.0;  ///< gamma_renewal only
};

struct Scenario {
  LineConfig line;
  double lambda = 0.0;  ///< total arrival rate [passengers/s]
  ArrivalProcess arrival;
};

struct Violation {
  std::string field;
  std::string message;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Returns every violated invariant of the line, not just the first.
std::vector<Violation> validate(const LineConfig& line);

/// Parses and validates a scenario file. Throws ScenarioError on parse or
/// validation failure, naming the offending field.
Scenario load_scenario(const std::string& path);

Scenario parse_scenario(const std::string& json_text);
std::string to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

}  // namespace liftline

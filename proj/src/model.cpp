#include "liftline/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace liftline {

namespace {
using nlohmann::json;

std::string kind_name(ArrivalKind k) {
  switch (k) {
    case ArrivalKind::poisson: return "poisson";
    case ArrivalKind::deterministic: return "deterministic";
    case ArrivalKind::gamma_renewal: return "gamma_renewal";
  }
  return "poisson";
}

ArrivalKind kind_from_name(const std::string& name) {
  if (name == "poisson") return ArrivalKind::poisson;
  if (name == "deterministic") return ArrivalKind::deterministic;
  if (name == "gamma_renewal") return ArrivalKind::gamma_renewal;
  throw ScenarioError("arrival_process.kind: unknown kind '" + name + "'");
}
}  // namespace

std::vector<Violation> validate(const LineConfig& line) {
  std::vector<Violation> out;
  if (!(line.beta > 0.0) || !std::isfinite(line.beta))
    out.push_back({"beta", "cabin headway must be positive and finite"});
  if (line.gamma < 1) out.push_back({"gamma", "cabin size must be at least 1"});
  if (line.stations.empty())
    out.push_back({"stations", "line must have at least one station"});
  double nu_sum = 0.0;
  for (size_t m = 0; m < line.stations.size(); ++m) {
    const auto& st = line.stations[m];
    std::string prefix = "stations[" + std::to_string(m) + "].";
    if (!(st.nu >= 0.0 && st.nu <= 1.0))
      out.push_back({prefix + "nu", "arrival fraction must lie in [0,1]"});
    else
      nu_sum += st.nu;
    if (!(st.sigma >= 0.0 && st.sigma <= 1.0))
      out.push_back({prefix + "sigma", "deboarding probability must lie in [0,1]"});
    if (st.eta < 1 || st.eta > line.gamma)
      out.push_back({prefix + "eta",
                     "access cap must lie in [1, gamma=" + std::to_string(line.gamma) + "]"});
  }
  if (!line.stations.empty() && std::abs(nu_sum - 1.0) > 1e-9)
    out.push_back({"stations[].nu", "arrival fractions must sum to 1"});
  if (line.r0.support_max() > line.gamma)
    out.push_back({"r0", "occupancy distribution has mass above gamma"});
  return out;
}

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario parse error: ") + e.what());
  }
  Scenario s;
  try {
    s.line.beta = j.at("beta").get<double>();
    s.line.gamma = j.at("gamma").get<int>();
    s.lambda = j.at("lambda").get<double>();
    if (j.contains("arrival_process")) {
      const auto& ap = j.at("arrival_process");
      s.arrival.kind = kind_from_name(ap.at("kind").get<std::string>());
      if (s.arrival.kind == ArrivalKind::gamma_renewal)
        s.arrival.shape = ap.at("shape").get<double>();
    }
    std::vector<double> r0 = j.at("r0").at("pmf").get<std::vector<double>>();
    double sum = 0.0;
    for (double x : r0) {
      if (x < 0.0) throw ScenarioError("r0.pmf: negative probability");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ScenarioError("r0.pmf: probabilities must sum to 1");
    s.line.r0 = Pmf(std::move(r0));
    for (const auto& jst : j.at("stations")) {
      StationConfig st;
      st.nu = jst.at("nu").get<double>();
      st.sigma = jst.at("sigma").get<double>();
      st.eta = jst.at("eta").get<int>();
      s.line.stations.push_back(st);
    }
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario field error: ") + e.what());
  }
  if (!(s.lambda >= 0.0) || !std::isfinite(s.lambda))
    throw ScenarioError("lambda: arrival rate must be finite and non-negative");
  if (s.arrival.kind == ArrivalKind::gamma_renewal && !(s.arrival.shape > 0.0))
    throw ScenarioError("arrival_process.shape: must be positive");
  auto violations = validate(s.line);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "scenario validation failed:";
    for (const auto& v : violations) msg << "\n  " << v.field << ": " << v.message;
    throw ScenarioError(msg.str());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string to_json(const Scenario& s) {
  json j;
  j["beta"] = s.line.beta;
  j["gamma"] = s.line.gamma;
  j["lambda"] = s.lambda;
  j["arrival_process"]["kind"] = kind_name(s.arrival.kind);
  if (s.arrival.kind == ArrivalKind::gamma_renewal)
    j["arrival_process"]["shape"] = s.arrival.shape;
  j["r0"]["pmf"] = s.line.r0.probs();
  j["stations"] = json::array();
  for (const auto& st : s.line.stations)
    j["stations"].push_back({{"nu", st.nu}, {"sigma", st.sigma}, {"eta", st.eta}});
  return j.dump(2);
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write scenario file: " + path);
  out << to_json(s) << "\n";
}

}  // namespace liftline

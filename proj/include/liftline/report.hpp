#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "liftline/chain.hpp"
#include "liftline/sim.hpp"

namespace liftline {

/// Locale-independent number formatting (dot decimal separator, "inf"/"nan").
std::string fmt_num(double v);

void write_thresholds_csv(std::ostream& os, const LineConfig& line);
void write_analyze_csv(std::ostream& os, const LineSolution& sol,
                       const LineConfig& line);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const std::string& axis_name);
void write_simulate_csv(std::ostream& os, const SimEstimate& est);

}  // namespace liftline

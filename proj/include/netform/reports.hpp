// CSV report writers. One header row per file, 17 significant digits,
// deterministic row order (probe-major radius-minor; iterate-major).
#pragma once

#include <string>

#include "netform/analysis.hpp"
#include "netform/diagnostics.hpp"

namespace netform {

std::string format_g17(double v);

void write_energy_csv(const std::string& path, const EnergyReport& report);
void write_energy_second_csv(const std::string& path, const EnergyReport& report);
void write_excess_csv(const std::string& path,
                      const std::vector<ExcessReport>& reports, int dim);
void write_oscillation_csv(const std::string& path,
                           const std::vector<OscillationReport>& reports, int dim);
void write_picard_csv(const std::string& path, const PicardTrace& trace);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);
void write_levels_csv(const std::string& path, const DeGiorgiLevels& levels,
                      int grid_dim);
void write_regularity_csv(const std::string& path,
                          const std::vector<ProbeRecord>& records, int dim);
void write_lp_csv(const std::string& path, const LpGrowthTable& table);

} // namespace netform

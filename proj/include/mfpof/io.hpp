#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mfpof/hyperprior.hpp"
#include "mfpof/mfgp.hpp"
#include "mfpof/oscillator.hpp"

namespace mfpof {

/// A parsed CSV file: header names and numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  [[nodiscard]] std::size_t column(const std::string& name) const;
};

[[nodiscard]] CsvTable read_csv(std::istream& is);

/// Dataset CSV "x_1,..,x_d,t,z".
void write_dataset_csv(std::ostream& os, const MfDataset& data);
[[nodiscard]] MfDataset read_dataset_csv(std::istream& is, std::vector<double> levels = {},
                                         std::vector<std::pair<double, double>> bounds = {});

/// Reads the theta columns of a trace CSV (as written by write_trace_csv).
[[nodiscard]] std::vector<HyperParams> read_trace_csv(std::istream& is, const PriorSpec& prior);

struct SimulationRequest {
  OscillatorInput input;
  std::uint64_t seed = 0;
};

/// Simulation requests "omega0,zeta,dt,seed" (optional "t_end" column).
[[nodiscard]] std::vector<SimulationRequest> read_simulation_csv(std::istream& is);

}  // namespace mfpof

#include "mfpof/io.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "mfpof/error.hpp"

namespace mfpof {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    out.push_back(cell);
  }
  return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ConfigError("CSV: missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    table.header = split(line);
    break;
  }
  if (table.header.empty()) throw ConfigError("CSV: missing header");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != table.header.size())
      throw ConfigError("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(table.header.size()) +
                        " columns");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw ConfigError("CSV line " + std::to_string(lineno) + ": not a number: '" + c + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_dataset_csv(std::ostream& os, const MfDataset& data) {
  for (std::size_t k = 0; k < data.dim(); ++k) os << "x_" << (k + 1) << ',';
  os << "t,z\n" << std::setprecision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index k = 0; k < data.x().cols(); ++k) os << data.x()(r, k) << ',';
    os << data.t()[r] << ',' << data.z()[r] << '\n';
  }
}

MfDataset read_dataset_csv(std::istream& is, std::vector<double> levels, std::vector<std::pair<double, double>> bounds) {
  const CsvTable table = read_csv(is);
  const std::size_t tc = table.column("t");
  const std::size_t zc = table.column("z");
  std::vector<std::size_t> xc;
  for (std::size_t k = 1;; ++k) {
    const auto it = std::find(table.header.begin(), table.header.end(), "x_" + std::to_string(k));
    if (it == table.header.end()) break;
    xc.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }
  if (xc.empty()) throw ConfigError("dataset CSV: no x_1.. columns");
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(xc.size()));
  Eigen::VectorXd t(n), z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < xc.size(); ++k) x(i, static_cast<Eigen::Index>(k)) = row[xc[k]];
    t[i] = row[tc];
    z[i] = row[zc];
  }
  return MfDataset::create(std::move(x), std::move(t), std::move(z), std::move(levels), std::move(bounds));
}

std::vector<HyperParams> read_trace_csv(std::istream& is, const PriorSpec& prior) {
  const CsvTable table = read_csv(is);
  const HyperParams layout = prior.at(prior.mean);
  std::vector<std::size_t> cols;
  for (const auto& name : layout.names()) cols.push_back(table.column(name));
  std::vector<HyperParams> out;
  for (const auto& row : table.rows) {
    Eigen::VectorXd l(static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) l[static_cast<Eigen::Index>(k)] = row[cols[k]];
    out.push_back(prior.at(l));
  }
  if (out.empty()) throw ConfigError("trace CSV: no hyper-parameter rows");
  return out;
}

std::vector<SimulationRequest> read_simulation_csv(std::istream& is) {
  const CsvTable table = read_csv(is);
  const std::size_t wc = table.column("omega0");
  const std::size_t zc = table.column("zeta");
  const std::size_t dc = table.column("dt");
  const std::size_t sc = table.column("seed");
  const auto te = std::find(table.header.begin(), table.header.end(), "t_end");
  std::vector<SimulationRequest> out;
  for (const auto& row : table.rows) {
    SimulationRequest req;
    req.input.omega0 = row[wc];
    req.input.zeta = row[zc];
    req.input.dt = row[dc];
    if (te != table.header.end()) req.input.t_end = row[static_cast<std::size_t>(te - table.header.begin())];
    if (row[sc] < 0.0 || row[sc] != std::floor(row[sc])) throw ConfigError("simulation CSV: seed must be a non-negative integer");
    req.seed = static_cast<std::uint64_t>(row[sc]);
    out.push_back(req);
  }
  if (out.empty()) throw ConfigError("simulation CSV: no rows");
  return out;
}

}  // namespace mfpof

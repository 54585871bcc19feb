#include "carma/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "carma/errors.hpp"

namespace carma {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot open output file: " + file);
  return out;
}

void write_header(std::ofstream& out, const std::vector<std::string>& header) {
  for (const std::string& line : header) out << "# " << line << "\n";
}

} // namespace

void write_path_csv(const std::string& file, const SampledPath& path,
                    const std::vector<std::string>& header) {
  std::ofstream out = open_out(file);
  write_header(out, header);
  out << "t";
  for (int j = 1; j <= path.dim(); ++j) out << ",X_" << j;
  out << "\n";
  for (int k = 0; k < path.steps(); ++k) {
    out << fmt(path.time(k));
    for (int j = 0; j < path.dim(); ++j) out << "," << fmt(path.values(k, j));
    out << "\n";
  }
}

SampledPath read_path_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open history file: " + file);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) { // column-name line
      saw_header = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw ConfigError("history file has fewer than two rows: " + file);
  const std::size_t cols = rows[0].size();
  if (cols < 2) throw ConfigError("history file needs a time column and data: " + file);
  for (const auto& r : rows)
    if (r.size() != cols) throw ConfigError("ragged history file: " + file);

  SampledPath path;
  path.t0 = rows[0][0];
  path.dt = rows[1][0] - rows[0][0];
  if (path.dt <= 0.0) throw ConfigError("history time column must increase: " + file);
  path.values = Matrix::Zero(static_cast<Eigen::Index>(rows.size()),
                             static_cast<Eigen::Index>(cols - 1));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double expected = path.t0 + path.dt * static_cast<double>(k);
    if (std::abs(rows[k][0] - expected) > 1e-9 * (1.0 + std::abs(expected)))
      throw ConfigError("history grid is not uniform: " + file);
    for (std::size_t j = 1; j < cols; ++j)
      path.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j - 1)) = rows[k][j];
  }
  return path;
}

void write_driver_csv(const std::string& file, const DriverPath& driver,
                      const std::vector<std::string>& header) {
  std::ofstream out = open_out(file);
  write_header(out, header);
  out << "t";
  for (int j = 1; j <= driver.dim(); ++j) out << ",dZ_" << j;
  out << "\n";
  for (int k = 0; k < driver.steps(); ++k) {
    out << fmt(driver.t0 + driver.dt * k);
    for (int j = 0; j < driver.dim(); ++j) out << "," << fmt(driver.increments(k, j));
    out << "\n";
  }
}

void write_recovered_csv(const std::string& file, const RecoveredNoise& rec,
                         const std::vector<std::string>& header) {
  std::ofstream out = open_out(file);
  write_header(out, header);
  out << "t";
  for (int j = 1; j <= rec.path.dim(); ++j) out << ",dZ_" << j;
  out << ",valid\n";
  for (int k = 0; k < rec.path.steps(); ++k) {
    const bool valid = k >= rec.first_valid && k <= rec.last_valid;
    out << fmt(rec.path.t0 + rec.path.dt * k);
    for (int j = 0; j < rec.path.dim(); ++j) {
      const double v = rec.path.increments(k, j);
      out << "," << (std::isnan(v) ? std::string("nan") : fmt(v));
    }
    out << "," << (valid ? 1 : 0) << "\n";
  }
}

void write_kernel_csv(const std::string& file, const SampledKernel& kernel,
                      const std::vector<std::string>& header) {
  std::ofstream out = open_out(file);
  write_header(out, header);
  const int n = kernel.dim();
  out << "# atom_at_zero =";
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out << " " << fmt(kernel.atom_at_zero(r, c));
  out << "\n";
  out << "t";
  for (int r = 1; r <= n; ++r)
    for (int c = 1; c <= n; ++c) out << ",g_" << r << c;
  out << "\n";
  for (int k = 0; k < kernel.count(); ++k) {
    out << fmt(kernel.offset + kernel.dt * k);
    const Matrix& v = kernel.values[static_cast<std::size_t>(k)];
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) out << "," << fmt(v(r, c));
    out << "\n";
  }
}

void write_prediction_csv(const std::string& file, const PredictionResult& result,
                          const std::vector<std::string>& header) {
  std::ofstream out = open_out(file);
  write_header(out, header);
  const int n = static_cast<int>(result.values.cols());
  out << "t";
  for (int j = 1; j <= n; ++j) out << ",pred_" << j;
  for (int j = 1; j <= n; ++j) out << ",term1_" << j;
  for (int j = 1; j <= n; ++j) out << ",term2_" << j;
  for (int j = 1; j <= n; ++j) out << ",term3_" << j;
  out << "\n";
  for (int k = 0; k < result.steps(); ++k) {
    out << fmt(result.time(k));
    for (int j = 0; j < n; ++j) out << "," << fmt(result.values(k, j));
    for (int j = 0; j < n; ++j) out << "," << fmt(result.state_term(k, j));
    for (int j = 0; j < n; ++j) out << "," << fmt(result.memory_term(k, j));
    for (int j = 0; j < n; ++j) out << "," << fmt(result.noise_term(k, j));
    out << "\n";
  }
}

} // namespace carma

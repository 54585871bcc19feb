#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carma/drivers.hpp"
#include "carma/types.hpp"

namespace carma {

/// Parsed run configuration: `key = value` entries grouped into [model],
/// [driver], [grid] and [task] sections.  Unknown keys are rejected with
/// the offending section.key named.  Matrix-valued entries are n*n reals,
/// row-major; per-coordinate vectors accept a single value as broadcast.
struct RunConfig {
  // [model]
  int n = 0;
  int p = 0;
  int q = 0;
  MatrixList a_coeffs; // A_1..A_p
  MatrixList b_coeffs; // B_0..B_{q-1}

  // [driver]
  bool has_driver = false;
  DriverSpec driver;
  std::string driver_kind;

  // [grid]
  double t0 = 0.0;
  double dt = 1.0 / 256.0;
  int steps = 0;
  double burn_in = 0.0;

  // [task]
  std::uint64_t seed = 42; // documented default
  std::string output = "out.csv";
  std::string history;     // input path CSV for recover/predict
  std::string method = "ma"; // simulate: ma | statespace
  double horizon = 1.0;
  double truncation_tol = 1e-8;
  double fft_dt = 1.0 / 256.0;
  int fft_size = 1 << 16;
  int scan_points = 4096;

  /// Canonical `section.key = value` dump embedded in output headers.
  std::vector<std::string> resolved() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& file);

} // namespace carma

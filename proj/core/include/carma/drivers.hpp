#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "carma/types.hpp"

namespace carma {

struct BrownianSpec {
  Vector drift;       // mu per coordinate
  Vector volatility;  // sigma per coordinate, >= 0
  Matrix correlation; // unit-diagonal PSD; identity if empty
};

struct CompoundPoissonSpec {
  Vector rate;      // lambda per coordinate, >= 0
  Vector jump_mean; // normal jump law per coordinate
  Vector jump_sd;
};

struct GammaDifferenceSpec {
  Vector shape; // > 0
  Vector scale; // > 0
};

struct FractionalSpec {
  BrownianSpec base; // must have zero drift
  Vector beta;       // per coordinate, in (0, 1/2)
};

/// Stationary-increment driver description.  All laws have a finite mean;
/// the fractional branch is restricted to a zero-mean Gaussian base.
struct DriverSpec {
  int n = 0;
  std::variant<BrownianSpec, CompoundPoissonSpec, GammaDifferenceSpec, FractionalSpec> law;

  bool is_fractional() const { return std::holds_alternative<FractionalSpec>(law); }
  /// E[Z_1], used by the Levy prediction formula.
  Vector mean_rate() const;
  /// Throws on invalid parameters (negative sigma/rate, beta out of range,
  /// non-positive-definite correlation, fractional base with drift).
  void validate() const;
};

/// Noise increments on a uniform grid: increments(k, j) is the j-th
/// coordinate of Z over [t0 + k dt, t0 + (k+1) dt).
struct DriverPath {
  double t0 = 0.0;
  double dt = 0.0;
  Matrix increments; // steps x n
  std::uint64_t seed = 0;

  int steps() const { return static_cast<int>(increments.rows()); }
  int dim() const { return static_cast<int>(increments.cols()); }
  double end_time() const { return t0 + dt * steps(); }
};

/// Exact step-law sampling for the non-fractional drivers; bit-reproducible
/// for a fixed (spec, grid, seed).
DriverPath gen_levy(const DriverSpec& spec, double t0, double dt, int steps, std::uint64_t seed);

/// Right-sided fractional integral on samples: treats f as piecewise
/// constant on grid cells and integrates the power kernel exactly per cell,
/// so the weight of cell k is (((k+1)dt)^beta - (k dt)^beta) / Gamma(1+beta).
std::vector<double> frac_integrate(const std::vector<double>& samples, double dt, double beta);

struct FractionalDiagnostics {
  int history_steps = 0;     // extension cells actually used
  double sigma_deficit = 0.0; // relative increment-sigma loss from tail truncation
};

/// Fractional Levy path: Brownian base increments on an extended grid
/// [t0 - T_ext, t0 + steps*dt] filtered by the cell-averaged moving-average
/// weights of the fractional step kernel.  T_ext starts at 64 * steps * dt
/// and doubles until the truncated tail costs less than 1% of the increment
/// standard deviation (or a hard cell cap is reached; the achieved deficit
/// is reported through diag).
DriverPath gen_fractional(const DriverSpec& spec, double t0, double dt, int steps,
                          std::uint64_t seed, FractionalDiagnostics* diag = nullptr);

/// Dispatch on the spec's law.
DriverPath generate_driver(const DriverSpec& spec, double t0, double dt, int steps,
                           std::uint64_t seed);

} // namespace carma

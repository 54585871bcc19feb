#pragma once

#include <string>
#include <vector>

#include "carma/drivers.hpp"
#include "carma/engine.hpp"
#include "carma/msdde_kernel.hpp"

namespace carma {

/// CSV writers share a layout: '#'-prefixed comment header (reproducibility
/// metadata supplied by the caller), one column-name line, then rows with
/// full round-trip precision ("%.17g").

void write_path_csv(const std::string& file, const SampledPath& path,
                    const std::vector<std::string>& header);
SampledPath read_path_csv(const std::string& file);

void write_driver_csv(const std::string& file, const DriverPath& driver,
                      const std::vector<std::string>& header);

/// Recovered increments: `t,dZ_1,..,dZ_n,valid`; rows outside the valid
/// window keep their (non-)values and are flagged 0.
void write_recovered_csv(const std::string& file, const RecoveredNoise& rec,
                         const std::vector<std::string>& header);

/// Kernel samples `t,g_11,..,g_nn` (row-major entries); the measure atom is
/// recorded in the comment block, never smeared into samples.
void write_kernel_csv(const std::string& file, const SampledKernel& kernel,
                      const std::vector<std::string>& header);

void write_prediction_csv(const std::string& file, const PredictionResult& result,
                          const std::vector<std::string>& header);

} // namespace carma

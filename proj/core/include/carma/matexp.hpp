#pragma once

#include "carma/types.hpp"

namespace carma {

/// Matrix exponential by scaling-and-squaring with a Pade core (Eigen's
/// implementation).  Validates the input and fails loudly on overflow
/// instead of returning non-finite entries.
Matrix matrix_exp(const Matrix& m);

} // namespace carma

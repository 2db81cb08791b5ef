#pragma once

#include "hexnet/color_code.hpp"
#include "hexnet/gf2.hpp"

namespace hexnet {

/// Step-one estimate ê = H_f†·s_fᵀ for a full-length syndrome s.
/// The map is linear and fixed; H·êᵀ agrees with s on every kept face.
/// Throws LengthMismatch.
BitVector decode_step_one(const ColorCode& code, const BitVector& s);

}  // namespace hexnet

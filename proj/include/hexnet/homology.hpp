#pragma once

// Homology classes of syndrome-free residuals, correction assembly, and a
// brute-force maximum-likelihood reference decoder.

#include <array>
#include <cstddef>

#include "hexnet/color_code.hpp"
#include "hexnet/gf2.hpp"
#include "hexnet/kernels.hpp"

namespace hexnet {

/// Class index = b₁ + 2b₂ + 4b₃ + 8b₄, where b_i pairs the residual with the
/// i-th homology functional. Index 0 is the trivial class.
struct HomologyClass {
    unsigned index = 0;

    [[nodiscard]] bool bit(std::size_t i) const { return ((index >> i) & 1U) != 0; }
    friend bool operator==(HomologyClass, HomologyClass) = default;
};

/// Throws NotInKernel when r has a nonzero syndrome.
HomologyClass homology_class(const ColorCode& code, const BitVector& r);
/// Same as homology_class without the syndrome check; for residuals that are
/// syndrome-free by construction.
HomologyClass homology_class_unchecked(const ColorCode& code, const BitVector& r);

/// XOR of the logical basis vectors selected by the class bits.
BitVector class_representative(const ColorCode& code, HomologyClass c);

/// representative(c) ⊕ decode_step_one(s).
BitVector final_correction(const ColorCode& code, const BitVector& s, HomologyClass c);

/// True iff e ⊕ correction has trivial homology. Throws SyndromeMismatch when
/// the correction does not reproduce the syndrome of e.
bool is_success(const ColorCode& code, const BitVector& e, const BitVector& correction);

struct MldResult {
    HomologyClass best;
    std::array<double, ColorCode::kClasses> class_probs{};
};

/// Largest stabilizer group (as log2 of its order) the oracle enumerates.
inline constexpr std::size_t kMldMaxGroupLog2 = 16;

/// Sums p^w(1-p)^(n-w) over every error ê ⊕ rep(γ) ⊕ S, S in the stabilizer
/// group, for each class γ. Ties go to the lowest class index.
/// Throws TooLarge when the group has more than 2^max_group_log2 elements.
/// The parallel variant splits the enumeration by class.
MldResult mld_oracle(const ColorCode& code, const BitVector& s, double p_err,
                     std::size_t max_group_log2 = kMldMaxGroupLog2, Exec exec = Exec::parallel);

}  // namespace hexnet

#include "hexnet/hinv_decoder.hpp"

#include <bit>

namespace hexnet {

BitVector decode_step_one(const ColorCode& code, const BitVector& s) {
    const BitVector s_f = code.reduced_syndrome(s);
    BitVector e_hat(code.n());
    const auto words = s_f.words();
    for (std::size_t w = 0; w < words.size(); ++w) {
        for (auto bits = words[w]; bits != 0; bits &= bits - 1) {
            e_hat ^= code.pinv_column(w * BitVector::kWordBits +
                                      static_cast<std::size_t>(std::countr_zero(bits)));
        }
    }
    return e_hat;
}

}  // namespace hexnet

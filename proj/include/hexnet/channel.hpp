#pragma once

// I.i.d. bit-flip channel and labeled sample streams.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hexnet/color_code.hpp"
#include "hexnet/gf2.hpp"
#include "hexnet/kernels.hpp"
#include "hexnet/matrix.hpp"

namespace hexnet {

struct NoiseParams {
    double p_err = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

/// Flips each qubit independently with probability p_err. The result depends
/// only on (seed, stream_id, index).
BitVector sample_error(const ColorCode& code, const NoiseParams& noise, std::uint64_t index);

struct LabeledSample {
    BitVector e;
    BitVector s;      // H·eᵀ, length F
    BitVector e_hat;  // step-one estimate
    unsigned label = 0;  // homology class of e ⊕ e_hat
};

LabeledSample make_sample(const ColorCode& code, BitVector e);

enum class InputMode {
    syndrome_only,    // s
    concat_estimate,  // e_hat bits, then s bits
};

InputMode input_mode_from_approach(int approach);
int approach_of(InputMode mode);
std::string to_string(InputMode mode);

std::size_t input_width(const ColorCode& code, InputMode mode);
/// Writes the 0/1 network input for one sample into `row`.
void encode_input(const BitVector& e_hat, const BitVector& s, InputMode mode, std::span<float> row);

struct Batch {
    Matrix<float> inputs;
    std::vector<int> labels;
};

/// Builds the samples with indices [first, first + count).
Batch make_batch(const ColorCode& code, const NoiseParams& noise, std::uint64_t first,
                 std::size_t count, InputMode mode, Exec exec = Exec::parallel);

/// Endless deterministic stream of batches for one (seed, stream_id).
/// Not safe for concurrent use by two consumers.
class BatchIterator {
public:
    BatchIterator(const ColorCode& code, NoiseParams noise, std::size_t batch_size, InputMode mode,
                  Exec exec = Exec::parallel);

    Batch next();
    [[nodiscard]] std::uint64_t samples_consumed() const { return next_index_; }
    [[nodiscard]] std::size_t width() const { return width_; }

private:
    const ColorCode* code_;
    NoiseParams noise_;
    std::size_t batch_size_;
    InputMode mode_;
    Exec exec_;
    std::size_t width_;
    std::uint64_t next_index_ = 0;
};

}  // namespace hexnet

#include "hexnet/channel.hpp"

#include "hexnet/errors.hpp"
#include "hexnet/hinv_decoder.hpp"
#include "hexnet/homology.hpp"
#include "hexnet/rng.hpp"

namespace hexnet {

BitVector sample_error(const ColorCode& code, const NoiseParams& noise, std::uint64_t index) {
    const BernoulliThreshold flip(noise.p_err);
    if (flip.never()) return BitVector(code.n());
    if (flip.always()) return BitVector::ones(code.n());
    CounterRng rng(noise.seed, noise.stream_id, index);
    BitVector e(code.n());
    for (std::size_t q = 0; q < code.n(); ++q) {
        if (flip(rng.next())) e.set(q);
    }
    return e;
}

LabeledSample make_sample(const ColorCode& code, BitVector e) {
    LabeledSample out;
    out.s = code.syndrome(e);
    out.e_hat = decode_step_one(code, out.s);
    out.label = homology_class_unchecked(code, e ^ out.e_hat).index;
    out.e = std::move(e);
    return out;
}

InputMode input_mode_from_approach(int approach) {
    switch (approach) {
        case 1: return InputMode::syndrome_only;
        case 2: return InputMode::concat_estimate;
        default: throw ConfigError("approach must be 1 or 2, got " + std::to_string(approach));
    }
}

int approach_of(InputMode mode) { return mode == InputMode::syndrome_only ? 1 : 2; }

std::string to_string(InputMode mode) {
    return mode == InputMode::syndrome_only ? "syndrome_only" : "concat_estimate";
}

std::size_t input_width(const ColorCode& code, InputMode mode) {
    return mode == InputMode::syndrome_only ? code.num_faces() : code.n() + code.num_faces();
}

void encode_input(const BitVector& e_hat, const BitVector& s, InputMode mode, std::span<float> row) {
    std::size_t offset = 0;
    if (mode == InputMode::concat_estimate) {
        for (std::size_t i = 0; i < e_hat.size(); ++i) row[i] = e_hat.get(i) ? 1.0F : 0.0F;
        offset = e_hat.size();
    }
    if (row.size() != offset + s.size()) throw ShapeMismatch("input row width does not match sample");
    for (std::size_t i = 0; i < s.size(); ++i) row[offset + i] = s.get(i) ? 1.0F : 0.0F;
}

Batch make_batch(const ColorCode& code, const NoiseParams& noise, std::uint64_t first,
                 std::size_t count, InputMode mode, Exec exec) {
    Batch batch;
    batch.inputs.resize(count, input_width(code, mode));
    batch.labels.assign(count, 0);
    auto fill = [&](std::ptrdiff_t i) {
        const auto row = static_cast<std::size_t>(i);
        const auto sample = make_sample(code, sample_error(code, noise, first + row));
        encode_input(sample.e_hat, sample.s, mode, batch.inputs.row(row));
        batch.labels[row] = static_cast<int>(sample.label);
    };
    const auto n = static_cast<std::ptrdiff_t>(count);
    if (exec == Exec::serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) fill(i);
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) fill(i);
    }
    return batch;
}

BatchIterator::BatchIterator(const ColorCode& code, NoiseParams noise, std::size_t batch_size,
                             InputMode mode, Exec exec)
    : code_(&code),
      noise_(noise),
      batch_size_(batch_size),
      mode_(mode),
      exec_(exec),
      width_(input_width(code, mode)) {
    if (batch_size == 0) throw ConfigError("batch size must be at least 1");
}

Batch BatchIterator::next() {
    Batch b = make_batch(*code_, noise_, next_index_, batch_size_, mode_, exec_);
    next_index_ += batch_size_;
    return b;
}

}  // namespace hexnet

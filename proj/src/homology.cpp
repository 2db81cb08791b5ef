#include "hexnet/homology.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "hexnet/errors.hpp"
#include "hexnet/hinv_decoder.hpp"

namespace hexnet {

HomologyClass homology_class_unchecked(const ColorCode& code, const BitVector& r) {
    const auto& functionals = code.homology_functionals();
    unsigned index = 0;
    for (std::size_t i = 0; i < functionals.size(); ++i) {
        if (r.dot(functionals[i])) index |= 1U << i;
    }
    return {index};
}

HomologyClass homology_class(const ColorCode& code, const BitVector& r) {
    if (!code.syndrome(r).is_zero()) throw NotInKernel("residual has a nonzero syndrome");
    return homology_class_unchecked(code, r);
}

BitVector class_representative(const ColorCode& code, HomologyClass c) {
    BitVector rep(code.n());
    const auto& basis = code.logical_basis();
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (c.bit(i)) rep ^= basis[i];
    }
    return rep;
}

BitVector final_correction(const ColorCode& code, const BitVector& s, HomologyClass c) {
    return class_representative(code, c) ^ decode_step_one(code, s);
}

bool is_success(const ColorCode& code, const BitVector& e, const BitVector& correction) {
    const BitVector residual = e ^ correction;
    if (!code.syndrome(residual).is_zero()) {
        throw SyndromeMismatch("correction does not reproduce the error syndrome");
    }
    return homology_class_unchecked(code, residual).index == 0;
}

namespace {

using Histogram = std::vector<std::uint64_t>;

// Weight histogram of the coset base ⊕ span(generators), walked in Gray-code order.
Histogram coset_histogram(const BitMatrix& generators, BitVector v) {
    Histogram hist(v.size() + 1, 0);
    ++hist[v.weight()];
    const std::uint64_t count = std::uint64_t{1} << generators.rows();
    for (std::uint64_t i = 1; i < count; ++i) {
        v ^= generators.row(static_cast<std::size_t>(std::countr_zero(i)));
        ++hist[v.weight()];
    }
    return hist;
}

// log Σ_w hist[w]·p^w(1-p)^(n-w), accumulated relative to the largest term.
double log_coset_probability(const Histogram& hist, double log_p, double log_q) {
    const std::size_t n = hist.size() - 1;
    double peak = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(hist.size(), peak);
    for (std::size_t w = 0; w <= n; ++w) {
        if (hist[w] == 0) continue;
        terms[w] = std::log(static_cast<double>(hist[w])) + static_cast<double>(w) * log_p +
                   static_cast<double>(n - w) * log_q;
        peak = std::max(peak, terms[w]);
    }
    double sum = 0.0;
    double carry = 0.0;
    for (double t : terms) {
        if (t == -std::numeric_limits<double>::infinity()) continue;
        const double y = std::exp(t - peak) - carry;
        const double next = sum + y;
        carry = (next - sum) - y;
        sum = next;
    }
    return peak + std::log(sum);
}

}  // namespace

MldResult mld_oracle(const ColorCode& code, const BitVector& s, double p_err,
                     std::size_t max_group_log2, Exec exec) {
    const std::size_t group_log2 = code.h_f().rows();
    if (group_log2 > max_group_log2) {
        throw TooLarge("stabilizer group has 2^" + std::to_string(group_log2) +
                       " elements; limit is 2^" + std::to_string(max_group_log2));
    }
    const BitVector e_hat = decode_step_one(code, s);

    // Endpoint noise levels are clamped so that impossible cosets still rank
    // by their limiting weight order instead of collapsing to 0/0.
    const double p = std::clamp(p_err, 1e-300, 1.0 - 0x1.0p-53);
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);

    constexpr auto kClasses = static_cast<std::ptrdiff_t>(ColorCode::kClasses);
    std::array<double, ColorCode::kClasses> log_probs{};
    auto one_class = [&](std::ptrdiff_t c) {
        const HomologyClass cls{static_cast<unsigned>(c)};
        const auto hist = coset_histogram(code.h_f(), e_hat ^ class_representative(code, cls));
        log_probs[static_cast<std::size_t>(c)] = log_coset_probability(hist, log_p, log_q);
    };
    if (exec == Exec::serial) {
        for (std::ptrdiff_t c = 0; c < kClasses; ++c) one_class(c);
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t c = 0; c < kClasses; ++c) one_class(c);
    }

    MldResult result;
    const double peak = *std::max_element(log_probs.begin(), log_probs.end());
    double total = 0.0;
    for (std::size_t c = 0; c < log_probs.size(); ++c) {
        result.class_probs[c] = std::exp(log_probs[c] - peak);
        total += result.class_probs[c];
    }
    unsigned best = 0;
    for (std::size_t c = 0; c < log_probs.size(); ++c) {
        result.class_probs[c] /= total;
        // Differences at rounding level count as ties.
        if (log_probs[c] > log_probs[best] + 1e-12) best = static_cast<unsigned>(c);
    }
    result.best = {best};
    return result;
}

}  // namespace hexnet

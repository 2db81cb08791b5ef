#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hexnet/channel.hpp"
#include "hexnet/errors.hpp"
#include "hexnet/hinv_decoder.hpp"
#include "hexnet/homology.hpp"
#include "oracles.hpp"

using namespace hexnet;

namespace {

const ColorCode& small_code() {
    static const ColorCode code = build_code({3, 3, 0});
    return code;
}

// Weight histograms of every length-18 error, bucketed by syndrome and by
// the class of e ⊕ ê. Built by walking all 2^18 errors.
struct ExhaustiveTable {
    std::vector<std::array<std::array<std::uint64_t, 19>, 16>> hist;  // [syndrome][class][weight]

    ExhaustiveTable() : hist(512) {
        const auto& code = small_code();
        for (std::uint32_t x = 0; x < (1U << 18); ++x) {
            BitVector e(18);
            for (std::size_t q = 0; q < 18; ++q)
                if ((x >> q) & 1U) e.set(q);
            const auto s = code.syndrome(e);
            const auto r = e ^ decode_step_one(code, s);
            unsigned cls = 0;
            for (std::size_t i = 0; i < 4; ++i)
                cls |= static_cast<unsigned>(oracle::dot(r, code.homology_functionals()[i])) << i;
            std::uint32_t sid = 0;
            for (std::size_t f = 0; f < 9; ++f) sid |= (s.get(f) ? 1U : 0U) << f;
            ++hist[sid][cls][e.weight()];
        }
    }

    std::array<double, 16> posteriors(std::uint32_t sid, double p) const {
        std::array<double, 16> out{};
        double total = 0.0;
        for (unsigned c = 0; c < 16; ++c) {
            for (std::size_t w = 0; w <= 18; ++w)
                out[c] += static_cast<double>(hist[sid][c][w]) * std::pow(p, w) * std::pow(1 - p, 18 - w);
            total += out[c];
        }
        for (auto& v : out) v /= total;
        return out;
    }
};

const ExhaustiveTable& table() {
    static const ExhaustiveTable t;
    return t;
}

BitVector syndrome_from_id(std::uint32_t sid) {
    BitVector s(9);
    for (std::size_t f = 0; f < 9; ++f)
        if ((sid >> f) & 1U) s.set(f);
    return s;
}

}  // namespace

TEST_CASE("decode_step_one examples") {
    const auto& code = small_code();
    CHECK(decode_step_one(code, BitVector(9)).is_zero());
    CHECK_THROWS_AS(decode_step_one(code, BitVector(8)), LengthMismatch);

    // s = e_j on a kept coordinate gives column j of the pseudo-inverse.
    const auto [r0, r1] = code.removed_faces();
    std::size_t j = 0;
    for (std::size_t f = 0; f < 9; ++f) {
        if (f == r0 || f == r1) continue;
        BitVector col(18);
        for (std::size_t q = 0; q < 18; ++q) col.set(q, code.h_f_pinv().get(q, j));
        CHECK(decode_step_one(code, BitVector::unit(9, f)) == col);
        ++j;
    }

    oracle::TestRng rng(8);
    for (int t = 0; t < 10000; ++t) {
        const auto e = rng.bits(18, 0.3);
        const auto s = code.syndrome(e);
        CHECK(code.syndrome(decode_step_one(code, s)) == s);
    }
}

TEST_CASE("decode_step_one is linear and residuals are syndrome-free") {
    oracle::TestRng rng(31);
    const auto code = build_code({6, 6, 0});
    for (int t = 0; t < 2000; ++t) {
        const auto s1 = code.syndrome(rng.bits(72, 0.1));
        const auto s2 = code.syndrome(rng.bits(72, 0.1));
        CHECK(decode_step_one(code, s1 ^ s2) == (decode_step_one(code, s1) ^ decode_step_one(code, s2)));
        const auto e = rng.bits(72, 0.2);
        CHECK(code.syndrome(e ^ decode_step_one(code, code.syndrome(e))).is_zero());
    }
}

TEST_CASE("homology_class examples") {
    const auto& code = small_code();
    CHECK(homology_class(code, BitVector(18)).index == 0);
    for (std::size_t f = 0; f < 9; ++f) CHECK(homology_class(code, code.h().row(f)).index == 0);
    CHECK(homology_class(code, code.logical_basis()[1]).index == 2);
    CHECK_THROWS_AS(homology_class(code, BitVector::unit(18, 0)), NotInKernel);
    HomologyClass c{0b1010};
    CHECK_FALSE(c.bit(0));
    CHECK(c.bit(1));
    CHECK(c.bit(3));
}

TEST_CASE("homology_class is a homomorphism on syndrome-free vectors") {
    const auto& code = small_code();
    const auto ker = kernel_basis(code.h());
    oracle::TestRng rng(12);
    for (int t = 0; t < 500; ++t) {
        BitVector a(18), b(18);
        for (const auto& k : ker) {
            if (rng.next() & 1U) a ^= k;
            if (rng.next() & 1U) b ^= k;
        }
        CHECK(homology_class(code, a ^ b).index == (homology_class(code, a).index ^ homology_class(code, b).index));
    }
}

TEST_CASE("class_representative round trips") {
    const auto& code = small_code();
    CHECK(class_representative(code, {0}).is_zero());
    CHECK(class_representative(code, {1}) == code.logical_basis()[0]);
    CHECK(class_representative(code, {3}) == (code.logical_basis()[0] ^ code.logical_basis()[1]));
    for (unsigned c = 0; c < 16; ++c) CHECK(homology_class(code, class_representative(code, {c})).index == c);
}

TEST_CASE("final_correction and is_success") {
    const auto& code = small_code();
    CHECK(final_correction(code, BitVector(9), {0}).is_zero());
    CHECK_THROWS_AS(final_correction(code, BitVector(3), {0}), LengthMismatch);

    oracle::TestRng rng(99);
    for (int t = 0; t < 2000; ++t) {
        const auto e = rng.bits(18, 0.15);
        const auto s = code.syndrome(e);
        const auto truth = homology_class(code, e ^ decode_step_one(code, s));
        CHECK(is_success(code, e, final_correction(code, s, truth)));
        const HomologyClass wrong{truth.index ^ (1U + static_cast<unsigned>(t % 15))};
        CHECK_FALSE(is_success(code, e, final_correction(code, s, wrong)));
    }
    const auto e = rng.bits(18, 0.3);
    CHECK(is_success(code, e, e));
    CHECK(is_success(code, e, e ^ code.h().row(2)));
    CHECK_FALSE(is_success(code, e, e ^ code.logical_basis()[0]));
    CHECK_THROWS_AS(is_success(code, e, e ^ BitVector::unit(18, 5)), SyndromeMismatch);
}

TEST_CASE("pipeline exactness on larger code") {
    const auto code = build_code({6, 6, 0});
    for (std::uint64_t k = 0; k < 20000; ++k) {
        const auto e = sample_error(code, {0.1, 77, 3}, k);
        const auto s = code.syndrome(e);
        const auto r = e ^ decode_step_one(code, s);
        REQUIRE(code.syndrome(r).is_zero());
        CHECK(is_success(code, e, final_correction(code, s, homology_class(code, r))));
    }
}

TEST_CASE("mld oracle examples") {
    const auto& code = small_code();
    const auto zero = mld_oracle(code, BitVector(9), 0.1);
    CHECK(zero.best.index == 0);
    double total = 0.0;
    for (double v : zero.class_probs) total += v;
    CHECK(std::abs(total - 1.0) < 1e-12);

    const auto half = mld_oracle(code, code.syndrome(BitVector::unit(18, 3)), 0.5);
    for (double v : half.class_probs) CHECK(std::abs(v - 1.0 / 16) < 1e-12);
    CHECK(half.best.index == 0);

    CHECK_THROWS_AS(mld_oracle(code, BitVector(9), 0.1, 6), TooLarge);
    CHECK_THROWS_AS(mld_oracle(build_code({6, 6, 0}), BitVector(36), 0.1), TooLarge);
}

TEST_CASE("mld oracle matches exhaustive enumeration over all errors") {
    const auto& code = small_code();
    for (double p : {0.01, 0.05, 0.1, 0.3}) {
        for (std::uint32_t sid = 0; sid < 512; sid += 7) {
            const auto s = syndrome_from_id(sid);
            const auto ref = table().posteriors(sid, p);
            double total = 0.0;
            for (double v : ref) total += v;
            if (!(total > 0.0)) continue;  // syndrome not reachable
            const auto got = mld_oracle(code, s, p);
            const auto serial = mld_oracle(code, s, p, kMldMaxGroupLog2, Exec::serial);
            unsigned best = 0;
            for (unsigned c = 1; c < 16; ++c)
                if (ref[c] > ref[best] * (1 + 1e-12)) best = c;
            for (unsigned c = 0; c < 16; ++c) {
                CHECK(got.class_probs[c] == doctest::Approx(ref[c]).epsilon(1e-9));
                CHECK(serial.class_probs[c] == got.class_probs[c]);
            }
            CHECK(got.best.index == best);
        }
    }
}

TEST_CASE("mld posterior of the true class beats the trivial-class assignment") {
    const auto& code = small_code();
    double mld = 0.0, fixed = 0.0;
    constexpr std::uint64_t kTrials = 3000;
    for (std::uint64_t k = 0; k < kTrials; ++k) {
        const auto smp = make_sample(code, sample_error(code, {0.05, 5, 6}, k));
        const auto res = mld_oracle(code, smp.s, 0.05, kMldMaxGroupLog2, Exec::serial);
        mld += res.best.index == smp.label ? 1.0 : 0.0;
        fixed += smp.label == 0 ? 1.0 : 0.0;
    }
    CHECK(mld >= fixed);
}

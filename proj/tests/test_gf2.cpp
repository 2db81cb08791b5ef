#include <sstream>
#include <string_view>
#include <vector>

#include "doctest.h"
#include "hexnet/color_code.hpp"
#include "hexnet/errors.hpp"
#include "hexnet/gf2.hpp"
#include "oracles.hpp"

using namespace hexnet;

namespace {

BitMatrix mat(std::initializer_list<std::string_view> rows) {
    std::vector<std::string_view> v(rows);
    return BitMatrix::from_strings(v);
}

}  // namespace

TEST_CASE("bit vector padding stays clear") {
    auto v = BitVector::ones(70);
    CHECK(v.weight() == 70);
    CHECK((v.words()[1] >> 6) == 0);
    auto w = v ^ BitVector::ones(70);
    CHECK(w.is_zero());
    CHECK(BitVector::from_string("0101").to_string() == "0101");
    CHECK(BitVector::unit(5, 3).first_set() == 3);
    CHECK(BitVector(5).first_set() == 5);
    std::vector<std::size_t> drop{0, 2};
    CHECK(BitVector::from_string("10110").erase(drop).to_string() == "010");
    CHECK(BitVector::from_string("10110").slice(1, 3).to_string() == "011");
}

TEST_CASE("rank examples") {
    CHECK(rank(BitMatrix::identity(3)) == 3);
    CHECK(rank(BitMatrix(4, 7)) == 0);
    const auto code = build_code({3, 3, 0});
    CHECK(rank(code.h()) == 7);
    CHECK(oracle::rank(oracle::to_dense(code.h())) == 7);
}

TEST_CASE("rank agrees with dense elimination on random matrices") {
    oracle::TestRng rng(11);
    for (int t = 0; t < 200; ++t) {
        const std::size_t r = 1 + rng.next() % 12, c = 1 + rng.next() % 80;
        const auto m = rng.matrix(r, c, 0.3);
        CHECK(rank(m) == oracle::rank(oracle::to_dense(m)));
    }
}

TEST_CASE("row_reduce examples") {
    const auto id = row_reduce(BitMatrix::identity(3));
    CHECK(id.reduced == BitMatrix::identity(3));
    CHECK(id.pivot_cols == std::vector<std::size_t>{0, 1, 2});
    CHECK(id.transform == BitMatrix::identity(3));

    const auto dup = row_reduce(mat({"11", "11"}));
    CHECK(dup.reduced == mat({"11", "00"}));
    CHECK(dup.pivot_cols == std::vector<std::size_t>{0});
}

TEST_CASE("row_reduce transform reproduces the reduced form") {
    oracle::TestRng rng(5);
    for (int t = 0; t < 100; ++t) {
        const auto m = rng.matrix(5, 8);
        const auto rr = row_reduce(m);
        const auto product = oracle::multiply(oracle::to_dense(rr.transform), oracle::to_dense(m));
        CHECK(product == oracle::to_dense(rr.reduced));
        for (std::size_t i = 1; i < rr.pivot_cols.size(); ++i) CHECK(rr.pivot_cols[i - 1] < rr.pivot_cols[i]);
        CHECK(rr.pivot_cols.size() == oracle::rank(oracle::to_dense(m)));
        // idempotence
        CHECK(row_reduce(rr.reduced).reduced == rr.reduced);
    }
}

TEST_CASE("solve examples") {
    const auto b = BitVector::from_string("101");
    CHECK(solve(BitMatrix::identity(3), b) == b);
    CHECK(solve(mat({"11"}), BitVector::from_string("1")) == BitVector::from_string("10"));
    CHECK_FALSE(solve(mat({"10", "10"}), BitVector::from_string("10")).has_value());
}

TEST_CASE("solve satisfies the system for consistent right-hand sides") {
    oracle::TestRng rng(9);
    for (int t = 0; t < 200; ++t) {
        const auto m = rng.matrix(6, 10, 0.4);
        const auto x0 = rng.bits(10);
        const auto b = m.multiply(x0);
        const auto x = solve(m, b);
        REQUIRE(x.has_value());
        const auto check = oracle::apply(oracle::to_dense(m), *x);
        for (std::size_t i = 0; i < 6; ++i) CHECK(check[i] == (b.get(i) ? 1 : 0));
        // free variables are zero: x is supported on pivot columns only
        const auto rr = row_reduce(m);
        for (std::size_t c = 0; c < 10; ++c) {
            if (std::find(rr.pivot_cols.begin(), rr.pivot_cols.end(), c) == rr.pivot_cols.end()) {
                CHECK_FALSE(x->get(c));
            }
        }
        CHECK(solve(m, b) == x);
    }
}

TEST_CASE("right pseudo-inverse") {
    CHECK(right_pseudo_inverse(BitMatrix::identity(4)) == BitMatrix::identity(4));
    CHECK_THROWS_AS(right_pseudo_inverse(mat({"101", "101"})), NotFullRank);

    const auto code = build_code({3, 3, 0});
    const auto p = right_pseudo_inverse(code.h_f());
    CHECK(p.rows() == 18);
    CHECK(p.cols() == 7);
    const auto prod = oracle::multiply(oracle::to_dense(code.h_f()), oracle::to_dense(p));
    CHECK(prod == oracle::to_dense(BitMatrix::identity(7)));

    oracle::TestRng rng(3);
    for (int t = 0; t < 50; ++t) {
        const auto m = rng.matrix(5, 12);
        if (oracle::rank(oracle::to_dense(m)) < 5) continue;
        const auto pi = right_pseudo_inverse(m);
        CHECK(oracle::multiply(oracle::to_dense(m), oracle::to_dense(pi)) ==
              oracle::to_dense(BitMatrix::identity(5)));
        for (std::size_t j = 0; j < 5; ++j) {
            BitVector col(12);
            for (std::size_t i = 0; i < 12; ++i) col.set(i, pi.get(i, j));
            CHECK(solve(m, BitVector::unit(5, j)) == col);
        }
    }
}

TEST_CASE("kernel basis") {
    CHECK(kernel_basis(BitMatrix::identity(5)).empty());
    CHECK(kernel_basis(BitMatrix(1, 3)).size() == 3);

    const auto code = build_code({3, 3, 0});
    const auto ker = kernel_basis(code.h());
    CHECK(ker.size() == 11);
    const auto dense = oracle::to_dense(code.h());
    for (const auto& v : ker) CHECK(oracle::is_zero(oracle::apply(dense, v)));
    CHECK(oracle::rank(oracle::to_dense(BitMatrix(ker, 18))) == 11);

    oracle::TestRng rng(21);
    for (int t = 0; t < 100; ++t) {
        const auto m = rng.matrix(1 + rng.next() % 9, 1 + rng.next() % 20, 0.3);
        CHECK(rank(m) + kernel_basis(m).size() == m.cols());
    }
}

TEST_CASE("dual pairing basis") {
    const std::vector<BitVector> std_basis{BitVector::from_string("10"), BitVector::from_string("01")};
    CHECK(dual_pairing_basis(std_basis, std_basis) == std_basis);

    const std::vector<BitVector> zero{BitVector(4)};
    const std::vector<BitVector> space{BitVector::from_string("1100"), BitVector::from_string("0011")};
    CHECK_THROWS_AS(dual_pairing_basis(zero, space), NoDualExists);

    const auto code = build_code({3, 3, 0});
    const auto ker = kernel_basis(code.h());
    const auto duals = dual_pairing_basis(code.logical_basis(), ker);
    REQUIRE(duals.size() == 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(oracle::dot(code.logical_basis()[i], duals[j]) == (i == j ? 1 : 0));
    // each functional lies in span(kernel)
    EchelonBasis span(18);
    for (const auto& k : ker) span.insert(k);
    for (const auto& d : duals) CHECK(span.contains(d));
}

TEST_CASE("matrix text round trip") {
    oracle::TestRng rng(1);
    const auto m = rng.matrix(4, 70);
    std::stringstream ss;
    write_matrix_text(ss, m);
    CHECK(ss.str().substr(0, 5) == "4 70\n");
    CHECK(read_matrix_text(ss) == m);
}

TEST_CASE("operations are pure") {
    oracle::TestRng rng(77);
    const auto m = rng.matrix(6, 9);
    const auto copy = m;
    CHECK(row_reduce(m).reduced == row_reduce(m).reduced);
    CHECK(kernel_basis(m) == kernel_basis(m));
    CHECK(m == copy);
}

#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "hexnet/color_code.hpp"
#include "hexnet/errors.hpp"
#include "oracles.hpp"

using namespace hexnet;

namespace {

// Six triangles around vertex t(r, c), found from the face side: up triangles
// of cells (r,c), (r,c-1), (r-1,c) and down triangles of cells (r,c-1),
// (r-1,c), (r-1,c-1). Stepping below row 0 lands in row L-1 with the column
// shifted back.
std::set<std::size_t> face_support(const LatticeParams& p, long r, long c) {
    const long L = static_cast<long>(p.l_rows), C = static_cast<long>(p.l_cols);
    auto cell = [&](long rr, long cc) {
        if (rr < 0) {
            rr += L;
            cc -= static_cast<long>(p.shift);
        }
        cc = ((cc % C) + C) % C;
        return static_cast<std::size_t>(rr * C + cc);
    };
    return {2 * cell(r, c),         2 * cell(r, c - 1),     2 * cell(r - 1, c),
            2 * cell(r, c - 1) + 1, 2 * cell(r - 1, c) + 1, 2 * cell(r - 1, c - 1) + 1};
}

void check_structure(const LatticeParams& p) {
    CAPTURE(p.label());
    const auto code = build_code(p);
    const std::size_t F = p.l_rows * p.l_cols;
    REQUIRE(code.n() == 2 * F);
    REQUIRE(code.num_faces() == F);

    for (std::size_t f = 0; f < F; ++f) {
        const auto expect = face_support(p, static_cast<long>(f / p.l_cols), static_cast<long>(f % p.l_cols));
        std::set<std::size_t> got;
        for (std::size_t q = 0; q < code.n(); ++q)
            if (code.h().get(f, q)) got.insert(q);
        CHECK(got == expect);
        CHECK(code.h().row(f).weight() == 6);
        CHECK(code.faces()[f].color == static_cast<int>((f % p.l_cols + 3 * p.l_rows - f / p.l_cols) % 3));
    }
    for (std::size_t q = 0; q < code.n(); ++q) {
        std::size_t w = 0;
        for (std::size_t f = 0; f < F; ++f) w += code.h().get(f, q) ? 1 : 0;
        CHECK(w == 3);
        CHECK(code.qubit_faces(q).weight() == 3);
    }
    // proper coloring and balanced color classes
    std::size_t per_color[3] = {0, 0, 0};
    for (const auto& face : code.faces()) ++per_color[face.color];
    CHECK(per_color[0] == F / 3);
    CHECK(per_color[1] == F / 3);
    CHECK(per_color[2] == F / 3);
    for (std::size_t a = 0; a < F; ++a)
        for (std::size_t b = a + 1; b < F; ++b) {
            bool share = false;
            for (std::size_t q = 0; q < code.n(); ++q) share |= code.h().get(a, q) && code.h().get(b, q);
            if (share) CHECK(code.faces()[a].color != code.faces()[b].color);
        }
    // Euler: V - E + F = 0 for the hexagonal lattice, V = n qubits, E = 3V/2
    CHECK(static_cast<long>(code.n()) - static_cast<long>(3 * code.n() / 2) + static_cast<long>(F) == 0);

    const auto dense = oracle::to_dense(code.h());
    CHECK(oracle::rank(dense) == F - 2);
    CHECK(code.h_f().rows() == F - 2);
    CHECK(oracle::rank(oracle::to_dense(code.h_f())) == F - 2);
    CHECK(oracle::multiply(oracle::to_dense(code.h_f()), oracle::to_dense(code.h_f_pinv())) ==
          oracle::to_dense(BitMatrix::identity(F - 2)));
    CHECK(code.n() - 2 * (F - 2) == 4);

    // self-orthogonality
    for (std::size_t f = 0; f < F; ++f) CHECK(oracle::is_zero(oracle::apply(dense, code.h().row(f))));

    // logicals: syndrome-free, independent of rowspace, dual pairing
    REQUIRE(code.logical_basis().size() == 4);
    REQUIRE(code.homology_functionals().size() == 4);
    oracle::Dense stacked = dense;
    for (const auto& l : code.logical_basis()) {
        CHECK(oracle::is_zero(oracle::apply(dense, l)));
        std::vector<int> row(code.n());
        for (std::size_t q = 0; q < code.n(); ++q) row[q] = l.get(q) ? 1 : 0;
        stacked.push_back(row);
    }
    CHECK(oracle::rank(stacked) == F - 2 + 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(oracle::is_zero(oracle::apply(dense, code.homology_functionals()[i])));
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(oracle::dot(code.logical_basis()[i], code.homology_functionals()[j]) == (i == j ? 1 : 0));
        for (std::size_t f = 0; f < F; ++f) CHECK(oracle::dot(code.h().row(f), code.homology_functionals()[i]) == 0);
    }
}

}  // namespace

TEST_CASE("structural invariants across sizes") {
    check_structure({3, 3, 0});
    check_structure({6, 6, 0});
    check_structure({9, 9, 0});
    check_structure({8, 6, 1});
    check_structure({3, 6, 3});
}

TEST_CASE("build_code examples") {
    const auto small = build_code({3, 3, 0});
    CHECK(small.n() == 18);
    CHECK(small.num_faces() == 9);
    CHECK(rank(small.h()) == 7);
    CHECK(small.logical_basis().size() == 4);

    const auto mid = build_code({6, 6, 0});
    CHECK(mid.n() == 72);
    int count[3] = {0, 0, 0};
    for (const auto& f : mid.faces()) ++count[f.color];
    CHECK(count[0] == 12);
    CHECK(count[1] == 12);
    CHECK(count[2] == 12);

    CHECK_THROWS_AS(build_code({4, 3, 0}), InvalidParams);
    CHECK_THROWS_AS(build_code({3, 4, 0}), InvalidParams);
    CHECK_THROWS_AS(build_code({2, 3, 1}), InvalidParams);
}

TEST_CASE("params parse and label") {
    const auto p = LatticeParams::parse("8,6,1");
    CHECK(p == LatticeParams{8, 6, 1});
    CHECK(p.label() == "8,6,1");
    CHECK_THROWS_AS(LatticeParams::parse("8;6"), InvalidParams);
}

TEST_CASE("dependent stabilizer removal") {
    const auto code = build_code({3, 3, 0});
    std::size_t first0 = 99, first1 = 99;
    for (const auto& f : code.faces()) {
        if (f.color == 0 && first0 == 99) first0 = f.id;
        if (f.color == 1 && first1 == 99) first1 = f.id;
    }
    const auto removed = code.removed_faces();
    CHECK(removed.first == std::min(first0, first1));
    CHECK(removed.second == std::max(first0, first1));
    CHECK(code.h_f().rows() == 7);
    CHECK(rank(code.h_f()) == 7);

    // A kept row duplicated over another kept row gives a third dependency.
    BitMatrix corrupted = code.h();
    std::vector<std::size_t> kept;
    for (std::size_t f = 0; f < 9; ++f)
        if (f != removed.first && f != removed.second) kept.push_back(f);
    corrupted.row(kept[1]) = corrupted.row(kept[0]);
    CHECK_THROWS_AS(drop_dependent_stabilizers(corrupted, code.faces()), RankError);
}

TEST_CASE("syndrome examples") {
    const auto code = build_code({3, 3, 0});
    CHECK(code.syndrome(BitVector(18)).is_zero());
    for (std::size_t q = 0; q < 18; ++q) CHECK(code.syndrome(BitVector::unit(18, q)).weight() == 3);
    for (std::size_t f = 0; f < 9; ++f) CHECK(code.syndrome(code.h().row(f)).is_zero());
    CHECK_THROWS_AS((void)code.syndrome(BitVector(17)), LengthMismatch);

    oracle::TestRng rng(4);
    const auto dense = oracle::to_dense(code.h());
    for (int t = 0; t < 500; ++t) {
        const auto e = rng.bits(18);
        const auto s = code.syndrome(e);
        const auto ref = oracle::apply(dense, e);
        for (std::size_t f = 0; f < 9; ++f) CHECK(s.get(f) == (ref[f] == 1));
        CHECK(code.reduced_syndrome(s) == code.h_f().multiply(e));
        CHECK(code.syndrome(e ^ code.h().row(t % 9)) == s);
    }
}

TEST_CASE("logical_operators rejects a matrix with the wrong quotient") {
    CHECK_THROWS_AS(logical_operators(BitMatrix::identity(6)), RankError);
}

TEST_CASE("brute force distance matches exhaustive search") {
    const auto code = build_code({3, 3, 0});
    const auto d = brute_force_distance(code);
    REQUIRE(d.has_value());

    EchelonBasis rows(18);
    for (const auto& r : code.h().row_list()) rows.insert(r);
    std::size_t best = 99;
    for (std::uint32_t x = 1; x < (1U << 18); ++x) {
        BitVector v(18);
        for (std::size_t q = 0; q < 18; ++q)
            if ((x >> q) & 1U) v.set(q);
        if (v.weight() >= best) continue;
        if (code.syndrome(v).is_zero() && !rows.contains(v)) best = v.weight();
    }
    CHECK(*d == best);
    CHECK_FALSE(brute_force_distance(build_code({6, 6, 0})).has_value());
}

TEST_CASE("construction is deterministic") {
    const auto a = build_code({6, 6, 0});
    const auto b = build_code({6, 6, 0});
    CHECK(a.h_f_pinv() == b.h_f_pinv());
    CHECK(a.logical_basis() == b.logical_basis());
    CHECK(a.homology_functionals() == b.homology_functionals());
}

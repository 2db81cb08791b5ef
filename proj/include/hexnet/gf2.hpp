#pragma once

// Dense linear algebra over GF(2).
//
// Vectors are packed into 64-bit words; every operation keeps the padding
// bits above len() cleared, so word-level equality and popcount are exact.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hexnet {

class BitVector {
public:
    using word_type = std::uint64_t;
    static constexpr std::size_t kWordBits = 64;

    BitVector() = default;
    explicit BitVector(std::size_t len) : len_(len), words_(word_count(len), 0) {}

    /// Parses a string of '0'/'1' characters.
    static BitVector from_string(std::string_view bits);
    static BitVector unit(std::size_t len, std::size_t index);
    static BitVector ones(std::size_t len);

    static constexpr std::size_t word_count(std::size_t len) {
        return (len + kWordBits - 1) / kWordBits;
    }

    [[nodiscard]] std::size_t size() const { return len_; }
    [[nodiscard]] std::span<const word_type> words() const { return words_; }
    [[nodiscard]] std::span<word_type> words() { return words_; }

    [[nodiscard]] bool get(std::size_t i) const {
        return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
    }
    void set(std::size_t i, bool value = true) {
        const word_type mask = word_type{1} << (i % kWordBits);
        if (value) {
            words_[i / kWordBits] |= mask;
        } else {
            words_[i / kWordBits] &= ~mask;
        }
    }
    void flip(std::size_t i) { words_[i / kWordBits] ^= word_type{1} << (i % kWordBits); }

    /// In-place XOR; lengths must agree.
    BitVector& operator^=(const BitVector& other);
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }

    [[nodiscard]] std::size_t weight() const;
    [[nodiscard]] bool is_zero() const;
    /// Mod-2 inner product.
    [[nodiscard]] bool dot(const BitVector& other) const;
    /// Index of the lowest set bit, or size() when zero.
    [[nodiscard]] std::size_t first_set() const;

    /// Keeps bits [offset, offset + count).
    [[nodiscard]] BitVector slice(std::size_t offset, std::size_t count) const;
    /// Drops the listed coordinates (must be sorted ascending).
    [[nodiscard]] BitVector erase(std::span<const std::size_t> sorted_indices) const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const BitVector& a, const BitVector& b) = default;

private:
    std::size_t len_ = 0;
    std::vector<word_type> words_;
};

std::ostream& operator<<(std::ostream& os, const BitVector& v);

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVector(cols)) {}
    /// All rows must share one length; `cols` disambiguates an empty row list.
    BitMatrix(std::vector<BitVector> rows, std::size_t cols);

    static BitMatrix identity(std::size_t n);
    static BitMatrix from_strings(std::span<const std::string_view> rows);

    [[nodiscard]] std::size_t rows() const { return rows_.size(); }
    [[nodiscard]] std::size_t cols() const { return cols_; }

    [[nodiscard]] const BitVector& row(std::size_t r) const { return rows_[r]; }
    [[nodiscard]] BitVector& row(std::size_t r) { return rows_[r]; }
    [[nodiscard]] const std::vector<BitVector>& row_list() const { return rows_; }

    [[nodiscard]] bool get(std::size_t r, std::size_t c) const { return rows_[r].get(c); }
    void set(std::size_t r, std::size_t c, bool value = true) { rows_[r].set(c, value); }

    [[nodiscard]] BitMatrix transpose() const;
    /// Returns M·vᵀ (length rows()).
    [[nodiscard]] BitVector multiply(const BitVector& v) const;
    /// Returns the matrix product this · rhs.
    [[nodiscard]] BitMatrix multiply(const BitMatrix& rhs) const;
    [[nodiscard]] BitMatrix without_rows(std::span<const std::size_t> sorted_rows) const;

    [[nodiscard]] bool is_identity() const;

    friend bool operator==(const BitMatrix& a, const BitMatrix& b) = default;

private:
    std::size_t cols_ = 0;
    std::vector<BitVector> rows_;
};

/// Plain-text dump: "rows cols" header, then one '0'/'1' line per row.
void write_matrix_text(std::ostream& os, const BitMatrix& m);
BitMatrix read_matrix_text(std::istream& is);

struct RowReduction {
    BitMatrix reduced;                    // reduced row-echelon form
    std::vector<std::size_t> pivot_cols;  // strictly increasing
    BitMatrix transform;                  // transform · m == reduced
};

/// Gauss-Jordan elimination; the pivot for each column is the lowest-index
/// remaining row with a one there.
RowReduction row_reduce(const BitMatrix& m);

std::size_t rank(const BitMatrix& m);

/// Solves m·xᵀ = bᵀ with every free variable set to zero.
std::optional<BitVector> solve(const BitMatrix& m, const BitVector& b);
std::optional<BitVector> solve(const RowReduction& rr, std::size_t cols, const BitVector& b);

/// P with m·P = I; column j is solve(m, e_j). Throws NotFullRank.
BitMatrix right_pseudo_inverse(const BitMatrix& m);

/// One basis vector per free column, in increasing free-column order.
std::vector<BitVector> kernel_basis(const BitMatrix& m);

/// λ_1..λ_k in span(space) with <primal_i, λ_j> = δ_ij. Throws NoDualExists.
std::vector<BitVector> dual_pairing_basis(std::span<const BitVector> primal,
                                          std::span<const BitVector> space);

/// Incrementally built echelon basis, used for span-membership tests.
class EchelonBasis {
public:
    explicit EchelonBasis(std::size_t len) : len_(len) {}

    /// Reduces v against the basis; returns the residue (zero iff v is in the span).
    [[nodiscard]] BitVector reduce(BitVector v) const;
    [[nodiscard]] bool contains(const BitVector& v) const { return reduce(v).is_zero(); }
    /// Adds v if independent; returns whether it was added.
    bool insert(const BitVector& v);
    [[nodiscard]] std::size_t dimension() const { return basis_.size(); }

private:
    std::size_t len_;
    std::vector<BitVector> basis_;
    std::vector<std::size_t> leads_;
};

}  // namespace hexnet

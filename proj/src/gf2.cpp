#include "hexnet/gf2.hpp"

#include <algorithm>
#include <cassert>
#include <istream>
#include <ostream>
#include <sstream>

#include "hexnet/errors.hpp"

namespace hexnet {

// ---------------------------------------------------------------- BitVector

BitVector BitVector::from_string(std::string_view bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            v.set(i);
        } else if (bits[i] != '0') {
            throw ShapeMismatch("bit string contains a character other than '0'/'1'");
        }
    }
    return v;
}

BitVector BitVector::unit(std::size_t len, std::size_t index) {
    BitVector v(len);
    v.set(index);
    return v;
}

BitVector BitVector::ones(std::size_t len) {
    BitVector v(len);
    for (auto& w : v.words_) w = ~word_type{0};
    if (const std::size_t tail = len % kWordBits; tail != 0) {
        v.words_.back() = (word_type{1} << tail) - 1;
    }
    return v;
}

BitVector& BitVector::operator^=(const BitVector& other) {
    if (other.len_ != len_) {
        throw LengthMismatch("xor of vectors with lengths " + std::to_string(len_) + " and " +
                             std::to_string(other.len_));
    }
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
    return *this;
}

std::size_t BitVector::weight() const {
    std::size_t w = 0;
    for (auto word : words_) w += static_cast<std::size_t>(std::popcount(word));
    return w;
}

bool BitVector::is_zero() const {
    return std::all_of(words_.begin(), words_.end(), [](word_type w) { return w == 0; });
}

bool BitVector::dot(const BitVector& other) const {
    if (other.len_ != len_) {
        throw LengthMismatch("inner product of vectors with lengths " + std::to_string(len_) +
                             " and " + std::to_string(other.len_));
    }
    word_type acc = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & other.words_[i];
    return (std::popcount(acc) & 1) != 0;
}

std::size_t BitVector::first_set() const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (words_[i] != 0) {
            return i * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[i]));
        }
    }
    return len_;
}

BitVector BitVector::slice(std::size_t offset, std::size_t count) const {
    assert(offset + count <= len_);
    BitVector out(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (get(offset + i)) out.set(i);
    }
    return out;
}

BitVector BitVector::erase(std::span<const std::size_t> sorted_indices) const {
    BitVector out(len_ - sorted_indices.size());
    std::size_t skip = 0;
    std::size_t dst = 0;
    for (std::size_t i = 0; i < len_; ++i) {
        if (skip < sorted_indices.size() && sorted_indices[skip] == i) {
            ++skip;
            continue;
        }
        if (get(i)) out.set(dst);
        ++dst;
    }
    return out;
}

std::string BitVector::to_string() const {
    std::string s(len_, '0');
    for (std::size_t i = 0; i < len_; ++i) {
        if (get(i)) s[i] = '1';
    }
    return s;
}

std::ostream& operator<<(std::ostream& os, const BitVector& v) { return os << v.to_string(); }

// ---------------------------------------------------------------- BitMatrix

BitMatrix::BitMatrix(std::vector<BitVector> rows, std::size_t cols)
    : cols_(cols), rows_(std::move(rows)) {
    for (const auto& r : rows_) {
        if (r.size() != cols_) throw ShapeMismatch("row length differs from column count");
    }
}

BitMatrix BitMatrix::identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i);
    return m;
}

BitMatrix BitMatrix::from_strings(std::span<const std::string_view> rows) {
    std::vector<BitVector> out;
    out.reserve(rows.size());
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    for (auto r : rows) out.push_back(BitVector::from_string(r));
    return BitMatrix(std::move(out), cols);
}

BitMatrix BitMatrix::transpose() const {
    BitMatrix t(cols_, rows());
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            if (get(r, c)) t.set(c, r);
        }
    }
    return t;
}

BitVector BitMatrix::multiply(const BitVector& v) const {
    if (v.size() != cols_) {
        throw LengthMismatch("matrix has " + std::to_string(cols_) + " columns, vector length " +
                             std::to_string(v.size()));
    }
    BitVector out(rows());
    for (std::size_t r = 0; r < rows(); ++r) {
        if (rows_[r].dot(v)) out.set(r);
    }
    return out;
}

BitMatrix BitMatrix::multiply(const BitMatrix& rhs) const {
    if (rhs.rows() != cols_) throw ShapeMismatch("inner dimensions of matrix product differ");
    BitMatrix out(rows(), rhs.cols());
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t k = 0; k < cols_; ++k) {
            if (get(r, k)) out.rows_[r] ^= rhs.rows_[k];
        }
    }
    return out;
}

BitMatrix BitMatrix::without_rows(std::span<const std::size_t> sorted_rows) const {
    std::vector<BitVector> kept;
    std::size_t skip = 0;
    for (std::size_t r = 0; r < rows(); ++r) {
        if (skip < sorted_rows.size() && sorted_rows[skip] == r) {
            ++skip;
            continue;
        }
        kept.push_back(rows_[r]);
    }
    return BitMatrix(std::move(kept), cols_);
}

bool BitMatrix::is_identity() const {
    if (rows() != cols_) return false;
    for (std::size_t r = 0; r < rows(); ++r) {
        if (rows_[r] != BitVector::unit(cols_, r)) return false;
    }
    return true;
}

void write_matrix_text(std::ostream& os, const BitMatrix& m) {
    os << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) os << m.row(r).to_string() << '\n';
}

BitMatrix read_matrix_text(std::istream& is) {
    std::size_t rows = 0;
    std::size_t cols = 0;
    if (!(is >> rows >> cols)) throw ShapeMismatch("missing 'rows cols' header");
    std::vector<BitVector> out;
    out.reserve(rows);
    std::string line;
    for (std::size_t r = 0; r < rows; ++r) {
        if (!(is >> line)) throw ShapeMismatch("matrix text ends after " + std::to_string(r) + " rows");
        if (line.size() != cols) {
            throw ShapeMismatch("row " + std::to_string(r) + " has " + std::to_string(line.size()) +
                                " characters, expected " + std::to_string(cols));
        }
        out.push_back(BitVector::from_string(line));
    }
    return BitMatrix(std::move(out), cols);
}

// ---------------------------------------------------------------- algorithms

RowReduction row_reduce(const BitMatrix& m) {
    RowReduction rr{m, {}, BitMatrix::identity(m.rows())};
    auto& a = rr.reduced;
    auto& t = rr.transform;
    std::size_t pivot_row = 0;
    for (std::size_t c = 0; c < m.cols() && pivot_row < m.rows(); ++c) {
        std::size_t found = pivot_row;
        while (found < m.rows() && !a.get(found, c)) ++found;
        if (found == m.rows()) continue;
        if (found != pivot_row) {
            std::swap(a.row(found), a.row(pivot_row));
            std::swap(t.row(found), t.row(pivot_row));
        }
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r != pivot_row && a.get(r, c)) {
                a.row(r) ^= a.row(pivot_row);
                t.row(r) ^= t.row(pivot_row);
            }
        }
        rr.pivot_cols.push_back(c);
        ++pivot_row;
    }
    return rr;
}

std::size_t rank(const BitMatrix& m) {
    EchelonBasis basis(m.cols());
    for (const auto& r : m.row_list()) basis.insert(r);
    return basis.dimension();
}

std::optional<BitVector> solve(const RowReduction& rr, std::size_t cols, const BitVector& b) {
    if (b.size() != rr.transform.rows()) {
        throw LengthMismatch("right-hand side length " + std::to_string(b.size()) +
                             " differs from row count " + std::to_string(rr.transform.rows()));
    }
    const BitVector y = rr.transform.multiply(b);
    const std::size_t r = rr.pivot_cols.size();
    for (std::size_t i = r; i < y.size(); ++i) {
        if (y.get(i)) return std::nullopt;
    }
    BitVector x(cols);
    for (std::size_t i = 0; i < r; ++i) {
        if (y.get(i)) x.set(rr.pivot_cols[i]);
    }
    return x;
}

std::optional<BitVector> solve(const BitMatrix& m, const BitVector& b) {
    return solve(row_reduce(m), m.cols(), b);
}

BitMatrix right_pseudo_inverse(const BitMatrix& m) {
    const auto rr = row_reduce(m);
    if (rr.pivot_cols.size() != m.rows()) {
        throw NotFullRank("rank " + std::to_string(rr.pivot_cols.size()) + " < " +
                          std::to_string(m.rows()) + " rows");
    }
    BitMatrix p(m.cols(), m.rows());
    for (std::size_t j = 0; j < m.rows(); ++j) {
        const auto x = solve(rr, m.cols(), BitVector::unit(m.rows(), j));
        assert(x.has_value());
        for (std::size_t i = 0; i < m.cols(); ++i) {
            if (x->get(i)) p.set(i, j);
        }
    }
    return p;
}

std::vector<BitVector> kernel_basis(const BitMatrix& m) {
    const auto rr = row_reduce(m);
    std::vector<BitVector> basis;
    std::size_t next_pivot = 0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        if (next_pivot < rr.pivot_cols.size() && rr.pivot_cols[next_pivot] == c) {
            ++next_pivot;
            continue;
        }
        BitVector v(m.cols());
        v.set(c);
        for (std::size_t i = 0; i < rr.pivot_cols.size(); ++i) {
            if (rr.reduced.get(i, c)) v.set(rr.pivot_cols[i]);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

std::vector<BitVector> dual_pairing_basis(std::span<const BitVector> primal,
                                          std::span<const BitVector> space) {
    if (primal.empty()) return {};
    const std::size_t len = primal.front().size();
    // pairing[i][a] = <primal_i, space_a>
    BitMatrix pairing(primal.size(), space.size());
    for (std::size_t i = 0; i < primal.size(); ++i) {
        for (std::size_t a = 0; a < space.size(); ++a) {
            if (primal[i].dot(space[a])) pairing.set(i, a);
        }
    }
    const auto rr = row_reduce(pairing);
    if (rr.pivot_cols.size() < primal.size()) {
        throw NoDualExists("pairing matrix has rank " + std::to_string(rr.pivot_cols.size()) +
                           " < " + std::to_string(primal.size()));
    }
    std::vector<BitVector> duals;
    duals.reserve(primal.size());
    for (std::size_t j = 0; j < primal.size(); ++j) {
        const auto coeffs = solve(rr, space.size(), BitVector::unit(primal.size(), j));
        assert(coeffs.has_value());
        BitVector lambda(len);
        for (std::size_t a = 0; a < space.size(); ++a) {
            if (coeffs->get(a)) lambda ^= space[a];
        }
        duals.push_back(std::move(lambda));
    }
    return duals;
}

// ---------------------------------------------------------------- EchelonBasis

BitVector EchelonBasis::reduce(BitVector v) const {
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        if (v.get(leads_[i])) v ^= basis_[i];
    }
    return v;
}

bool EchelonBasis::insert(const BitVector& v) {
    if (v.size() != len_) throw LengthMismatch("vector length differs from basis length");
    BitVector residue = reduce(v);
    const std::size_t lead = residue.first_set();
    if (lead == len_) return false;
    // Keep existing vectors free of the new lead so reduce() stays single-pass.
    for (auto& b : basis_) {
        if (b.get(lead)) b ^= residue;
    }
    basis_.push_back(std::move(residue));
    leads_.push_back(lead);
    return true;
}

}  // namespace hexnet

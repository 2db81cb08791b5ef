#pragma once

// Hexagonal (6.6.6) color code on a torus.
//
// The hexagonal lattice is handled through its dual triangular lattice: face
// f(r, c) of the hexagonal lattice is triangular-lattice vertex t(r, c), and
// each qubit is one triangle. Cell (r, c) holds an up triangle
// {t(r,c), t(r,c+1), t(r+1,c)} and a down triangle {t(r,c+1), t(r+1,c), t(r+1,c+1)}.
// Columns wrap modulo l_cols; row l_rows wraps to row 0 with the column
// shifted by `shift`.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hexnet/gf2.hpp"

namespace hexnet {

struct LatticeParams {
    std::size_t l_rows = 3;
    std::size_t l_cols = 3;
    std::size_t shift = 0;

    /// Throws InvalidParams unless the torus admits a proper face 3-coloring.
    void validate() const;
    [[nodiscard]] std::string label() const;
    /// Parses "R,C,S".
    static LatticeParams parse(const std::string& text);

    friend bool operator==(const LatticeParams&, const LatticeParams&) = default;
};

struct Face {
    std::size_t id = 0;
    int color = 0;  // 0, 1 or 2
    std::array<std::size_t, 6> qubits{};
};

struct StabilizerReduction {
    BitMatrix h_f;
    std::pair<std::size_t, std::size_t> removed;  // face ids, ascending
};

/// Removes the lowest-index face of color 0 and of color 1. Throws RankError
/// if what remains is not of full row rank.
StabilizerReduction drop_dependent_stabilizers(const BitMatrix& h, std::span<const Face> faces);

struct LogicalOperators {
    std::vector<BitVector> basis;        // kernel(H) modulo rowspace(H)
    std::vector<BitVector> functionals;  // dual to basis, drawn from kernel(H)
};

/// Throws RankError if the quotient kernel(H)/rowspace(H) is not 4-dimensional.
LogicalOperators logical_operators(const BitMatrix& h);

class ColorCode {
public:
    static constexpr std::size_t kLogicalQubits = 4;
    static constexpr std::size_t kClasses = 16;

    [[nodiscard]] const LatticeParams& params() const { return params_; }
    [[nodiscard]] std::size_t n() const { return n_; }
    [[nodiscard]] std::size_t num_faces() const { return faces_.size(); }
    [[nodiscard]] std::size_t num_kept() const { return h_f_.rows(); }

    [[nodiscard]] const std::vector<Face>& faces() const { return faces_; }
    [[nodiscard]] const BitMatrix& h() const { return h_; }
    [[nodiscard]] const BitMatrix& h_f() const { return h_f_; }
    [[nodiscard]] const BitMatrix& h_f_pinv() const { return h_f_pinv_; }
    [[nodiscard]] std::pair<std::size_t, std::size_t> removed_faces() const { return removed_; }
    [[nodiscard]] const std::vector<BitVector>& logical_basis() const { return logical_.basis; }
    [[nodiscard]] const std::vector<BitVector>& homology_functionals() const {
        return logical_.functionals;
    }
    [[nodiscard]] std::size_t rank_h() const { return h_f_.rows(); }

    /// s = H·eᵀ, length F. Throws LengthMismatch.
    [[nodiscard]] BitVector syndrome(const BitVector& e) const;
    /// Drops the two removed-face coordinates from a full syndrome.
    [[nodiscard]] BitVector reduced_syndrome(const BitVector& s) const;

    /// Column q of H packed as a length-F vector (the faces touching qubit q).
    [[nodiscard]] const BitVector& qubit_faces(std::size_t q) const { return columns_[q]; }
    /// Column j of the pseudo-inverse, length n.
    [[nodiscard]] const BitVector& pinv_column(std::size_t j) const { return pinv_columns_[j]; }

    friend ColorCode build_code(const LatticeParams& params);

private:
    ColorCode() = default;

    LatticeParams params_;
    std::size_t n_ = 0;
    std::vector<Face> faces_;
    BitMatrix h_;
    std::vector<BitVector> columns_;
    std::pair<std::size_t, std::size_t> removed_{};
    std::array<std::size_t, 2> removed_sorted_{};
    BitMatrix h_f_;
    BitMatrix h_f_pinv_;
    std::vector<BitVector> pinv_columns_;
    LogicalOperators logical_;
};

/// Throws InvalidParams when the coloring constraints fail.
ColorCode build_code(const LatticeParams& params);

/// Minimum weight of a syndrome-free vector outside rowspace(H), by exhaustive
/// search. Returns nullopt when n exceeds 24.
std::optional<std::size_t> brute_force_distance(const ColorCode& code);

}  // namespace hexnet

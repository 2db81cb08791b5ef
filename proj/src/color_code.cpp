#include "hexnet/color_code.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "hexnet/errors.hpp"

namespace hexnet {

void LatticeParams::validate() const {
    if (l_rows < 3 || l_cols < 3) throw InvalidParams("lattice needs at least 3x3 faces, got " + label());
    if (l_cols % 3 != 0) throw InvalidParams("l_cols must be divisible by 3, got " + label());
    if ((l_rows + shift) % 3 != 0) {
        throw InvalidParams("(l_rows + shift) must be divisible by 3, got " + label());
    }
}

std::string LatticeParams::label() const {
    return std::to_string(l_rows) + "," + std::to_string(l_cols) + "," + std::to_string(shift);
}

LatticeParams LatticeParams::parse(const std::string& text) {
    LatticeParams p;
    char c1 = 0;
    char c2 = 0;
    std::istringstream is(text);
    long long r = -1;
    long long c = -1;
    long long s = -1;
    if (!(is >> r >> c1 >> c >> c2 >> s) || c1 != ',' || c2 != ',' || r < 0 || c < 0 || s < 0) {
        throw InvalidParams("expected lattice as R,C,S but got '" + text + "'");
    }
    std::string rest;
    if (is >> rest) throw InvalidParams("trailing characters in lattice '" + text + "'");
    p.l_rows = static_cast<std::size_t>(r);
    p.l_cols = static_cast<std::size_t>(c);
    p.shift = static_cast<std::size_t>(s);
    return p;
}

StabilizerReduction drop_dependent_stabilizers(const BitMatrix& h, std::span<const Face> faces) {
    auto first_of = [&](int color) {
        for (const auto& f : faces) {
            if (f.color == color) return f.id;
        }
        throw RankError("no face of color " + std::to_string(color));
    };
    std::array<std::size_t, 2> removed{first_of(0), first_of(1)};
    std::sort(removed.begin(), removed.end());
    StabilizerReduction out{h.without_rows(removed), {removed[0], removed[1]}};
    const std::size_t r = rank(out.h_f);
    if (r != out.h_f.rows()) {
        throw RankError("H_f has rank " + std::to_string(r) + " but " +
                        std::to_string(out.h_f.rows()) + " rows");
    }
    return out;
}

LogicalOperators logical_operators(const BitMatrix& h) {
    const auto kernel = kernel_basis(h);
    EchelonBasis span(h.cols());
    for (const auto& row : h.row_list()) span.insert(row);
    LogicalOperators out;
    for (const auto& v : kernel) {
        if (span.insert(v)) out.basis.push_back(v);
    }
    if (out.basis.size() != ColorCode::kLogicalQubits) {
        throw RankError("kernel(H)/rowspace(H) has dimension " + std::to_string(out.basis.size()) +
                        ", expected 4");
    }
    out.functionals = dual_pairing_basis(out.basis, kernel);
    return out;
}

ColorCode build_code(const LatticeParams& params) {
    params.validate();
    const std::size_t rows = params.l_rows;
    const std::size_t cols = params.l_cols;

    ColorCode code;
    code.params_ = params;
    code.n_ = 2 * rows * cols;
    const std::size_t num_faces = rows * cols;

    // Triangular-lattice vertex -> face id, applying the torus identifications.
    auto face_of = [&](std::size_t r, std::size_t c) {
        if (r == rows) {
            r = 0;
            c += params.shift;
        }
        return r * cols + (c % cols);
    };

    std::vector<std::vector<std::size_t>> incidence(num_faces);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t up = 2 * (r * cols + c);
            const std::size_t down = up + 1;
            for (auto f : {face_of(r, c), face_of(r, c + 1), face_of(r + 1, c)}) {
                incidence[f].push_back(up);
            }
            for (auto f : {face_of(r, c + 1), face_of(r + 1, c), face_of(r + 1, c + 1)}) {
                incidence[f].push_back(down);
            }
        }
    }

    code.h_ = BitMatrix(num_faces, code.n_);
    code.faces_.reserve(num_faces);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t id = r * cols + c;
            auto& qs = incidence[id];
            std::sort(qs.begin(), qs.end());
            if (qs.size() != 6 || std::adjacent_find(qs.begin(), qs.end()) != qs.end()) {
                throw InvalidParams("face " + std::to_string(id) + " is not a hexagon for " +
                                    params.label());
            }
            Face face;
            face.id = id;
            face.color = static_cast<int>(((c + 3 * rows) - (r % 3)) % 3);
            std::copy(qs.begin(), qs.end(), face.qubits.begin());
            for (auto q : qs) code.h_.set(id, q);
            code.faces_.push_back(face);
        }
    }

    code.columns_ = code.h_.transpose().row_list();

    auto reduction = drop_dependent_stabilizers(code.h_, code.faces_);
    code.h_f_ = std::move(reduction.h_f);
    code.removed_ = reduction.removed;
    code.removed_sorted_ = {reduction.removed.first, reduction.removed.second};
    code.h_f_pinv_ = right_pseudo_inverse(code.h_f_);
    code.pinv_columns_ = code.h_f_pinv_.transpose().row_list();
    code.logical_ = logical_operators(code.h_);
    return code;
}

BitVector ColorCode::syndrome(const BitVector& e) const {
    if (e.size() != n_) {
        throw LengthMismatch("error has length " + std::to_string(e.size()) + ", code has n=" +
                             std::to_string(n_));
    }
    BitVector s(num_faces());
    const auto words = e.words();
    for (std::size_t w = 0; w < words.size(); ++w) {
        for (auto bits = words[w]; bits != 0; bits &= bits - 1) {
            s ^= columns_[w * BitVector::kWordBits + static_cast<std::size_t>(std::countr_zero(bits))];
        }
    }
    return s;
}

BitVector ColorCode::reduced_syndrome(const BitVector& s) const {
    if (s.size() != num_faces()) {
        throw LengthMismatch("syndrome has length " + std::to_string(s.size()) + ", expected " +
                             std::to_string(num_faces()));
    }
    return s.erase(removed_sorted_);
}

std::optional<std::size_t> brute_force_distance(const ColorCode& code) {
    if (code.n() > 24) return std::nullopt;
    const auto kernel = kernel_basis(code.h());
    EchelonBasis stabilizers(code.n());
    for (const auto& row : code.h().row_list()) stabilizers.insert(row);

    std::size_t best = code.n() + 1;
    BitVector v(code.n());
    const std::uint64_t count = std::uint64_t{1} << kernel.size();
    // Gray-code walk over span(kernel).
    for (std::uint64_t i = 1; i < count; ++i) {
        v ^= kernel[static_cast<std::size_t>(std::countr_zero(i))];
        const std::size_t w = v.weight();
        if (w < best && !stabilizers.contains(v)) best = w;
    }
    return best;
}

}  // namespace hexnet

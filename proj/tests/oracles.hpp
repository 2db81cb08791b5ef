#pragma once

// Slow, independent reference implementations used only by the tests.

#include <cstdint>
#include <vector>

#include "hexnet/gf2.hpp"

namespace oracle {

using Dense = std::vector<std::vector<int>>;

inline Dense to_dense(const hexnet::BitMatrix& m) {
    Dense d(m.rows(), std::vector<int>(m.cols(), 0));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) d[r][c] = m.get(r, c) ? 1 : 0;
    return d;
}

// Plain elimination on an int matrix, pivoting on whichever row comes first.
inline std::size_t rank(Dense d) {
    std::size_t r = 0;
    const std::size_t cols = d.empty() ? 0 : d[0].size();
    for (std::size_t c = 0; c < cols && r < d.size(); ++c) {
        std::size_t p = r;
        while (p < d.size() && d[p][c] == 0) ++p;
        if (p == d.size()) continue;
        std::swap(d[p], d[r]);
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (i != r && d[i][c] == 1)
                for (std::size_t k = 0; k < cols; ++k) d[i][k] ^= d[r][k];
        }
        ++r;
    }
    return r;
}

inline Dense multiply(const Dense& a, const Dense& b) {
    const std::size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), k = b.size();
    Dense out(n, std::vector<int>(m, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            int s = 0;
            for (std::size_t t = 0; t < k; ++t) s ^= a[i][t] & b[t][j];
            out[i][j] = s;
        }
    return out;
}

inline std::vector<int> apply(const Dense& a, const hexnet::BitVector& v) {
    std::vector<int> out(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] ^= a[i][j] & (v.get(j) ? 1 : 0);
    return out;
}

inline bool is_zero(const std::vector<int>& v) {
    for (int x : v)
        if (x) return false;
    return true;
}

inline int dot(const hexnet::BitVector& a, const hexnet::BitVector& b) {
    int s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s ^= (a.get(i) && b.get(i)) ? 1 : 0;
    return s;
}

// xorshift64*, deliberately unrelated to the library generator.
struct TestRng {
    std::uint64_t s;
    explicit TestRng(std::uint64_t seed) : s(seed * 2654435761ULL + 1) {}
    std::uint64_t next() {
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        return s * 2685821657736338717ULL;
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    hexnet::BitVector bits(std::size_t n, double p = 0.5) {
        hexnet::BitVector v(n);
        for (std::size_t i = 0; i < n; ++i)
            if (uniform() < p) v.set(i);
        return v;
    }
    hexnet::BitMatrix matrix(std::size_t r, std::size_t c, double p = 0.5) {
        hexnet::BitMatrix m(r, c);
        for (std::size_t i = 0; i < r; ++i) m.row(i) = bits(c, p);
        return m;
    }
};

}  // namespace oracle

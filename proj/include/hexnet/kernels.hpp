#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP variant; both perform the same per-element summation in the same
// order, so their outputs are bit-identical for any thread count.

#include <cstddef>
#include <cstdint>
#include <span>

#include "hexnet/matrix.hpp"

namespace hexnet {

class ColorCode;
class BitVector;

enum class Exec { serial, parallel };

/// Threads available to the parallel variants.
int max_threads();
/// Caps OpenMP threads; values < 1 leave the runtime default.
void set_threads(int threads);

namespace kernels {

/// y = x·wᵀ + bias; x is B×in, w is out×in, y is B×out.
template <class T>
void affine_forward(Exec exec, const Matrix<T>& x, std::span<const T> w, std::span<const T> bias,
                    Matrix<T>& y);

/// dx = dy·w; dy is B×out, w is out×in, dx is B×in.
template <class T>
void affine_backward_input(Exec exec, const Matrix<T>& dy, std::span<const T> w, Matrix<T>& dx);

/// dw = dyᵀ·x (out×in) and db = column sums of dy.
template <class T>
void affine_backward_params(Exec exec, const Matrix<T>& dy, const Matrix<T>& x, std::span<T> dw,
                            std::span<T> db);

/// out[i] = H·errors[i]ᵀ.
void syndromes(Exec exec, const ColorCode& code, std::span<const BitVector> errors,
               std::span<BitVector> out);

}  // namespace kernels
}  // namespace hexnet

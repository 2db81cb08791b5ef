#include "hexnet/kernels.hpp"

#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hexnet/color_code.hpp"
#include "hexnet/errors.hpp"

namespace hexnet {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int threads) {
#ifdef _OPENMP
    if (threads >= 1) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

namespace kernels {
namespace {

using Index = std::ptrdiff_t;

template <class T>
void forward_row(const Matrix<T>& x, std::span<const T> w, std::span<const T> bias, Matrix<T>& y,
                 std::size_t b) {
    const std::size_t in = x.cols;
    const T* xr = x.data.data() + b * in;
    T* yr = y.data.data() + b * y.cols;
    for (std::size_t o = 0; o < y.cols; ++o) {
        const T* wr = w.data() + o * in;
        double acc = 0.0;
        for (std::size_t i = 0; i < in; ++i) acc += static_cast<double>(xr[i]) * wr[i];
        yr[o] = static_cast<T>(acc + bias[o]);
    }
}

template <class T>
void input_grad_row(const Matrix<T>& dy, std::span<const T> w, Matrix<T>& dx, std::size_t b,
                    std::vector<double>& acc) {
    const std::size_t in = dx.cols;
    acc.assign(in, 0.0);
    const T* dyr = dy.data.data() + b * dy.cols;
    for (std::size_t o = 0; o < dy.cols; ++o) {
        const double g = dyr[o];
        if (g == 0.0) continue;
        const T* wr = w.data() + o * in;
        for (std::size_t i = 0; i < in; ++i) acc[i] += g * wr[i];
    }
    T* dxr = dx.data.data() + b * in;
    for (std::size_t i = 0; i < in; ++i) dxr[i] = static_cast<T>(acc[i]);
}

template <class T>
void param_grad_row(const Matrix<T>& dy, const Matrix<T>& x, std::span<T> dw, std::span<T> db,
                    std::size_t o, std::vector<double>& acc) {
    const std::size_t in = x.cols;
    acc.assign(in, 0.0);
    double bias_acc = 0.0;
    for (std::size_t b = 0; b < dy.rows; ++b) {
        const double g = dy(b, o);
        bias_acc += g;
        if (g == 0.0) continue;
        const T* xr = x.data.data() + b * in;
        for (std::size_t i = 0; i < in; ++i) acc[i] += g * xr[i];
    }
    T* dwr = dw.data() + o * in;
    for (std::size_t i = 0; i < in; ++i) dwr[i] = static_cast<T>(acc[i]);
    db[o] = static_cast<T>(bias_acc);
}

}  // namespace

template <class T>
void affine_forward(Exec exec, const Matrix<T>& x, std::span<const T> w, std::span<const T> bias,
                    Matrix<T>& y) {
    const std::size_t out = bias.size();
    if (w.size() != out * x.cols) throw ShapeMismatch("affine weight size differs from out x in");
    y.resize(x.rows, out);
    const auto rows = static_cast<Index>(x.rows);
    if (exec == Exec::serial) {
        for (Index b = 0; b < rows; ++b) forward_row(x, w, bias, y, static_cast<std::size_t>(b));
        return;
    }
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < rows; ++b) forward_row(x, w, bias, y, static_cast<std::size_t>(b));
}

template <class T>
void affine_backward_input(Exec exec, const Matrix<T>& dy, std::span<const T> w, Matrix<T>& dx) {
    if (dy.cols == 0 || w.size() % dy.cols != 0) throw ShapeMismatch("affine weight size mismatch");
    dx.resize(dy.rows, w.size() / dy.cols);
    const auto rows = static_cast<Index>(dy.rows);
    if (exec == Exec::serial) {
        std::vector<double> acc;
        for (Index b = 0; b < rows; ++b) input_grad_row(dy, w, dx, static_cast<std::size_t>(b), acc);
        return;
    }
#pragma omp parallel
    {
        std::vector<double> acc;
#pragma omp for schedule(static)
        for (Index b = 0; b < rows; ++b) input_grad_row(dy, w, dx, static_cast<std::size_t>(b), acc);
    }
}

template <class T>
void affine_backward_params(Exec exec, const Matrix<T>& dy, const Matrix<T>& x, std::span<T> dw,
                            std::span<T> db) {
    if (dy.rows != x.rows || dw.size() != dy.cols * x.cols || db.size() != dy.cols) {
        throw ShapeMismatch("affine gradient buffers do not match activations");
    }
    const auto outs = static_cast<Index>(dy.cols);
    if (exec == Exec::serial) {
        std::vector<double> acc;
        for (Index o = 0; o < outs; ++o) param_grad_row(dy, x, dw, db, static_cast<std::size_t>(o), acc);
        return;
    }
#pragma omp parallel
    {
        std::vector<double> acc;
#pragma omp for schedule(static)
        for (Index o = 0; o < outs; ++o) param_grad_row(dy, x, dw, db, static_cast<std::size_t>(o), acc);
    }
}

void syndromes(Exec exec, const ColorCode& code, std::span<const BitVector> errors,
               std::span<BitVector> out) {
    if (out.size() != errors.size()) throw LengthMismatch("syndrome output count differs from input");
    const auto count = static_cast<Index>(errors.size());
    if (exec == Exec::serial) {
        for (Index i = 0; i < count; ++i) out[i] = code.syndrome(errors[i]);
        return;
    }
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < count; ++i) out[i] = code.syndrome(errors[i]);
}

template void affine_forward<float>(Exec, const Matrix<float>&, std::span<const float>,
                                    std::span<const float>, Matrix<float>&);
template void affine_forward<double>(Exec, const Matrix<double>&, std::span<const double>,
                                     std::span<const double>, Matrix<double>&);
template void affine_backward_input<float>(Exec, const Matrix<float>&, std::span<const float>,
                                           Matrix<float>&);
template void affine_backward_input<double>(Exec, const Matrix<double>&, std::span<const double>,
                                            Matrix<double>&);
template void affine_backward_params<float>(Exec, const Matrix<float>&, const Matrix<float>&,
                                            std::span<float>, std::span<float>);
template void affine_backward_params<double>(Exec, const Matrix<double>&, const Matrix<double>&,
                                             std::span<double>, std::span<double>);

}  // namespace kernels
}  // namespace hexnet

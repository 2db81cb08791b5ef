#include "hexnet/neural.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "hexnet/errors.hpp"
#include "hexnet/rng.hpp"

namespace hexnet {

// ---------------------------------------------------------------- config

void MlpConfig::validate() const {
    if (input_dim == 0) throw ShapeMismatch("input_dim must be positive");
    if (hidden_width == 0) throw ShapeMismatch("hidden_width must be positive");
    if (output_dim != kOutputDim) {
        throw ShapeMismatch("output_dim must be 16, got " + std::to_string(output_dim));
    }
}

nlohmann::json MlpConfig::to_json() const {
    return {{"input_dim", input_dim},
            {"hidden_layers", hidden_layers},
            {"hidden_width", hidden_width},
            {"output_dim", output_dim},
            {"output_batchnorm", output_batchnorm},
            {"norm_position", norm_position == NormPosition::before_activation ? "before_activation"
                                                                               : "after_activation"}};
}

MlpConfig MlpConfig::from_json(const nlohmann::json& j) {
    MlpConfig c;
    c.input_dim = j.at("input_dim").get<std::size_t>();
    c.hidden_layers = j.at("hidden_layers").get<std::size_t>();
    c.hidden_width = j.at("hidden_width").get<std::size_t>();
    c.output_dim = j.at("output_dim").get<std::size_t>();
    c.output_batchnorm = j.at("output_batchnorm").get<bool>();
    const auto pos = j.at("norm_position").get<std::string>();
    if (pos == "before_activation") {
        c.norm_position = NormPosition::before_activation;
    } else if (pos == "after_activation") {
        c.norm_position = NormPosition::after_activation;
    } else {
        throw ConfigError("unknown norm_position '" + pos + "'");
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------- helpers

namespace {

// Calls fn(name, shape, vector&) for every trainable tensor, then (optionally)
// every running-statistics buffer. Works on const and mutable layer lists.
template <class Layers, class Fn>
void visit_tensors(Layers& layers, bool with_buffers, Fn&& fn) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto& layer = layers[l];
        const std::string prefix = "layer" + std::to_string(l) + ".";
        fn(prefix + "weight", std::vector<std::size_t>{layer.out, layer.in}, layer.weight);
        fn(prefix + "bias", std::vector<std::size_t>{layer.out}, layer.bias);
        if (layer.has_norm) {
            fn(prefix + "gamma", std::vector<std::size_t>{layer.out}, layer.gamma);
            fn(prefix + "beta", std::vector<std::size_t>{layer.out}, layer.beta);
        }
    }
    if (!with_buffers) return;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto& layer = layers[l];
        if (!layer.has_norm) continue;
        const std::string prefix = "layer" + std::to_string(l) + ".";
        fn(prefix + "running_mean", std::vector<std::size_t>{layer.out}, layer.running_mean);
        fn(prefix + "running_var", std::vector<std::size_t>{layer.out}, layer.running_var);
    }
}

template <class T>
void relu_inplace(Matrix<T>& m) {
    for (auto& x : m.data) x = x > T{0} ? x : T{0};
}

// Batch normalization of every column of `x` in place.
template <class T>
void batchnorm_forward(Exec exec, Matrix<T>& x, const DenseLayer<T>& layer, Mode mode,
                       const BatchNormParams& bn, DenseLayer<T>* stats_out,
                       typename ForwardCache<T>::Layer* cache) {
    const std::size_t rows = x.rows;
    const std::size_t cols = x.cols;
    if (cache != nullptr) {
        cache->xhat.resize(rows, cols);
        cache->inv_std.assign(cols, 0.0);
    }
    auto column = [&](std::ptrdiff_t jj) {
        const auto j = static_cast<std::size_t>(jj);
        double mean = 0.0;
        double var = 0.0;
        if (mode == Mode::training) {
            for (std::size_t b = 0; b < rows; ++b) mean += x(b, j);
            mean /= static_cast<double>(rows);
            for (std::size_t b = 0; b < rows; ++b) {
                const double d = x(b, j) - mean;
                var += d * d;
            }
            const double unbiased = var / static_cast<double>(rows - 1);
            var /= static_cast<double>(rows);
            if (stats_out != nullptr) {
                auto& rm = stats_out->running_mean[j];
                auto& rv = stats_out->running_var[j];
                rm = static_cast<T>((1.0 - bn.momentum) * rm + bn.momentum * mean);
                rv = static_cast<T>((1.0 - bn.momentum) * rv + bn.momentum * unbiased);
            }
        } else {
            mean = layer.running_mean[j];
            var = layer.running_var[j];
        }
        const double inv_std = 1.0 / std::sqrt(var + bn.epsilon);
        const double g = layer.gamma[j];
        const double beta = layer.beta[j];
        for (std::size_t b = 0; b < rows; ++b) {
            const double xhat = (x(b, j) - mean) * inv_std;
            if (cache != nullptr) cache->xhat(b, j) = static_cast<T>(xhat);
            x(b, j) = static_cast<T>(g * xhat + beta);
        }
        if (cache != nullptr) cache->inv_std[j] = inv_std;
    };
    const auto n = static_cast<std::ptrdiff_t>(cols);
    if (exec == Exec::serial) {
        for (std::ptrdiff_t j = 0; j < n; ++j) column(j);
    } else {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t j = 0; j < n; ++j) column(j);
    }
}

// Replaces dy with dx; writes dγ and dβ.
template <class T>
void batchnorm_backward(Matrix<T>& dy, const DenseLayer<T>& layer, Mode mode,
                        const typename ForwardCache<T>::Layer& cache, std::vector<T>& dgamma,
                        std::vector<T>& dbeta) {
    const std::size_t rows = dy.rows;
    const auto batch = static_cast<double>(rows);
    dgamma.assign(dy.cols, T{0});
    dbeta.assign(dy.cols, T{0});
    for (std::size_t j = 0; j < dy.cols; ++j) {
        double sum_dy = 0.0;
        double sum_dy_xhat = 0.0;
        for (std::size_t b = 0; b < rows; ++b) {
            sum_dy += dy(b, j);
            sum_dy_xhat += static_cast<double>(dy(b, j)) * cache.xhat(b, j);
        }
        dgamma[j] = static_cast<T>(sum_dy_xhat);
        dbeta[j] = static_cast<T>(sum_dy);
        const double scale = layer.gamma[j] * cache.inv_std[j];
        for (std::size_t b = 0; b < rows; ++b) {
            if (mode == Mode::training) {
                dy(b, j) = static_cast<T>(scale / batch *
                                          (batch * dy(b, j) - sum_dy - cache.xhat(b, j) * sum_dy_xhat));
            } else {
                dy(b, j) = static_cast<T>(scale * dy(b, j));
            }
        }
    }
}

template <class T>
Matrix<T> run_forward(const MlpConfig& config, const std::vector<DenseLayer<T>>& layers,
                      const BatchNormParams& bn, Exec exec, Mode mode, const Matrix<T>& inputs,
                      std::vector<DenseLayer<T>>* stats_out, ForwardCache<T>* cache) {
    if (cache != nullptr) cache->layers.assign(layers.size(), {});
    Matrix<T> x = inputs;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        auto* lc = cache != nullptr ? &cache->layers[l] : nullptr;
        auto* stats = stats_out != nullptr ? &(*stats_out)[l] : nullptr;
        Matrix<T> z;
        kernels::affine_forward<T>(exec, x, layer.weight, layer.bias, z);
        if (lc != nullptr) {
            lc->input = std::move(x);
            lc->pre = z;
        }
        if (layer.hidden && config.norm_position == NormPosition::before_activation) {
            batchnorm_forward(exec, z, layer, mode, bn, stats, lc);
            if (lc != nullptr) lc->relu_src = z;
            relu_inplace(z);
        } else if (layer.hidden) {
            if (lc != nullptr) lc->relu_src = z;
            relu_inplace(z);
            batchnorm_forward(exec, z, layer, mode, bn, stats, lc);
        } else if (layer.has_norm) {
            batchnorm_forward(exec, z, layer, mode, bn, stats, lc);
        }
        x = std::move(z);
    }
    return x;
}

void fnv1a(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
}

}  // namespace

// ---------------------------------------------------------------- Mlp

template <class T>
Mlp<T>::Mlp(MlpConfig config, BatchNormParams bn) : config_(config), bn_(bn) {
    config_.validate();
    std::size_t in = config_.input_dim;
    for (std::size_t l = 0; l <= config_.hidden_layers; ++l) {
        DenseLayer<T> layer;
        layer.hidden = l < config_.hidden_layers;
        layer.in = in;
        layer.out = layer.hidden ? config_.hidden_width : config_.output_dim;
        layer.has_norm = layer.hidden || config_.output_batchnorm;
        layer.weight.assign(layer.out * layer.in, T{0});
        layer.bias.assign(layer.out, T{0});
        if (layer.has_norm) {
            layer.gamma.assign(layer.out, T{1});
            layer.beta.assign(layer.out, T{0});
            layer.running_mean.assign(layer.out, T{0});
            layer.running_var.assign(layer.out, T{1});
        }
        in = layer.out;
        layers_.push_back(std::move(layer));
    }
}

template <class T>
Mlp<T> Mlp<T>::init(const MlpConfig& config, std::uint64_t seed, BatchNormParams bn) {
    Mlp model(config, bn);
    constexpr std::uint64_t kInitStream = 0x4d4c5049ULL;
    for (std::size_t l = 0; l < model.layers_.size(); ++l) {
        auto& layer = model.layers_[l];
        CounterRng rng(seed, kInitStream, l);
        const double sigma = std::sqrt(2.0 / static_cast<double>(layer.in + layer.out));
        for (auto& w : layer.weight) w = static_cast<T>(sigma * rng.normal());
        for (auto& g : layer.gamma) g = static_cast<T>(1.0 + 0.02 * rng.normal());
    }
    return model;
}

template <class T>
std::vector<TensorRef<T>> Mlp<T>::parameters() {
    std::vector<TensorRef<T>> out;
    visit_tensors(layers_, false, [&](std::string name, std::vector<std::size_t> shape, std::vector<T>& v) {
        out.push_back({std::move(name), std::move(shape), &v});
    });
    return out;
}

template <class T>
std::vector<TensorRef<T>> Mlp<T>::state_tensors() {
    std::vector<TensorRef<T>> out;
    visit_tensors(layers_, true, [&](std::string name, std::vector<std::size_t> shape, std::vector<T>& v) {
        out.push_back({std::move(name), std::move(shape), &v});
    });
    return out;
}

template <class T>
void Mlp<T>::check_input(const Matrix<T>& inputs) const {
    if (inputs.cols != config_.input_dim) {
        throw ShapeMismatch("model expects input width " + std::to_string(config_.input_dim) +
                            ", got " + std::to_string(inputs.cols));
    }
    if (inputs.rows == 0) throw ShapeMismatch("empty input batch");
}

template <class T>
Matrix<T> Mlp<T>::forward(const Matrix<T>& inputs, ForwardCache<T>* cache) {
    check_input(inputs);
    if (mode_ == Mode::training && inputs.rows < 2) {
        throw DegenerateBatch("training-mode batch statistics need at least 2 rows");
    }
    return run_forward(config_, layers_, bn_, exec_, mode_, inputs,
                       mode_ == Mode::training ? &layers_ : nullptr, cache);
}

template <class T>
Matrix<T> Mlp<T>::infer(const Matrix<T>& inputs) const {
    check_input(inputs);
    return run_forward<T>(config_, layers_, bn_, exec_, Mode::inference, inputs, nullptr, nullptr);
}

template <class T>
typename Mlp<T>::LossGrad Mlp<T>::loss_and_grad(const Matrix<T>& inputs, std::span<const int> labels) {
    ForwardCache<T> cache;
    const Matrix<T> logits = forward(inputs, &cache);
    Matrix<T> grad;
    LossGrad out;
    out.loss = softmax_cross_entropy(logits, labels, &grad);

    std::vector<Gradients<T>> layer_grads(layers_.size());
    for (std::size_t li = layers_.size(); li-- > 0;) {
        const auto& layer = layers_[li];
        auto& lc = cache.layers[li];
        std::vector<T> dgamma;
        std::vector<T> dbeta;
        auto relu_mask = [&](Matrix<T>& g) {
            for (std::size_t i = 0; i < g.data.size(); ++i) {
                if (!(lc.relu_src.data[i] > T{0})) g.data[i] = T{0};
            }
        };
        if (layer.hidden && config_.norm_position == NormPosition::before_activation) {
            relu_mask(grad);
            batchnorm_backward(grad, layer, mode_, lc, dgamma, dbeta);
        } else if (layer.hidden) {
            batchnorm_backward(grad, layer, mode_, lc, dgamma, dbeta);
            relu_mask(grad);
        } else if (layer.has_norm) {
            batchnorm_backward(grad, layer, mode_, lc, dgamma, dbeta);
        }
        std::vector<T> dw(layer.weight.size());
        std::vector<T> db(layer.bias.size());
        kernels::affine_backward_params<T>(exec_, grad, lc.input, dw, db);
        if (li > 0) {
            Matrix<T> dx;
            kernels::affine_backward_input<T>(exec_, grad, layer.weight, dx);
            grad = std::move(dx);
        }
        auto& g = layer_grads[li];
        g.push_back(std::move(dw));
        g.push_back(std::move(db));
        if (layer.has_norm) {
            g.push_back(std::move(dgamma));
            g.push_back(std::move(dbeta));
        }
    }
    for (auto& g : layer_grads) {
        for (auto& t : g) out.grads.push_back(std::move(t));
    }
    return out;
}

template <class T>
std::vector<int> Mlp<T>::predict_class(const Matrix<T>& inputs) const {
    return argmax_rows(infer(inputs));
}

template <class T>
std::uint64_t Mlp<T>::parameter_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    visit_tensors(layers_, true, [&](const std::string&, const std::vector<std::size_t>&, const std::vector<T>& v) {
        fnv1a(h, v.data(), v.size() * sizeof(T));
    });
    return h;
}

template <class T>
double softmax_cross_entropy(const Matrix<T>& logits, std::span<const int> labels, Matrix<T>* grad) {
    if (labels.size() != logits.rows) throw ShapeMismatch("label count differs from batch size");
    if (grad != nullptr) grad->resize(logits.rows, logits.cols);
    const auto batch = static_cast<double>(logits.rows);
    double total = 0.0;
    for (std::size_t b = 0; b < logits.rows; ++b) {
        const int label = labels[b];
        if (label < 0 || static_cast<std::size_t>(label) >= logits.cols) {
            throw ShapeMismatch("label " + std::to_string(label) + " outside [0, " +
                                std::to_string(logits.cols) + ")");
        }
        const auto row = logits.row(b);
        const double peak = *std::max_element(row.begin(), row.end());
        double sum = 0.0;
        for (auto z : row) sum += std::exp(z - peak);
        const double lse = peak + std::log(sum);
        total += lse - row[static_cast<std::size_t>(label)];
        if (grad != nullptr) {
            for (std::size_t k = 0; k < logits.cols; ++k) {
                const double prob = std::exp(row[k] - lse);
                (*grad)(b, k) = static_cast<T>((prob - (static_cast<int>(k) == label ? 1.0 : 0.0)) / batch);
            }
        }
    }
    return total / batch;
}

template <class T>
std::vector<int> argmax_rows(const Matrix<T>& logits) {
    std::vector<int> out(logits.rows, 0);
    for (std::size_t b = 0; b < logits.rows; ++b) {
        const auto row = logits.row(b);
        std::size_t best = 0;
        for (std::size_t k = 1; k < row.size(); ++k) {
            if (row[k] > row[best]) best = k;
        }
        out[b] = static_cast<int>(best);
    }
    return out;
}

// ---------------------------------------------------------------- Adam

template <class T>
AdamState<T> AdamState<T>::for_model(Mlp<T>& model, AdamParams params) {
    AdamState state;
    state.params = params;
    for (const auto& p : model.parameters()) {
        state.m.emplace_back(p.data->size(), T{0});
        state.v.emplace_back(p.data->size(), T{0});
    }
    return state;
}

template <class T>
void adam_step(Mlp<T>& model, AdamState<T>& adam, const Gradients<T>& grads) {
    auto params = model.parameters();
    if (grads.size() != params.size() || adam.m.size() != params.size()) {
        throw ShapeMismatch("gradient list does not match model parameters");
    }
    ++adam.step;
    const auto& hp = adam.params;
    const double t = static_cast<double>(adam.step);
    const double correction1 = 1.0 - std::pow(hp.beta1, t);
    const double correction2 = 1.0 - std::pow(hp.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto& theta = *params[k].data;
        auto& m = adam.m[k];
        auto& v = adam.v[k];
        const auto& g = grads[k];
        if (g.size() != theta.size()) throw ShapeMismatch("gradient shape mismatch for " + params[k].name);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double gi = g[i];
            const double mi = hp.beta1 * m[i] + (1.0 - hp.beta1) * gi;
            const double vi = hp.beta2 * v[i] + (1.0 - hp.beta2) * gi * gi;
            m[i] = static_cast<T>(mi);
            v[i] = static_cast<T>(vi);
            const double m_hat = mi / correction1;
            const double v_hat = vi / correction2;
            theta[i] = static_cast<T>(theta[i] - hp.learning_rate * m_hat / (std::sqrt(v_hat) + hp.epsilon));
        }
    }
}

template class Mlp<float>;
template class Mlp<double>;
template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(Mlp<float>&, AdamState<float>&, const Gradients<float>&);
template void adam_step<double>(Mlp<double>&, AdamState<double>&, const Gradients<double>&);
template double softmax_cross_entropy<float>(const Matrix<float>&, std::span<const int>, Matrix<float>*);
template double softmax_cross_entropy<double>(const Matrix<double>&, std::span<const int>, Matrix<double>*);
template std::vector<int> argmax_rows<float>(const Matrix<float>&);
template std::vector<int> argmax_rows<double>(const Matrix<double>&);

// ---------------------------------------------------------------- checkpoints

namespace {

constexpr char kMagic[4] = {'H', 'N', 'E', 'T'};

class ByteWriter {
public:
    void raw(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
    }
    void f32(float f) { u32(std::bit_cast<std::uint32_t>(f)); }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

    std::string_view take(std::size_t n) {
        if (n > bytes_.size() - pos_) throw CorruptCheckpoint("unexpected end of data");
        auto out = bytes_.substr(pos_, n);
        pos_ += n;
        return out;
    }
    std::uint32_t u32() {
        const auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
        return v;
    }
    std::uint64_t u64() {
        const auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    [[nodiscard]] bool done() const { return pos_ == bytes_.size(); }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

void write_tensor(ByteWriter& w, const std::string& name, const std::vector<std::size_t>& shape,
                  const std::vector<float>& data) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.raw(name.data(), name.size());
    w.u32(static_cast<std::uint32_t>(shape.size()));
    for (auto d : shape) w.u64(d);
    for (float f : data) w.f32(f);
}

void read_tensor(ByteReader& r, const std::string& name, const std::vector<std::size_t>& shape,
                 std::vector<float>& data) {
    const auto name_len = r.u32();
    if (r.take(name_len) != name) throw CorruptCheckpoint("expected tensor '" + name + "'");
    const auto rank = r.u32();
    if (rank != shape.size()) throw CorruptCheckpoint("rank mismatch for tensor '" + name + "'");
    for (auto d : shape) {
        if (r.u64() != d) throw CorruptCheckpoint("shape mismatch for tensor '" + name + "'");
    }
    for (auto& f : data) f = r.f32();
}

}  // namespace

std::string save_checkpoint(const Mlp<float>& model, const AdamState<float>& adam,
                            const nlohmann::json& metadata) {
    nlohmann::json meta = metadata;
    meta["model"] = model.config().to_json();
    meta["batchnorm"] = {{"epsilon", model.batchnorm().epsilon}, {"momentum", model.batchnorm().momentum}};
    meta["adam"] = {{"learning_rate", adam.params.learning_rate},
                    {"beta1", adam.params.beta1},
                    {"beta2", adam.params.beta2},
                    {"epsilon", adam.params.epsilon},
                    {"step", adam.step}};
    meta["rng_algorithm"] = std::string(kRngAlgorithm);
    const std::string meta_text = meta.dump();

    ByteWriter w;
    w.raw(kMagic, sizeof kMagic);
    w.u32(kCheckpointVersion);
    w.u64(meta_text.size());
    w.raw(meta_text.data(), meta_text.size());

    std::vector<std::tuple<std::string, std::vector<std::size_t>, const std::vector<float>*>> tensors;
    auto collect = [&](const std::string& prefix) {
        return [&tensors, prefix](const std::string& name, const std::vector<std::size_t>& shape,
                                  const std::vector<float>& v) {
            tensors.emplace_back(prefix + name, shape, &v);
        };
    };
    visit_tensors(model.layers(), true, collect(""));
    std::size_t k = 0;
    visit_tensors(model.layers(), false,
                  [&](const std::string& name, const std::vector<std::size_t>& shape, const std::vector<float>&) {
                      if (k >= adam.m.size()) throw ShapeMismatch("optimizer state does not match model");
                      tensors.emplace_back("adam.m." + name, shape, &adam.m[k]);
                      tensors.emplace_back("adam.v." + name, shape, &adam.v[k]);
                      ++k;
                  });
    w.u32(static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, shape, data] : tensors) write_tensor(w, name, shape, *data);
    return w.take();
}

Checkpoint load_checkpoint(std::string_view bytes) {
    ByteReader r(bytes);
    if (r.take(4) != std::string_view(kMagic, 4)) throw CorruptCheckpoint("bad magic");
    if (const auto version = r.u32(); version != kCheckpointVersion) {
        throw CorruptCheckpoint("unsupported version " + std::to_string(version));
    }
    const auto meta_len = r.u64();
    if (meta_len > bytes.size()) throw CorruptCheckpoint("metadata length exceeds file size");
    nlohmann::json meta;
    MlpConfig config;
    BatchNormParams bn;
    AdamParams adam_params;
    std::uint64_t step = 0;
    try {
        meta = nlohmann::json::parse(r.take(static_cast<std::size_t>(meta_len)));
        config = MlpConfig::from_json(meta.at("model"));
        bn.epsilon = meta.at("batchnorm").at("epsilon").get<double>();
        bn.momentum = meta.at("batchnorm").at("momentum").get<double>();
        const auto& a = meta.at("adam");
        adam_params = {a.at("learning_rate").get<double>(), a.at("beta1").get<double>(),
                       a.at("beta2").get<double>(), a.at("epsilon").get<double>()};
        step = a.at("step").get<std::uint64_t>();
    } catch (const CorruptCheckpoint&) {
        throw;
    } catch (const std::exception& e) {
        throw CorruptCheckpoint(std::string("bad metadata: ") + e.what());
    }

    Checkpoint ck{Mlp<float>(config, bn), {}, std::move(meta)};
    ck.adam = AdamState<float>::for_model(ck.model, adam_params);
    ck.adam.step = step;

    const auto count = r.u32();
    std::size_t expected = 0;
    visit_tensors(ck.model.layers(), true,
                  [&](const std::string&, const std::vector<std::size_t>&, std::vector<float>&) { ++expected; });
    expected += 2 * ck.adam.m.size();
    if (count != expected) throw CorruptCheckpoint("tensor count " + std::to_string(count) + " != " + std::to_string(expected));

    visit_tensors(ck.model.layers(), true,
                  [&](const std::string& name, const std::vector<std::size_t>& shape, std::vector<float>& v) {
                      read_tensor(r, name, shape, v);
                  });
    std::size_t k = 0;
    visit_tensors(ck.model.layers(), false,
                  [&](const std::string& name, const std::vector<std::size_t>& shape, std::vector<float>&) {
                      read_tensor(r, "adam.m." + name, shape, ck.adam.m[k]);
                      read_tensor(r, "adam.v." + name, shape, ck.adam.v[k]);
                      ++k;
                  });
    if (!r.done()) throw CorruptCheckpoint("trailing bytes after last tensor");
    ck.model.set_mode(Mode::inference);
    return ck;
}

void write_file_atomic(const std::string& path, std::string_view bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open '" + tmp + "' for writing");
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!os) throw Error("write to '" + tmp + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace hexnet

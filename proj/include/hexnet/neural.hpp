#pragma once

// Fully-connected classifier with 1D batch normalization after every affine
// layer, rectifier activations, softmax cross-entropy, and Adam.
//
// Layer stack, for each hidden layer:
//   before_activation:  affine -> batch norm -> relu
//   after_activation:   affine -> relu -> batch norm
// and for the output layer: affine -> batch norm (optional) -> logits.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hexnet/kernels.hpp"
#include "hexnet/matrix.hpp"

namespace hexnet {

enum class NormPosition { before_activation, after_activation };
enum class Mode { training, inference };

struct MlpConfig {
    static constexpr std::size_t kOutputDim = 16;

    std::size_t input_dim = 0;
    std::size_t hidden_layers = 0;
    std::size_t hidden_width = 1;
    std::size_t output_dim = kOutputDim;
    bool output_batchnorm = true;
    NormPosition norm_position = NormPosition::before_activation;

    void validate() const;
    [[nodiscard]] nlohmann::json to_json() const;
    static MlpConfig from_json(const nlohmann::json& j);

    friend bool operator==(const MlpConfig&, const MlpConfig&) = default;
};

struct BatchNormParams {
    double epsilon = 1e-5;
    double momentum = 0.1;  // running = (1 - momentum)·running + momentum·batch
};

template <class T>
struct DenseLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    bool hidden = true;
    bool has_norm = true;
    std::vector<T> weight;  // out × in, row-major
    std::vector<T> bias;
    std::vector<T> gamma;
    std::vector<T> beta;
    std::vector<T> running_mean;
    std::vector<T> running_var;
};

/// Named view of one trainable tensor or buffer.
template <class T>
struct TensorRef {
    std::string name;
    std::vector<std::size_t> shape;
    std::vector<T>* data;
};

template <class T>
using Gradients = std::vector<std::vector<T>>;

/// Activations kept by a training-mode forward pass for the backward pass.
template <class T>
struct ForwardCache {
    struct Layer {
        Matrix<T> input;
        Matrix<T> pre;       // affine output
        Matrix<T> relu_src;  // values the rectifier saw
        Matrix<T> xhat;      // normalized values
        std::vector<double> inv_std;
    };
    std::vector<Layer> layers;
};

template <class T>
class Mlp {
public:
    explicit Mlp(MlpConfig config, BatchNormParams bn = {});

    /// Xavier-normal weights, zero biases, γ ~ N(1, 0.02²), β = 0.
    static Mlp init(const MlpConfig& config, std::uint64_t seed, BatchNormParams bn = {});

    [[nodiscard]] const MlpConfig& config() const { return config_; }
    [[nodiscard]] const BatchNormParams& batchnorm() const { return bn_; }
    [[nodiscard]] std::vector<DenseLayer<T>>& layers() { return layers_; }
    [[nodiscard]] const std::vector<DenseLayer<T>>& layers() const { return layers_; }

    [[nodiscard]] Mode mode() const { return mode_; }
    void set_mode(Mode mode) { mode_ = mode; }
    void set_exec(Exec exec) { exec_ = exec; }

    /// Trainable tensors in declared order: per layer weight, bias, [gamma, beta].
    std::vector<TensorRef<T>> parameters();
    /// Parameters followed by batch-norm running statistics; checkpoint order.
    std::vector<TensorRef<T>> state_tensors();

    /// Training mode uses batch statistics and updates the running
    /// statistics; inference mode uses the running statistics.
    /// Throws ShapeMismatch, or DegenerateBatch for fewer than 2 rows in training mode.
    Matrix<T> forward(const Matrix<T>& inputs, ForwardCache<T>* cache = nullptr);

    /// Inference-mode logits; never touches the model.
    [[nodiscard]] Matrix<T> infer(const Matrix<T>& inputs) const;

    struct LossGrad {
        double loss = 0.0;
        Gradients<T> grads;  // aligned with parameters()
    };
    /// Mean softmax cross-entropy and its gradient. Runs a training-mode
    /// forward pass when in training mode (updating running statistics).
    LossGrad loss_and_grad(const Matrix<T>& inputs, std::span<const int> labels);

    /// Argmax of inference logits; ties go to the lowest index.
    [[nodiscard]] std::vector<int> predict_class(const Matrix<T>& inputs) const;

    /// FNV-1a over the raw bytes of every state tensor.
    [[nodiscard]] std::uint64_t parameter_hash() const;

private:
    void check_input(const Matrix<T>& inputs) const;

    MlpConfig config_;
    BatchNormParams bn_;
    std::vector<DenseLayer<T>> layers_;
    Mode mode_ = Mode::training;
    Exec exec_ = Exec::parallel;
};

/// Mean of −log softmax(logits)[label]; optionally writes d loss / d logits.
template <class T>
double softmax_cross_entropy(const Matrix<T>& logits, std::span<const int> labels,
                             Matrix<T>* grad = nullptr);

/// Argmax per row, lowest index on ties.
template <class T>
std::vector<int> argmax_rows(const Matrix<T>& logits);

struct AdamParams {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

template <class T>
struct AdamState {
    AdamParams params;
    std::uint64_t step = 0;
    std::vector<std::vector<T>> m;
    std::vector<std::vector<T>> v;

    static AdamState for_model(Mlp<T>& model, AdamParams params = {});
};

/// One bias-corrected Adam update of every parameter.
template <class T>
void adam_step(Mlp<T>& model, AdamState<T>& adam, const Gradients<T>& grads);

// ---------------------------------------------------------------- checkpoints

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    Mlp<float> model;
    AdamState<float> adam;
    nlohmann::json metadata;
};

/// Layout: "HNET", u32 version, u64 metadata length, metadata JSON, u32 tensor
/// count, then per tensor: u32 name length, name, u32 rank, u64 dims, and
/// little-endian f32 data. Adam moments follow the model tensors.
std::string save_checkpoint(const Mlp<float>& model, const AdamState<float>& adam,
                            const nlohmann::json& metadata);
/// Throws CorruptCheckpoint on bad magic, version, shapes or length.
Checkpoint load_checkpoint(std::string_view bytes);

/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::string& path, std::string_view bytes);
std::string read_file(const std::string& path);

}  // namespace hexnet

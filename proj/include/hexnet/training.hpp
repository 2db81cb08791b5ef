#pragma once

// Progressive training: one model trained over an increasing ladder of
// physical error rates, never reinitialized between rates.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hexnet/channel.hpp"
#include "hexnet/color_code.hpp"
#include "hexnet/neural.hpp"

namespace hexnet {

/// Bit-flip threshold of the hexagonal color code under optimal decoding.
inline constexpr double kTheoreticalThreshold = 0.1097;
/// Highest rate accepted without `allow_above_threshold`: the threshold
/// rounded to the 0.01 ladder grid.
inline constexpr double kMaxDefaultTrainingRate = 0.11;

struct TrainPlan {
    LatticeParams code;
    InputMode approach = InputMode::syndrome_only;
    std::vector<double> error_rate_ladder{0.05, 0.06, 0.07, 0.08, 0.09, 0.10, 0.11};
    std::uint64_t samples_per_rate = 1'000'000;
    std::size_t batch_size = 500;
    double learning_rate = 0.001;
    std::uint64_t seed = 1;
    std::size_t hidden_layers = 1;
    std::size_t hidden_factor = 2;  // hidden width = factor × syndrome length
    bool output_batchnorm = true;
    NormPosition norm_position = NormPosition::before_activation;
    std::uint64_t validation_samples = 100'000;
    bool allow_above_threshold = false;
    std::size_t log_every = 100;  // steps per history row
    std::size_t prefetch = 2;     // batches produced ahead on a worker thread; 0 disables
    std::string checkpoint_dir;   // empty: no files written

    /// Throws ConfigError.
    void validate() const;
    [[nodiscard]] MlpConfig model_config(const ColorCode& code) const;
    [[nodiscard]] std::uint64_t total_samples() const {
        return samples_per_rate * error_rate_ladder.size();
    }

    [[nodiscard]] nlohmann::json to_json() const;
    /// Throws ConfigError naming the first missing or ill-typed field.
    static TrainPlan from_json(const nlohmann::json& j);
    /// Parses JSON text; syntax errors report line and column.
    static TrainPlan parse(const std::string& text);
};

/// Table hyperparameters for a size label d ∈ {6, 8, 9, 12}, approach 1 or 2.
TrainPlan table_plan(int d, int approach);
/// Lattice used for a size label d.
LatticeParams lattice_for_size_label(int d);

struct HistoryRow {
    std::uint64_t step = 0;
    double p_err = 0.0;
    double loss = 0.0;
    std::optional<double> val_accuracy;
};

struct RateSummary {
    double p_err = 0.0;
    std::uint64_t samples = 0;
    double final_loss = 0.0;  // mean over the last history window
    double val_accuracy = 0.0;
    bool saturated = false;
    std::uint64_t hash_at_start = 0;
    std::uint64_t hash_at_end = 0;
    std::string checkpoint;
};

struct TrainResult {
    Mlp<float> model;
    AdamState<float> adam;
    std::vector<HistoryRow> history;
    std::vector<RateSummary> rates;
    std::uint64_t samples_consumed = 0;
    double initial_loss = 0.0;  // first logged loss
};

using ProgressFn = std::function<void(const std::string&)>;

/// Trains progressively. With `resume`, continues from the checkpoint's model
/// and optimizer state at the first ladder rate it has not completed.
/// Throws TrainingDiverged on a non-finite loss.
TrainResult train_progressive(const TrainPlan& plan, const std::optional<Checkpoint>& resume = {},
                              const ProgressFn& progress = {});

/// An independent, freshly initialized model per ladder rate.
std::vector<TrainResult> train_fresh_per_rate(const TrainPlan& plan, const ProgressFn& progress = {});

/// True when the mean loss of the last `window` entries improved on the
/// window before it by less than rel_tol (relative). Advisory only.
bool saturation_monitor(std::span<const double> losses, std::size_t window, double rel_tol);

/// Fraction of `count` fresh samples classified correctly (inference mode).
double validation_accuracy(const Mlp<float>& model, const ColorCode& code, InputMode mode,
                           const NoiseParams& noise, std::uint64_t count);

void write_history_csv(std::ostream& os, std::span<const HistoryRow> history);

/// Metadata block stored in training checkpoints.
nlohmann::json checkpoint_metadata(const TrainPlan& plan, std::size_t completed_rates,
                                   std::span<const RateSummary> rates);

/// Stream ids for training and validation data at ladder position k.
constexpr std::uint64_t training_stream(std::size_t k) { return 1 + k; }
constexpr std::uint64_t validation_stream(std::size_t k) { return 1'000'000 + k; }

}  // namespace hexnet

#include "hexnet/training.hpp"

#include <cmath>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "hexnet/errors.hpp"
#include "hexnet/rng.hpp"
#include "hexnet/version.hpp"

namespace hexnet {

// ---------------------------------------------------------------- plan

void TrainPlan::validate() const {
    code.validate();
    if (error_rate_ladder.empty()) throw ConfigError("error_rate_ladder is empty");
    for (std::size_t i = 0; i < error_rate_ladder.size(); ++i) {
        const double p = error_rate_ladder[i];
        if (!(p > 0.0 && p < 0.5)) throw ConfigError("ladder rates must lie in (0, 0.5)");
        if (i > 0 && !(p > error_rate_ladder[i - 1])) {
            throw ConfigError("error_rate_ladder must be strictly increasing");
        }
        if (!allow_above_threshold && p > kMaxDefaultTrainingRate + 1e-12) {
            std::ostringstream msg;
            msg << "rate " << p << " is above the theoretical threshold " << kTheoreticalThreshold
                << "; set allow_above_threshold to train there anyway";
            throw ConfigError(msg.str());
        }
    }
    if (batch_size < 2) throw ConfigError("batch_size must be at least 2 (batch statistics)");
    if (samples_per_rate < batch_size) throw ConfigError("samples_per_rate is smaller than batch_size");
    if (samples_per_rate % batch_size == 1) {
        throw ConfigError("samples_per_rate leaves a final batch of one sample");
    }
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (hidden_factor == 0) throw ConfigError("hidden_factor must be positive");
    if (log_every == 0) throw ConfigError("log_every must be positive");
}

MlpConfig TrainPlan::model_config(const ColorCode& c) const {
    MlpConfig m;
    m.input_dim = input_width(c, approach);
    m.hidden_layers = hidden_layers;
    m.hidden_width = hidden_factor * c.num_faces();
    m.output_batchnorm = output_batchnorm;
    m.norm_position = norm_position;
    return m;
}

nlohmann::json TrainPlan::to_json() const {
    return {{"code", {code.l_rows, code.l_cols, code.shift}},
            {"approach", approach_of(approach)},
            {"error_rate_ladder", error_rate_ladder},
            {"samples_per_rate", samples_per_rate},
            {"batch_size", batch_size},
            {"learning_rate", learning_rate},
            {"seed", seed},
            {"hidden_layers", hidden_layers},
            {"hidden_factor", hidden_factor},
            {"output_batchnorm", output_batchnorm},
            {"norm_position", norm_position == NormPosition::before_activation ? "before_activation"
                                                                               : "after_activation"},
            {"validation_samples", validation_samples},
            {"allow_above_threshold", allow_above_threshold},
            {"log_every", log_every},
            {"prefetch", prefetch},
            {"checkpoint_dir", checkpoint_dir}};
}

namespace {

template <class T>
T required(const nlohmann::json& j, const char* field) {
    if (!j.contains(field)) throw ConfigError(std::string("missing field '") + field + "'");
    try {
        return j.at(field).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("field '") + field + "' has the wrong type: " + e.what());
    }
}

template <class T>
T optional_field(const nlohmann::json& j, const char* field, T fallback) {
    return j.contains(field) ? required<T>(j, field) : fallback;
}

}  // namespace

TrainPlan TrainPlan::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("plan must be a JSON object");
    TrainPlan p;
    const auto code = required<std::vector<std::size_t>>(j, "code");
    if (code.size() != 3) throw ConfigError("field 'code' must be [l_rows, l_cols, shift]");
    p.code = {code[0], code[1], code[2]};
    p.approach = input_mode_from_approach(required<int>(j, "approach"));
    p.error_rate_ladder = required<std::vector<double>>(j, "error_rate_ladder");
    p.samples_per_rate = required<std::uint64_t>(j, "samples_per_rate");
    p.batch_size = required<std::size_t>(j, "batch_size");
    p.learning_rate = required<double>(j, "learning_rate");
    p.seed = required<std::uint64_t>(j, "seed");
    p.hidden_layers = required<std::size_t>(j, "hidden_layers");
    p.hidden_factor = required<std::size_t>(j, "hidden_factor");
    p.output_batchnorm = optional_field<bool>(j, "output_batchnorm", p.output_batchnorm);
    const auto pos = optional_field<std::string>(j, "norm_position", "before_activation");
    if (pos == "before_activation") {
        p.norm_position = NormPosition::before_activation;
    } else if (pos == "after_activation") {
        p.norm_position = NormPosition::after_activation;
    } else {
        throw ConfigError("field 'norm_position' must be before_activation or after_activation");
    }
    p.validation_samples = optional_field<std::uint64_t>(j, "validation_samples", p.validation_samples);
    p.allow_above_threshold = optional_field<bool>(j, "allow_above_threshold", p.allow_above_threshold);
    p.log_every = optional_field<std::size_t>(j, "log_every", p.log_every);
    p.prefetch = optional_field<std::size_t>(j, "prefetch", p.prefetch);
    p.checkpoint_dir = optional_field<std::string>(j, "checkpoint_dir", p.checkpoint_dir);
    p.validate();
    return p;
}

TrainPlan TrainPlan::parse(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigError("plan syntax error at line " + std::to_string(line) + ", column " +
                          std::to_string(column) + ": " + e.what());
    }
    return from_json(j);
}

LatticeParams lattice_for_size_label(int d) {
    switch (d) {
        case 6: return {6, 6, 0};
        case 8: return {8, 6, 1};
        case 9: return {9, 9, 0};
        case 12: return {12, 12, 0};
        default: throw ConfigError("no lattice for size label " + std::to_string(d));
    }
}

TrainPlan table_plan(int d, int approach) {
    struct Row {
        int d;
        std::size_t h;
        std::size_t f;
        std::size_t b;
        std::uint64_t t;
    };
    static constexpr Row kApproach1[] = {
        {6, 2, 2, 500, 20'000'000}, {8, 3, 5, 750, 40'000'000},
        {9, 4, 5, 750, 40'000'000}, {12, 7, 10, 2500, 100'000'000}};
    static constexpr Row kApproach2[] = {
        {6, 1, 1, 500, 20'000'000}, {8, 2, 3, 750, 40'000'000},
        {9, 3, 4, 750, 40'000'000}, {12, 6, 10, 2500, 100'000'000}};
    const auto mode = input_mode_from_approach(approach);
    const auto& table = approach == 1 ? kApproach1 : kApproach2;
    for (const auto& row : table) {
        if (row.d != d) continue;
        TrainPlan p;
        p.code = lattice_for_size_label(d);
        p.approach = mode;
        p.hidden_layers = row.h;
        p.hidden_factor = row.f;
        p.batch_size = row.b;
        p.samples_per_rate = row.t;
        p.learning_rate = 0.001;
        return p;
    }
    throw ConfigError("no hyperparameters for size label " + std::to_string(d));
}

// ---------------------------------------------------------------- helpers

bool saturation_monitor(std::span<const double> losses, std::size_t window, double rel_tol) {
    if (window < 2) throw ConfigError("saturation window must be at least 2");
    if (losses.size() < 2 * window) return false;
    const auto last = losses.subspan(losses.size() - window);
    const auto prev = losses.subspan(losses.size() - 2 * window, window);
    const double m1 = std::accumulate(last.begin(), last.end(), 0.0) / static_cast<double>(window);
    const double m0 = std::accumulate(prev.begin(), prev.end(), 0.0) / static_cast<double>(window);
    if (m0 == 0.0) return true;
    return (m0 - m1) / std::abs(m0) < rel_tol;
}

double validation_accuracy(const Mlp<float>& model, const ColorCode& code, InputMode mode,
                           const NoiseParams& noise, std::uint64_t count) {
    if (count == 0) return 0.0;
    constexpr std::uint64_t kChunk = 4096;
    std::uint64_t correct = 0;
    for (std::uint64_t first = 0; first < count; first += kChunk) {
        const auto n = static_cast<std::size_t>(std::min(kChunk, count - first));
        const Batch batch = make_batch(code, noise, first, n, mode);
        const auto predicted = model.predict_class(batch.inputs);
        for (std::size_t i = 0; i < n; ++i) correct += predicted[i] == batch.labels[i] ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(count);
}

void write_history_csv(std::ostream& os, std::span<const HistoryRow> history) {
    os << "step,p_err,loss,val_accuracy\n";
    os << std::setprecision(10);
    for (const auto& row : history) {
        os << row.step << ',' << row.p_err << ',' << row.loss << ',';
        if (row.val_accuracy) os << *row.val_accuracy;
        os << '\n';
    }
}

nlohmann::json checkpoint_metadata(const TrainPlan& plan, std::size_t completed_rates,
                                   std::span<const RateSummary> rates) {
    nlohmann::json summaries = nlohmann::json::array();
    for (const auto& r : rates) {
        summaries.push_back({{"p_err", r.p_err},
                             {"samples", r.samples},
                             {"final_loss", r.final_loss},
                             {"val_accuracy", r.val_accuracy},
                             {"saturated", r.saturated}});
    }
    const auto plan_json = plan.to_json();
    return {{"plan", plan_json},
            {"code", {plan.code.l_rows, plan.code.l_cols, plan.code.shift}},
            {"approach", approach_of(plan.approach)},
            {"seed", plan.seed},
            {"config_hash", config_hash(plan_json.dump())},
            {"version", std::string(kVersion)},
            {"completed_rates", completed_rates},
            {"history", summaries}};
}

namespace {

// Produces the batches of one ladder rate on a worker thread, in order, into a
// bounded queue.
class BatchProducer {
public:
    BatchProducer(const ColorCode& code, NoiseParams noise, std::size_t batch_size,
                  std::uint64_t total, InputMode mode, std::size_t capacity)
        : capacity_(capacity == 0 ? 1 : capacity) {
        worker_ = std::thread([=, this, &code] {
            for (std::uint64_t first = 0; first < total; first += batch_size) {
                const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(batch_size, total - first));
                Batch b = make_batch(code, noise, first, n, mode, Exec::serial);
                std::unique_lock lock(mutex_);
                not_full_.wait(lock, [&] { return stop_ || queue_.size() < capacity_; });
                if (stop_) return;
                queue_.push_back(std::move(b));
                not_empty_.notify_one();
            }
        });
    }

    BatchProducer(const BatchProducer&) = delete;
    BatchProducer& operator=(const BatchProducer&) = delete;

    ~BatchProducer() {
        {
            std::lock_guard lock(mutex_);
            stop_ = true;
        }
        not_full_.notify_all();
        worker_.join();
    }

    Batch pop() {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [&] { return !queue_.empty(); });
        Batch b = std::move(queue_.front());
        queue_.pop_front();
        not_full_.notify_one();
        return b;
    }

private:
    std::size_t capacity_;
    std::mutex mutex_;
    std::condition_variable not_full_;
    std::condition_variable not_empty_;
    std::deque<Batch> queue_;
    bool stop_ = false;
    std::thread worker_;
};

std::string rate_tag(double p) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << p;
    return os.str();
}

struct RateRun {
    RateSummary summary;
    std::vector<double> losses;
};

// Trains `model` on one ladder rate and appends history rows.
RateRun train_one_rate(Mlp<float>& model, AdamState<float>& adam, const ColorCode& code,
                       const TrainPlan& plan, std::size_t k, std::vector<HistoryRow>& history,
                       const ProgressFn& progress) {
    const double p = plan.error_rate_ladder[k];
    const NoiseParams noise{p, plan.seed, training_stream(k)};
    RateRun run;
    run.summary.p_err = p;
    run.summary.hash_at_start = model.parameter_hash();
    model.set_mode(Mode::training);

    std::optional<BatchProducer> producer;
    if (plan.prefetch > 0) {
        producer.emplace(code, noise, plan.batch_size, plan.samples_per_rate, plan.approach, plan.prefetch);
    }
    double window_sum = 0.0;
    std::size_t window_steps = 0;
    for (std::uint64_t first = 0; first < plan.samples_per_rate; first += plan.batch_size) {
        const auto n = static_cast<std::size_t>(
            std::min<std::uint64_t>(plan.batch_size, plan.samples_per_rate - first));
        const Batch batch = producer ? producer->pop() : make_batch(code, noise, first, n, plan.approach);
        const auto lg = model.loss_and_grad(batch.inputs, batch.labels);
        if (!std::isfinite(lg.loss)) {
            throw TrainingDiverged("non-finite loss at step " + std::to_string(adam.step + 1) +
                                   ", rate " + rate_tag(p));
        }
        adam_step(model, adam, lg.grads);
        run.losses.push_back(lg.loss);
        run.summary.samples += n;
        window_sum += lg.loss;
        if (++window_steps == plan.log_every) {
            history.push_back({adam.step, p, window_sum / static_cast<double>(window_steps), {}});
            window_sum = 0.0;
            window_steps = 0;
        }
    }
    if (window_steps > 0) {
        history.push_back({adam.step, p, window_sum / static_cast<double>(window_steps), {}});
    }
    const std::size_t tail = std::min(run.losses.size(), plan.log_every);
    run.summary.final_loss =
        std::accumulate(run.losses.end() - static_cast<std::ptrdiff_t>(tail), run.losses.end(), 0.0) /
        static_cast<double>(tail);
    run.summary.saturated = saturation_monitor(run.losses, std::max<std::size_t>(2, plan.log_every), 1e-3);

    model.set_mode(Mode::inference);
    run.summary.val_accuracy = validation_accuracy(
        model, code, plan.approach, {p, plan.seed, validation_stream(k)}, plan.validation_samples);
    history.push_back({adam.step, p, run.summary.final_loss, run.summary.val_accuracy});
    run.summary.hash_at_end = model.parameter_hash();
    if (progress) {
        std::ostringstream os;
        os << "p_err=" << rate_tag(p) << " samples=" << run.summary.samples
           << " loss=" << run.summary.final_loss << " val_accuracy=" << run.summary.val_accuracy;
        progress(os.str());
    }
    return run;
}

std::string write_rate_checkpoint(const TrainPlan& plan, const std::string& name,
                                  const Mlp<float>& model, const AdamState<float>& adam,
                                  std::size_t completed, std::span<const RateSummary> rates) {
    if (plan.checkpoint_dir.empty()) return {};
    std::filesystem::create_directories(plan.checkpoint_dir);
    const auto path = (std::filesystem::path(plan.checkpoint_dir) / name).string();
    write_file_atomic(path, save_checkpoint(model, adam, checkpoint_metadata(plan, completed, rates)));
    return path;
}

}  // namespace

TrainResult train_progressive(const TrainPlan& plan, const std::optional<Checkpoint>& resume,
                              const ProgressFn& progress) {
    plan.validate();
    const ColorCode code = build_code(plan.code);
    const MlpConfig config = plan.model_config(code);

    std::size_t start = 0;
    TrainResult result{resume ? resume->model : Mlp<float>::init(config, plan.seed), {}, {}, {}, 0, 0.0};
    if (resume) {
        if (resume->model.config() != config) {
            throw ShapeMismatch("checkpoint model does not match the plan's architecture");
        }
        result.adam = resume->adam;
        result.adam.params.learning_rate = plan.learning_rate;
        start = resume->metadata.value("completed_rates", std::size_t{0});
    } else {
        result.adam = AdamState<float>::for_model(result.model, {plan.learning_rate});
    }

    std::string last_good;
    for (std::size_t k = start; k < plan.error_rate_ladder.size(); ++k) {
        RateRun run;
        try {
            run = train_one_rate(result.model, result.adam, code, plan, k, result.history, progress);
        } catch (const TrainingDiverged& e) {
            throw TrainingDiverged(std::string(e.what()) + "; last good checkpoint: " +
                                   (last_good.empty() ? "none" : last_good));
        }
        if (result.rates.empty() && !run.losses.empty()) result.initial_loss = run.losses.front();
        result.samples_consumed += run.summary.samples;
        result.rates.push_back(run.summary);
        const auto path = write_rate_checkpoint(plan, "rate" + std::to_string(k) + "_p" + rate_tag(run.summary.p_err) + ".hnet",
                                                result.model, result.adam, k + 1, result.rates);
        if (!path.empty()) {
            result.rates.back().checkpoint = path;
            write_rate_checkpoint(plan, "latest.hnet", result.model, result.adam, k + 1, result.rates);
            last_good = path;
        }
    }
    return result;
}

std::vector<TrainResult> train_fresh_per_rate(const TrainPlan& plan, const ProgressFn& progress) {
    plan.validate();
    const ColorCode code = build_code(plan.code);
    const MlpConfig config = plan.model_config(code);
    std::vector<TrainResult> results;
    for (std::size_t k = 0; k < plan.error_rate_ladder.size(); ++k) {
        TrainResult r{Mlp<float>::init(config, mix64(plan.seed ^ (0xf4e5ULL + k))), {}, {}, {}, 0, 0.0};
        r.adam = AdamState<float>::for_model(r.model, {plan.learning_rate});
        auto run = train_one_rate(r.model, r.adam, code, plan, k, r.history, progress);
        r.initial_loss = run.losses.empty() ? 0.0 : run.losses.front();
        r.samples_consumed = run.summary.samples;
        r.rates.push_back(run.summary);
        const auto path = write_rate_checkpoint(plan, "fresh" + std::to_string(k) + "_p" + rate_tag(run.summary.p_err) + ".hnet",
                                                r.model, r.adam, k + 1, r.rates);
        r.rates.back().checkpoint = path;
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace hexnet

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hexnet/errors.hpp"
#include "hexnet/evaluation.hpp"
#include "hexnet/homology.hpp"
#include "hexnet/training.hpp"
#include "hexnet/version.hpp"

using namespace hexnet;
using nlohmann::json;

namespace {

struct Common {
    std::string code = "3,3,0";
    std::uint64_t seed = 1;
    int workers = 0;
    std::string out;
};

// "R,C,S" or a bare size label such as 6.
LatticeParams parse_code(const std::string& text) {
    if (text.find(',') != std::string::npos) return LatticeParams::parse(text);
    try {
        return lattice_for_size_label(std::stoi(text));
    } catch (const std::invalid_argument&) {
        throw ConfigError("unrecognized code '" + text + "'");
    }
}

std::vector<double> parse_rates(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw ConfigError("empty --p list");
    return out;
}

std::string provenance(const std::string& command, const json& config, std::uint64_t seed) {
    return "hexnet " + std::string(kVersion) + " " + command + " seed=" + std::to_string(seed) +
           " config_hash=" + config_hash(config.dump());
}

// Writes to --out or stdout.
void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
    } else {
        write_file_atomic(path, text);
        std::cerr << "wrote " << path << "\n";
    }
}

EvalOptions eval_options(int workers) {
    EvalOptions o;
    o.workers = workers > 0 ? workers : max_threads();
    return o;
}

std::unique_ptr<Decoder> make_decoder(const std::string& kind, const std::string& checkpoint, double p,
                                      const ColorCode& code) {
    if (kind == "hinv") return std::make_unique<HInverseDecoder>();
    if (kind == "mld") return std::make_unique<MldDecoder>(p);
    if (kind == "neural") {
        if (checkpoint.empty()) throw ConfigError("--decoder neural needs --checkpoint");
        auto ckpt = load_checkpoint(read_file(checkpoint));
        const auto mode = input_mode_from_approach(ckpt.metadata.value("approach", 1));
        if (ckpt.metadata.contains("code") &&
            ckpt.metadata["code"] != json::array({code.params().l_rows, code.params().l_cols, code.params().shift})) {
            throw ShapeMismatch("checkpoint was trained on code " + ckpt.metadata["code"].dump());
        }
        return std::make_unique<NeuralDecoder>(std::move(ckpt.model), mode);
    }
    throw ConfigError("unknown decoder '" + kind + "'");
}

// ------------------------------------------------------------- code-info

int run_code_info(const Common& c, bool dump_h) {
    const auto code = build_code(parse_code(c.code));
    const auto params = code.params();
    json cfg{{"code", {params.l_rows, params.l_cols, params.shift}}};
    json info{{"version", std::string(kVersion)},
              {"seed", c.seed},
              {"config_hash", config_hash(cfg.dump())},
              {"code", params.label()},
              {"n", code.n()},
              {"faces", code.num_faces()},
              {"rank_h", code.rank_h()},
              {"logical_qubits", ColorCode::kLogicalQubits},
              {"removed_faces", {code.removed_faces().first, code.removed_faces().second}}};
    if (auto d = brute_force_distance(code)) info["distance"] = *d;
    std::ostringstream os;
    os << info.dump(2) << "\n";
    if (dump_h) write_matrix_text(os, code.h());
    emit(c.out, os.str());
    return 0;
}

// ------------------------------------------------------------- gen-data

int run_gen_data(const Common& c, double p, std::uint64_t count, int approach) {
    const auto code = build_code(parse_code(c.code));
    const auto mode = input_mode_from_approach(approach);
    json cfg{{"code", c.code}, {"p_err", p}, {"count", count}, {"approach", approach}};
    std::ostringstream os;
    os << "# " << provenance("gen-data", cfg, c.seed) << " p_err=" << p << "\n";
    os << "index,input,label\n";
    const NoiseParams noise{p, c.seed, training_stream(0)};
    constexpr std::size_t kChunk = 4096;
    for (std::uint64_t first = 0; first < count; first += kChunk) {
        const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, count - first));
        const auto batch = make_batch(code, noise, first, n, mode);
        for (std::size_t r = 0; r < n; ++r) {
            os << first + r << ',';
            for (std::size_t k = 0; k < batch.inputs.cols; ++k) os << (batch.inputs(r, k) > 0.5f ? '1' : '0');
            os << ',' << batch.labels[r] << '\n';
        }
    }
    emit(c.out, os.str());
    return 0;
}

// ------------------------------------------------------------- train

int run_train(const Common& c, const std::string& plan_path, int size_label, int approach,
              std::uint64_t samples, const std::string& resume, bool fresh) {
    TrainPlan plan;
    if (!plan_path.empty()) {
        plan = TrainPlan::parse(read_file(plan_path));
    } else if (size_label > 0) {
        plan = table_plan(size_label, approach);
    } else {
        plan.code = parse_code(c.code);
        plan.approach = input_mode_from_approach(approach);
    }
    if (samples > 0) plan.samples_per_rate = samples;
    plan.seed = c.seed;
    const std::string dir = c.out.empty() ? "run" : c.out;
    plan.checkpoint_dir = dir;
    std::filesystem::create_directories(dir);
    const auto hash = config_hash(plan.to_json().dump());
    std::cerr << "hexnet " << kVersion << " train seed=" << plan.seed << " config_hash=" << hash << "\n";
    write_file_atomic(dir + "/plan.json", plan.to_json().dump(2) + "\n");

    const ProgressFn log = [](const std::string& line) { std::cerr << line << "\n"; };
    std::vector<TrainResult> runs;
    if (fresh) {
        runs = train_fresh_per_rate(plan, log);
    } else {
        std::optional<Checkpoint> ckpt;
        if (!resume.empty()) ckpt = load_checkpoint(read_file(resume));
        runs.push_back(train_progressive(plan, ckpt, log));
    }

    json summary{{"version", std::string(kVersion)},
                 {"seed", plan.seed},
                 {"config_hash", hash},
                 {"mode", fresh ? "fresh" : "progressive"},
                 {"runs", json::array()}};
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        std::ostringstream hist;
        hist << "# " << provenance("train", plan.to_json(), plan.seed) << "\n";
        write_history_csv(hist, r.history);
        const std::string hist_path = dir + "/history" + (fresh ? "_" + std::to_string(i) : "") + ".csv";
        write_file_atomic(hist_path, hist.str());
        json rates = json::array();
        for (const auto& s : r.rates) {
            rates.push_back({{"p_err", s.p_err},
                             {"samples", s.samples},
                             {"final_loss", s.final_loss},
                             {"val_accuracy", s.val_accuracy},
                             {"saturated", s.saturated},
                             {"checkpoint", s.checkpoint}});
        }
        summary["runs"].push_back({{"initial_loss", r.initial_loss},
                                   {"samples_consumed", r.samples_consumed},
                                   {"history", hist_path},
                                   {"rates", rates}});
    }
    write_file_atomic(dir + "/summary.json", summary.dump(2) + "\n");
    std::cerr << "wrote " << dir << "/summary.json\n";
    return 0;
}

// ------------------------------------------------------------- eval, sweep

int run_sweep(const Common& c, const std::vector<double>& rates, std::uint64_t trials,
              const std::vector<std::string>& decoders, const std::string& checkpoint, const std::string& gnuplot) {
    const auto code = build_code(parse_code(c.code));
    std::vector<EvalRow> rows;
    for (const auto& kind : decoders) {
        for (double p : rates) {
            const auto dec = make_decoder(kind, checkpoint, p, code);
            rows.push_back(evaluate(code, *dec, p, trials, c.seed, eval_options(c.workers)));
            const auto& r = rows.back();
            std::fprintf(stderr, "%s p=%.4f rate=%.5f [%.5f, %.5f]\n", r.decoder.c_str(), p, r.rate, r.ci_lo,
                         r.ci_hi);
        }
    }
    json cfg{{"code", code.params().label()}, {"p", rates}, {"trials", trials}, {"decoders", decoders},
             {"checkpoint", checkpoint}};
    std::ostringstream os;
    write_eval_csv(os, rows, c.seed, config_hash(cfg.dump()));
    emit(c.out, os.str());
    if (!gnuplot.empty()) {
        std::ostringstream gp;
        gp << "# " << provenance("sweep", cfg, c.seed) << "\n";
        write_gnuplot_script(gp, rows, "logical error, code " + code.params().label());
        write_file_atomic(gnuplot, gp.str());
    }
    return 0;
}

// ------------------------------------------------------------- crosscheck-mld

int run_crosscheck(const Common& c, double p, std::uint64_t trials, const std::string& checkpoint) {
    const auto code = build_code(parse_code(c.code));
    std::vector<std::unique_ptr<Decoder>> others;
    others.push_back(make_decoder("hinv", "", p, code));
    if (!checkpoint.empty()) others.push_back(make_decoder("neural", checkpoint, p, code));
    const MldDecoder mld(p);

    const NoiseParams noise{p, c.seed, evaluation_stream(p)};
    std::vector<LabeledSample> samples;
    samples.reserve(static_cast<std::size_t>(trials));
    for (std::uint64_t k = 0; k < trials; ++k) samples.push_back(make_sample(code, sample_error(code, noise, k)));
    std::vector<unsigned> best(samples.size()), guess(samples.size());
    mld.predict(code, samples, best);

    std::uint64_t mld_fail = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) mld_fail += best[i] != samples[i].label;
    json cfg{{"code", code.params().label()}, {"p_err", p}, {"trials", trials}, {"checkpoint", checkpoint}};
    json report{{"version", std::string(kVersion)},
                {"seed", c.seed},
                {"config_hash", config_hash(cfg.dump())},
                {"code", code.params().label()},
                {"p_err", p},
                {"trials", trials},
                {"mld_failures", mld_fail},
                {"decoders", json::array()}};
    for (const auto& d : others) {
        d->predict(code, samples, guess);
        std::uint64_t fail = 0, disagree = 0, beat = 0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const bool ok = guess[i] == samples[i].label;
            fail += !ok;
            disagree += guess[i] != best[i];
            beat += ok && best[i] != samples[i].label;
        }
        report["decoders"].push_back({{"id", d->id()},
                                      {"failures", fail},
                                      {"disagreements_with_mld", disagree},
                                      {"correct_where_mld_failed", beat},
                                      {"ratio_to_mld", mld_fail ? static_cast<double>(fail) / mld_fail : 0.0}});
    }
    emit(c.out, report.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-step color-code decoder: step-one estimate plus neural homology classifier"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    Common c;

    auto add_common = [&c](CLI::App* sub) {
        sub->add_option("--code", c.code, "lattice as R,C,S or size label 6/8/9/12")->capture_default_str();
        sub->add_option("--seed", c.seed, "master seed")->capture_default_str();
        sub->add_option("--workers", c.workers, "OpenMP threads (0: all)")->capture_default_str();
        sub->add_option("--out", c.out, "output path (stdout when empty)");
    };

    bool dump_h = false;
    auto* info = app.add_subcommand("code-info", "lattice facts and check matrix");
    add_common(info);
    info->add_flag("--dump-h", dump_h, "append H as text");

    double p = 0.05;
    std::uint64_t count = 1000;
    int approach = 1;
    auto* gen = app.add_subcommand("gen-data", "labeled training samples as CSV");
    add_common(gen);
    gen->add_option("--p", p, "physical error rate")->capture_default_str();
    gen->add_option("--trials", count, "samples to write")->capture_default_str();
    gen->add_option("--approach", approach, "1: syndrome input, 2: estimate and syndrome")
        ->check(CLI::IsMember({1, 2}));

    std::string plan_path, resume;
    int size_label = 0;
    std::uint64_t samples = 0;
    bool fresh = false;
    auto* train = app.add_subcommand("train", "progressive training; --out is the run directory");
    add_common(train);
    train->add_option("--plan", plan_path, "training plan JSON");
    train->add_option("--size", size_label, "use the table plan for size label 6/8/9/12");
    train->add_option("--approach", approach, "1 or 2")->check(CLI::IsMember({1, 2}));
    train->add_option("--samples-per-rate", samples, "override samples per ladder rate");
    train->add_option("--checkpoint", resume, "resume from this checkpoint");
    train->add_flag("--fresh", fresh, "train an independent model per ladder rate");

    std::string p_list = "0.05";
    std::uint64_t trials = 100'000;
    std::string decoder = "hinv", checkpoint, gnuplot;
    auto* eval = app.add_subcommand("eval", "logical error rate at one or more rates");
    add_common(eval);
    eval->add_option("--p", p_list, "rate or comma list")->capture_default_str();
    eval->add_option("--trials", trials)->capture_default_str();
    eval->add_option("--decoder", decoder, "hinv, neural or mld")->capture_default_str();
    eval->add_option("--checkpoint", checkpoint, "model for --decoder neural");

    std::vector<std::string> decoders{"hinv"};
    std::string sweep_list = "0.05,0.06,0.07,0.08,0.09,0.10,0.11,0.12";
    auto* sw = app.add_subcommand("sweep", "several decoders over a rate grid, with a gnuplot script");
    add_common(sw);
    sw->add_option("--p", sweep_list, "comma list of rates")->capture_default_str();
    sw->add_option("--trials", trials)->capture_default_str();
    sw->add_option("--decoder", decoders, "repeatable: hinv, neural, mld");
    sw->add_option("--checkpoint", checkpoint, "model for the neural decoder");
    sw->add_option("--gnuplot", gnuplot, "write a plot script here");

    auto* cross = app.add_subcommand("crosscheck-mld", "compare decoders against the exact oracle on matched trials");
    add_common(cross);
    cross->add_option("--p", p, "physical error rate")->capture_default_str();
    cross->add_option("--trials", trials)->capture_default_str();
    cross->add_option("--checkpoint", checkpoint, "also compare this neural model");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*info) return run_code_info(c, dump_h);
        if (*gen) return run_gen_data(c, p, count, approach);
        if (*train) return run_train(c, plan_path, size_label, approach, samples, resume, fresh);
        if (*eval) return run_sweep(c, parse_rates(p_list), trials, {decoder}, checkpoint, "");
        if (*sw) return run_sweep(c, parse_rates(sweep_list), trials, decoders, checkpoint, gnuplot);
        if (*cross) return run_crosscheck(c, p, trials, checkpoint);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include "hexnet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <ostream>

#include "hexnet/errors.hpp"
#include "hexnet/rng.hpp"
#include "hexnet/version.hpp"

namespace hexnet {

void HInverseDecoder::predict(const ColorCode&, std::span<const LabeledSample>,
                              std::span<unsigned> classes) const {
    std::fill(classes.begin(), classes.end(), 0U);
}

NeuralDecoder::NeuralDecoder(Mlp<float> model, InputMode mode) : model_(std::move(model)), mode_(mode) {
    model_.set_mode(Mode::inference);
}

std::string NeuralDecoder::id() const {
    return mode_ == InputMode::syndrome_only ? "neural1" : "neural2";
}

void NeuralDecoder::predict(const ColorCode& code, std::span<const LabeledSample> samples,
                            std::span<unsigned> classes) const {
    const std::size_t width = input_width(code, mode_);
    if (model_.config().input_dim != width) {
        throw ShapeMismatch("model input width " + std::to_string(model_.config().input_dim) +
                            " does not match " + to_string(mode_) + " width " + std::to_string(width) +
                            " for code " + code.params().label());
    }
    Matrix<float> inputs(samples.size(), width);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        encode_input(samples[i].e_hat, samples[i].s, mode_, inputs.row(i));
    }
    const auto predicted = model_.predict_class(inputs);
    for (std::size_t i = 0; i < samples.size(); ++i) classes[i] = static_cast<unsigned>(predicted[i]);
}

void MldDecoder::predict(const ColorCode& code, std::span<const LabeledSample> samples,
                         std::span<unsigned> classes) const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        classes[i] = mld_oracle(code, samples[i].s, p_err_, kMldMaxGroupLog2, Exec::serial).best.index;
    }
}

WilsonInterval wilson_interval(std::uint64_t failures, std::uint64_t trials) {
    if (trials == 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    const auto n = static_cast<double>(trials);
    const double phat = static_cast<double>(failures) / n;
    const double denom = 1.0 + z * z / n;
    const double center = (phat + z * z / (2.0 * n)) / denom;
    const double half = z / denom * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

bool intervals_disjoint(const EvalRow& a, const EvalRow& b) {
    return a.ci_hi < b.ci_lo || b.ci_hi < a.ci_lo;
}

std::uint64_t evaluation_stream(double p_err) {
    return 0x6576616cULL ^ static_cast<std::uint64_t>(std::llround(p_err * 1e9));
}

EvalRow evaluate(const ColorCode& code, const Decoder& decoder, double p_err, std::uint64_t trials,
                 std::uint64_t seed, EvalOptions options) {
    if (trials == 0) throw ConfigError("trials must be at least 1");
    if (!(p_err >= 0.0 && p_err <= 1.0)) throw ConfigError("p_err must lie in [0, 1]");
    const NoiseParams noise{p_err, seed, evaluation_stream(p_err)};
    constexpr std::uint64_t kChunk = 1024;
    const auto chunks = static_cast<std::ptrdiff_t>((trials + kChunk - 1) / kChunk);

    std::exception_ptr failure;
    auto run_chunk = [&](std::ptrdiff_t c) -> std::uint64_t {
        const std::uint64_t first = static_cast<std::uint64_t>(c) * kChunk;
        const auto n = static_cast<std::size_t>(std::min(kChunk, trials - first));
        std::vector<LabeledSample> samples;
        samples.reserve(n);
        for (std::size_t i = 0; i < n; ++i) samples.push_back(make_sample(code, sample_error(code, noise, first + i)));
        std::vector<unsigned> classes(n, 0);
        decoder.predict(code, samples, classes);
        std::uint64_t failures = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const BitVector correction = class_representative(code, {classes[i]}) ^ samples[i].e_hat;
            if (!is_success(code, samples[i].e, correction)) ++failures;
        }
        return failures;
    };

    std::uint64_t failures = 0;
    if (options.exec == Exec::serial) {
        for (std::ptrdiff_t c = 0; c < chunks; ++c) failures += run_chunk(c);
    } else {
        const int threads = options.workers >= 1 ? options.workers : max_threads();
#pragma omp parallel for schedule(static) reduction(+ : failures) num_threads(threads)
        for (std::ptrdiff_t c = 0; c < chunks; ++c) {
            try {
                failures += run_chunk(c);
            } catch (...) {
#pragma omp critical(hexnet_eval_error)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
    }

    EvalRow row;
    row.code = code.params();
    row.decoder = decoder.id();
    row.p_err = p_err;
    row.trials = trials;
    row.failures = failures;
    row.rate = static_cast<double>(failures) / static_cast<double>(trials);
    const auto ci = wilson_interval(failures, trials);
    row.ci_lo = ci.lo;
    row.ci_hi = ci.hi;
    row.seed = seed;
    return row;
}

std::vector<EvalRow> sweep(const ColorCode& code, const Decoder& decoder, std::span<const double> p_list,
                           std::uint64_t trials, std::uint64_t seed, EvalOptions options) {
    std::vector<EvalRow> rows;
    rows.reserve(p_list.size());
    for (double p : p_list) rows.push_back(evaluate(code, decoder, p, trials, seed, options));
    return rows;
}

void write_eval_csv(std::ostream& os, std::span<const EvalRow> rows, std::uint64_t seed,
                    const std::string& hash) {
    os << "# hexnet " << kVersion << " seed=" << seed << " config_hash=" << hash
       << " rng=" << kRngAlgorithm << '\n';
    os << "code,decoder,p_err,trials,failures,rate,ci_lo,ci_hi,seed\n";
    for (const auto& r : rows) {
        os << '"' << r.code.label() << "\"," << r.decoder << ',' << std::setprecision(6) << r.p_err << ','
           << r.trials << ',' << r.failures << ',' << std::setprecision(8) << r.rate << ',' << r.ci_lo << ','
           << r.ci_hi << ',' << r.seed << '\n';
    }
}

void write_gnuplot_script(std::ostream& os, std::span<const EvalRow> rows, const std::string& title) {
    std::map<std::string, std::vector<const EvalRow*>> groups;
    for (const auto& r : rows) groups[r.code.label() + " " + r.decoder].push_back(&r);
    os << "set title \"" << title << "\"\n"
       << "set xlabel \"p_err\"\n"
       << "set ylabel \"Logical error\"\n"
       << "set logscale y\n"
       << "set key bottom right\n"
       << "set grid\n";
    std::size_t idx = 0;
    for (const auto& [name, members] : groups) {
        os << "$curve" << idx++ << " << EOD\n";
        for (const auto* r : members) os << r->p_err << ' ' << r->rate << ' ' << r->ci_lo << ' ' << r->ci_hi << '\n';
        os << "EOD\n";
    }
    os << "plot ";
    idx = 0;
    for (const auto& [name, members] : groups) {
        if (idx > 0) os << ", \\\n     ";
        os << "$curve" << idx << " using 1:2:3:4 with yerrorlines title \"" << name << "\"";
        ++idx;
    }
    os << '\n';
}

ThresholdEstimate threshold_estimate(std::vector<Curve> curves) {
    if (curves.size() < 2) throw ShapeMismatch("threshold estimate needs curves for at least two sizes");
    std::sort(curves.begin(), curves.end(), [](const Curve& a, const Curve& b) { return a.size < b.size; });
    const auto& grid = curves.front().p;
    for (const auto& c : curves) {
        if (c.p != grid || c.logical_error.size() != grid.size()) {
            throw ShapeMismatch("curves do not share a common p grid");
        }
    }
    auto log_rate = [](double r) { return std::log(std::max(r, 1e-300)); };

    ThresholdEstimate est;
    for (std::size_t k = 0; k + 1 < curves.size(); ++k) {
        std::vector<double> diff(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            diff[i] = log_rate(curves[k].logical_error[i]) - log_rate(curves[k + 1].logical_error[i]);
        }
        bool found = false;
        for (std::size_t i = 0; i < grid.size() && !found; ++i) {
            if (diff[i] == 0.0 && i > 0 && i + 1 < grid.size() && diff[i - 1] * diff[i + 1] < 0.0) {
                est.crossings.push_back(grid[i]);
                found = true;
            } else if (i + 1 < grid.size() && diff[i] * diff[i + 1] < 0.0) {
                const double t = diff[i] / (diff[i] - diff[i + 1]);
                est.crossings.push_back(grid[i] + t * (grid[i + 1] - grid[i]));
                found = true;
            }
        }
        if (!found) {
            throw NoCrossing("curves for sizes " + std::to_string(curves[k].size) + " and " +
                             std::to_string(curves[k + 1].size) + " do not cross in the scanned range");
        }
    }
    const auto [lo, hi] = std::minmax_element(est.crossings.begin(), est.crossings.end());
    est.spread = *hi - *lo;
    double sum = 0.0;
    for (double c : est.crossings) sum += c;
    est.mean = sum / static_cast<double>(est.crossings.size());
    return est;
}

}  // namespace hexnet

#pragma once

// Monte Carlo logical-error estimation for the step-one decoder alone, the
// two neural decoders, and the maximum-likelihood oracle.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hexnet/channel.hpp"
#include "hexnet/color_code.hpp"
#include "hexnet/homology.hpp"
#include "hexnet/neural.hpp"

namespace hexnet {

/// Predicts the residual homology class for a run of samples.
class Decoder {
public:
    virtual ~Decoder() = default;
    [[nodiscard]] virtual std::string id() const = 0;
    virtual void predict(const ColorCode& code, std::span<const LabeledSample> samples,
                         std::span<unsigned> classes) const = 0;
};

/// Step one alone: the class is always trivial.
class HInverseDecoder final : public Decoder {
public:
    [[nodiscard]] std::string id() const override { return "hinv"; }
    void predict(const ColorCode& code, std::span<const LabeledSample> samples,
                 std::span<unsigned> classes) const override;
};

/// Step one followed by the network's class prediction.
class NeuralDecoder final : public Decoder {
public:
    NeuralDecoder(Mlp<float> model, InputMode mode);
    [[nodiscard]] std::string id() const override;
    void predict(const ColorCode& code, std::span<const LabeledSample> samples,
                 std::span<unsigned> classes) const override;
    [[nodiscard]] const Mlp<float>& model() const { return model_; }

private:
    Mlp<float> model_;
    InputMode mode_;
};

/// Exact maximum-likelihood class for the given channel rate.
class MldDecoder final : public Decoder {
public:
    explicit MldDecoder(double p_err) : p_err_(p_err) {}
    [[nodiscard]] std::string id() const override { return "mld"; }
    void predict(const ColorCode& code, std::span<const LabeledSample> samples,
                 std::span<unsigned> classes) const override;

private:
    double p_err_;
};

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

/// 95% Wilson score interval.
WilsonInterval wilson_interval(std::uint64_t failures, std::uint64_t trials);

struct EvalRow {
    LatticeParams code;
    std::string decoder;
    double p_err = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;
    double rate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t seed = 0;
};

/// Two rows' intervals are disjoint.
bool intervals_disjoint(const EvalRow& a, const EvalRow& b);

/// Error stream used for rate p, shared by every decoder so trials are matched.
std::uint64_t evaluation_stream(double p_err);

struct EvalOptions {
    Exec exec = Exec::parallel;
    int workers = 1;
};

/// Decodes `trials` sampled errors and counts failures. Every correction is
/// checked to reproduce the error syndrome. Totals do not depend on the
/// worker count.
EvalRow evaluate(const ColorCode& code, const Decoder& decoder, double p_err, std::uint64_t trials,
                 std::uint64_t seed, EvalOptions options = {});

std::vector<EvalRow> sweep(const ColorCode& code, const Decoder& decoder, std::span<const double> p_list,
                           std::uint64_t trials, std::uint64_t seed, EvalOptions options = {});

/// CSV with a leading '#' provenance line.
void write_eval_csv(std::ostream& os, std::span<const EvalRow> rows, std::uint64_t seed,
                    const std::string& config_hash);
/// Self-contained gnuplot script drawing one semilog curve per (code, decoder).
void write_gnuplot_script(std::ostream& os, std::span<const EvalRow> rows, const std::string& title);

struct Curve {
    std::size_t size = 0;  // ordering key, e.g. qubit count or size label
    std::vector<double> p;
    std::vector<double> logical_error;
};

struct ThresholdEstimate {
    double mean = 0.0;
    double spread = 0.0;  // max − min over adjacent-size crossings
    std::vector<double> crossings;
};

/// Crossing of log(logical error) vs p for each adjacent size pair, by linear
/// interpolation. Throws NoCrossing, or ShapeMismatch when grids differ.
ThresholdEstimate threshold_estimate(std::vector<Curve> curves);

}  // namespace hexnet

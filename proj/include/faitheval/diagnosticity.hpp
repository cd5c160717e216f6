#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <vector>

#include "faitheval/core.hpp"
#include "faitheval/interpret.hpp"
#include "faitheval/io.hpp"
#include "faitheval/metrics.hpp"
#include "faitheval/model.hpp"
#include "faitheval/rng.hpp"

namespace faitheval {

// One golden pair: a method-generated interpretation u and a uniform-random
// interpretation v of the same instance, plus which interpreter produced u
// and how many forward passes producing it cost.
struct GoldenPair {
    ClassificationInstance instance;
    Interpretation faithful;
    Interpretation unfaithful;
    InterpreterId provenance = InterpreterId::lime;
    std::uint64_t interpreter_passes = 0;
};

struct GoldenSet {
    std::vector<GoldenPair> pairs;
    std::uint64_t seed = 0;

    std::size_t size() const { return pairs.size(); }
};

struct DiagnosticityEstimate {
    MetricId metric = MetricId::dfmit;
    double value = 0.0;
    double standard_error = 0.0;
    std::size_t sample_count = 0;
};

struct ComplexityReport {
    MetricId metric = MetricId::dfmit;
    double mean_passes = 0.0;
    std::uint64_t min_passes = 0;
    std::uint64_t max_passes = 0;
};

// Golden-set generation: K pairs, each from an instance and an interpreter
// drawn uniformly with replacement, v ~ Uniform(0,1) per token. Deterministic
// given the seed; every per-pair stochastic step runs on its own derived
// stream so insertion order cannot leak between pairs.
template <DifferentiableTextModel M>
GoldenSet generate_golden_set(const std::vector<ClassificationInstance>& instances,
                              const std::vector<InterpreterId>& interpreters, const M& model,
                              std::size_t k, std::uint64_t seed,
                              InterpreterConfig config = {}) {
    if (instances.empty()) throw std::invalid_argument("empty instance pool");
    if (interpreters.empty()) throw std::invalid_argument("empty interpreter set");
    if (k < 1) throw std::invalid_argument("golden set size must be at least 1");

    GoldenSet set;
    set.seed = seed;
    set.pairs.reserve(k);
    Rng sampler(derive_seed(seed, 0));
    for (std::size_t i = 0; i < k; ++i) {
        GoldenPair pair;
        pair.instance = instances[sampler.uniform_index(instances.size())];
        pair.provenance = interpreters[sampler.uniform_index(interpreters.size())];
        config.seed = derive_seed(seed, 1, i);

        std::uint64_t before = 0;
        if constexpr (requires { model.passes(); }) before = model.passes();
        pair.faithful = apply_interpreter(pair.provenance, model, pair.instance, config);
        if constexpr (requires { model.passes(); }) pair.interpreter_passes = model.passes() - before;

        pair.unfaithful = interpret_random(pair.instance, derive_seed(seed, 2, i));
        set.pairs.push_back(std::move(pair));
    }
    return set;
}

template <DifferentiableTextModel M>
GoldenSet generate_golden_set(const std::vector<ClassificationInstance>& instances,
                              const M& model, std::size_t k, std::uint64_t seed,
                              const InterpreterConfig& config = {}) {
    return generate_golden_set(instances,
                               {kAllInterpreters.begin(), kAllInterpreters.end()}, model, k,
                               seed, config);
}

struct PairOutcome {
    FaithfulnessScore faithful;
    FaithfulnessScore unfaithful;
    bool faithful_wins = false;
};

template <TextModel M>
PairOutcome evaluate_pair(MetricId metric, const GoldenPair& pair, const M& model,
                          const std::vector<double>& B = kDefaultB) {
    PairOutcome out;
    out.faithful = evaluate_metric(metric, model, pair.instance, pair.faithful, B);
    out.unfaithful = evaluate_metric(metric, model, pair.instance, pair.unfaithful, B);
    out.faithful_wins = compare(metric, out.faithful, out.unfaithful);
    return out;
}

// Generic indicator mean with its binomial standard error.
template <typename Judge>
DiagnosticityEstimate indicator_mean(MetricId metric, std::size_t k, Judge&& judge) {
    if (k < 1) throw std::invalid_argument("empty golden set");
    std::size_t wins = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (judge(i)) ++wins;
    }
    DiagnosticityEstimate est;
    est.metric = metric;
    est.sample_count = k;
    est.value = static_cast<double>(wins) / static_cast<double>(k);
    est.standard_error = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(k));
    return est;
}

// D_e(F) ~= (1/K) sum 1(u more faithful than v), with strict comparisons.
template <TextModel M>
DiagnosticityEstimate estimate_diagnosticity(MetricId metric, const GoldenSet& set,
                                             const M& model,
                                             const std::vector<double>& B = kDefaultB) {
    if (set.pairs.empty()) throw std::invalid_argument("empty golden set");
    return indicator_mean(metric, set.size(), [&](std::size_t i) {
        return evaluate_pair(metric, set.pairs[i], model, B).faithful_wins;
    });
}

// Mean/min/max of passes_used across the u-side evaluations of the set.
template <TextModel M>
ComplexityReport measure_time_complexity(MetricId metric, const GoldenSet& set, const M& model,
                                         const std::vector<double>& B = kDefaultB) {
    if (set.pairs.empty()) throw std::invalid_argument("empty golden set");
    ComplexityReport report;
    report.metric = metric;
    report.min_passes = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t total = 0;
    for (const GoldenPair& pair : set.pairs) {
        const FaithfulnessScore score =
            evaluate_metric(metric, model, pair.instance, pair.faithful, B);
        const auto passes = static_cast<std::uint64_t>(score.passes_used);
        total += passes;
        report.min_passes = std::min(report.min_passes, passes);
        report.max_passes = std::max(report.max_passes, passes);
    }
    report.mean_passes = static_cast<double>(total) / static_cast<double>(set.size());
    return report;
}

// Single sweep computing both the estimate and the complexity report; the
// fold-style accumulation here and the loop in estimate_diagnosticity must
// agree exactly (checked by the property tests).
struct MetricSummary {
    DiagnosticityEstimate diagnosticity;
    ComplexityReport complexity;
};

template <TextModel M>
MetricSummary summarize_metric(MetricId metric, const GoldenSet& set, const M& model,
                               const std::vector<double>& B = kDefaultB) {
    if (set.pairs.empty()) throw std::invalid_argument("empty golden set");
    std::vector<bool> wins;
    wins.reserve(set.size());
    MetricSummary out;
    out.complexity.metric = metric;
    out.complexity.min_passes = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t total = 0;
    for (const GoldenPair& pair : set.pairs) {
        const PairOutcome outcome = evaluate_pair(metric, pair, model, B);
        wins.push_back(outcome.faithful_wins);
        const auto passes = static_cast<std::uint64_t>(outcome.faithful.passes_used);
        total += passes;
        out.complexity.min_passes = std::min(out.complexity.min_passes, passes);
        out.complexity.max_passes = std::max(out.complexity.max_passes, passes);
    }
    out.complexity.mean_passes = static_cast<double>(total) / static_cast<double>(set.size());
    const auto successes = static_cast<double>(
        std::count(wins.begin(), wins.end(), true));
    out.diagnosticity.metric = metric;
    out.diagnosticity.sample_count = set.size();
    out.diagnosticity.value = successes / static_cast<double>(set.size());
    out.diagnosticity.standard_error = std::sqrt(
        out.diagnosticity.value * (1.0 - out.diagnosticity.value) / static_cast<double>(set.size()));
    return out;
}

// ---- golden set serialization ----

inline constexpr std::uint32_t kGoldenSetMagic = 0x53474546;  // "FEGS"
inline constexpr std::uint32_t kGoldenSetVersion = 1;

inline void save_golden_set(const GoldenSet& set, const std::filesystem::path& path) {
    BinaryWriter w(path);
    w.u32(kGoldenSetMagic);
    w.u32(kGoldenSetVersion);
    w.u64(set.seed);
    w.u64(set.size());
    for (const GoldenPair& pair : set.pairs) {
        w.u64(pair.instance.length());
        for (TokenId id : pair.instance.input.tokens) w.u32(id);
        w.u64(pair.instance.gold_label);
        w.u64(pair.instance.predicted_class);
        w.f64_vec(pair.instance.predicted_probs);
        w.f64_vec(pair.faithful.scores);
        w.f64_vec(pair.unfaithful.scores);
        w.u32(static_cast<std::uint32_t>(pair.provenance));
        w.u64(pair.interpreter_passes);
    }
    w.close();
}

inline GoldenSet load_golden_set(const std::filesystem::path& path) {
    BinaryReader r(path);
    if (r.u32() != kGoldenSetMagic) throw std::runtime_error("not a golden set file: " + path.string());
    if (r.u32() != kGoldenSetVersion) throw std::runtime_error("unsupported golden set version");
    GoldenSet set;
    set.seed = r.u64();
    const std::uint64_t k = r.u64();
    set.pairs.reserve(k);
    for (std::uint64_t i = 0; i < k; ++i) {
        GoldenPair pair;
        const std::uint64_t l = r.u64();
        pair.instance.input.tokens.reserve(l);
        for (std::uint64_t t = 0; t < l; ++t) pair.instance.input.tokens.push_back(r.u32());
        pair.instance.gold_label = r.u64();
        pair.instance.predicted_class = r.u64();
        pair.instance.predicted_probs = r.f64_vec();
        pair.faithful.scores = r.f64_vec();
        pair.unfaithful.scores = r.f64_vec();
        pair.provenance = static_cast<InterpreterId>(r.u32());
        pair.interpreter_passes = r.u64();
        set.pairs.push_back(std::move(pair));
    }
    return set;
}

}  // namespace faitheval

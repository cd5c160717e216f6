#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "faitheval/core.hpp"
#include "faitheval/linalg.hpp"
#include "faitheval/model.hpp"
#include "faitheval/rng.hpp"

namespace faitheval {

// The registered interpretation methods. `random` is not in this set; it is
// the unfaithful generator and handled separately.
enum class InterpreterId { lime, word_omission, saliency_mu, saliency_l2, ig_mu, ig_l2 };

inline constexpr std::array<InterpreterId, 6> kAllInterpreters = {
    InterpreterId::lime,        InterpreterId::word_omission, InterpreterId::saliency_mu,
    InterpreterId::saliency_l2, InterpreterId::ig_mu,         InterpreterId::ig_l2,
};

inline const char* interpreter_name(InterpreterId id) {
    switch (id) {
        case InterpreterId::lime: return "LIME";
        case InterpreterId::word_omission: return "WO";
        case InterpreterId::saliency_mu: return "SA_mu";
        case InterpreterId::saliency_l2: return "SA_l2";
        case InterpreterId::ig_mu: return "IG_mu";
        case InterpreterId::ig_l2: return "IG_l2";
    }
    return "?";
}

inline InterpreterId interpreter_from_name(const std::string& name) {
    for (InterpreterId id : kAllInterpreters) {
        if (name == interpreter_name(id)) return id;
    }
    throw std::invalid_argument("unknown interpreter: " + name);
}

enum class Reduction { mean, l2_norm };

struct InterpreterConfig {
    std::size_t lime_samples = 200;
    double lime_kernel_width = 0.25;  // on fraction-of-tokens-removed distance
    double lime_ridge_lambda = 1.0;
    std::size_t ig_steps = 32;
    Reduction reduction = Reduction::mean;
    std::uint64_t seed = 0;
};

namespace detail {

inline void require_nonempty(const ClassificationInstance& instance) {
    if (instance.input.empty()) throw std::invalid_argument("empty input");
}

inline Interpretation reduce_rows(const Matrix& m, Reduction reduction) {
    Interpretation out;
    out.scores.resize(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* row = m.row(i);
        double acc = 0.0;
        if (reduction == Reduction::mean) {
            for (std::size_t k = 0; k < m.cols; ++k) acc += row[k];
            acc /= static_cast<double>(m.cols);
        } else {
            for (std::size_t k = 0; k < m.cols; ++k) acc += row[k] * row[k];
            acc = std::sqrt(acc);
        }
        out.scores[i] = acc;
    }
    return out;
}

}  // namespace detail

// WO: score_i = p_c(x) - p_c(x with token i deleted). The original
// probability comes from the instance, so the cost is exactly l_x passes.
template <TextModel M>
Interpretation interpret_word_omission(const M& model, const ClassificationInstance& instance) {
    detail::require_nonempty(instance);
    const std::size_t l = instance.length();
    const double p0 = instance.predicted_prob();
    Interpretation out;
    out.scores.resize(l);
    for (std::size_t i = 0; i < l; ++i) {
        const Prediction pred = model.predict(remove_tokens(instance.input, {i}));
        out.scores[i] = p0 - pred.probs[instance.predicted_class];
    }
    return out;
}

// SA: gradient of p_c at the input, reduced per token (mean or l2 norm over
// the embedding dimension). One forward pass.
template <DifferentiableTextModel M>
Interpretation interpret_saliency(const M& model, const ClassificationInstance& instance,
                                  Reduction reduction) {
    detail::require_nonempty(instance);
    const Matrix g = model.grad_embedded(model.embed(instance.input), instance.predicted_class);
    return detail::reduce_rows(g, reduction);
}

// Pre-reduction IG attribution matrix: midpoint-rule approximation of the
// path integral from the zero-embedding baseline to the input, times
// (input - baseline). Row sums over everything give the completeness total.
template <DifferentiableTextModel M>
Matrix ig_attributions(const M& model, const ClassificationInstance& instance,
                       std::size_t steps) {
    detail::require_nonempty(instance);
    if (steps < 1) throw std::invalid_argument("ig_steps must be at least 1");
    const Matrix x = model.embed(instance.input);
    Matrix acc(x.rows, x.cols);
    for (std::size_t s = 0; s < steps; ++s) {
        const double alpha = (static_cast<double>(s) + 0.5) / static_cast<double>(steps);
        const Matrix g = model.grad_embedded(scaled(x, alpha), instance.predicted_class);
        for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += g.data[i];
    }
    const double inv_steps = 1.0 / static_cast<double>(steps);
    for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] *= x.data[i] * inv_steps;
    return acc;
}

template <DifferentiableTextModel M>
Interpretation interpret_integrated_gradients(const M& model,
                                              const ClassificationInstance& instance,
                                              Reduction reduction,
                                              const InterpreterConfig& config) {
    return detail::reduce_rows(ig_attributions(model, instance, config.ig_steps), reduction);
}

// LIME: fits a weighted ridge regression from binary token-presence features
// to the queried class probability over `lime_samples` random deletions.
// Each sample removes a subset of positions (size uniform on 1..l_x, chosen
// without replacement) and is weighted by exp(-d^2 / sigma^2) where d is the
// fraction of tokens removed. The intercept is unpenalized. Scores are the
// fitted per-token coefficients.
template <TextModel M>
Interpretation interpret_lime(const M& model, const ClassificationInstance& instance,
                              const InterpreterConfig& config) {
    detail::require_nonempty(instance);
    if (config.lime_samples < 1) throw std::invalid_argument("lime_samples must be at least 1");
    const std::size_t l = instance.length();
    const std::size_t dim = l + 1;  // intercept + one coefficient per token
    const double sigma2 = config.lime_kernel_width * config.lime_kernel_width;

    Rng rng(config.seed);
    Matrix a(dim, dim);
    std::vector<double> rhs(dim, 0.0);
    std::vector<std::size_t> positions(l);
    std::vector<double> z(dim, 0.0);
    z[0] = 1.0;  // intercept feature

    for (std::size_t n = 0; n < config.lime_samples; ++n) {
        std::iota(positions.begin(), positions.end(), std::size_t{0});
        const std::size_t removed = 1 + rng.uniform_index(l);
        rng.partial_shuffle(positions, removed);

        std::fill(z.begin() + 1, z.end(), 1.0);
        for (std::size_t i = 0; i < removed; ++i) z[1 + positions[i]] = 0.0;

        const Prediction pred = model.predict(
            remove_tokens(instance.input, {positions.begin(), positions.begin() + static_cast<std::ptrdiff_t>(removed)}));
        const double y = pred.probs[instance.predicted_class];

        const double d = static_cast<double>(removed) / static_cast<double>(l);
        const double w = std::exp(-(d * d) / sigma2);
        for (std::size_t r = 0; r < dim; ++r) {
            if (z[r] == 0.0) continue;
            const double wr = w * z[r];
            rhs[r] += wr * y;
            for (std::size_t c = 0; c < dim; ++c) a.at(r, c) += wr * z[c];
        }
    }
    for (std::size_t i = 1; i < dim; ++i) a.at(i, i) += config.lime_ridge_lambda;

    const std::vector<double> beta = cholesky_solve(std::move(a), std::move(rhs));
    Interpretation out;
    out.scores.assign(beta.begin() + 1, beta.end());
    return out;
}

// The unfaithful side of a golden pair: i.i.d. Uniform(0,1) per token.
// Model-free and consumes no forward passes.
inline Interpretation interpret_random(const ClassificationInstance& instance,
                                       std::uint64_t seed) {
    detail::require_nonempty(instance);
    Rng rng(seed);
    Interpretation out;
    out.scores.resize(instance.length());
    for (double& s : out.scores) s = rng.uniform01();
    return out;
}

template <DifferentiableTextModel M>
Interpretation apply_interpreter(InterpreterId id, const M& model,
                                 const ClassificationInstance& instance,
                                 const InterpreterConfig& config) {
    switch (id) {
        case InterpreterId::lime: return interpret_lime(model, instance, config);
        case InterpreterId::word_omission: return interpret_word_omission(model, instance);
        case InterpreterId::saliency_mu: return interpret_saliency(model, instance, Reduction::mean);
        case InterpreterId::saliency_l2: return interpret_saliency(model, instance, Reduction::l2_norm);
        case InterpreterId::ig_mu:
            return interpret_integrated_gradients(model, instance, Reduction::mean, config);
        case InterpreterId::ig_l2:
            return interpret_integrated_gradients(model, instance, Reduction::l2_norm, config);
    }
    throw std::invalid_argument("unknown interpreter id");
}

}  // namespace faitheval

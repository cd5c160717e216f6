#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "faitheval/core.hpp"
#include "faitheval/model.hpp"

namespace faitheval {

enum class MetricId { dfmit, dffot, comp, suff, corr, mono };

inline constexpr std::array<MetricId, 6> kAllMetrics = {
    MetricId::dfmit, MetricId::dffot, MetricId::comp,
    MetricId::suff,  MetricId::corr,  MetricId::mono,
};

inline const char* metric_name(MetricId id) {
    switch (id) {
        case MetricId::dfmit: return "DFMIT";
        case MetricId::dffot: return "DFFOT";
        case MetricId::comp: return "COMP";
        case MetricId::suff: return "SUFF";
        case MetricId::corr: return "CORR";
        case MetricId::mono: return "MONO";
    }
    return "?";
}

inline MetricId metric_from_name(const std::string& name) {
    for (MetricId id : kAllMetrics) {
        if (name == metric_name(id)) return id;
    }
    throw std::invalid_argument("unknown metric: " + name);
}

// Orientation: which direction means "more faithful".
inline bool higher_is_faithful(MetricId id) {
    switch (id) {
        case MetricId::dfmit:
        case MetricId::comp:
        case MetricId::corr:
        case MetricId::mono: return true;
        case MetricId::dffot:
        case MetricId::suff: return false;
    }
    return true;
}

struct FaithfulnessScore {
    MetricId metric = MetricId::dfmit;
    double value = 0.0;
    std::size_t passes_used = 0;
};

// Removal percentages q for COMP/SUFF.
inline const std::vector<double> kDefaultB = {1.0, 5.0, 10.0, 20.0, 50.0};

// Pearson correlation with the conventional degenerate cases pinned: a
// constant vector (exact min == max) or length-1 input yields 0.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("pearson: length mismatch");
    if (a.empty()) throw std::invalid_argument("pearson: empty input");
    const std::size_t n = a.size();
    if (n == 1) return 0.0;
    auto constant = [](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return *lo == *hi;
    };
    if (constant(a) || constant(b)) return 0.0;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    const double r = sab / std::sqrt(saa * sbb);
    return std::clamp(r, -1.0, 1.0);
}

namespace detail {

inline void check_metric_args(const ClassificationInstance& instance,
                              const ImportanceRanking& ranking) {
    if (instance.input.empty()) throw std::invalid_argument("empty input");
    if (ranking.size() != instance.length()) {
        throw std::invalid_argument("ranking length does not match instance");
    }
}

// Importance scores along the ranking: u_k = score of the k-th ranked token,
// i.e. the interpretation sorted descending.
inline std::vector<double> scores_descending(const Interpretation& interpretation,
                                             const ImportanceRanking& ranking) {
    if (interpretation.size() != ranking.size()) {
        throw std::invalid_argument("interpretation length does not match ranking");
    }
    std::vector<double> u(ranking.size());
    for (std::size_t k = 0; k < ranking.size(); ++k) u[k] = interpretation.scores[ranking.order[k]];
    return u;
}

}  // namespace detail

// Decision flip by most informative token: 1 iff deleting the top-ranked
// token flips the predicted class. Always exactly 1 pass.
template <TextModel M>
FaithfulnessScore dfmit(const M& model, const ClassificationInstance& instance,
                        const ImportanceRanking& ranking) {
    detail::check_metric_args(instance, ranking);
    const Prediction pred = model.predict(remove_top_k(instance.input, ranking, 1));
    return {MetricId::dfmit, pred.predicted_class != instance.predicted_class ? 1.0 : 0.0, 1};
}

// Decision flip fraction of tokens: smallest k/l_x whose top-k deletion flips
// the class, walking k upward with early exit; 1 when nothing flips (the
// k = l_x step runs the model on the empty sequence).
template <TextModel M>
FaithfulnessScore dffot(const M& model, const ClassificationInstance& instance,
                        const ImportanceRanking& ranking) {
    detail::check_metric_args(instance, ranking);
    const std::size_t l = instance.length();
    for (std::size_t k = 1; k <= l; ++k) {
        const Prediction pred = model.predict(remove_top_k(instance.input, ranking, k));
        if (pred.predicted_class != instance.predicted_class) {
            return {MetricId::dffot, static_cast<double>(k) / static_cast<double>(l), k};
        }
    }
    return {MetricId::dffot, 1.0, l};
}

// Comprehensiveness: mean drop in the predicted-class probability after
// removing the top q% tokens, over q in B. One pass per q, no dedup.
template <TextModel M>
FaithfulnessScore comp(const M& model, const ClassificationInstance& instance,
                       const ImportanceRanking& ranking,
                       const std::vector<double>& B = kDefaultB) {
    detail::check_metric_args(instance, ranking);
    if (B.empty()) throw std::invalid_argument("B must be non-empty");
    const double p0 = instance.predicted_prob();
    double sum = 0.0;
    for (double q : B) {
        const std::size_t k = top_k_count(instance.length(), q);
        const Prediction pred = model.predict(remove_top_k(instance.input, ranking, k));
        sum += p0 - pred.probs[instance.predicted_class];
    }
    return {MetricId::comp, sum / static_cast<double>(B.size()), B.size()};
}

// Sufficiency: mean drop when keeping only the top q% tokens.
template <TextModel M>
FaithfulnessScore suff(const M& model, const ClassificationInstance& instance,
                       const ImportanceRanking& ranking,
                       const std::vector<double>& B = kDefaultB) {
    detail::check_metric_args(instance, ranking);
    if (B.empty()) throw std::invalid_argument("B must be non-empty");
    const double p0 = instance.predicted_prob();
    double sum = 0.0;
    for (double q : B) {
        const std::size_t k = top_k_count(instance.length(), q);
        const Prediction pred = model.predict(retain_tokens(instance.input, ranking, k));
        sum += p0 - pred.probs[instance.predicted_class];
    }
    return {MetricId::suff, sum / static_cast<double>(B.size()), B.size()};
}

// Correlation between importance and the probability after deleting each
// ranked token individually: CORR = -pearson(u, p). l_x passes.
template <TextModel M>
FaithfulnessScore corr(const M& model, const ClassificationInstance& instance,
                       const ImportanceRanking& ranking, const Interpretation& interpretation) {
    detail::check_metric_args(instance, ranking);
    const std::vector<double> u = detail::scores_descending(interpretation, ranking);
    const std::size_t l = instance.length();
    std::vector<double> p(l);
    for (std::size_t k = 0; k < l; ++k) {
        const Prediction pred = model.predict(remove_tokens(instance.input, {ranking.order[k]}));
        p[k] = pred.probs[instance.predicted_class];
    }
    return {MetricId::corr, -pearson(u, p), l};
}

// Monotonicity: MONO = pearson(u, p) with p the probabilities along the
// removal prefixes [p(x), p(x minus top 1), ..., p(x minus top l_x-1)].
// p(x) is read from the instance, so l_x - 1 passes.
template <TextModel M>
FaithfulnessScore mono(const M& model, const ClassificationInstance& instance,
                       const ImportanceRanking& ranking, const Interpretation& interpretation) {
    detail::check_metric_args(instance, ranking);
    const std::vector<double> u = detail::scores_descending(interpretation, ranking);
    const std::size_t l = instance.length();
    std::vector<double> p(l);
    p[0] = instance.predicted_prob();
    for (std::size_t k = 1; k < l; ++k) {
        const Prediction pred = model.predict(remove_top_k(instance.input, ranking, k));
        p[k] = pred.probs[instance.predicted_class];
    }
    return {MetricId::mono, pearson(u, p), l - 1};
}

// Strict oriented comparison: true iff s_u is strictly more faithful than
// s_v. Ties are false by design so the diagnosticity indicator stays honest
// for coarse metrics.
inline bool compare(MetricId metric, const FaithfulnessScore& s_u, const FaithfulnessScore& s_v) {
    if (s_u.metric != metric || s_v.metric != metric) {
        throw std::invalid_argument("compare: metric mismatch");
    }
    return higher_is_faithful(metric) ? s_u.value > s_v.value : s_u.value < s_v.value;
}

template <TextModel M>
FaithfulnessScore evaluate_metric(MetricId id, const M& model,
                                  const ClassificationInstance& instance,
                                  const Interpretation& interpretation,
                                  const std::vector<double>& B = kDefaultB) {
    const ImportanceRanking ranking = rank_tokens(interpretation);
    switch (id) {
        case MetricId::dfmit: return dfmit(model, instance, ranking);
        case MetricId::dffot: return dffot(model, instance, ranking);
        case MetricId::comp: return comp(model, instance, ranking, B);
        case MetricId::suff: return suff(model, instance, ranking, B);
        case MetricId::corr: return corr(model, instance, ranking, interpretation);
        case MetricId::mono: return mono(model, instance, ranking, interpretation);
    }
    throw std::invalid_argument("unknown metric id");
}

}  // namespace faitheval

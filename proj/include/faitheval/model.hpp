#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "faitheval/core.hpp"
#include "faitheval/io.hpp"
#include "faitheval/linalg.hpp"
#include "faitheval/rng.hpp"

namespace faitheval {

// Softmax output plus the argmax class (first index on exact ties).
struct Prediction {
    std::vector<double> probs;
    std::size_t predicted_class = 0;
};

inline Prediction prediction_from_logits(const std::vector<double>& logits) {
    Prediction pred;
    pred.probs.resize(logits.size());
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
        pred.probs[j] = std::exp(logits[j] - m);
        sum += pred.probs[j];
    }
    for (double& p : pred.probs) p /= sum;
    pred.predicted_class = static_cast<std::size_t>(
        std::max_element(pred.probs.begin(), pred.probs.end()) - pred.probs.begin());
    return pred;
}

// Token string <-> index mapping. Index 0 is reserved for out-of-vocabulary.
struct Vocabulary {
    std::vector<std::string> tokens;  // index -> token
    std::unordered_map<std::string, TokenId> index;
    TokenId oov = 0;

    std::size_t size() const { return tokens.size(); }

    static Vocabulary build(const std::vector<std::vector<std::string>>& documents,
                            std::string oov_token = "<unk>") {
        Vocabulary v;
        v.tokens.push_back(std::move(oov_token));
        v.index.emplace(v.tokens[0], 0);
        for (const auto& doc : documents) {
            for (const auto& word : doc) {
                if (v.index.emplace(word, static_cast<TokenId>(v.tokens.size())).second) {
                    v.tokens.push_back(word);
                }
            }
        }
        return v;
    }

    TokenId encode_token(const std::string& word) const {
        auto it = index.find(word);
        return it == index.end() ? oov : it->second;
    }

    TokenSequence encode(const std::vector<std::string>& words) const {
        TokenSequence seq;
        seq.tokens.reserve(words.size());
        for (const auto& w : words) seq.tokens.push_back(encode_token(w));
        return seq;
    }

    const std::string& decode_token(TokenId id) const { return tokens.at(id); }
};

enum class ModelArch { linear, cnn };

inline const char* arch_name(ModelArch a) { return a == ModelArch::linear ? "linear" : "cnn"; }

struct LabeledExample {
    TokenSequence tokens;
    std::size_t label = 0;
};

using LabeledDataset = std::vector<LabeledExample>;

struct TrainConfig {
    std::size_t epochs = 12;
    std::size_t batch_size = 32;
    double learning_rate = 5e-3;
    std::size_t embed_dim = 32;
    std::size_t filters = 32;
    std::size_t kernel = 3;
    double init_scale = 0.1;
    std::uint64_t seed = 1;
};

// A text classifier with an exact forward-pass counter. Two architectures:
//
//   linear: mean-pooled token embeddings -> affine classifier -> softmax
//   cnn:    token embeddings -> 1d conv (no bias) -> relu -> global max
//           pool -> affine classifier -> softmax
//
// The empty sequence is a legal input and is evaluated on the zero pooled
// feature vector, so full-removal perturbations stay well-defined.
//
// predict/grad are read-only; the pass counter increments atomically by
// exactly 1 per forward evaluation (a backward is bundled with its forward).
class MeteredModel {
public:
    MeteredModel(ModelArch arch, Vocabulary vocab, std::vector<std::string> class_names,
                 Matrix embedding, Matrix conv, Matrix classifier_w,
                 std::vector<double> classifier_b, std::size_t kernel = 3)
        : arch_(arch),
          vocab_(std::move(vocab)),
          class_names_(std::move(class_names)),
          embedding_(std::move(embedding)),
          conv_(std::move(conv)),
          classifier_w_(std::move(classifier_w)),
          classifier_b_(std::move(classifier_b)),
          kernel_(kernel) {
        check_finite(embedding_.data);
        check_finite(conv_.data);
        check_finite(classifier_w_.data);
        check_finite(classifier_b_);
        if (class_names_.size() != classifier_b_.size()) {
            throw std::invalid_argument("class name count does not match classifier size");
        }
    }

    MeteredModel(const MeteredModel& other) { *this = other; }
    MeteredModel& operator=(const MeteredModel& other) {
        if (this != &other) {
            arch_ = other.arch_;
            vocab_ = other.vocab_;
            class_names_ = other.class_names_;
            embedding_ = other.embedding_;
            conv_ = other.conv_;
            classifier_w_ = other.classifier_w_;
            classifier_b_ = other.classifier_b_;
            kernel_ = other.kernel_;
            passes_.store(other.passes_.load());
        }
        return *this;
    }

    ModelArch arch() const { return arch_; }
    const Vocabulary& vocab() const { return vocab_; }
    const std::vector<std::string>& class_names() const { return class_names_; }
    std::size_t class_count() const { return classifier_b_.size(); }
    std::size_t embed_dim() const { return embedding_.cols; }
    std::size_t filters() const { return arch_ == ModelArch::cnn ? conv_.rows : 0; }
    std::size_t kernel() const { return kernel_; }

    const Matrix& embedding() const { return embedding_; }
    const Matrix& conv() const { return conv_; }
    const Matrix& classifier_weights() const { return classifier_w_; }
    const std::vector<double>& classifier_bias() const { return classifier_b_; }

    // Token ids -> their embedding rows. Does not count as a forward pass.
    Matrix embed(const TokenSequence& seq) const {
        Matrix x(seq.length(), embedding_.cols);
        for (std::size_t i = 0; i < seq.length(); ++i) {
            const TokenId id = seq.tokens[i];
            if (id >= embedding_.rows) throw std::out_of_range("token id outside vocabulary");
            std::copy_n(embedding_.row(id), embedding_.cols, x.row(i));
        }
        return x;
    }

    Prediction predict(const TokenSequence& seq) const { return predict_embedded(embed(seq)); }

    Prediction predict_embedded(const Matrix& x) const {
        ++passes_;
        return prediction_from_logits(logits_from(x));
    }

    // d p_cls / d x, evaluated analytically. Counts as one forward pass.
    Matrix grad_embedded(const Matrix& x, std::size_t cls) const {
        if (x.rows == 0) throw std::invalid_argument("gradient undefined on empty input");
        if (cls >= class_count()) throw std::out_of_range("class index out of range");
        ++passes_;
        return arch_ == ModelArch::linear ? grad_linear(x, cls) : grad_cnn(x, cls);
    }

    std::uint64_t passes() const { return passes_.load(); }
    void reset_passes() const { passes_.store(0); }

    void save(const std::filesystem::path& path) const;
    static MeteredModel load(const std::filesystem::path& path);

private:
    MeteredModel() = default;

    static void check_finite(const std::vector<double>& v) {
        for (double x : v) {
            if (!std::isfinite(x)) throw std::invalid_argument("model parameter not finite");
        }
    }

    std::vector<double> pooled_features(const Matrix& x) const {
        const std::size_t c = arch_ == ModelArch::linear ? embedding_.cols : conv_.rows;
        std::vector<double> h(c, 0.0);
        if (x.rows == 0) return h;  // zero feature vector on empty input
        if (arch_ == ModelArch::linear) {
            for (std::size_t i = 0; i < x.rows; ++i) {
                const double* row = x.row(i);
                for (std::size_t k = 0; k < x.cols; ++k) h[k] += row[k];
            }
            for (double& v : h) v /= static_cast<double>(x.rows);
        } else {
            for (std::size_t f = 0; f < conv_.rows; ++f) {
                h[f] = std::max(0.0, conv_max(x, f).first);
            }
        }
        return h;
    }

    // Max pre-activation over positions for one filter plus its position.
    // First position wins exact ties.
    std::pair<double, std::size_t> conv_max(const Matrix& x, std::size_t f) const {
        const std::size_t d = x.cols;
        const std::size_t half = kernel_ / 2;
        const double* kf = conv_.row(f);
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_t = 0;
        for (std::size_t t = 0; t < x.rows; ++t) {
            double a = 0.0;
            for (std::size_t dt = 0; dt < kernel_; ++dt) {
                const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + dt) - static_cast<std::ptrdiff_t>(half);
                if (src < 0 || src >= static_cast<std::ptrdiff_t>(x.rows)) continue;  // zero padding
                const double* row = x.row(static_cast<std::size_t>(src));
                const double* kslice = kf + dt * d;
                for (std::size_t k = 0; k < d; ++k) a += kslice[k] * row[k];
            }
            if (a > best) {
                best = a;
                best_t = t;
            }
        }
        return {best, best_t};
    }

    std::vector<double> logits_from(const Matrix& x) const {
        const std::vector<double> h = pooled_features(x);
        std::vector<double> z(classifier_b_);
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double* w = classifier_w_.row(j);
            for (std::size_t k = 0; k < h.size(); ++k) z[j] += w[k] * h[k];
        }
        return z;
    }

    // dp_c/dh_f = p_c (W_{c,f} - sum_j p_j W_{j,f})
    std::vector<double> prob_grad_wrt_features(const std::vector<double>& probs,
                                               std::size_t cls) const {
        const std::size_t nf = classifier_w_.cols;
        std::vector<double> g(nf);
        for (std::size_t f = 0; f < nf; ++f) {
            double avg = 0.0;
            for (std::size_t j = 0; j < probs.size(); ++j) avg += probs[j] * classifier_w_.at(j, f);
            g[f] = probs[cls] * (classifier_w_.at(cls, f) - avg);
        }
        return g;
    }

    Matrix grad_linear(const Matrix& x, std::size_t cls) const {
        const Prediction pred = prediction_from_logits(logits_from(x));
        const std::vector<double> gf = prob_grad_wrt_features(pred.probs, cls);
        Matrix g(x.rows, x.cols);
        const double inv_l = 1.0 / static_cast<double>(x.rows);
        for (std::size_t i = 0; i < x.rows; ++i) {
            for (std::size_t k = 0; k < x.cols; ++k) g.at(i, k) = gf[k] * inv_l;
        }
        return g;
    }

    Matrix grad_cnn(const Matrix& x, std::size_t cls) const {
        const Prediction pred = prediction_from_logits(logits_from(x));
        const std::vector<double> gh = prob_grad_wrt_features(pred.probs, cls);
        Matrix g(x.rows, x.cols);
        const std::size_t d = x.cols;
        const std::size_t half = kernel_ / 2;
        for (std::size_t f = 0; f < conv_.rows; ++f) {
            const auto [value, t] = conv_max(x, f);
            if (value <= 0.0) continue;  // relu gate closed, pooled feature is 0
            const double* kf = conv_.row(f);
            for (std::size_t dt = 0; dt < kernel_; ++dt) {
                const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + dt) - static_cast<std::ptrdiff_t>(half);
                if (src < 0 || src >= static_cast<std::ptrdiff_t>(x.rows)) continue;
                double* grow = g.row(static_cast<std::size_t>(src));
                const double* kslice = kf + dt * d;
                for (std::size_t k = 0; k < d; ++k) grow[k] += gh[f] * kslice[k];
            }
        }
        return g;
    }

    ModelArch arch_ = ModelArch::linear;
    Vocabulary vocab_;
    std::vector<std::string> class_names_;
    Matrix embedding_;     // V x d
    Matrix conv_;          // F x (kernel*d), cnn only
    Matrix classifier_w_;  // C x d (linear) or C x F (cnn)
    std::vector<double> classifier_b_;
    std::size_t kernel_ = 3;
    mutable std::atomic<std::uint64_t> passes_{0};
};

template <typename M>
concept TextModel = requires(const M& m, const TokenSequence& s) {
    { m.predict(s) } -> std::same_as<Prediction>;
    { m.class_count() } -> std::convertible_to<std::size_t>;
};

template <typename M>
concept DifferentiableTextModel =
    TextModel<M> && requires(const M& m, const TokenSequence& s, const Matrix& x, std::size_t c) {
        { m.embed(s) } -> std::same_as<Matrix>;
        { m.predict_embedded(x) } -> std::same_as<Prediction>;
        { m.grad_embedded(x, c) } -> std::same_as<Matrix>;
    };

template <TextModel M>
ClassificationInstance make_instance(const M& model, const TokenSequence& seq,
                                     std::size_t gold_label) {
    Prediction pred = model.predict(seq);
    ClassificationInstance inst;
    inst.input = seq;
    inst.gold_label = gold_label;
    inst.predicted_class = pred.predicted_class;
    inst.predicted_probs = std::move(pred.probs);
    return inst;
}

template <DifferentiableTextModel M>
Matrix grad_wrt_embeddings(const M& model, const TokenSequence& seq, std::size_t cls) {
    if (seq.empty()) throw std::invalid_argument("gradient undefined on empty input");
    return model.grad_embedded(model.embed(seq), cls);
}

inline std::uint64_t read_pass_counter(const MeteredModel& model) { return model.passes(); }
inline void reset_pass_counter(const MeteredModel& model) { model.reset_passes(); }

// ---- training ----

namespace detail {

// Plain Adam with a fixed step size, one state per parameter tensor.
struct AdamState {
    std::vector<double> m, v;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

    void apply(std::vector<double>& params, const std::vector<double>& grad, double lr,
               std::size_t step) {
        constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
            v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
            params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
        }
    }
};

}  // namespace detail

// Trains a model of the requested architecture. Deterministic given
// config.seed (seeded init, seeded shuffling, single-threaded). The pass
// counter is reset before returning so training does not pollute metric
// metering. Per-epoch mean training losses are written to *epoch_losses
// when provided.
inline MeteredModel train(Vocabulary vocab, const LabeledDataset& data,
                          std::vector<std::string> class_names, ModelArch arch,
                          const TrainConfig& config,
                          std::vector<double>* epoch_losses = nullptr) {
    if (data.empty()) throw std::invalid_argument("empty training corpus");
    std::size_t max_label = 0;
    for (const auto& ex : data) max_label = std::max(max_label, ex.label);
    const std::size_t num_classes = max_label + 1;
    std::vector<bool> seen(num_classes, false);
    for (const auto& ex : data) seen[ex.label] = true;
    if (num_classes < 2 || std::count(seen.begin(), seen.end(), true) < 2) {
        throw std::invalid_argument("training corpus has fewer than two classes");
    }
    if (class_names.size() != num_classes) {
        class_names.clear();
        for (std::size_t j = 0; j < num_classes; ++j) class_names.push_back(std::to_string(j));
    }

    const std::size_t d = config.embed_dim;
    const std::size_t nfilters = config.filters;
    const std::size_t kernel = config.kernel;
    const std::size_t feat = arch == ModelArch::linear ? d : nfilters;

    Rng rng(config.seed);
    auto init = [&](Matrix& m) {
        for (double& x : m.data) x = rng.normal(0.0, config.init_scale);
    };

    Matrix embedding(vocab.size(), d);
    init(embedding);
    Matrix conv;
    if (arch == ModelArch::cnn) {
        conv = Matrix(nfilters, kernel * d);
        init(conv);
    }
    Matrix cls_w(num_classes, feat);
    init(cls_w);
    std::vector<double> cls_b(num_classes, 0.0);

    detail::AdamState adam_emb(embedding.data.size());
    detail::AdamState adam_conv(conv.data.size());
    detail::AdamState adam_w(cls_w.data.size());
    detail::AdamState adam_b(cls_b.size());

    const std::size_t half = kernel / 2;
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::size_t adam_step = 0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < data.size(); start += config.batch_size) {
            const std::size_t end = std::min(start + config.batch_size, data.size());
            const double inv_batch = 1.0 / static_cast<double>(end - start);

            std::vector<double> g_emb(embedding.data.size(), 0.0);
            std::vector<double> g_conv(conv.data.size(), 0.0);
            std::vector<double> g_w(cls_w.data.size(), 0.0);
            std::vector<double> g_b(cls_b.size(), 0.0);

            for (std::size_t idx = start; idx < end; ++idx) {
                const LabeledExample& ex = data[order[idx]];
                const std::size_t l = ex.tokens.length();

                // forward
                std::vector<double> h(feat, 0.0);
                std::vector<std::size_t> win_t(arch == ModelArch::cnn ? nfilters : 0, 0);
                std::vector<double> win_a(arch == ModelArch::cnn ? nfilters : 0, 0.0);
                Matrix x(l, d);
                for (std::size_t i = 0; i < l; ++i) {
                    std::copy_n(embedding.row(ex.tokens.tokens[i]), d, x.row(i));
                }
                if (l > 0) {
                    if (arch == ModelArch::linear) {
                        for (std::size_t i = 0; i < l; ++i) {
                            for (std::size_t k = 0; k < d; ++k) h[k] += x.at(i, k);
                        }
                        for (double& v : h) v /= static_cast<double>(l);
                    } else {
                        for (std::size_t f = 0; f < nfilters; ++f) {
                            double best = -std::numeric_limits<double>::infinity();
                            std::size_t best_t = 0;
                            for (std::size_t t = 0; t < l; ++t) {
                                double a = 0.0;
                                for (std::size_t dt = 0; dt < kernel; ++dt) {
                                    const std::ptrdiff_t src =
                                        static_cast<std::ptrdiff_t>(t + dt) - static_cast<std::ptrdiff_t>(half);
                                    if (src < 0 || src >= static_cast<std::ptrdiff_t>(l)) continue;
                                    const double* row = x.row(static_cast<std::size_t>(src));
                                    const double* kslice = conv.row(f) + dt * d;
                                    for (std::size_t k = 0; k < d; ++k) a += kslice[k] * row[k];
                                }
                                if (a > best) {
                                    best = a;
                                    best_t = t;
                                }
                            }
                            win_t[f] = best_t;
                            win_a[f] = best;
                            h[f] = std::max(0.0, best);
                        }
                    }
                }
                std::vector<double> z(cls_b);
                for (std::size_t j = 0; j < num_classes; ++j) {
                    for (std::size_t k = 0; k < feat; ++k) z[j] += cls_w.at(j, k) * h[k];
                }
                const Prediction pred = prediction_from_logits(z);
                loss_sum += -std::log(std::max(pred.probs[ex.label], 1e-300));

                // backward (cross-entropy)
                std::vector<double> dz(pred.probs);
                dz[ex.label] -= 1.0;
                std::vector<double> dh(feat, 0.0);
                for (std::size_t j = 0; j < num_classes; ++j) {
                    const double gz = dz[j] * inv_batch;
                    g_b[j] += gz;
                    for (std::size_t k = 0; k < feat; ++k) {
                        g_w[j * feat + k] += gz * h[k];
                        dh[k] += dz[j] * cls_w.at(j, k);
                    }
                }
                if (l == 0) continue;
                if (arch == ModelArch::linear) {
                    const double scale = inv_batch / static_cast<double>(l);
                    for (std::size_t i = 0; i < l; ++i) {
                        double* ge = g_emb.data() + ex.tokens.tokens[i] * d;
                        for (std::size_t k = 0; k < d; ++k) ge[k] += dh[k] * scale;
                    }
                } else {
                    for (std::size_t f = 0; f < nfilters; ++f) {
                        if (win_a[f] <= 0.0) continue;
                        const double da = dh[f] * inv_batch;
                        const std::size_t t = win_t[f];
                        for (std::size_t dt = 0; dt < kernel; ++dt) {
                            const std::ptrdiff_t src =
                                static_cast<std::ptrdiff_t>(t + dt) - static_cast<std::ptrdiff_t>(half);
                            if (src < 0 || src >= static_cast<std::ptrdiff_t>(l)) continue;
                            const double* row = x.row(static_cast<std::size_t>(src));
                            double* ge = g_emb.data() + ex.tokens.tokens[static_cast<std::size_t>(src)] * d;
                            double* gk = g_conv.data() + f * kernel * d + dt * d;
                            const double* kslice = conv.row(f) + dt * d;
                            for (std::size_t k = 0; k < d; ++k) {
                                gk[k] += da * row[k];
                                ge[k] += da * kslice[k];
                            }
                        }
                    }
                }
            }

            ++adam_step;
            adam_emb.apply(embedding.data, g_emb, config.learning_rate, adam_step);
            if (arch == ModelArch::cnn) adam_conv.apply(conv.data, g_conv, config.learning_rate, adam_step);
            adam_w.apply(cls_w.data, g_w, config.learning_rate, adam_step);
            adam_b.apply(cls_b, g_b, config.learning_rate, adam_step);
        }
        const double epoch_loss = loss_sum / static_cast<double>(data.size());
        if (!std::isfinite(epoch_loss)) throw std::runtime_error("training diverged");
        if (epoch_losses) epoch_losses->push_back(epoch_loss);
    }

    MeteredModel model(arch, std::move(vocab), std::move(class_names), std::move(embedding),
                       std::move(conv), std::move(cls_w), std::move(cls_b), kernel);
    model.reset_passes();
    return model;
}

// ---- checkpoint ----

inline constexpr std::uint32_t kCheckpointMagic = 0x444d4546;  // "FEMD"
inline constexpr std::uint32_t kCheckpointVersion = 1;

inline void MeteredModel::save(const std::filesystem::path& path) const {
    BinaryWriter w(path);
    w.u32(kCheckpointMagic);
    w.u32(kCheckpointVersion);
    w.u32(arch_ == ModelArch::linear ? 0u : 1u);
    w.u32(static_cast<std::uint32_t>(class_count()));
    w.u32(static_cast<std::uint32_t>(embedding_.cols));
    w.u32(static_cast<std::uint32_t>(conv_.rows));
    w.u32(static_cast<std::uint32_t>(kernel_));
    w.u32(static_cast<std::uint32_t>(vocab_.size()));
    for (const auto& t : vocab_.tokens) w.str(t);
    w.u32(vocab_.oov);
    for (const auto& name : class_names_) w.str(name);
    w.f64_vec(embedding_.data);
    w.f64_vec(conv_.data);
    w.f64_vec(classifier_w_.data);
    w.f64_vec(classifier_b_);
    w.close();
}

inline MeteredModel MeteredModel::load(const std::filesystem::path& path) {
    BinaryReader r(path);
    if (r.u32() != kCheckpointMagic) throw std::runtime_error("not a model checkpoint: " + path.string());
    if (r.u32() != kCheckpointVersion) throw std::runtime_error("unsupported checkpoint version");
    const ModelArch arch = r.u32() == 0 ? ModelArch::linear : ModelArch::cnn;
    const std::uint32_t num_classes = r.u32();
    const std::uint32_t d = r.u32();
    const std::uint32_t nfilters = r.u32();
    const std::uint32_t kernel = r.u32();
    Vocabulary vocab;
    const std::uint32_t vsize = r.u32();
    vocab.tokens.reserve(vsize);
    for (std::uint32_t i = 0; i < vsize; ++i) {
        vocab.tokens.push_back(r.str());
        vocab.index.emplace(vocab.tokens.back(), i);
    }
    vocab.oov = r.u32();
    std::vector<std::string> class_names;
    for (std::uint32_t j = 0; j < num_classes; ++j) class_names.push_back(r.str());

    auto read_tensor = [&](std::size_t rows, std::size_t cols) {
        Matrix m(rows, cols);
        m.data = r.f64_vec();
        if (m.data.size() != rows * cols) throw std::runtime_error("corrupt checkpoint: tensor size mismatch");
        return m;
    };
    Matrix embedding = read_tensor(vsize, d);
    Matrix conv = read_tensor(nfilters, nfilters > 0 ? kernel * d : 0);
    Matrix cls_w = read_tensor(num_classes, arch == ModelArch::linear ? d : nfilters);
    std::vector<double> cls_b = r.f64_vec();
    if (cls_b.size() != num_classes) throw std::runtime_error("corrupt checkpoint: tensor size mismatch");

    return MeteredModel(arch, std::move(vocab), std::move(class_names), std::move(embedding),
                        std::move(conv), std::move(cls_w), std::move(cls_b), kernel);
}

}  // namespace faitheval

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "faitheval/corpus.hpp"
#include "faitheval/model.hpp"

#include "testutil.hpp"

using namespace faitheval;

namespace {

using testutil::grad_rel_error;
using testutil::near_pool_tie;

Corpus separable_corpus(std::size_t count, std::uint64_t seed) {
    // one class-exclusive keyword per class; trivially linearly separable
    Corpus corpus;
    Rng rng(seed);
    const std::vector<std::string> filler = {"the", "a", "on", "cat", "mat", "sat", "ran"};
    for (std::size_t i = 0; i < count; ++i) {
        const bool pos = rng.bernoulli(0.5);
        const std::size_t len = 4 + rng.uniform_index(8);
        std::vector<std::string> words(len);
        for (auto& w : words) w = filler[rng.uniform_index(filler.size())];
        words[rng.uniform_index(len)] = pos ? "up" : "down";
        std::string text;
        for (std::size_t j = 0; j < len; ++j) {
            if (j) text.push_back(' ');
            text += words[j];
        }
        corpus.records.push_back({std::move(text), pos ? "pos" : "neg"});
    }
    corpus.index_labels();
    return corpus;
}

}  // namespace

TEST_CASE("softmax predictions normalize, empty input gives uniform on zero bias") {
    for (ModelArch arch : {ModelArch::linear, ModelArch::cnn}) {
        MeteredModel model = testutil::random_model(arch, 31);
        Rng rng(5);
        for (int it = 0; it < 200; ++it) {
            const TokenSequence seq = testutil::random_sequence(rng, rng.uniform_index(12), 30);
            const Prediction p = model.predict(seq);
            double sum = 0.0;
            for (double v : p.probs) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
                sum += v;
            }
            CHECK(std::abs(sum - 1.0) < 1e-6);
            CHECK(p.predicted_class ==
                  static_cast<std::size_t>(std::max_element(p.probs.begin(), p.probs.end()) -
                                           p.probs.begin()));
        }
    }

    // zero classifier bias -> zero logits on the empty sequence
    Matrix emb(4, 3);
    Matrix w(2, 3);
    w.at(0, 0) = 1.0;
    w.at(1, 1) = -2.0;
    MeteredModel model(ModelArch::linear, {}, {"a", "b"}, std::move(emb), Matrix(), std::move(w),
                       {0.0, 0.0});
    const Prediction p = model.predict(TokenSequence{});
    CHECK(p.probs[0] == Catch::Approx(0.5));
    CHECK(p.probs[1] == Catch::Approx(0.5));
}

TEST_CASE("pass counter counts forward evaluations exactly") {
    MeteredModel model = testutil::random_model(ModelArch::linear, 7);
    const TokenSequence seq{1, 2, 3};

    model.reset_passes();
    CHECK(read_pass_counter(model) == 0);
    const Prediction a = model.predict(seq);
    CHECK(read_pass_counter(model) == 1);
    const Prediction b = model.predict(seq);
    CHECK(read_pass_counter(model) == 2);
    CHECK(a.probs == b.probs);

    model.reset_passes();
    model.predict(seq);
    model.predict(seq);
    model.predict(seq);
    CHECK(read_pass_counter(model) == 3);

    // gradient is one bundled forward
    model.reset_passes();
    grad_wrt_embeddings(model, seq, 0);
    CHECK(read_pass_counter(model) == 1);
}

TEST_CASE("analytic gradients match finite differences") {
    for (ModelArch arch : {ModelArch::linear, ModelArch::cnn}) {
        Rng rng(arch == ModelArch::linear ? 100 : 200);
        std::size_t checked = 0;
        std::uint64_t attempts = 0;
        while (checked < 100 && attempts < 1000) {
            ++attempts;
            MeteredModel model = testutil::random_model(arch, rng.next_u64());
            const std::size_t l = 1 + rng.uniform_index(9);
            const TokenSequence seq = testutil::random_sequence(rng, l, 30);
            const Matrix x = model.embed(seq);
            if (near_pool_tie(model, x)) continue;
            const std::size_t cls = rng.uniform_index(model.class_count());
            const double err = grad_rel_error(model.grad_embedded(x, cls),
                                              testutil::fd_grad(model, x, cls));
            CHECK(err < 1e-4);
            ++checked;
        }
        CHECK(checked == 100);
    }
}

TEST_CASE("linear architecture gradient matches the closed form") {
    MeteredModel model = testutil::random_model(ModelArch::linear, 17);
    Rng rng(18);
    for (int it = 0; it < 50; ++it) {
        const std::size_t l = 1 + rng.uniform_index(7);
        const TokenSequence seq = testutil::random_sequence(rng, l, 30);
        const Matrix x = model.embed(seq);
        const Prediction pred = model.predict_embedded(x);
        const std::size_t cls = rng.uniform_index(model.class_count());

        // d p_c / d x_ik = (1/l) p_c (W_ck - sum_j p_j W_jk)
        const Matrix g = model.grad_embedded(x, cls);
        for (std::size_t i = 0; i < l; ++i) {
            for (std::size_t k = 0; k < x.cols; ++k) {
                double avg = 0.0;
                for (std::size_t j = 0; j < model.class_count(); ++j) {
                    avg += pred.probs[j] * model.classifier_weights().at(j, k);
                }
                const double want = pred.probs[cls] *
                                    (model.classifier_weights().at(cls, k) - avg) /
                                    static_cast<double>(l);
                CHECK(g.at(i, k) == Catch::Approx(want).margin(1e-12));
            }
        }
    }
}

TEST_CASE("gradient of the empty sequence is rejected") {
    MeteredModel model = testutil::random_model(ModelArch::linear, 3);
    CHECK_THROWS_WITH(grad_wrt_embeddings(model, TokenSequence{}, 0),
                      "gradient undefined on empty input");
}

TEST_CASE("linear bag model is permutation invariant, tokens validated") {
    MeteredModel model = testutil::random_model(ModelArch::linear, 41);
    Rng rng(42);
    for (int it = 0; it < 100; ++it) {
        const std::size_t l = 1 + rng.uniform_index(10);
        TokenSequence seq = testutil::random_sequence(rng, l, 30);
        const Prediction before = model.predict(seq);
        rng.shuffle(seq.tokens);
        const Prediction after = model.predict(seq);
        for (std::size_t j = 0; j < before.probs.size(); ++j) {
            CHECK(before.probs[j] == Catch::Approx(after.probs[j]).margin(1e-12));
        }
    }
    CHECK_THROWS_AS(model.predict(TokenSequence{999}), std::out_of_range);
}

TEST_CASE("training learns a separable corpus and is deterministic") {
    const Corpus corpus = separable_corpus(500, 9);
    const Vocabulary vocab = Vocabulary::build(tokenize_corpus(corpus));
    const LabeledDataset data = encode_corpus(corpus, vocab);

    TrainConfig tc;
    tc.epochs = 8;
    tc.seed = 13;
    for (ModelArch arch : {ModelArch::linear, ModelArch::cnn}) {
        std::vector<double> losses;
        const MeteredModel model = train(vocab, data, corpus.class_names(), arch, tc, &losses);

        // training forwards are excluded from metric metering
        CHECK(read_pass_counter(model) == 0);

        std::size_t hits = 0;
        for (const auto& ex : data) {
            if (model.predict(ex.tokens).predicted_class == ex.label) ++hits;
        }
        CHECK(static_cast<double>(hits) / data.size() >= 0.95);
        CHECK(read_pass_counter(model) == data.size());

        REQUIRE(losses.size() == tc.epochs);
        for (std::size_t e = 1; e < 5; ++e) CHECK(losses[e] <= losses[e - 1]);

        const MeteredModel again = train(vocab, data, corpus.class_names(), arch, tc);
        CHECK(model.embedding().data == again.embedding().data);
        CHECK(model.conv().data == again.conv().data);
        CHECK(model.classifier_weights().data == again.classifier_weights().data);
        CHECK(model.classifier_bias() == again.classifier_bias());
        CHECK(read_pass_counter(again) == 0);
    }
}

TEST_CASE("training rejects degenerate corpora") {
    const Corpus corpus = separable_corpus(50, 10);
    const Vocabulary vocab = Vocabulary::build(tokenize_corpus(corpus));
    LabeledDataset data = encode_corpus(corpus, vocab);
    for (auto& ex : data) ex.label = 0;
    CHECK_THROWS_AS(train(vocab, data, {"only"}, ModelArch::linear, TrainConfig{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(train(vocab, LabeledDataset{}, {}, ModelArch::linear, TrainConfig{}),
                    std::invalid_argument);
}

TEST_CASE("checkpoint round trip is bit exact") {
    const Corpus corpus = separable_corpus(120, 21);
    const Vocabulary vocab = Vocabulary::build(tokenize_corpus(corpus));
    const LabeledDataset data = encode_corpus(corpus, vocab);
    TrainConfig tc;
    tc.epochs = 2;
    tc.seed = 5;

    for (ModelArch arch : {ModelArch::linear, ModelArch::cnn}) {
        const MeteredModel model = train(vocab, data, corpus.class_names(), arch, tc);
        const auto path = std::filesystem::temp_directory_path() /
                          ("faitheval_ckpt_" + std::string(arch_name(arch)) + ".bin");
        model.save(path);
        const MeteredModel loaded = MeteredModel::load(path);
        std::filesystem::remove(path);

        CHECK(loaded.arch() == model.arch());
        CHECK(loaded.vocab().tokens == model.vocab().tokens);
        CHECK(loaded.class_names() == model.class_names());
        CHECK(loaded.embedding().data == model.embedding().data);
        CHECK(loaded.conv().data == model.conv().data);
        CHECK(loaded.classifier_weights().data == model.classifier_weights().data);
        CHECK(loaded.classifier_bias() == model.classifier_bias());

        const TokenSequence probe = data[0].tokens;
        CHECK(loaded.predict(probe).probs == model.predict(probe).probs);
    }
}

TEST_CASE("checkpoint loader rejects foreign files") {
    const auto path = std::filesystem::temp_directory_path() / "faitheval_not_a_ckpt.bin";
    {
        BinaryWriter w(path);
        w.u32(0xdeadbeef);
        w.close();
    }
    CHECK_THROWS_AS(MeteredModel::load(path), std::runtime_error);
    std::filesystem::remove(path);
}

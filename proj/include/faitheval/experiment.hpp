#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "faitheval/corpus.hpp"
#include "faitheval/diagnosticity.hpp"
#include "faitheval/interpret.hpp"
#include "faitheval/metrics.hpp"
#include "faitheval/model.hpp"
#include "faitheval/report.hpp"
#include "faitheval/rng.hpp"

namespace faitheval {

struct ExperimentConfig {
    std::string corpus_train;  // empty -> bundled synthetic corpus
    std::string corpus_test;
    CorpusFormat corpus_format = CorpusFormat::csv;
    std::size_t synthetic_train = 2000;
    std::size_t synthetic_test = 500;

    ModelArch arch = ModelArch::cnn;
    TrainConfig train;
    InterpreterConfig interp;

    std::vector<MetricId> metrics{kAllMetrics.begin(), kAllMetrics.end()};
    std::vector<double> B = kDefaultB;
    std::size_t k = 2000;
    std::size_t disagreement_instances = 20;
    std::uint64_t seed = 7;
    std::filesystem::path out_dir = "out";
    std::set<ReportFormat> formats{ReportFormat::markdown, ReportFormat::csv, ReportFormat::svg};
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto from = s.find_first_not_of(" \t");
    if (from == std::string::npos) return "";
    const auto to = s.find_last_not_of(" \t");
    return s.substr(from, to - from + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& value, const std::string& key) {
    std::istringstream in(value);
    T v{};
    in >> v;
    if (in.fail() || !in.eof()) {
        throw std::invalid_argument("bad value for config key " + key + ": " + value);
    }
    return v;
}

}  // namespace detail

// Applies one flat key=value setting. Shared by the config-file parser and
// the CLI flag handling.
inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                               const std::string& value) {
    using detail::parse_number;
    if (key == "corpus_train") cfg.corpus_train = value;
    else if (key == "corpus_test") cfg.corpus_test = value;
    else if (key == "corpus_format") cfg.corpus_format = corpus_format_from_name(value);
    else if (key == "synthetic_train") cfg.synthetic_train = parse_number<std::size_t>(value, key);
    else if (key == "synthetic_test") cfg.synthetic_test = parse_number<std::size_t>(value, key);
    else if (key == "model") {
        if (value == "linear") cfg.arch = ModelArch::linear;
        else if (value == "cnn") cfg.arch = ModelArch::cnn;
        else throw std::invalid_argument("bad value for config key model: " + value);
    } else if (key == "epochs") cfg.train.epochs = parse_number<std::size_t>(value, key);
    else if (key == "batch_size") cfg.train.batch_size = parse_number<std::size_t>(value, key);
    else if (key == "learning_rate") cfg.train.learning_rate = parse_number<double>(value, key);
    else if (key == "embed_dim") cfg.train.embed_dim = parse_number<std::size_t>(value, key);
    else if (key == "filters") cfg.train.filters = parse_number<std::size_t>(value, key);
    else if (key == "kernel") cfg.train.kernel = parse_number<std::size_t>(value, key);
    else if (key == "init_scale") cfg.train.init_scale = parse_number<double>(value, key);
    else if (key == "lime_samples") cfg.interp.lime_samples = parse_number<std::size_t>(value, key);
    else if (key == "lime_kernel_width") cfg.interp.lime_kernel_width = parse_number<double>(value, key);
    else if (key == "lime_ridge_lambda") cfg.interp.lime_ridge_lambda = parse_number<double>(value, key);
    else if (key == "ig_steps") cfg.interp.ig_steps = parse_number<std::size_t>(value, key);
    else if (key == "metrics") {
        cfg.metrics.clear();
        for (const auto& name : detail::split_list(value)) cfg.metrics.push_back(metric_from_name(name));
        if (cfg.metrics.empty()) throw std::invalid_argument("metrics list is empty");
    } else if (key == "b") {
        cfg.B.clear();
        for (const auto& item : detail::split_list(value)) cfg.B.push_back(parse_number<double>(item, key));
        if (cfg.B.empty()) throw std::invalid_argument("b list is empty");
    } else if (key == "k") cfg.k = parse_number<std::size_t>(value, key);
    else if (key == "disagreement_instances") cfg.disagreement_instances = parse_number<std::size_t>(value, key);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(value, key);
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "formats") {
        cfg.formats.clear();
        for (const auto& name : detail::split_list(value)) cfg.formats.insert(report_format_from_name(name));
        if (cfg.formats.empty()) throw std::invalid_argument("formats list is empty");
    } else {
        throw std::invalid_argument("unknown config key: " + key);
    }
}

// Flat key = value file; blank lines and #-comments ignored.
inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = detail::trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << path.string() << " line " << line_no << ": expected key = value";
            throw std::runtime_error(msg.str());
        }
        apply_config_entry(cfg, detail::trim(stripped.substr(0, eq)),
                           detail::trim(stripped.substr(eq + 1)));
    }
    return cfg;
}

namespace detail {

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage ") + name + ": " + e.what());
    }
}

}  // namespace detail

struct ExperimentArtifacts {
    Report report;
    MeteredModel model;
    GoldenSet golden_set;
    std::vector<std::filesystem::path> files;
};

// Full pipeline: corpus -> trained model -> golden set -> per-metric
// diagnosticity + complexity -> disagreement table -> report files.
// Deterministic given cfg.seed; every stage failure carries the stage name.
inline ExperimentArtifacts run_experiment(const ExperimentConfig& cfg) {
    auto [train_corpus, test_corpus] = detail::stage("load-corpus", [&] {
        Corpus train_c, test_c;
        if (cfg.corpus_train.empty()) {
            train_c = make_synthetic_corpus(cfg.synthetic_train, derive_seed(cfg.seed, 11), "train");
            test_c = make_synthetic_corpus(cfg.synthetic_test, derive_seed(cfg.seed, 12), "test");
        } else {
            train_c = load_corpus(cfg.corpus_train, cfg.corpus_format);
            train_c.split = "train";
            test_c = cfg.corpus_test.empty() ? train_c
                                             : load_corpus(cfg.corpus_test, cfg.corpus_format);
            test_c.split = "test";
            for (const auto& [label, idx] : test_c.label_map) {
                if (!train_c.label_map.count(label)) {
                    throw std::runtime_error("test corpus has unseen label: " + label);
                }
            }
            test_c.label_map = train_c.label_map;
        }
        return std::pair{std::move(train_c), std::move(test_c)};
    });

    struct Trained {
        MeteredModel model;
        LabeledDataset test_data;
        double accuracy;
    };
    Trained trained = detail::stage("train", [&]() -> Trained {
        const Vocabulary vocab = Vocabulary::build(tokenize_corpus(train_corpus));
        const LabeledDataset train_data = encode_corpus(train_corpus, vocab);
        LabeledDataset test_data = encode_corpus(test_corpus, vocab);
        TrainConfig tc = cfg.train;
        tc.seed = derive_seed(cfg.seed, 21);
        MeteredModel model = train(vocab, train_data, train_corpus.class_names(), cfg.arch, tc);
        std::size_t hits = 0;
        for (const auto& ex : test_data) {
            if (model.predict(ex.tokens).predicted_class == ex.label) ++hits;
        }
        const double accuracy = static_cast<double>(hits) / static_cast<double>(test_data.size());
        model.reset_passes();
        return {std::move(model), std::move(test_data), accuracy};
    });

    auto [instances, golden] = detail::stage("golden-set", [&] {
        std::vector<ClassificationInstance> insts =
            make_instances(trained.model, trained.test_data);
        GoldenSet set = generate_golden_set(insts, trained.model, cfg.k,
                                            derive_seed(cfg.seed, 22), cfg.interp);
        return std::pair{std::move(insts), std::move(set)};
    });

    Report report;
    report.arch = arch_name(cfg.arch);
    report.seed = cfg.seed;
    report.golden_set_size = golden.size();
    report.train_size = train_corpus.size();
    report.test_size = test_corpus.size();
    report.test_accuracy = trained.accuracy;
    report.metrics = cfg.metrics;

    detail::stage("evaluate", [&] {
        for (MetricId metric : cfg.metrics) {
            const MetricSummary summary = summarize_metric(metric, golden, trained.model, cfg.B);
            report.diagnosticity.push_back(summary.diagnosticity);
            report.complexity.push_back(summary.complexity);
        }
        return 0;
    });

    detail::stage("report", [&] {
        const std::size_t want = std::min(cfg.disagreement_instances, instances.size());
        std::vector<std::size_t> ids(instances.size());
        std::iota(ids.begin(), ids.end(), std::size_t{0});
        Rng rng(derive_seed(cfg.seed, 23));
        rng.partial_shuffle(ids, want);
        ids.resize(want);
        InterpreterConfig icfg = cfg.interp;
        icfg.seed = derive_seed(cfg.seed, 24);
        report.disagreement = build_disagreement_table(instances, ids, trained.model,
                                                       cfg.metrics, icfg, cfg.B);
        return 0;
    });

    ExperimentArtifacts artifacts{std::move(report), std::move(trained.model), std::move(golden), {}};
    detail::stage("write", [&] {
        std::error_code ec;
        std::filesystem::create_directories(cfg.out_dir, ec);
        artifacts.files = emit_report(artifacts.report, cfg.out_dir, cfg.formats);
        const auto model_path = cfg.out_dir / "model.bin";
        artifacts.model.save(model_path);
        artifacts.files.push_back(model_path);
        const auto golden_path = cfg.out_dir / "golden_set.bin";
        save_golden_set(artifacts.golden_set, golden_path);
        artifacts.files.push_back(golden_path);
        return 0;
    });
    return artifacts;
}

}  // namespace faitheval

// Command-line front end: train models, interpret single inputs, score
// interpretations with the faithfulness metrics, run the full diagnosticity
// pipeline, and re-render reports from saved artifacts.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "faitheval/faitheval.hpp"

namespace {

using namespace faitheval;

// Ordered key=value overrides collected from CLI flags, applied on top of
// the config file (if any) so flags always win.
struct ConfigCli {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;

    void add_flag(CLI::App* cmd, const std::string& flag, const std::string& key,
                  const std::string& help) {
        cmd->add_option_function<std::string>(
            flag, [this, key](const std::string& v) { overrides.emplace_back(key, v); }, help);
    }

    void attach_common(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "flat key = value config file");
        add_flag(cmd, "--seed", "seed", "master seed");
        add_flag(cmd, "--model", "model", "architecture: linear or cnn");
        add_flag(cmd, "--metrics", "metrics", "comma list, e.g. COMP,SUFF,DFFOT");
        add_flag(cmd, "--k", "k", "golden set size");
        add_flag(cmd, "--out", "out_dir", "output directory");
        add_flag(cmd, "--format", "formats", "comma list of markdown,csv,svg");
        add_flag(cmd, "--corpus", "corpus_train", "training corpus path (default: bundled synthetic)");
        add_flag(cmd, "--corpus-test", "corpus_test", "test corpus path");
        add_flag(cmd, "--corpus-format", "corpus_format", "csv, tsv or jsonl");
        add_flag(cmd, "--epochs", "epochs", "training epochs");
        add_flag(cmd, "--batch-size", "batch_size", "training batch size");
        add_flag(cmd, "--learning-rate", "learning_rate", "optimizer step size");
        add_flag(cmd, "--embed-dim", "embed_dim", "embedding dimension");
        add_flag(cmd, "--filters", "filters", "cnn filter count");
        add_flag(cmd, "--ig-steps", "ig_steps", "integrated-gradients steps");
        add_flag(cmd, "--lime-samples", "lime_samples", "LIME perturbation count");
        add_flag(cmd, "--b", "b", "comma list of removal percentages for COMP/SUFF");
        add_flag(cmd, "--disagreement-instances", "disagreement_instances",
                 "instances in the disagreement section");
    }

    ExperimentConfig build() const {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        for (const auto& [key, value] : overrides) apply_config_entry(cfg, key, value);
        return cfg;
    }
};

std::pair<Corpus, Corpus> load_corpora(const ExperimentConfig& cfg) {
    if (cfg.corpus_train.empty()) {
        return {make_synthetic_corpus(cfg.synthetic_train, derive_seed(cfg.seed, 11), "train"),
                make_synthetic_corpus(cfg.synthetic_test, derive_seed(cfg.seed, 12), "test")};
    }
    Corpus train_c = load_corpus(cfg.corpus_train, cfg.corpus_format);
    Corpus test_c = cfg.corpus_test.empty() ? train_c : load_corpus(cfg.corpus_test, cfg.corpus_format);
    test_c.label_map = train_c.label_map;
    return {std::move(train_c), std::move(test_c)};
}

int cmd_train(const ConfigCli& cli) {
    const ExperimentConfig cfg = cli.build();
    auto [train_corpus, test_corpus] = load_corpora(cfg);
    const Vocabulary vocab = Vocabulary::build(tokenize_corpus(train_corpus));
    const LabeledDataset train_data = encode_corpus(train_corpus, vocab);
    const LabeledDataset test_data = encode_corpus(test_corpus, vocab);

    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.seed, 21);
    std::vector<double> losses;
    const MeteredModel model =
        train(vocab, train_data, train_corpus.class_names(), cfg.arch, tc, &losses);

    std::size_t hits = 0;
    for (const auto& ex : test_data) {
        if (model.predict(ex.tokens).predicted_class == ex.label) ++hits;
    }
    model.reset_passes();

    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    const auto path = cfg.out_dir / "model.bin";
    model.save(path);

    std::printf("trained %s model: %zu classes, vocab %zu, %zu train examples\n",
                arch_name(cfg.arch), model.class_count(), vocab.size(), train_data.size());
    for (std::size_t e = 0; e < losses.size(); ++e) {
        std::printf("  epoch %2zu  loss %.6f\n", e + 1, losses[e]);
    }
    std::printf("test accuracy: %.4f (%zu/%zu)\n", static_cast<double>(hits) / test_data.size(),
                hits, test_data.size());
    std::printf("checkpoint: %s\n", path.string().c_str());
    return 0;
}

ClassificationInstance instance_from_text(const MeteredModel& model, const std::string& text) {
    const std::vector<std::string> words = tokenize(text);
    if (words.empty()) throw std::runtime_error("text tokenizes to nothing");
    return make_instance(model, model.vocab().encode(words), 0);
}

int cmd_interpret(const std::string& model_file, const std::string& text,
                  const std::string& interpreter, const ConfigCli& cli) {
    const ExperimentConfig cfg = cli.build();
    const MeteredModel model = MeteredModel::load(model_file);
    const ClassificationInstance inst = instance_from_text(model, text);
    const std::vector<std::string> words = tokenize(text);

    InterpreterConfig icfg = cfg.interp;
    icfg.seed = derive_seed(cfg.seed, 31);
    model.reset_passes();
    const Interpretation scores =
        apply_interpreter(interpreter_from_name(interpreter), model, inst, icfg);
    const std::uint64_t passes = model.passes();

    std::printf("predicted class: %s (p = %.4f)\n",
                model.class_names()[inst.predicted_class].c_str(), inst.predicted_prob());
    std::printf("%-10s %-20s %s\n", "rank", "token", "score");
    const ImportanceRanking ranking = rank_tokens(scores);
    std::vector<std::size_t> rank_of(scores.size());
    for (std::size_t pos = 0; pos < ranking.size(); ++pos) rank_of[ranking.order[pos]] = pos + 1;
    for (std::size_t i = 0; i < words.size(); ++i) {
        std::printf("%-10zu %-20s %+.6f\n", rank_of[i], words[i].c_str(), scores.scores[i]);
    }
    std::printf("forward passes: %llu\n", static_cast<unsigned long long>(passes));
    return 0;
}

int cmd_evaluate(const std::string& model_file, const std::string& text,
                 const std::string& interpreter, const ConfigCli& cli) {
    const ExperimentConfig cfg = cli.build();
    const MeteredModel model = MeteredModel::load(model_file);
    const ClassificationInstance inst = instance_from_text(model, text);

    InterpreterConfig icfg = cfg.interp;
    icfg.seed = derive_seed(cfg.seed, 31);
    const Interpretation scores =
        apply_interpreter(interpreter_from_name(interpreter), model, inst, icfg);

    std::printf("predicted class: %s (p = %.4f), %zu tokens, interpreter %s\n",
                model.class_names()[inst.predicted_class].c_str(), inst.predicted_prob(),
                inst.length(), interpreter.c_str());
    std::printf("%-8s %-12s %s\n", "metric", "value", "passes");
    for (MetricId metric : cfg.metrics) {
        const FaithfulnessScore s = evaluate_metric(metric, model, inst, scores, cfg.B);
        std::printf("%-8s %-12.6f %zu\n", metric_name(metric), s.value, s.passes_used);
    }
    return 0;
}

void print_report_tables(const Report& report) {
    std::printf("%-8s %-14s %-10s %-12s %-6s %-6s\n", "metric", "diagnosticity", "std_err",
                "mean_passes", "min", "max");
    for (std::size_t i = 0; i < report.metrics.size(); ++i) {
        std::printf("%-8s %-14.4f %-10.4f %-12.4f %-6llu %-6llu\n",
                    metric_name(report.metrics[i]), report.diagnosticity[i].value,
                    report.diagnosticity[i].standard_error, report.complexity[i].mean_passes,
                    static_cast<unsigned long long>(report.complexity[i].min_passes),
                    static_cast<unsigned long long>(report.complexity[i].max_passes));
    }
}

int cmd_diag(const ConfigCli& cli) {
    const ExperimentConfig cfg = cli.build();
    const ExperimentArtifacts artifacts = run_experiment(cfg);
    std::printf("model: %s, test accuracy %.4f, golden set K = %zu\n", artifacts.report.arch.c_str(),
                artifacts.report.test_accuracy, artifacts.report.golden_set_size);
    print_report_tables(artifacts.report);
    for (const auto& f : artifacts.files) std::printf("wrote %s\n", f.string().c_str());
    return 0;
}

int cmd_report(const ConfigCli& cli) {
    const ExperimentConfig cfg = cli.build();
    const MeteredModel model = MeteredModel::load(cfg.out_dir / "model.bin");
    const GoldenSet golden = load_golden_set(cfg.out_dir / "golden_set.bin");

    Report report;
    report.arch = arch_name(model.arch());
    report.seed = golden.seed;
    report.golden_set_size = golden.size();
    report.metrics = cfg.metrics;
    for (MetricId metric : cfg.metrics) {
        const MetricSummary summary = summarize_metric(metric, golden, model, cfg.B);
        report.diagnosticity.push_back(summary.diagnosticity);
        report.complexity.push_back(summary.complexity);
    }

    // Distinct instances for the disagreement section, in first-seen order.
    std::vector<ClassificationInstance> instances;
    for (const GoldenPair& pair : golden.pairs) {
        bool seen = false;
        for (const auto& inst : instances) {
            if (inst.input == pair.instance.input) {
                seen = true;
                break;
            }
        }
        if (!seen) instances.push_back(pair.instance);
        if (instances.size() >= cfg.disagreement_instances) break;
    }
    std::vector<std::size_t> ids(instances.size());
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    InterpreterConfig icfg = cfg.interp;
    icfg.seed = derive_seed(golden.seed, 24);
    report.disagreement =
        build_disagreement_table(instances, ids, model, cfg.metrics, icfg, cfg.B);

    const auto files = emit_report(report, cfg.out_dir, cfg.formats);
    print_report_tables(report);
    for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"removal-based faithfulness metrics for text classifiers"};
    app.require_subcommand(1);

    ConfigCli train_cli, interpret_cli, evaluate_cli, diag_cli, report_cli;
    std::string model_file, text, interpreter = "WO";

    auto* train_cmd = app.add_subcommand("train", "train a classifier and save a checkpoint");
    train_cli.attach_common(train_cmd);

    auto* interpret_cmd =
        app.add_subcommand("interpret", "score one input's tokens with an interpreter");
    interpret_cli.attach_common(interpret_cmd);
    interpret_cmd->add_option("--model-file", model_file, "checkpoint path")->required();
    interpret_cmd->add_option("--text", text, "input text")->required();
    interpret_cmd->add_option("--interpreter", interpreter,
                              "LIME, WO, SA_mu, SA_l2, IG_mu or IG_l2");

    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "faithfulness metrics for one interpretation");
    evaluate_cli.attach_common(evaluate_cmd);
    evaluate_cmd->add_option("--model-file", model_file, "checkpoint path")->required();
    evaluate_cmd->add_option("--text", text, "input text")->required();
    evaluate_cmd->add_option("--interpreter", interpreter,
                             "LIME, WO, SA_mu, SA_l2, IG_mu or IG_l2");

    auto* diag_cmd = app.add_subcommand("diag", "full diagnosticity pipeline");
    diag_cli.attach_common(diag_cmd);

    auto* report_cmd = app.add_subcommand("report", "re-render reports from saved artifacts");
    report_cli.attach_common(report_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) return cmd_train(train_cli);
        if (interpret_cmd->parsed()) return cmd_interpret(model_file, text, interpreter, interpret_cli);
        if (evaluate_cmd->parsed()) return cmd_evaluate(model_file, text, interpreter, evaluate_cli);
        if (diag_cmd->parsed()) return cmd_diag(diag_cli);
        if (report_cmd->parsed()) return cmd_report(report_cli);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

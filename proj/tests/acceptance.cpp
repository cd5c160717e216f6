// Acceptance gate: eight end-to-end checks, one pass/fail line each.
// Run by ctest but framework-free so the lines read as a plain checklist.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "faitheval/faitheval.hpp"

#include "testutil.hpp"

using namespace faitheval;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

// ---- 1. complexity contracts at K = 500, under a minute ----

Outcome criterion_complexity() {
    const auto t0 = std::chrono::steady_clock::now();

    const Corpus train_c = make_synthetic_corpus(800, derive_seed(9001, 0), "train");
    const Vocabulary vocab = Vocabulary::build(tokenize_corpus(train_c));
    TrainConfig tc;
    tc.epochs = 6;
    const MeteredModel model =
        train(vocab, encode_corpus(train_c, vocab), train_c.class_names(), ModelArch::cnn, tc);

    const Corpus pool_c = make_synthetic_corpus(200, derive_seed(9001, 1), "test");
    const auto instances = make_instances(model, encode_corpus(pool_c, vocab));
    const GoldenSet set = generate_golden_set(instances, model, 500, 9002);

    double mean_len = 0.0;
    std::uint64_t max_len = 0;
    for (const GoldenPair& pair : set.pairs) {
        mean_len += static_cast<double>(pair.instance.length());
        max_len = std::max<std::uint64_t>(max_len, pair.instance.length());
    }
    mean_len /= static_cast<double>(set.size());

    std::map<MetricId, ComplexityReport> rep;
    for (MetricId m : kAllMetrics) rep[m] = measure_time_complexity(m, set, model);

    auto exact = [&](MetricId m, double v) {
        return rep[m].mean_passes == v && rep[m].min_passes == static_cast<std::uint64_t>(v) &&
               rep[m].max_passes == static_cast<std::uint64_t>(v);
    };
    const bool dfmit_ok = exact(MetricId::dfmit, 1.0);
    const bool comp_ok = exact(MetricId::comp, 5.0);
    const bool suff_ok = exact(MetricId::suff, 5.0);
    const bool corr_ok = std::abs(rep[MetricId::corr].mean_passes - mean_len) <= 1e-9;
    const bool mono_ok = std::abs(rep[MetricId::mono].mean_passes - (mean_len - 1.0)) <= 1e-9;
    const bool dffot_ok =
        rep[MetricId::dffot].min_passes >= 1 && rep[MetricId::dffot].max_passes <= max_len;
    const double elapsed = seconds_since(t0);

    Outcome out;
    out.ok = dfmit_ok && comp_ok && suff_ok && corr_ok && mono_ok && dffot_ok && elapsed < 60.0;
    std::ostringstream d;
    d << "K=500: DFMIT " << fmt(rep[MetricId::dfmit].mean_passes, 1) << ", COMP "
      << fmt(rep[MetricId::comp].mean_passes, 1) << ", SUFF "
      << fmt(rep[MetricId::suff].mean_passes, 1) << ", CORR "
      << fmt(rep[MetricId::corr].mean_passes) << " vs mean len " << fmt(mean_len) << ", MONO "
      << fmt(rep[MetricId::mono].mean_passes) << ", DFFOT range [" << rep[MetricId::dffot].min_passes
      << ", " << rep[MetricId::dffot].max_passes << "] <= " << max_len << ", " << fmt(elapsed, 1)
      << "s";
    out.detail = d.str();
    return out;
}

// ---- 2. diagnosticity ordering on the default pipeline, K = 2000 ----

Outcome criterion_ordering(std::optional<ExperimentArtifacts>& artifacts) {
    ExperimentConfig cfg;  // bundled synthetic corpus, CNN, K = 2000, seed 7
    cfg.out_dir = fs::temp_directory_path() / "faitheval_acceptance_out";
    std::error_code ec;
    fs::remove_all(cfg.out_dir, ec);

    const auto t0 = std::chrono::steady_clock::now();
    artifacts.emplace(run_experiment(cfg));
    const double elapsed = seconds_since(t0);

    const Report& report = artifacts->report;
    std::map<MetricId, double> diag;
    for (std::size_t i = 0; i < report.metrics.size(); ++i) {
        diag[report.metrics[i]] = report.diagnosticity[i].value;
    }

    Outcome out;
    out.ok = diag[MetricId::comp] >= 0.55 && diag[MetricId::suff] >= 0.55 &&
             diag[MetricId::corr] >= 0.55 && diag[MetricId::mono] >= 0.55 &&
             diag[MetricId::dfmit] <= 0.25 && diag[MetricId::comp] - diag[MetricId::dfmit] >= 0.3 &&
             diag[MetricId::suff] - diag[MetricId::dfmit] >= 0.3 && elapsed < 600.0;
    std::ostringstream d;
    d << "K=2000: COMP " << fmt(diag[MetricId::comp]) << ", SUFF " << fmt(diag[MetricId::suff])
      << ", CORR " << fmt(diag[MetricId::corr]) << ", MONO " << fmt(diag[MetricId::mono])
      << ", DFMIT " << fmt(diag[MetricId::dfmit]) << " (need >=0.55 / <=0.25, gaps >=0.3), "
      << fmt(elapsed, 1) << "s";
    out.detail = d.str();
    return out;
}

// ---- 3. estimator calibration against a Bernoulli(0.7) comparator ----

Outcome criterion_calibration() {
    int within = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(derive_seed(9300, seed));
        const DiagnosticityEstimate est = indicator_mean(
            MetricId::comp, 10000, [&](std::size_t) { return rng.bernoulli(0.7); });
        const double err = std::abs(est.value - 0.7);
        worst = std::max(worst, err);
        if (err <= 0.02) ++within;
    }
    Outcome out;
    out.ok = within >= 19;
    out.detail = std::to_string(within) + " of 20 seeds within 0.02 of 0.7 at K=10000 (worst |err| " +
                 fmt(worst) + ")";
    return out;
}

// ---- 4. analytic gradients vs central finite differences ----

Outcome criterion_gradients() {
    Outcome out;
    out.ok = true;
    std::ostringstream d;
    for (ModelArch arch : {ModelArch::linear, ModelArch::cnn}) {
        Rng rng(arch == ModelArch::linear ? 9400 : 9401);
        std::size_t checked = 0, attempts = 0;
        double worst = 0.0;
        while (checked < 100 && attempts < 1000) {
            ++attempts;
            const MeteredModel model = testutil::random_model(arch, rng.next_u64());
            const TokenSequence seq =
                testutil::random_sequence(rng, 1 + rng.uniform_index(9), 30);
            const Matrix x = model.embed(seq);
            if (testutil::near_pool_tie(model, x)) continue;  // fd straddles a kink
            const std::size_t cls = rng.uniform_index(model.class_count());
            worst = std::max(worst, testutil::grad_rel_error(model.grad_embedded(x, cls),
                                                             testutil::fd_grad(model, x, cls)));
            ++checked;
        }
        out.ok = out.ok && checked == 100 && worst < 1e-4;
        d << (arch == ModelArch::linear ? "linear" : "cnn") << " worst rel err "
          << fmt(worst, 8) << " over " << checked << " samples; ";
    }
    out.detail = d.str() + "threshold 1e-4";
    return out;
}

// ---- 5. IG completeness: exact on an affine probability, 2% on the CNN ----

Outcome criterion_ig_completeness(const std::optional<ExperimentArtifacts>& artifacts) {
    Outcome out;

    // (a) constant integrand: one midpoint step integrates it exactly
    const testutil::LinearProbModel lm;
    Rng rng(9500);
    double worst_abs = 0.0;
    for (int it = 0; it < 30; ++it) {
        const TokenSequence seq = testutil::random_sequence(rng, 1 + rng.uniform_index(10), 50);
        const ClassificationInstance inst = make_instance(lm, seq, 0);
        const Matrix attr = ig_attributions(lm, inst, 1);
        double total = 0.0;
        for (double v : attr.data) total += v;
        const Matrix x = lm.embed(seq);
        const double delta = lm.predict_embedded(x).probs[inst.predicted_class] -
                             lm.predict_embedded(Matrix(x.rows, x.cols)).probs[inst.predicted_class];
        worst_abs = std::max(worst_abs, std::abs(total - delta));
    }
    const bool linear_ok = worst_abs <= 1e-6;

    // (b) trained CNN from criterion 2, 128 steps on 50 smooth instances
    bool cnn_ok = false;
    double worst_rel = 0.0;
    std::size_t used = 0;
    if (artifacts) {
        const MeteredModel& model = artifacts->model;
        std::set<std::vector<TokenId>> seen;
        for (const GoldenPair& pair : artifacts->golden_set.pairs) {
            if (used == 50) break;
            if (!seen.insert(pair.instance.input.tokens).second) continue;
            const Matrix x = model.embed(pair.instance.input);
            const std::size_t cls = pair.instance.predicted_class;
            const double delta = pair.instance.predicted_prob() -
                                 model.predict_embedded(Matrix(x.rows, x.cols)).probs[cls];
            if (std::abs(delta) < 0.05) continue;
            const Matrix attr = ig_attributions(model, pair.instance, 128);
            double total = 0.0;
            for (double v : attr.data) total += v;
            worst_rel = std::max(worst_rel, std::abs(total - delta) / std::abs(delta));
            ++used;
        }
        cnn_ok = used == 50 && worst_rel <= 0.02;
    }

    out.ok = linear_ok && cnn_ok;
    out.detail = "affine model 1-step worst |err| " + fmt(worst_abs, 10) +
                 " (<=1e-6); cnn 128-step worst rel err " + fmt(worst_rel, 5) + " over " +
                 std::to_string(used) + " smooth instances (<=0.02)";
    return out;
}

// ---- 6. LIME recovers the linear bag model's token ordering ----

Outcome criterion_lime() {
    const MeteredModel model = testutil::random_model(ModelArch::linear, 9600);
    Rng rng(9601);
    double worst = 1.0;
    int passed = 0;
    for (int it = 0; it < 20; ++it) {
        const std::size_t l = 8 + rng.uniform_index(9);  // 8..16
        const ClassificationInstance inst =
            make_instance(model, testutil::random_sequence(rng, l, 30), 0);
        InterpreterConfig cfg;
        cfg.lime_samples = 500;
        cfg.seed = derive_seed(9602, static_cast<std::uint64_t>(it));
        const Interpretation lime = interpret_lime(model, inst, cfg);
        const double rho = testutil::spearman(lime.scores, testutil::bag_contributions(model, inst));
        worst = std::min(worst, rho);
        if (rho >= 0.9) ++passed;
    }
    Outcome out;
    out.ok = passed == 20;
    out.detail = std::to_string(passed) + " of 20 instances with spearman >= 0.9 (worst " +
                 fmt(worst) + "), 500 samples, lengths 8-16";
    return out;
}

// ---- 7. invariant property suites, 1000 randomized cases each ----

Outcome criterion_invariants() {
    bool bounds_ok = true, passes_ok = true;
    {
        Rng rng(9700);
        for (int it = 0; it < 1000 && bounds_ok && passes_ok; ++it) {
            const ModelArch arch = rng.bernoulli(0.5) ? ModelArch::linear : ModelArch::cnn;
            const MeteredModel model = testutil::random_model(arch, rng.next_u64());
            const std::size_t l = 1 + rng.uniform_index(10);
            const ClassificationInstance inst =
                make_instance(model, testutil::random_sequence(rng, l, 30), 0);
            const Interpretation interp = testutil::random_scores(rng, l);
            const ImportanceRanking ranking = rank_tokens(interp);

            const FaithfulnessScore v_dfmit = dfmit(model, inst, ranking);
            const FaithfulnessScore v_dffot = dffot(model, inst, ranking);
            const FaithfulnessScore v_comp = comp(model, inst, ranking);
            const FaithfulnessScore v_suff = suff(model, inst, ranking);
            const FaithfulnessScore v_corr = corr(model, inst, ranking, interp);
            const FaithfulnessScore v_mono = mono(model, inst, ranking, interp);
            bounds_ok = bounds_ok && (v_dfmit.value == 0.0 || v_dfmit.value == 1.0) &&
                        v_dffot.value > 0.0 && v_dffot.value <= 1.0 && v_comp.value >= -1.0 &&
                        v_comp.value <= 1.0 && v_suff.value >= -1.0 && v_suff.value <= 1.0 &&
                        v_corr.value >= -1.0 && v_corr.value <= 1.0 && v_mono.value >= -1.0 &&
                        v_mono.value <= 1.0;
            passes_ok = passes_ok && v_dfmit.passes_used == 1 && v_dffot.passes_used >= 1 &&
                        v_dffot.passes_used <= l && v_comp.passes_used == 5 &&
                        v_suff.passes_used == 5 && v_corr.passes_used == l &&
                        v_mono.passes_used == l - 1;
        }
    }

    bool rescale_ok = true;
    {
        Rng rng(9701);
        for (int it = 0; it < 1000 && rescale_ok; ++it) {
            const ModelArch arch = rng.bernoulli(0.5) ? ModelArch::linear : ModelArch::cnn;
            const MeteredModel model = testutil::random_model(arch, rng.next_u64());
            const std::size_t l = 1 + rng.uniform_index(8);
            const ClassificationInstance inst =
                make_instance(model, testutil::random_sequence(rng, l, 30), 0);
            const Interpretation interp = testutil::random_scores(rng, l);
            Interpretation scaled = interp;
            const double c = std::ldexp(1.0, static_cast<int>(rng.uniform_index(7)) - 3);
            for (double& s : scaled.scores) s *= c;
            for (MetricId m : kAllMetrics) {
                rescale_ok = rescale_ok && evaluate_metric(m, model, inst, interp).value ==
                                               evaluate_metric(m, model, inst, scaled).value;
            }
        }
    }

    bool compare_ok = true;
    {
        Rng rng(9702);
        for (int it = 0; it < 1000 && compare_ok; ++it) {
            const MetricId m = kAllMetrics[rng.uniform_index(kAllMetrics.size())];
            const FaithfulnessScore a{m, rng.uniform(-1.0, 1.0), 0};
            const FaithfulnessScore b =
                rng.bernoulli(0.2) ? a : FaithfulnessScore{m, rng.uniform(-1.0, 1.0), 0};
            compare_ok = compare_ok && !(compare(m, a, b) && compare(m, b, a));
            if (a.value == b.value) compare_ok = compare_ok && !compare(m, a, b);
        }
    }

    bool dffot_ok = true;
    {
        Rng rng(9703);
        for (int it = 0; it < 1000 && dffot_ok; ++it) {
            const ModelArch arch = rng.bernoulli(0.5) ? ModelArch::linear : ModelArch::cnn;
            const MeteredModel model = testutil::random_model(arch, rng.next_u64());
            const std::size_t l = 1 + rng.uniform_index(6);
            const ClassificationInstance inst =
                make_instance(model, testutil::random_sequence(rng, l, 30), 0);
            const ImportanceRanking ranking = rank_tokens(testutil::random_scores(rng, l));
            dffot_ok = dffot_ok && dffot(model, inst, ranking).value ==
                                       testutil::brute_force_dffot(model, inst, ranking);
        }
    }

    bool determinism_ok = true;
    {
        const MeteredModel model = testutil::random_model(ModelArch::cnn, 9704);
        Rng rng(9705);
        std::vector<ClassificationInstance> pool;
        for (int i = 0; i < 10; ++i) {
            pool.push_back(
                make_instance(model, testutil::random_sequence(rng, 1 + rng.uniform_index(10), 30), 0));
        }
        const GoldenSet a = generate_golden_set(pool, model, 1000, 9706);
        const GoldenSet b = generate_golden_set(pool, model, 1000, 9706);
        determinism_ok = a.size() == 1000 && b.size() == 1000;
        for (std::size_t i = 0; i < a.size() && determinism_ok; ++i) {
            determinism_ok = a.pairs[i].instance.input == b.pairs[i].instance.input &&
                             a.pairs[i].faithful == b.pairs[i].faithful &&
                             a.pairs[i].unfaithful == b.pairs[i].unfaithful &&
                             a.pairs[i].provenance == b.pairs[i].provenance &&
                             a.pairs[i].interpreter_passes == b.pairs[i].interpreter_passes;
        }
    }

    Outcome out;
    out.ok = bounds_ok && passes_ok && rescale_ok && compare_ok && dffot_ok && determinism_ok;
    auto word = [](bool v) { return v ? "ok" : "FAIL"; };
    std::ostringstream d;
    d << "1000 cases each: bounds " << word(bounds_ok) << ", pass counts " << word(passes_ok)
      << ", rescaling " << word(rescale_ok) << ", compare " << word(compare_ok)
      << ", dffot oracle " << word(dffot_ok) << ", golden determinism " << word(determinism_ok);
    out.detail = d.str();
    return out;
}

// ---- 8. SUFF and DFFOT disagree on a best interpreter somewhere ----

Outcome criterion_disagreement(const std::optional<ExperimentArtifacts>& artifacts) {
    Outcome out;
    if (!artifacts) {
        out.detail = "no pipeline artifacts (criterion 2 did not run)";
        return out;
    }
    const auto& table = artifacts->report.disagreement;
    std::set<std::size_t> ids;
    for (const auto& e : table) ids.insert(e.instance_id);
    std::size_t differing = 0;
    for (std::size_t id : ids) {
        const std::string by_suff = top_choice(table, id, MetricId::suff);
        const std::string by_dffot = top_choice(table, id, MetricId::dffot);
        if (by_suff != by_dffot) ++differing;
    }
    out.ok = differing >= 1;
    out.detail = std::to_string(differing) + " of " + std::to_string(ids.size()) +
                 " report instances rank a different best interpreter under SUFF vs DFFOT";
    return out;
}

}  // namespace

int main() {
    std::optional<ExperimentArtifacts> artifacts;
    struct Row {
        const char* name;
        Outcome outcome;
    };
    std::vector<Row> rows;
    rows.push_back({"1. complexity contracts", criterion_complexity()});
    rows.push_back({"2. diagnosticity ordering", criterion_ordering(artifacts)});
    rows.push_back({"3. estimator calibration", criterion_calibration()});
    rows.push_back({"4. gradient correctness", criterion_gradients()});
    rows.push_back({"5. ig completeness", criterion_ig_completeness(artifacts)});
    rows.push_back({"6. lime fidelity", criterion_lime()});
    rows.push_back({"7. invariant suites", criterion_invariants()});
    rows.push_back({"8. disagreement reproduction", criterion_disagreement(artifacts)});

    int failures = 0;
    for (const Row& row : rows) {
        if (!row.outcome.ok) ++failures;
        std::printf("[%s] %s: %s\n", row.outcome.ok ? "PASS" : "FAIL", row.name,
                    row.outcome.detail.c_str());
    }
    if (failures) std::printf("%d of 8 criteria failed\n", failures);
    else std::printf("all 8 criteria passed\n");
    return failures == 0 ? 0 : 1;
}

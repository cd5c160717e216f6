#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "faitheval/diagnosticity.hpp"
#include "faitheval/interpret.hpp"
#include "faitheval/metrics.hpp"

namespace faitheval {

enum class ReportFormat { markdown, csv, svg };

inline ReportFormat report_format_from_name(const std::string& name) {
    if (name == "markdown") return ReportFormat::markdown;
    if (name == "csv") return ReportFormat::csv;
    if (name == "svg") return ReportFormat::svg;
    throw std::invalid_argument("unknown report format: " + name);
}

// One cell of the Table-1 analogue: how one interpreter scores on one metric
// for one instance, and its rank among the interpreters (1 = most faithful
// under that metric's orientation; ties broken by interpreter order).
struct DisagreementEntry {
    std::size_t instance_id = 0;
    std::size_t instance_length = 0;
    MetricId metric = MetricId::dfmit;
    InterpreterId interpreter = InterpreterId::lime;
    double value = 0.0;
    std::size_t rank = 0;
};

struct Report {
    std::string arch;
    std::uint64_t seed = 0;
    std::size_t golden_set_size = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    double test_accuracy = 0.0;

    std::vector<MetricId> metrics;  // requested order; parallel to the rows below
    std::vector<DiagnosticityEstimate> diagnosticity;
    std::vector<ComplexityReport> complexity;
    std::vector<DisagreementEntry> disagreement;
};

namespace detail {

inline std::string fmt_fixed(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write report file: " + path.string());
    return out;
}

}  // namespace detail

// Evaluates every requested metric for every interpreter on a handful of
// instances and ranks the interpreters per (instance, metric). The point of
// the table: these rankings disagree across metrics.
template <DifferentiableTextModel M>
std::vector<DisagreementEntry> build_disagreement_table(
    const std::vector<ClassificationInstance>& instances,
    const std::vector<std::size_t>& instance_ids, const M& model,
    const std::vector<MetricId>& metrics, const InterpreterConfig& base_config,
    const std::vector<double>& B = kDefaultB) {
    std::vector<DisagreementEntry> table;
    for (std::size_t which = 0; which < instance_ids.size(); ++which) {
        const std::size_t id = instance_ids[which];
        const ClassificationInstance& inst = instances.at(id);

        std::vector<Interpretation> interps;
        interps.reserve(kAllInterpreters.size());
        for (InterpreterId interp : kAllInterpreters) {
            InterpreterConfig cfg = base_config;
            cfg.seed = derive_seed(base_config.seed, 7, which);
            interps.push_back(apply_interpreter(interp, model, inst, cfg));
        }

        for (MetricId metric : metrics) {
            std::vector<double> values(kAllInterpreters.size());
            for (std::size_t g = 0; g < kAllInterpreters.size(); ++g) {
                values[g] = evaluate_metric(metric, model, inst, interps[g], B).value;
            }
            std::vector<std::size_t> order(kAllInterpreters.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            const bool higher = higher_is_faithful(metric);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (values[a] != values[b]) {
                    return higher ? values[a] > values[b] : values[a] < values[b];
                }
                return a < b;
            });
            std::vector<std::size_t> rank(kAllInterpreters.size());
            for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = pos + 1;
            for (std::size_t g = 0; g < kAllInterpreters.size(); ++g) {
                table.push_back({id, inst.length(), metric, kAllInterpreters[g], values[g],
                                 rank[g]});
            }
        }
    }
    return table;
}

// The interpreter each metric would call best for one instance, from the
// disagreement table rows.
inline const char* top_choice(const std::vector<DisagreementEntry>& table, std::size_t instance_id,
                              MetricId metric) {
    for (const auto& e : table) {
        if (e.instance_id == instance_id && e.metric == metric && e.rank == 1) {
            return interpreter_name(e.interpreter);
        }
    }
    return "-";
}

inline void write_diagnosticity_csv(const Report& report, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    out << "metric,diagnosticity,std_err,mean_passes,min_passes,max_passes\n";
    for (std::size_t i = 0; i < report.metrics.size(); ++i) {
        out << metric_name(report.metrics[i]) << ','
            << detail::fmt_fixed(report.diagnosticity[i].value) << ','
            << detail::fmt_fixed(report.diagnosticity[i].standard_error) << ','
            << detail::fmt_fixed(report.complexity[i].mean_passes) << ','
            << report.complexity[i].min_passes << ',' << report.complexity[i].max_passes << '\n';
    }
    if (!out) throw std::runtime_error("report write failed: " + path.string());
}

inline void write_complexity_csv(const Report& report, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    out << "metric,mean_passes,min_passes,max_passes\n";
    for (std::size_t i = 0; i < report.metrics.size(); ++i) {
        out << metric_name(report.metrics[i]) << ','
            << detail::fmt_fixed(report.complexity[i].mean_passes) << ','
            << report.complexity[i].min_passes << ',' << report.complexity[i].max_passes << '\n';
    }
    if (!out) throw std::runtime_error("report write failed: " + path.string());
}

inline void write_disagreement_csv(const Report& report, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    out << "instance,length,metric,interpreter,value,rank\n";
    for (const auto& e : report.disagreement) {
        out << e.instance_id << ',' << e.instance_length << ',' << metric_name(e.metric) << ','
            << interpreter_name(e.interpreter) << ',' << detail::fmt_fixed(e.value) << ','
            << e.rank << '\n';
    }
    if (!out) throw std::runtime_error("report write failed: " + path.string());
}

inline void write_report_markdown(const Report& report, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    out << "# Faithfulness evaluation report\n\n";
    out << "- model: " << report.arch << "\n";
    out << "- seed: " << report.seed << "\n";
    out << "- golden set size: " << report.golden_set_size << "\n";
    out << "- corpus: " << report.train_size << " train / " << report.test_size << " test\n";
    out << "- test accuracy: " << detail::fmt_fixed(report.test_accuracy, 4) << "\n\n";

    out << "## Diagnosticity\n\n";
    out << "| Metric | Diagnosticity | Std. err. |\n|---|---|---|\n";
    for (std::size_t i = 0; i < report.metrics.size(); ++i) {
        out << "| " << metric_name(report.metrics[i]) << " | "
            << detail::fmt_fixed(report.diagnosticity[i].value, 4) << " | "
            << detail::fmt_fixed(report.diagnosticity[i].standard_error, 4) << " |\n";
    }

    out << "\n## Time complexity (forward passes per instance)\n\n";
    out << "| Metric | Mean | Min | Max |\n|---|---|---|---|\n";
    for (std::size_t i = 0; i < report.metrics.size(); ++i) {
        out << "| " << metric_name(report.metrics[i]) << " | "
            << detail::fmt_fixed(report.complexity[i].mean_passes, 4) << " | "
            << report.complexity[i].min_passes << " | " << report.complexity[i].max_passes
            << " |\n";
    }

    if (!report.disagreement.empty()) {
        out << "\n## Interpreter ranking disagreement across metrics\n\n";
        out << "Per instance, each metric ranks the six interpreters (1 = most\n"
               "faithful). The metrics frequently disagree about the best one.\n\n";
        std::vector<std::size_t> ids;
        for (const auto& e : report.disagreement) {
            if (ids.empty() || ids.back() != e.instance_id) ids.push_back(e.instance_id);
        }
        for (std::size_t id : ids) {
            std::size_t length = 0;
            for (const auto& e : report.disagreement) {
                if (e.instance_id == id) {
                    length = e.instance_length;
                    break;
                }
            }
            out << "### Instance " << id << " (" << length << " tokens)\n\n| Metric |";
            for (InterpreterId g : kAllInterpreters) out << ' ' << interpreter_name(g) << " |";
            out << " Top choice |\n|---|";
            for (std::size_t g = 0; g <= kAllInterpreters.size(); ++g) out << "---|";
            out << '\n';
            for (MetricId metric : report.metrics) {
                out << "| " << metric_name(metric) << " |";
                for (InterpreterId g : kAllInterpreters) {
                    for (const auto& e : report.disagreement) {
                        if (e.instance_id == id && e.metric == metric && e.interpreter == g) {
                            out << ' ' << detail::fmt_fixed(e.value, 4) << " (" << e.rank << ") |";
                            break;
                        }
                    }
                }
                out << ' ' << top_choice(report.disagreement, id, metric) << " |\n";
            }
            out << '\n';
        }
    }
    if (!out) throw std::runtime_error("report write failed: " + path.string());
}

// Scatter of (mean forward passes, diagnosticity), one labeled point per
// metric — the Figure-1 analogue.
inline void write_scatter_svg(const Report& report, const std::filesystem::path& path) {
    auto out = detail::open_out(path);
    const double width = 640, height = 480;
    const double left = 70, right = 30, top = 30, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double max_x = 1.0;
    for (const auto& c : report.complexity) max_x = std::max(max_x, c.mean_passes);
    max_x *= 1.15;

    auto sx = [&](double v) { return left + plot_w * (v / max_x); };
    auto sy = [&](double v) { return top + plot_h * (1.0 - v); };
    auto num = [](double v) { return detail::fmt_fixed(v, 2); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

    // axes
    out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + plot_h) << "\" x2=\""
        << num(left + plot_w) << "\" y2=\"" << num(top + plot_h)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left)
        << "\" y2=\"" << num(top + plot_h) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double v = 0.25 * i;
        out << "<line x1=\"" << num(left - 4) << "\" y1=\"" << num(sy(v)) << "\" x2=\""
            << num(left) << "\" y2=\"" << num(sy(v)) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << num(left - 8) << "\" y=\"" << num(sy(v) + 4)
            << "\" text-anchor=\"end\" font-size=\"12\">" << num(v) << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double v = max_x * i / 4.0;
        out << "<line x1=\"" << num(sx(v)) << "\" y1=\"" << num(top + plot_h) << "\" x2=\""
            << num(sx(v)) << "\" y2=\"" << num(top + plot_h + 4) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << num(sx(v)) << "\" y=\"" << num(top + plot_h + 18)
            << "\" text-anchor=\"middle\" font-size=\"12\">" << num(v) << "</text>\n";
    }
    out << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(height - 16)
        << "\" text-anchor=\"middle\" font-size=\"13\">mean forward passes per instance</text>\n";
    out << "<text x=\"18\" y=\"" << num(top + plot_h / 2)
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
        << num(top + plot_h / 2) << ")\">diagnosticity</text>\n";

    for (std::size_t i = 0; i < report.metrics.size(); ++i) {
        const double x = sx(report.complexity[i].mean_passes);
        const double y = sy(report.diagnosticity[i].value);
        out << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y)
            << "\" r=\"4\" fill=\"steelblue\"/>\n";
        out << "<text x=\"" << num(x + 7) << "\" y=\"" << num(y - 7) << "\" font-size=\"12\">"
            << metric_name(report.metrics[i]) << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("report write failed: " + path.string());
}

// Writes the requested formats into out_dir and returns the file paths.
inline std::vector<std::filesystem::path> emit_report(const Report& report,
                                                      const std::filesystem::path& out_dir,
                                                      const std::set<ReportFormat>& formats) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!std::filesystem::is_directory(out_dir)) {
        throw std::runtime_error("unwritable output directory: " + out_dir.string());
    }
    std::vector<std::filesystem::path> written;
    if (formats.count(ReportFormat::markdown)) {
        const auto p = out_dir / "report.md";
        write_report_markdown(report, p);
        written.push_back(p);
    }
    if (formats.count(ReportFormat::csv)) {
        const auto p1 = out_dir / "diagnosticity.csv";
        write_diagnosticity_csv(report, p1);
        written.push_back(p1);
        const auto p2 = out_dir / "complexity.csv";
        write_complexity_csv(report, p2);
        written.push_back(p2);
        const auto p3 = out_dir / "disagreement.csv";
        write_disagreement_csv(report, p3);
        written.push_back(p3);
    }
    if (formats.count(ReportFormat::svg)) {
        const auto p = out_dir / "scatter.svg";
        write_scatter_svg(report, p);
        written.push_back(p);
    }
    return written;
}

}  // namespace faitheval

#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "faitheval/core.hpp"
#include "faitheval/model.hpp"
#include "faitheval/rng.hpp"

namespace faitheval {

struct CorpusRecord {
    std::string text;
    std::string label;
};

// Loaded corpus plus its label -> class index mapping. std::map iterates in
// key order, so indices are lexicographic by label string.
struct Corpus {
    std::vector<CorpusRecord> records;
    std::map<std::string, std::size_t> label_map;
    std::string split;  // "train" | "test" | ""

    std::size_t size() const { return records.size(); }
    std::size_t class_count() const { return label_map.size(); }

    std::vector<std::string> class_names() const {
        std::vector<std::string> names;
        names.reserve(label_map.size());
        for (const auto& [label, idx] : label_map) names.push_back(label);
        return names;
    }

    void index_labels() {
        label_map.clear();
        for (const auto& rec : records) label_map[rec.label] = 0;
        std::size_t next = 0;
        for (auto& [label, idx] : label_map) idx = next++;
    }
};

// Lowercases and splits on whitespace; each punctuation character becomes
// its own token. Bytes >= 0x80 are treated as word characters so UTF-8
// multibyte sequences stay glued together.
inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) {
            out.push_back(word);
            word.clear();
        }
    };
    for (unsigned char c : text) {
        if (c < 0x80 && std::isspace(c)) {
            flush();
        } else if (c >= 0x80 || std::isalnum(c)) {
            word.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
            out.push_back(std::string(1, static_cast<char>(c)));
        }
    }
    flush();
    return out;
}

enum class CorpusFormat { csv, tsv, jsonl };

inline CorpusFormat corpus_format_from_name(const std::string& name) {
    if (name == "csv") return CorpusFormat::csv;
    if (name == "tsv") return CorpusFormat::tsv;
    if (name == "jsonl") return CorpusFormat::jsonl;
    throw std::invalid_argument("unknown corpus format: " + name);
}

namespace detail {

inline std::runtime_error corpus_error(const std::filesystem::path& path, std::size_t line,
                                       const std::string& message) {
    std::ostringstream msg;
    msg << path.string() << " line " << line << ": " << message;
    return std::runtime_error(msg.str());
}

// One delimited line -> fields, honoring double-quote quoting with ""
// escapes. Embedded newlines are not supported (one record per line).
inline std::vector<std::string> split_delimited(const std::string& line, char delim,
                                                const std::filesystem::path& path,
                                                std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    std::size_t i = 0;
    const std::size_t n = line.size();
    while (true) {
        field.clear();
        if (i < n && line[i] == '"') {
            ++i;
            bool closed = false;
            while (i < n) {
                if (line[i] == '"') {
                    if (i + 1 < n && line[i + 1] == '"') {
                        field.push_back('"');
                        i += 2;
                    } else {
                        ++i;
                        closed = true;
                        break;
                    }
                } else {
                    field.push_back(line[i++]);
                }
            }
            if (!closed) throw corpus_error(path, line_no, "unterminated quoted field");
            if (i < n && line[i] != delim) {
                throw corpus_error(path, line_no, "garbage after closing quote");
            }
        } else {
            while (i < n && line[i] != delim) field.push_back(line[i++]);
        }
        fields.push_back(field);
        if (i >= n) break;
        ++i;  // skip delimiter
    }
    return fields;
}

}  // namespace detail

// Reads a corpus file. CSV/TSV need a header naming the text and label
// columns; JSONL needs objects with "text" and "label" fields. Records whose
// text tokenizes to nothing are rejected with their line number.
inline Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus: " + path.string());
    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xef\xbb\xbf") == 0) {
            line.erase(0, 3);  // utf-8 BOM
        }
        return true;
    };

    if (format == CorpusFormat::jsonl) {
        while (next_line()) {
            if (line.empty()) continue;
            const nlohmann::json row = nlohmann::json::parse(line, nullptr, false);
            if (row.is_discarded() || !row.is_object()) {
                throw detail::corpus_error(path, line_no, "malformed json row");
            }
            if (!row.contains("text") || !row["text"].is_string()) {
                throw detail::corpus_error(path, line_no, "missing text field");
            }
            if (!row.contains("label")) {
                throw detail::corpus_error(path, line_no, "missing label field");
            }
            CorpusRecord rec;
            rec.text = row["text"].get<std::string>();
            rec.label = row["label"].is_string() ? row["label"].get<std::string>()
                                                 : row["label"].dump();
            if (tokenize(rec.text).empty()) {
                throw detail::corpus_error(path, line_no, "empty text");
            }
            corpus.records.push_back(std::move(rec));
        }
    } else {
        const char delim = format == CorpusFormat::csv ? ',' : '\t';
        if (!next_line()) throw std::runtime_error("empty corpus file: " + path.string());
        const std::vector<std::string> header =
            detail::split_delimited(line, delim, path, line_no);
        std::size_t text_col = header.size(), label_col = header.size();
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == "text") text_col = i;
            if (header[i] == "label") label_col = i;
        }
        if (text_col == header.size() || label_col == header.size()) {
            throw detail::corpus_error(path, line_no, "header must name text and label columns");
        }
        while (next_line()) {
            if (line.empty()) continue;
            const std::vector<std::string> fields =
                detail::split_delimited(line, delim, path, line_no);
            if (fields.size() != header.size()) {
                std::ostringstream msg;
                msg << "expected " << header.size() << " fields, got " << fields.size();
                throw detail::corpus_error(path, line_no, msg.str());
            }
            CorpusRecord rec{fields[text_col], fields[label_col]};
            if (tokenize(rec.text).empty()) {
                throw detail::corpus_error(path, line_no, "empty text");
            }
            corpus.records.push_back(std::move(rec));
        }
    }
    if (corpus.records.empty()) throw std::runtime_error("corpus has no records: " + path.string());
    corpus.index_labels();
    return corpus;
}

inline void save_corpus_csv(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write corpus: " + path.string());
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += "\"\"";
            else q.push_back(c);
        }
        q.push_back('"');
        return q;
    };
    out << "text,label\n";
    for (const auto& rec : corpus.records) out << quote(rec.text) << ',' << quote(rec.label) << '\n';
    if (!out) throw std::runtime_error("corpus write failed: " + path.string());
}

// ---- bundled synthetic sentiment corpus ----

namespace synth {

inline const std::vector<std::string>& positive_words() {
    static const std::vector<std::string> words = {
        "good",     "great",   "excellent", "wonderful", "superb",
        "charming", "amazing", "enjoyable", "delightful"};
    return words;
}

inline const std::vector<std::string>& negative_words() {
    static const std::vector<std::string> words = {
        "bad",    "awful",  "terrible", "dreadful", "boring",
        "clumsy", "lousy",  "dull",     "disappointing"};
    return words;
}

inline const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words = {
        "the",     "a",       "an",       "this",    "that",     "movie",  "film",
        "plot",    "story",   "actor",    "actress", "scene",    "script", "dialogue",
        "music",   "score",   "pacing",   "camera",  "director", "cast",   "set",
        "costume", "editing", "sequel",   "ending",  "beginning","middle", "character",
        "moment",  "minute",  "hour",     "night",   "weekend",  "friend", "audience",
        "theater", "screen",  "ticket",   "review",  "critic",   "it",     "was",
        "is",      "and",     "of",       "with",    "about",    "on",     "in",
        "for",     "overall", "mostly",   "quite",   "rather",   "fairly", "somewhat",
        "really",  "very",    "honestly", "frankly", "watched",  "seemed", "felt"};
    return words;
}

}  // namespace synth

// Keyword-driven two-class sentiment texts, lengths 5-40. Every example
// carries several label keywords spread over random positions; a slice of
// examples also carries one keyword of the opposite polarity and a small
// fraction of labels is flipped outright, which keeps the trained model's
// probabilities off the saturation ceiling.
inline Corpus make_synthetic_corpus(std::size_t count, std::uint64_t seed,
                                    std::string split = "") {
    Corpus corpus;
    corpus.split = std::move(split);
    corpus.records.reserve(count);
    Rng rng(seed);
    const auto& pos = synth::positive_words();
    const auto& neg = synth::negative_words();
    const auto& filler = synth::filler_words();
    for (std::size_t n = 0; n < count; ++n) {
        const bool positive = rng.bernoulli(0.5);
        const std::size_t length = 5 + rng.uniform_index(36);  // 5..40
        std::size_t keywords = 2 + length / 12;
        const bool contaminated = rng.bernoulli(0.25);
        if (contaminated && keywords + 1 < length) ++keywords;

        std::vector<std::string> words(length);
        for (auto& w : words) w = filler[rng.uniform_index(filler.size())];

        std::vector<std::size_t> slots(length);
        std::iota(slots.begin(), slots.end(), std::size_t{0});
        rng.partial_shuffle(slots, keywords);
        const auto& own = positive ? pos : neg;
        const auto& other = positive ? neg : pos;
        for (std::size_t i = 0; i < keywords; ++i) {
            const bool flip_word = contaminated && i == 0;
            const auto& pool = flip_word ? other : own;
            words[slots[i]] = pool[rng.uniform_index(pool.size())];
        }

        std::string text;
        for (std::size_t i = 0; i < length; ++i) {
            if (i) text.push_back(' ');
            text += words[i];
        }
        const bool label_noise = rng.bernoulli(0.05);
        const bool label_positive = label_noise ? !positive : positive;
        corpus.records.push_back({std::move(text), label_positive ? "pos" : "neg"});
    }
    corpus.index_labels();
    return corpus;
}

// ---- corpus -> model-ready data ----

inline std::vector<std::vector<std::string>> tokenize_corpus(const Corpus& corpus) {
    std::vector<std::vector<std::string>> docs;
    docs.reserve(corpus.size());
    for (const auto& rec : corpus.records) docs.push_back(tokenize(rec.text));
    return docs;
}

inline LabeledDataset encode_corpus(const Corpus& corpus, const Vocabulary& vocab) {
    LabeledDataset data;
    data.reserve(corpus.size());
    for (const auto& rec : corpus.records) {
        LabeledExample ex;
        ex.tokens = vocab.encode(tokenize(rec.text));
        ex.label = corpus.label_map.at(rec.label);
        data.push_back(std::move(ex));
    }
    return data;
}

template <TextModel M>
std::vector<ClassificationInstance> make_instances(const M& model, const LabeledDataset& data) {
    std::vector<ClassificationInstance> instances;
    instances.reserve(data.size());
    for (const auto& ex : data) instances.push_back(make_instance(model, ex.tokens, ex.label));
    return instances;
}

}  // namespace faitheval

#include "wikinli/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include "wikinli/errors.hpp"
#include "wikinli/utf8.hpp"

namespace wikinli {

std::string_view level_name(Level level) {
    switch (level) {
        case Level::Word: return "word";
        case Level::Char: return "char";
        case Level::Pos: return "pos";
    }
    return "?";
}

Level level_from_name(std::string_view name) {
    if (name == "word") return Level::Word;
    if (name == "char") return Level::Char;
    if (name == "pos") return Level::Pos;
    throw DataError("unknown level name: " + std::string(name));
}

std::string join_ngram(std::span<const std::string> parts) {
    std::string key;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) key.push_back(kNgramSep);
        key += parts[i];
    }
    return key;
}

size_t ngram_arity(std::string_view key) {
    return 1 + static_cast<size_t>(std::count(key.begin(), key.end(), kNgramSep));
}

namespace {

void sliding_keys(std::span<const std::string> parts, int order, std::vector<std::string>& out) {
    if (parts.size() < static_cast<size_t>(order)) return;
    for (size_t i = 0; i + order <= parts.size(); ++i) {
        out.push_back(join_ngram(parts.subspan(i, static_cast<size_t>(order))));
    }
}

std::vector<std::string> codepoints_of(std::string_view token) {
    std::vector<std::string> cps;
    size_t i = 0;
    while (i < token.size()) {
        const size_t before = i;
        utf8::decode_next(token, i);
        cps.emplace_back(token.substr(before, i - before));
    }
    return cps;
}

}  // namespace

std::vector<std::string> extract_ngrams(const ProcessedComment& comment, Level level, int order) {
    if (order < 1 || order > 4) throw ConfigError("n-gram order must be in 1..4");
    std::vector<std::string> out;
    switch (level) {
        case Level::Word:
            sliding_keys(comment.stream.tokens, order, out);
            break;
        case Level::Char:
            for (const std::string& token : comment.stream.tokens) {
                sliding_keys(codepoints_of(token), order, out);
            }
            break;
        case Level::Pos:
            sliding_keys(comment.pos_tags, order, out);
            break;
    }
    return out;
}

void FreqDist::add(const std::string& key, uint64_t n) {
    counts[key] += n;
    total += n;
}

void FreqDist::merge(const FreqDist& other) {
    if (level != other.level || order != other.order || class_label != other.class_label) {
        throw DataError("FreqDist::merge: incompatible distributions");
    }
    for (const auto& [key, n] : other.counts) counts[key] += n;
    total += other.total;
}

FreqDist build_freqdist(std::span<const ProcessedComment> comments, Level level, int order,
                        const std::string& class_label, unsigned n_threads) {
    if (comments.empty()) throw DataError("build_freqdist: empty comment list");
    for (const ProcessedComment& c : comments) {
        if (c.label != class_label) {
            throw DataError("build_freqdist: comment " + c.comment_id + " has label '" + c.label +
                            "', expected '" + class_label + "'");
        }
    }

    auto count_range = [&](size_t begin, size_t end) {
        FreqDist shard;
        shard.level = level;
        shard.order = order;
        shard.class_label = class_label;
        for (size_t i = begin; i < end; ++i) {
            for (const std::string& key : extract_ngrams(comments[i], level, order)) shard.add(key);
        }
        return shard;
    };

    if (n_threads <= 1 || comments.size() < 2 * n_threads) {
        return count_range(0, comments.size());
    }

    std::vector<FreqDist> shards(n_threads);
    std::vector<std::thread> workers;
    const size_t chunk = (comments.size() + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
        const size_t begin = std::min(comments.size(), static_cast<size_t>(t) * chunk);
        const size_t end = std::min(comments.size(), begin + chunk);
        workers.emplace_back([&, t, begin, end] { shards[t] = count_range(begin, end); });
    }
    for (std::thread& w : workers) w.join();

    FreqDist result = std::move(shards[0]);
    for (unsigned t = 1; t < n_threads; ++t) result.merge(shards[t]);
    return result;
}

uint64_t count_lookup(const std::string& key, const FreqDist& dist) {
    if (ngram_arity(key) != static_cast<size_t>(dist.order)) {
        throw DataError("count_lookup: key arity " + std::to_string(ngram_arity(key)) +
                        " does not match order " + std::to_string(dist.order));
    }
    auto it = dist.counts.find(key);
    return it == dist.counts.end() ? 1 : it->second;
}

double similarity(const std::vector<std::string>& ngram_keys, const FreqDist& dist) {
    double sim = 0.0;
    for (const std::string& key : ngram_keys) {
        sim += std::log2(static_cast<double>(count_lookup(key, dist)));
    }
    return sim;
}

double similarity(const ProcessedComment& comment, const FreqDist& dist) {
    return similarity(extract_ngrams(comment, dist.level, dist.order), dist);
}

// --- feature extraction ------------------------------------------------

namespace {

std::string dist_key(const std::string& label, Level level, int order) {
    std::string key = label;
    key.push_back(kNgramSep);
    key += level_name(level);
    key.push_back(kNgramSep);
    key += std::to_string(order);
    return key;
}

constexpr Level kLevels[] = {Level::Word, Level::Char, Level::Pos};

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

}  // namespace

FeatureExtractor::FeatureExtractor(std::vector<std::string> class_labels,
                                   std::vector<FreqDist> dists, std::vector<std::string> stopwords)
    : class_labels_(std::move(class_labels)), stopwords_(std::move(stopwords)) {
    if (class_labels_.empty()) throw DataError("FeatureExtractor: no classes");
    if (stopwords_.empty()) throw DataError("FeatureExtractor: empty stop-word list");

    for (FreqDist& d : dists) {
        std::string key = dist_key(d.class_label, d.level, d.order);
        if (!dists_.emplace(std::move(key), std::move(d)).second) {
            throw DataError("FeatureExtractor: duplicate distribution");
        }
    }

    auto schema = std::make_shared<std::vector<std::string>>();
    for (const std::string& label : class_labels_) {
        for (Level level : kLevels) {
            for (int order = 1; order <= 4; ++order) {
                if (!dists_.count(dist_key(label, level, order))) {
                    throw DataError("FeatureExtractor: missing distribution (" + label + ", " +
                                    std::string(level_name(level)) + ", " + std::to_string(order) + ")");
                }
                schema->push_back("sim:" + label + ":" + std::string(level_name(level)) + ":" +
                                  std::to_string(order));
            }
        }
    }
    for (const std::string& w : stopwords_) schema->push_back("stop:" + w);
    schema->push_back("avg_word_size");
    schema->push_back("avg_sentence_count");
    schema_ = std::move(schema);
}

const FreqDist& FeatureExtractor::dist(const std::string& class_label, Level level, int order) const {
    auto it = dists_.find(dist_key(class_label, level, order));
    if (it == dists_.end()) {
        throw DataError("FeatureExtractor: missing distribution (" + class_label + ", " +
                        std::string(level_name(level)) + ", " + std::to_string(order) + ")");
    }
    return it->second;
}

FeatureVector FeatureExtractor::featurize(const ProcessedComment& comment) const {
    FeatureVector out;
    out.schema = schema_;
    out.values.reserve(schema_->size());

    // N-gram keys are shared across classes, so extract once per (level, order).
    std::map<std::pair<Level, int>, std::vector<std::string>> keys;
    for (Level level : kLevels) {
        for (int order = 1; order <= 4; ++order) {
            keys.emplace(std::make_pair(level, order), extract_ngrams(comment, level, order));
        }
    }
    for (const std::string& label : class_labels_) {
        for (Level level : kLevels) {
            for (int order = 1; order <= 4; ++order) {
                out.values.push_back(similarity(keys.at({level, order}), dist(label, level, order)));
            }
        }
    }

    const size_t n_tokens = comment.token_count();
    std::unordered_map<std::string, uint64_t> token_freq;
    for (const std::string& token : comment.stream.tokens) ++token_freq[lower_ascii(token)];
    for (const std::string& stop : stopwords_) {
        auto it = token_freq.find(stop);
        const double occurrences = it == token_freq.end() ? 0.0 : static_cast<double>(it->second);
        out.values.push_back(n_tokens ? occurrences / static_cast<double>(n_tokens) : 0.0);
    }

    double char_total = 0.0;
    for (const std::string& token : comment.stream.tokens) {
        char_total += static_cast<double>(utf8::length(token));
    }
    out.values.push_back(n_tokens ? char_total / static_cast<double>(n_tokens) : 0.0);
    out.values.push_back(static_cast<double>(comment.sentences));
    return out;
}

// --- persistence ------------------------------------------------------

void FreqDist::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write freqdist: " + file.string());
    out << "wikinli-freqdist\t1\t" << level_name(level) << '\t' << order << '\t' << class_label
        << '\t' << total << '\n';
    std::map<std::string, uint64_t> sorted(counts.begin(), counts.end());
    for (const auto& [key, n] : sorted) out << key << '\t' << n << '\n';
}

FreqDist FreqDist::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("cannot open freqdist: " + file.string());
    std::string header;
    if (!std::getline(in, header)) throw DataError("empty freqdist file: " + file.string());

    std::vector<std::string> fields;
    size_t pos = 0;
    while (true) {
        const size_t tab = header.find('\t', pos);
        fields.push_back(header.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
        if (tab == std::string::npos) break;
        pos = tab + 1;
    }
    if (fields.size() != 6 || fields[0] != "wikinli-freqdist" || fields[1] != "1") {
        throw DataError("bad freqdist header: " + file.string());
    }
    FreqDist dist;
    uint64_t expected_total = 0;
    try {
        dist.level = level_from_name(fields[2]);
        dist.order = std::stoi(fields[3]);
        dist.class_label = fields[4];
        expected_total = std::stoull(fields[5]);
    } catch (const std::exception&) {
        throw DataError("bad freqdist header: " + file.string());
    }

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const size_t tab = line.rfind('\t');
        if (tab == std::string::npos) throw DataError("malformed freqdist line in " + file.string());
        try {
            dist.counts.emplace(line.substr(0, tab), std::stoull(line.substr(tab + 1)));
        } catch (const std::exception&) {
            throw DataError("malformed freqdist count in " + file.string());
        }
    }
    for (const auto& [key, n] : dist.counts) dist.total += n;
    if (dist.total != expected_total) {
        throw DataError("freqdist total mismatch in " + file.string());
    }
    return dist;
}

std::vector<std::string> load_stopwords(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open stop-word list: " + file.string());
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        words.push_back(line);
    }
    if (words.size() != 125) {
        throw DataError("stop-word list must have exactly 125 entries, got " +
                        std::to_string(words.size()) + ": " + file.string());
    }
    return words;
}

}  // namespace wikinli

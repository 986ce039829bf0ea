#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wikinli/text.hpp"

namespace wikinli {

enum class Level { Word, Char, Pos };

std::string_view level_name(Level level);
Level level_from_name(std::string_view name);

// Components of an n-gram key are joined by U+001F. The tokenizer never
// emits control characters inside tokens, so the separator is unambiguous.
inline constexpr char kNgramSep = '\x1F';

std::string join_ngram(std::span<const std::string> parts);
size_t ngram_arity(std::string_view key);

// N-gram keys for one comment at (level, order):
//   Word  sliding over the (masked) token sequence,
//   Char  sliding over the code points of each token, never crossing a
//         token boundary,
//   Pos   sliding over the tag sequence.
std::vector<std::string> extract_ngrams(const ProcessedComment& comment, Level level, int order);

// A frequency distribution of n-grams at one (level, order) for one class.
struct FreqDist {
    Level level = Level::Word;
    int order = 1;
    std::string class_label;
    std::unordered_map<std::string, uint64_t> counts;
    uint64_t total = 0;

    void add(const std::string& key, uint64_t n = 1);
    void merge(const FreqDist& other);  // associative, order-independent

    void save(const std::filesystem::path& file) const;
    static FreqDist load(const std::filesystem::path& file);
};

// Counts all n-grams of the comments (which must all carry class_label).
// n_threads > 1 counts in shards and merges; results are identical to the
// single-threaded build. Empty input is an error.
FreqDist build_freqdist(std::span<const ProcessedComment> comments, Level level, int order,
                        const std::string& class_label, unsigned n_threads = 1);

// The stored count, or 1 for an unseen n-gram. The key's arity must match
// the distribution's order.
uint64_t count_lookup(const std::string& key, const FreqDist& dist);

// Sim(C, f) = sum over the comment's n-grams of log2(count_lookup(x, f)).
// A comment with no n-grams at this (level, order) scores 0.
double similarity(const ProcessedComment& comment, const FreqDist& dist);
double similarity(const std::vector<std::string>& ngram_keys, const FreqDist& dist);

struct FeatureVector {
    std::vector<double> values;
    std::shared_ptr<const std::vector<std::string>> schema;

    size_t size() const { return values.size(); }
};

// Produces the fixed feature layout for K classes:
//   K*3*4 similarity features, ordered (class, level, order) with classes
//   in label order, levels Word/Char/Pos, orders 1..4;
//   one ratio per stop word (occurrences / token count, lowercased match);
//   average token length in code points;
//   sentence count.
class FeatureExtractor {
public:
    FeatureExtractor(std::vector<std::string> class_labels,
                     std::vector<FreqDist> dists,  // one per (class, level, order)
                     std::vector<std::string> stopwords);

    FeatureVector featurize(const ProcessedComment& comment) const;

    const std::vector<std::string>& class_labels() const { return class_labels_; }
    const std::shared_ptr<const std::vector<std::string>>& schema() const { return schema_; }
    const FreqDist& dist(const std::string& class_label, Level level, int order) const;

private:
    std::vector<std::string> class_labels_;
    std::map<std::string, FreqDist> dists_;  // "label\x1Flevel\x1Forder" -> dist
    std::vector<std::string> stopwords_;
    std::shared_ptr<const std::vector<std::string>> schema_;
};

// Loads the shipped function-word list; exactly 125 entries, one per line.
std::vector<std::string> load_stopwords(const std::filesystem::path& file);

}  // namespace wikinli

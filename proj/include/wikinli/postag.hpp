#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wikinli {

// Penn Treebank tag inventory. The fixed order doubles as the tie-break
// order wherever scores are equal, so it must never be reordered.
class TagSet {
public:
    static const std::vector<std::string>& tags();
    static int index(std::string_view tag);  // -1 when unknown
    static bool contains(std::string_view tag) { return index(tag) >= 0; }
    static size_t size() { return tags().size(); }
};

// Averaged-perceptron tagger with a token->tag fallback lexicon. A model
// with empty feature weights tags through the lexicon plus suffix/shape
// heuristics, so tagging is total either way.
struct TaggerModel {
    int version = 1;
    // feature -> (tag index -> weight)
    std::unordered_map<std::string, std::unordered_map<int, double>> feature_weights;
    // token (lowercased) -> tag index
    std::unordered_map<std::string, int> fallback_lexicon;

    void save(const std::filesystem::path& file) const;
    static TaggerModel load(const std::filesystem::path& file);
};

using TaggedSentence = std::pair<std::vector<std::string>, std::vector<std::string>>;

struct TaggerTrainReport {
    std::vector<double> epoch_accuracy;
};

// Averaged-perceptron training with a seeded per-epoch shuffle. The
// fallback lexicon is filled with each token's majority tag. Deterministic
// for a fixed (corpus, epochs, seed). Throws on an empty corpus, epochs < 1,
// misaligned sentences or tags outside the TagSet.
TaggerModel train_tagger(const std::vector<TaggedSentence>& corpus, int epochs, uint64_t seed,
                         TaggerTrainReport* report = nullptr);

// Greedy left-to-right decoding; ties break toward the lower TagSet index.
std::vector<std::string> tag(const TaggerModel& model, const std::vector<std::string>& tokens);

// Reads a tagged corpus: "token<TAB>tag" lines, blank line between sentences.
std::vector<TaggedSentence> load_tagged_corpus(const std::filesystem::path& file);

}  // namespace wikinli

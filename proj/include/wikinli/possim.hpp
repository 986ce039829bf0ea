#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wikinli/features.hpp"

namespace wikinli {

struct Cutoff {
    enum class Kind { None, TopK, AppearsInAtLeast };
    Kind kind = Kind::None;
    uint64_t k = 0;

    static Cutoff parse(std::string_view text);  // "none" | "topk:K" | "appears:K"
    std::string to_string() const;
};

enum class Cascade { Off, TriBi, BiUni, Both };

Cascade cascade_from_name(std::string_view name);
std::string_view cascade_name(Cascade mode);

struct PosSimConfig {
    int order = 4;                 // PoS n-gram order, 1..4
    uint64_t min_pos_ngrams = 100; // strict length gate on the comment's n-gram count
    Cutoff cutoff;
    Cascade cascade = Cascade::Off;
    std::string default_class = "en-us";

    void validate() const;  // cascade requires order 4
};

// class label -> PoS distribution at one order
using PosDists = std::map<std::string, FreqDist>;

// Orders 1..4 for one class, used by cascade estimation.
struct PosDistFamily {
    std::map<int, FreqDist> by_order;
};
using PosDistFamilies = std::map<std::string, PosDistFamily>;

struct PosSimOutcome {
    bool gated_out = false;   // comment did not pass the length gate; no prediction
    std::string predicted;
    bool zero_comment = false;
    // nullopt marks a candidate eliminated by an unseen n-gram
    std::map<std::string, std::optional<double>> per_class_scores;
};

// Max-similarity classification over PoS n-grams. Without cascade, any
// candidate whose distribution lacks one of the comment's n-grams is
// eliminated; when every candidate is eliminated the comment is a "zero
// comment" and falls back to the default class. With cascade enabled,
// unseen n-grams are scored through cascade_estimate instead of
// eliminating. Ties break toward the earlier class label.
PosSimOutcome classify_possim(const ProcessedComment& comment, const PosDists& dists,
                              const PosSimConfig& cfg, const PosDistFamilies* families = nullptr);

// TopK keeps each class's k most frequent n-grams (count desc, then key
// order); AppearsInAtLeast keeps n-grams present in at least k class
// distributions. Totals are recomputed. k beyond the vocabulary is an
// identity pass, flagged through *identity_diagnostic.
PosDists apply_cutoff(const PosDists& dists, const Cutoff& cutoff,
                      bool* identity_diagnostic = nullptr);

// Count estimate for a 4-gram: the exact count when present; otherwise
//   TriBi  count(abc) * count(bcd) / count(bc)
//   BiUni  count(ab) * count(bc) * count(cd) / (count(b) * count(c))
//   Both   mean of the two estimates
// with unseen sub-grams looked up as 1 and every estimate floored at 1.
double cascade_estimate(const std::string& key4, const PosDistFamily& family, Cascade mode);

struct TrickyResult {
    std::vector<size_t> retained;  // indices into the input
    double discard_ratio = 0.0;
};

// Keeps only comments whose every PoS n-gram is covered by their true
// class's distribution.
TrickyResult tricky_filter(const std::vector<ProcessedComment>& test, const PosDists& dists,
                           int order);

struct BaselineResult {
    double max_acc = 0.0;
    double random_acc = 0.0;
};

// Baseline-Max predicts majority_label (largest training class) for every
// comment; Baseline-Random draws uniformly over the class list with a
// seeded generator.
BaselineResult baselines(const std::vector<std::string>& test_labels,
                         const std::vector<std::string>& class_labels,
                         const std::string& majority_label, uint64_t seed);

}  // namespace wikinli

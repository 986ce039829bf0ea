#include "wikinli/possim.hpp"

#include <algorithm>
#include <cmath>

#include "wikinli/errors.hpp"
#include "wikinli/rng.hpp"

namespace wikinli {

Cutoff Cutoff::parse(std::string_view text) {
    Cutoff c;
    if (text == "none" || text.empty()) return c;
    auto parse_k = [&](std::string_view body) {
        uint64_t k = 0;
        for (char ch : body) {
            if (ch < '0' || ch > '9') throw ConfigError("bad cutoff: " + std::string(text));
            k = k * 10 + static_cast<uint64_t>(ch - '0');
        }
        if (k == 0) throw ConfigError("cutoff k must be positive: " + std::string(text));
        return k;
    };
    if (text.rfind("topk:", 0) == 0) {
        c.kind = Kind::TopK;
        c.k = parse_k(text.substr(5));
    } else if (text.rfind("appears:", 0) == 0) {
        c.kind = Kind::AppearsInAtLeast;
        c.k = parse_k(text.substr(8));
    } else {
        throw ConfigError("unknown cutoff '" + std::string(text) + "' (none|topk:K|appears:K)");
    }
    return c;
}

std::string Cutoff::to_string() const {
    switch (kind) {
        case Kind::None: return "none";
        case Kind::TopK: return "topk:" + std::to_string(k);
        case Kind::AppearsInAtLeast: return "appears:" + std::to_string(k);
    }
    return "none";
}

Cascade cascade_from_name(std::string_view name) {
    if (name == "off" || name.empty()) return Cascade::Off;
    if (name == "tribi") return Cascade::TriBi;
    if (name == "biuni") return Cascade::BiUni;
    if (name == "both") return Cascade::Both;
    throw ConfigError("unknown cascade mode '" + std::string(name) + "' (off|tribi|biuni|both)");
}

std::string_view cascade_name(Cascade mode) {
    switch (mode) {
        case Cascade::Off: return "off";
        case Cascade::TriBi: return "tribi";
        case Cascade::BiUni: return "biuni";
        case Cascade::Both: return "both";
    }
    return "off";
}

void PosSimConfig::validate() const {
    if (order < 1 || order > 4) throw ConfigError("possim order must be in 1..4");
    if (cascade != Cascade::Off && order != 4) {
        throw ConfigError("cascade estimation is defined for 4-grams only");
    }
    if (default_class.empty()) throw ConfigError("possim default class must be set");
}

namespace {

std::vector<std::string> split_key(const std::string& key) {
    std::vector<std::string> parts;
    size_t pos = 0;
    while (true) {
        const size_t sep = key.find(kNgramSep, pos);
        parts.push_back(key.substr(pos, sep == std::string::npos ? std::string::npos : sep - pos));
        if (sep == std::string::npos) break;
        pos = sep + 1;
    }
    return parts;
}

uint64_t sub_count(const std::vector<std::string>& parts, size_t begin, size_t len,
                   const PosDistFamily& family) {
    auto it = family.by_order.find(static_cast<int>(len));
    if (it == family.by_order.end()) {
        throw DataError("cascade_estimate: family lacks order " + std::to_string(len));
    }
    const std::string key = join_ngram(std::span(parts.data() + begin, len));
    return count_lookup(key, it->second);
}

}  // namespace

double cascade_estimate(const std::string& key4, const PosDistFamily& family, Cascade mode) {
    if (mode == Cascade::Off) throw ConfigError("cascade_estimate called with mode off");
    auto it4 = family.by_order.find(4);
    if (it4 == family.by_order.end()) throw DataError("cascade_estimate: family lacks order 4");
    if (ngram_arity(key4) != 4) throw DataError("cascade_estimate: key must be a 4-gram");

    auto present = it4->second.counts.find(key4);
    if (present != it4->second.counts.end()) {
        return static_cast<double>(present->second);  // exact count short-circuits every mode
    }

    const std::vector<std::string> parts = split_key(key4);
    auto tribi = [&]() {
        const double t1 = static_cast<double>(sub_count(parts, 0, 3, family));
        const double t2 = static_cast<double>(sub_count(parts, 1, 3, family));
        const double shared = static_cast<double>(sub_count(parts, 1, 2, family));
        return std::max(1.0, t1 * t2 / shared);
    };
    auto biuni = [&]() {
        const double b1 = static_cast<double>(sub_count(parts, 0, 2, family));
        const double b2 = static_cast<double>(sub_count(parts, 1, 2, family));
        const double b3 = static_cast<double>(sub_count(parts, 2, 2, family));
        const double u1 = static_cast<double>(sub_count(parts, 1, 1, family));
        const double u2 = static_cast<double>(sub_count(parts, 2, 1, family));
        return std::max(1.0, b1 * b2 * b3 / (u1 * u2));
    };
    switch (mode) {
        case Cascade::TriBi: return tribi();
        case Cascade::BiUni: return biuni();
        case Cascade::Both: return 0.5 * (tribi() + biuni());
        case Cascade::Off: break;
    }
    return 1.0;
}

PosDists apply_cutoff(const PosDists& dists, const Cutoff& cutoff, bool* identity_diagnostic) {
    if (identity_diagnostic) *identity_diagnostic = false;
    if (cutoff.kind == Cutoff::Kind::None) return dists;

    PosDists out;
    if (cutoff.kind == Cutoff::Kind::TopK) {
        for (const auto& [label, dist] : dists) {
            if (cutoff.k >= dist.counts.size() && identity_diagnostic) *identity_diagnostic = true;
            std::vector<std::pair<std::string, uint64_t>> entries(dist.counts.begin(),
                                                                  dist.counts.end());
            std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;  // tie: serialized-key order
            });
            if (entries.size() > cutoff.k) entries.resize(cutoff.k);
            FreqDist filtered;
            filtered.level = dist.level;
            filtered.order = dist.order;
            filtered.class_label = dist.class_label;
            for (const auto& [key, n] : entries) filtered.add(key, n);
            out.emplace(label, std::move(filtered));
        }
        return out;
    }

    // AppearsInAtLeast: count how many class distributions hold each n-gram.
    std::unordered_map<std::string, uint64_t> presence;
    for (const auto& [label, dist] : dists) {
        for (const auto& [key, n] : dist.counts) ++presence[key];
    }
    if (cutoff.k > dists.size() && identity_diagnostic) {
        // No n-gram can appear in more classes than exist; the filter would
        // empty everything, which is almost certainly a config slip.
        *identity_diagnostic = true;
    }
    for (const auto& [label, dist] : dists) {
        FreqDist filtered;
        filtered.level = dist.level;
        filtered.order = dist.order;
        filtered.class_label = dist.class_label;
        for (const auto& [key, n] : dist.counts) {
            if (presence[key] >= cutoff.k) filtered.add(key, n);
        }
        out.emplace(label, std::move(filtered));
    }
    return out;
}

PosSimOutcome classify_possim(const ProcessedComment& comment, const PosDists& dists,
                              const PosSimConfig& cfg, const PosDistFamilies* families) {
    cfg.validate();
    if (dists.empty()) throw DataError("classify_possim: no candidate distributions");
    if (cfg.cascade != Cascade::Off && families == nullptr) {
        throw ConfigError("classify_possim: cascade mode needs order-1..4 families");
    }

    PosSimOutcome outcome;
    const std::vector<std::string> keys = extract_ngrams(comment, Level::Pos, cfg.order);
    if (keys.size() <= cfg.min_pos_ngrams) {
        outcome.gated_out = true;
        return outcome;
    }

    for (const auto& [label, dist] : dists) {
        if (dist.order != cfg.order) {
            throw DataError("classify_possim: distribution for '" + label + "' has order " +
                            std::to_string(dist.order));
        }
        if (cfg.cascade == Cascade::Off) {
            double sim = 0.0;
            bool eliminated = false;
            for (const std::string& key : keys) {
                auto it = dist.counts.find(key);
                if (it == dist.counts.end()) {
                    eliminated = true;
                    break;
                }
                sim += std::log2(static_cast<double>(it->second));
            }
            outcome.per_class_scores[label] =
                eliminated ? std::nullopt : std::optional<double>(sim);
        } else {
            auto fam = families->find(label);
            if (fam == families->end()) {
                throw DataError("classify_possim: missing cascade family for '" + label + "'");
            }
            double sim = 0.0;
            for (const std::string& key : keys) {
                sim += std::log2(cascade_estimate(key, fam->second, cfg.cascade));
            }
            outcome.per_class_scores[label] = sim;
        }
    }

    // dists iterates in label order, so strict > keeps the earlier class on ties.
    std::string best;
    double best_score = 0.0;
    for (const auto& [label, dist] : dists) {
        const auto& score = outcome.per_class_scores.at(label);
        if (!score) continue;
        if (best.empty() || *score > best_score) {
            best = label;
            best_score = *score;
        }
    }
    if (best.empty()) {
        outcome.predicted = cfg.default_class;
        outcome.zero_comment = true;
    } else {
        outcome.predicted = best;
    }
    return outcome;
}

TrickyResult tricky_filter(const std::vector<ProcessedComment>& test, const PosDists& dists,
                           int order) {
    TrickyResult result;
    for (size_t i = 0; i < test.size(); ++i) {
        auto it = dists.find(test[i].label);
        if (it == dists.end()) continue;  // no distribution for the true class
        bool covered = true;
        for (const std::string& key : extract_ngrams(test[i], Level::Pos, order)) {
            if (!it->second.counts.count(key)) {
                covered = false;
                break;
            }
        }
        if (covered) result.retained.push_back(i);
    }
    result.discard_ratio =
        test.empty() ? 0.0
                     : 1.0 - static_cast<double>(result.retained.size()) / static_cast<double>(test.size());
    return result;
}

BaselineResult baselines(const std::vector<std::string>& test_labels,
                         const std::vector<std::string>& class_labels,
                         const std::string& majority_label, uint64_t seed) {
    BaselineResult result;
    if (test_labels.empty() || class_labels.empty()) return result;
    SplitMix64 rng(derive_seed(seed, "baseline-random"));
    size_t max_hits = 0, random_hits = 0;
    for (const std::string& label : test_labels) {
        if (label == majority_label) ++max_hits;
        const size_t draw = static_cast<size_t>(rng.below(class_labels.size()));
        if (class_labels[draw] == label) ++random_hits;
    }
    result.max_acc = static_cast<double>(max_hits) / static_cast<double>(test_labels.size());
    result.random_acc = static_cast<double>(random_hits) / static_cast<double>(test_labels.size());
    return result;
}

}  // namespace wikinli

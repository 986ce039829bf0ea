#include "wikinli/postag.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>

#include "wikinli/errors.hpp"
#include "wikinli/rng.hpp"

namespace wikinli {

const std::vector<std::string>& TagSet::tags() {
    static const std::vector<std::string> kTags = {
        "#",    "$",    "''",  "``",  ",",    "-LRB-", "-RRB-", ".",    ":",
        "CC",   "CD",   "DT",  "EX",  "FW",   "IN",    "JJ",    "JJR",  "JJS",
        "LS",   "MD",   "NN",  "NNP", "NNPS", "NNS",   "PDT",   "POS",  "PRP",
        "PRP$", "RB",   "RBR", "RBS", "RP",   "SYM",   "TO",    "UH",   "VB",
        "VBD",  "VBG",  "VBN", "VBP", "VBZ",  "WDT",   "WP",    "WP$",  "WRB",
    };
    return kTags;
}

int TagSet::index(std::string_view tag) {
    static const std::unordered_map<std::string_view, int> kIndex = [] {
        std::unordered_map<std::string_view, int> m;
        const auto& all = tags();
        for (size_t i = 0; i < all.size(); ++i) m.emplace(all[i], static_cast<int>(i));
        return m;
    }();
    auto it = kIndex.find(tag);
    return it == kIndex.end() ? -1 : it->second;
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Character-class sketch of a token: X uppercase, x lowercase, d digit,
// o anything else, consecutive duplicates collapsed.
std::string word_shape(std::string_view token) {
    std::string out;
    for (unsigned char c : token) {
        char cls = 'o';
        if (c >= 'A' && c <= 'Z') cls = 'X';
        else if (c >= 'a' && c <= 'z') cls = 'x';
        else if (c >= '0' && c <= '9') cls = 'd';
        if (out.empty() || out.back() != cls) out.push_back(cls);
    }
    return out;
}

// Context features for token i. Greedy decoding sees the previously
// predicted tag via prev_tag.
void collect_features(const std::vector<std::string>& tokens, size_t i,
                      const std::string& prev_tag, std::vector<std::string>& out) {
    out.clear();
    const std::string w = lower(tokens[i]);
    out.push_back("bias");
    out.push_back("w=" + w);
    for (size_t k = 1; k <= 3; ++k) {
        out.push_back("suf" + std::to_string(k) + "=" + (w.size() <= k ? w : w.substr(w.size() - k)));
    }
    out.push_back("shape=" + word_shape(tokens[i]));
    if (!tokens[i].empty() && tokens[i][0] >= 'A' && tokens[i][0] <= 'Z') {
        // sentence-initial capitals say little; mid-sentence ones mark names
        out.push_back(i == 0 ? "cap-first" : "cap-mid");
    }
    out.push_back("t-1=" + prev_tag);
    out.push_back("w-1=" + (i == 0 ? std::string("<s>") : lower(tokens[i - 1])));
    out.push_back("w+1=" + (i + 1 == tokens.size() ? std::string("</s>") : lower(tokens[i + 1])));
}

int argmax_scores(const std::vector<double>& scores) {
    int best = 0;
    for (int t = 1; t < static_cast<int>(scores.size()); ++t) {
        if (scores[t] > scores[best]) best = t;  // strict: ties keep the lower TagSet index
    }
    return best;
}

int score_and_pick(const TaggerModel& model, const std::vector<std::string>& features) {
    std::vector<double> scores(TagSet::size(), 0.0);
    for (const std::string& f : features) {
        auto it = model.feature_weights.find(f);
        if (it == model.feature_weights.end()) continue;
        for (const auto& [tag_idx, w] : it->second) scores[tag_idx] += w;
    }
    return argmax_scores(scores);
}

bool all_of_chars(std::string_view s, bool (*pred)(char)) {
    for (char c : s) {
        if (!pred(c)) return false;
    }
    return !s.empty();
}

int heuristic_tag(const std::string& token) {
    if (token.empty()) return TagSet::index("NN");
    if (all_of_chars(token, [](char c) { return (c >= '0' && c <= '9') || c == '.' || c == ','; }) &&
        std::any_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return TagSet::index("CD");
    }
    if (token.size() == 1 || token == "''" || token == "``" || token == "...") {
        switch (token[0]) {
            case '.': case '!': case '?': return TagSet::index(".");
            case ',': return TagSet::index(",");
            case '(': case '[': case '{': return TagSet::index("-LRB-");
            case ')': case ']': case '}': return TagSet::index("-RRB-");
            case ';': case ':': case '-': return TagSet::index(":");
            case '\'': case '"': case '`': return TagSet::index("''");
            case '$': return TagSet::index("$");
            case '#': return TagSet::index("#");
            default: break;
        }
        if (!std::isalnum(static_cast<unsigned char>(token[0]))) return TagSet::index("SYM");
    }
    if (token[0] >= 'A' && token[0] <= 'Z') return TagSet::index("NNP");
    auto ends_with = [&](std::string_view suf) {
        return token.size() > suf.size() && token.compare(token.size() - suf.size(), suf.size(), suf) == 0;
    };
    if (ends_with("ly")) return TagSet::index("RB");
    if (ends_with("ing")) return TagSet::index("VBG");
    if (ends_with("ed")) return TagSet::index("VBD");
    if (ends_with("able") || ends_with("ible") || ends_with("ous")) return TagSet::index("JJ");
    if (ends_with("s")) return TagSet::index("NNS");
    return TagSet::index("NN");
}

}  // namespace

std::vector<std::string> tag(const TaggerModel& model, const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    if (tokens.empty()) return out;

    if (model.feature_weights.empty()) {
        for (const std::string& token : tokens) {
            auto it = model.fallback_lexicon.find(lower(token));
            const int idx = it != model.fallback_lexicon.end() ? it->second : heuristic_tag(token);
            out.push_back(TagSet::tags()[idx]);
        }
        return out;
    }

    std::vector<std::string> features;
    std::string prev_tag = "<s>";
    for (size_t i = 0; i < tokens.size(); ++i) {
        collect_features(tokens, i, prev_tag, features);
        const int idx = score_and_pick(model, features);
        out.push_back(TagSet::tags()[idx]);
        prev_tag = out.back();
    }
    return out;
}

TaggerModel train_tagger(const std::vector<TaggedSentence>& corpus, int epochs, uint64_t seed,
                         TaggerTrainReport* report) {
    if (corpus.empty()) throw DataError("train_tagger: empty corpus");
    if (epochs < 1) throw ConfigError("train_tagger: epochs must be >= 1");

    std::vector<std::vector<int>> gold(corpus.size());
    for (size_t s = 0; s < corpus.size(); ++s) {
        const auto& [tokens, tags] = corpus[s];
        if (tokens.size() != tags.size()) {
            throw DataError("train_tagger: sentence " + std::to_string(s) + " tokens/tags mismatch");
        }
        gold[s].reserve(tags.size());
        for (const std::string& t : tags) {
            const int idx = TagSet::index(t);
            if (idx < 0) throw DataError("train_tagger: unknown tag '" + t + "'");
            gold[s].push_back(idx);
        }
    }

    struct Cell {
        double weight = 0.0;
        double total = 0.0;
        uint64_t stamp = 0;
    };
    std::unordered_map<std::string, std::unordered_map<int, Cell>> table;
    uint64_t steps = 0;

    auto update = [&](const std::string& feature, int tag_idx, double delta) {
        Cell& cell = table[feature][tag_idx];
        cell.total += static_cast<double>(steps - cell.stamp) * cell.weight;
        cell.stamp = steps;
        cell.weight += delta;
    };
    auto current_score = [&](const std::vector<std::string>& features) {
        std::vector<double> scores(TagSet::size(), 0.0);
        for (const std::string& f : features) {
            auto it = table.find(f);
            if (it == table.end()) continue;
            for (const auto& [tag_idx, cell] : it->second) scores[tag_idx] += cell.weight;
        }
        return argmax_scores(scores);
    };

    std::vector<size_t> order(corpus.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    SplitMix64 rng(derive_seed(seed, "tagger-epochs"));

    std::vector<std::string> features;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        deterministic_shuffle(order, rng);
        uint64_t correct = 0, total = 0;
        for (size_t s : order) {
            const auto& tokens = corpus[s].first;
            std::string prev_tag = "<s>";
            for (size_t i = 0; i < tokens.size(); ++i) {
                ++steps;
                collect_features(tokens, i, prev_tag, features);
                const int guess = current_score(features);
                const int truth = gold[s][i];
                if (guess != truth) {
                    for (const std::string& f : features) {
                        update(f, truth, 1.0);
                        update(f, guess, -1.0);
                    }
                } else {
                    ++correct;
                }
                ++total;
                prev_tag = TagSet::tags()[guess];
            }
        }
        if (report) {
            report->epoch_accuracy.push_back(total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0);
        }
    }

    TaggerModel model;
    for (auto& [feature, by_tag] : table) {
        for (auto& [tag_idx, cell] : by_tag) {
            const double total = cell.total + static_cast<double>(steps - cell.stamp) * cell.weight;
            const double averaged = total / static_cast<double>(steps);
            if (averaged != 0.0) model.feature_weights[feature][tag_idx] = averaged;
        }
    }

    // Majority tag per lowercased token; ties go to the lower TagSet index.
    std::map<std::string, std::map<int, uint64_t>> tag_counts;
    for (size_t s = 0; s < corpus.size(); ++s) {
        const auto& tokens = corpus[s].first;
        for (size_t i = 0; i < tokens.size(); ++i) ++tag_counts[lower(tokens[i])][gold[s][i]];
    }
    for (const auto& [token, counts] : tag_counts) {
        int best = -1;
        uint64_t best_count = 0;
        for (const auto& [tag_idx, n] : counts) {
            if (n > best_count) {
                best = tag_idx;
                best_count = n;
            }
        }
        model.fallback_lexicon.emplace(token, best);
    }
    return model;
}

// --- serialization ---------------------------------------------------------

namespace {

std::string format_weight(double w) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    return buf;
}

}  // namespace

void TaggerModel::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write tagger model: " + file.string());
    out << "wikinli-tagger\t" << version << "\n";

    out << "[lexicon]\n";
    std::map<std::string, int> sorted_lexicon(fallback_lexicon.begin(), fallback_lexicon.end());
    for (const auto& [token, tag_idx] : sorted_lexicon) {
        out << token << '\t' << TagSet::tags()[tag_idx] << '\n';
    }

    out << "[weights]\n";
    std::map<std::string, std::map<std::string, double>> sorted_weights;
    for (const auto& [feature, by_tag] : feature_weights) {
        for (const auto& [tag_idx, w] : by_tag) {
            sorted_weights[feature][TagSet::tags()[tag_idx]] = w;
        }
    }
    for (const auto& [feature, by_tag] : sorted_weights) {
        for (const auto& [tag_name, w] : by_tag) {
            out << feature << '\t' << tag_name << '\t' << format_weight(w) << '\n';
        }
    }
}

TaggerModel TaggerModel::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("cannot open tagger model: " + file.string());
    TaggerModel model;
    std::string line;
    if (!std::getline(in, line) || line.rfind("wikinli-tagger\t", 0) != 0) {
        throw DataError("bad tagger model header: " + file.string());
    }
    try {
        model.version = std::stoi(line.substr(15));
    } catch (const std::exception&) {
        throw DataError("bad tagger model version: " + file.string());
    }

    enum class Section { None, Lexicon, Weights } section = Section::None;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line == "[lexicon]") {
            section = Section::Lexicon;
            continue;
        }
        if (line == "[weights]") {
            section = Section::Weights;
            continue;
        }
        const size_t t1 = line.find('\t');
        if (t1 == std::string::npos) {
            throw DataError(file.string() + ":" + std::to_string(lineno) + ": malformed line");
        }
        if (section == Section::Lexicon) {
            const int idx = TagSet::index(line.substr(t1 + 1));
            if (idx < 0) throw DataError(file.string() + ":" + std::to_string(lineno) + ": unknown tag");
            model.fallback_lexicon.emplace(line.substr(0, t1), idx);
        } else if (section == Section::Weights) {
            const size_t t2 = line.find('\t', t1 + 1);
            if (t2 == std::string::npos) {
                throw DataError(file.string() + ":" + std::to_string(lineno) + ": malformed weight line");
            }
            const int idx = TagSet::index(line.substr(t1 + 1, t2 - t1 - 1));
            if (idx < 0) throw DataError(file.string() + ":" + std::to_string(lineno) + ": unknown tag");
            try {
                model.feature_weights[line.substr(0, t1)][idx] = std::stod(line.substr(t2 + 1));
            } catch (const std::exception&) {
                throw DataError(file.string() + ":" + std::to_string(lineno) + ": bad weight");
            }
        } else {
            throw DataError(file.string() + ":" + std::to_string(lineno) + ": content before section");
        }
    }
    return model;
}

std::vector<TaggedSentence> load_tagged_corpus(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open tagged corpus: " + file.string());
    std::vector<TaggedSentence> out;
    TaggedSentence current;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') {
            if (!current.first.empty()) {
                out.push_back(std::move(current));
                current = {};
            }
            continue;
        }
        const size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError(file.string() + ":" + std::to_string(lineno) + ": expected token<TAB>tag");
        }
        current.first.push_back(line.substr(0, tab));
        current.second.push_back(line.substr(tab + 1));
    }
    if (!current.first.empty()) out.push_back(std::move(current));
    return out;
}

}  // namespace wikinli

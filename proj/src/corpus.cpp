#include "wikinli/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wikinli/errors.hpp"
#include "wikinli/rng.hpp"

namespace wikinli {

std::string_view skill_level_name(SkillLevel level) {
    switch (level) {
        case SkillLevel::L1: return "1";
        case SkillLevel::L2: return "2";
        case SkillLevel::L3: return "3";
        case SkillLevel::L4: return "4";
        case SkillLevel::L5: return "5";
        case SkillLevel::Native: return "N";
    }
    return "?";
}

std::vector<std::string> UserProfile::native_codes() const {
    std::vector<std::string> out;
    for (const auto& [code, level] : skills) {
        if (level == SkillLevel::Native) out.push_back(code);
    }
    return out;
}

namespace {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool valid_lang_code(std::string_view code) {
    if (code.empty()) return false;
    for (char c : code) {
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-')) return false;
    }
    return code.front() != '-' && code.back() != '-';
}

}  // namespace

UserProfile parse_babel(std::string user_id, const std::vector<std::string>& category_strings,
                        BabelParseStats* stats) {
    BabelParseStats local;
    UserProfile profile;
    profile.user_id = std::move(user_id);

    for (const std::string& raw : category_strings) {
        const std::string cat = trim(raw);
        if (cat.rfind("User ", 0) != 0) {
            ++local.malformed;
            continue;
        }
        std::string body = to_lower(trim(cat.substr(5)));
        if (body.empty()) {
            ++local.malformed;
            continue;
        }
        // The level, when present, is the final hyphen component; language
        // codes may themselves contain hyphens ("en-us").
        SkillLevel level = SkillLevel::Native;
        std::string code = body;
        const size_t dash = body.find_last_of('-');
        if (dash != std::string::npos) {
            const std::string tail = body.substr(dash + 1);
            if (tail == "n") {
                code = body.substr(0, dash);
            } else if (tail.size() == 1 && tail[0] >= '1' && tail[0] <= '5') {
                code = body.substr(0, dash);
                level = static_cast<SkillLevel>(tail[0] - '0');
            }
        }
        if (!valid_lang_code(code)) {
            ++local.malformed;
            continue;
        }
        auto [it, inserted] = profile.skills.insert_or_assign(code, level);
        (void)it;
        if (!inserted) ++local.duplicates;
    }
    if (stats) {
        stats->malformed += local.malformed;
        stats->duplicates += local.duplicates;
    }
    return profile;
}

// --- signature patterns ------------------------------------------------

namespace {

// Shipped pattern list; data/signature_patterns.txt holds the same content.
constexpr const char* kBuiltinPatterns = R"PAT(# Ordered signature pattern list, earliest match wins; ties go to the
# pattern listed first. One pattern per line: name<TAB>ECMAScript regex,
# capture group 1 = signing username.
version	1
user-piped-utc	\[\[[Uu]ser:([^|\]\n]+)\|[^\]\n]*\]\][^\n]{0,80}?\(UTC\)
user-talk-utc	\[\[[Uu]ser[ _][Tt]alk:([^|\]\n]+)(?:\|[^\]\n]*)?\]\][^\n]{0,80}?\(UTC\)
user-piped-time	\[\[[Uu]ser:([^|\]\n]+)\|[^\]\n]*\]\][^\S\n]{0,4}\d{1,2}:\d{2}(?:,[^\S\n]*\d{1,2}[^\S\n]+[A-Za-z][a-z]+(?:[^\S\n]+\d{4})?)?
unsigned-template	\{\{[Uu]nsigned\|([^|\}\n]+)[^\}]*\}\}
user-piped	\[\[[Uu]ser:([^|\]\n]+)\|[^\]\n]*\]\]
user-talk	\[\[[Uu]ser[ _][Tt]alk:([^|\]\n]+)(?:\|[^\]\n]*)?\]\]
user-bare	\[\[[Uu]ser:([^|\]\n]+)\]\]
)PAT";

}  // namespace

SignaturePatterns SignaturePatterns::parse(std::istream& in, const std::string& origin) {
    SignaturePatterns out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError(origin + ":" + std::to_string(lineno) + ": expected name<TAB>value");
        }
        const std::string name = line.substr(0, tab);
        const std::string value = line.substr(tab + 1);
        if (name == "version") {
            try {
                out.version_ = std::stoi(value);
            } catch (const std::exception&) {
                throw DataError(origin + ":" + std::to_string(lineno) + ": bad version");
            }
            continue;
        }
        try {
            out.entries_.push_back({name, value, std::regex(value, std::regex::ECMAScript)});
        } catch (const std::regex_error& e) {
            throw DataError(origin + ":" + std::to_string(lineno) + ": bad regex: " + e.what());
        }
    }
    if (out.entries_.empty()) throw DataError(origin + ": no signature patterns");
    return out;
}

SignaturePatterns SignaturePatterns::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open signature pattern file: " + file.string());
    return parse(in, file.string());
}

SignaturePatterns SignaturePatterns::builtin() {
    std::istringstream in(kBuiltinPatterns);
    return parse(in, "<builtin>");
}

// --- comment extraction -------------------------------------------------

namespace {

std::string normalize_username(std::string_view raw) {
    std::string name = trim(raw);
    for (char& c : name) {
        if (c == '_') c = ' ';
    }
    return name;
}

bool is_heading_line(std::string_view line) {
    std::string_view t = line;
    while (!t.empty() && (t.back() == ' ' || t.back() == '\t' || t.back() == '\r')) t.remove_suffix(1);
    return t.size() >= 2 && t.front() == '=' && t.back() == '=';
}

// Best-effort markup cleanup for a comment body: headings and indentation
// markers go away, [[target|text]] links keep their text, templates and
// html-ish tags are removed, quote runs ('' / ''') are stripped.
std::string clean_wikitext(std::string_view body) {
    std::string lines_out;
    lines_out.reserve(body.size());
    size_t pos = 0;
    while (pos <= body.size()) {
        const size_t nl = body.find('\n', pos);
        std::string_view line = body.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        if (!is_heading_line(line)) {
            size_t b = 0;
            while (b < line.size() && (line[b] == ':' || line[b] == '*' || line[b] == '#')) ++b;
            lines_out.append(line.substr(b));
            lines_out.push_back('\n');
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }

    std::string out;
    out.reserve(lines_out.size());
    size_t i = 0;
    const std::string& s = lines_out;
    while (i < s.size()) {
        if (s.compare(i, 2, "[[") == 0) {
            const size_t close = s.find("]]", i + 2);
            if (close != std::string::npos && close - i < 400) {
                std::string_view inner(s.data() + i + 2, close - i - 2);
                const size_t pipe = inner.find_last_of('|');
                std::string_view kept = pipe == std::string_view::npos ? inner : inner.substr(pipe + 1);
                out.append(kept);
                i = close + 2;
                continue;
            }
        }
        if (s.compare(i, 2, "{{") == 0) {
            const size_t close = s.find("}}", i + 2);
            if (close != std::string::npos && close - i < 800) {
                i = close + 2;
                continue;
            }
        }
        if (s[i] == '<') {
            const size_t close = s.find('>', i + 1);
            if (close != std::string::npos && close - i < 120 && close > i + 1) {
                const char c = s[i + 1];
                if (std::isalpha(static_cast<unsigned char>(c)) || c == '/') {
                    i = close + 1;
                    continue;
                }
            }
        }
        if (s.compare(i, 3, "'''") == 0) {
            i += 3;
            continue;
        }
        if (s.compare(i, 2, "''") == 0) {
            i += 2;
            continue;
        }
        out.push_back(s[i]);
        ++i;
    }
    return trim(out);
}

}  // namespace

std::vector<Comment> extract_signed_comments(std::string_view wikitext, const std::string& page,
                                             const SignaturePatterns& patterns,
                                             ExtractStats* stats) {
    std::vector<Comment> out;
    if (wikitext.empty()) return out;

    const std::string text(wikitext);
    size_t cursor = 0;
    size_t emitted = 0;
    ExtractStats local;

    while (cursor < text.size()) {
        // Earliest match over the whole pattern list; the list order breaks
        // ties so more specific patterns (with timestamps) win.
        bool found = false;
        size_t best_begin = 0, best_end = 0;
        std::string best_user;
        for (const auto& entry : patterns.entries()) {
            std::smatch m;
            const auto begin_it = text.cbegin() + static_cast<std::ptrdiff_t>(cursor);
            if (!std::regex_search(begin_it, text.cend(), m, entry.re)) continue;
            const size_t b = cursor + static_cast<size_t>(m.position(0));
            const size_t e = b + static_cast<size_t>(m.length(0));
            if (!found || b < best_begin) {
                found = true;
                best_begin = b;
                best_end = e;
                best_user = normalize_username(m[1].str());
            }
        }
        if (!found) break;

        const std::string body = clean_wikitext(text.substr(cursor, best_begin - cursor));
        if (!body.empty() && !best_user.empty()) {
            ++emitted;
            Comment c;
            c.comment_id = page + "#" + std::to_string(emitted);
            c.user_id = best_user;
            c.page = page;
            c.raw_text = body;
            out.push_back(std::move(c));
        } else {
            ++local.empty_bodies;
        }
        cursor = best_end;
    }

    if (cursor < text.size() && !trim(text.substr(cursor)).empty()) {
        ++local.trailing_dropped;
    }
    if (stats) {
        stats->trailing_dropped += local.trailing_dropped;
        stats->empty_bodies += local.empty_bodies;
    }
    return out;
}

// --- user filtering ------------------------------------------------------

const std::vector<std::string>& default_popular_languages() {
    static const std::vector<std::string> langs = {
        "de", "ja", "pl", "zh", "tr", "fi", "zh-yue", "ar", "da", "hu",
        "es", "pt", "fr", "nl", "ko", "it", "sv", "no", "ru",
    };
    return langs;
}

const std::map<std::string, std::string>& language_names() {
    static const std::map<std::string, std::string> names = {
        {"en-us", "US English"}, {"de", "German"},     {"ja", "Japanese"},
        {"pl", "Polish"},        {"zh", "Mandarin"},   {"tr", "Turkish"},
        {"fi", "Finnish"},       {"zh-yue", "Cantonese"}, {"ar", "Arabic"},
        {"da", "Danish"},        {"hu", "Hungarian"},  {"es", "Spanish"},
        {"pt", "Portuguese"},    {"fr", "French"},     {"nl", "Dutch"},
        {"ko", "Korean"},        {"it", "Italian"},    {"sv", "Swedish"},
        {"no", "Norwegian"},     {"ru", "Russian"},
    };
    return names;
}

namespace {

bool is_english_code(const std::string& code) {
    return code == "en" || code.rfind("en-", 0) == 0;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> filter_users(
    const std::vector<UserProfile>& profiles, const std::vector<std::string>& popular_langs,
    FilterStats* stats) {
    if (popular_langs.size() != 19) {
        throw ConfigError("filter_users expects exactly 19 popular languages, got " +
                          std::to_string(popular_langs.size()));
    }
    const std::set<std::string> picked(popular_langs.begin(), popular_langs.end());
    FilterStats local;
    std::vector<std::pair<std::string, std::string>> out;

    for (const UserProfile& p : profiles) {
        const std::vector<std::string> natives = p.native_codes();
        if (natives.empty()) {
            ++local.no_native;
            continue;
        }
        bool any_english = false;
        std::vector<std::string> picked_natives;
        for (const std::string& code : natives) {
            if (is_english_code(code)) any_english = true;
            if (picked.count(code)) picked_natives.push_back(code);
        }
        if (any_english) {
            // English natives survive only with "en-us" as the sole native claim.
            if (natives.size() == 1 && natives[0] == "en-us") {
                out.emplace_back(p.user_id, "en-us");
            } else if (natives.size() >= 2) {
                ++local.multi_native;
            } else {
                ++local.non_us_english;
            }
            continue;
        }
        if (picked_natives.size() == 1) {
            out.emplace_back(p.user_id, picked_natives[0]);
        } else if (picked_natives.size() >= 2) {
            ++local.multi_native;
        } else {
            ++local.no_native;
        }
    }
    if (stats) {
        stats->no_native += local.no_native;
        stats->multi_native += local.multi_native;
        stats->non_us_english += local.non_us_english;
    }
    return out;
}

// --- balance and split ----------------------------------------------------

std::string CorpusManifest::to_json_string() const {
    nlohmann::json j;
    j["version"] = 1;
    j["class_labels"] = class_labels;
    nlohmann::json counts_j = nlohmann::json::object();
    for (const auto& [label, n] : counts) counts_j[label] = n;
    j["counts"] = counts_j;
    j["seed"] = seed;
    j["fractions"] = {{"train", fractions.train}, {"dev", fractions.dev}, {"test", fractions.test}};
    nlohmann::json assign_j = nlohmann::json::array();
    for (const auto& [id, split] : assignment) assign_j.push_back({id, split});
    j["assignment"] = assign_j;
    return j.dump(2) + "\n";
}

void CorpusManifest::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write manifest: " + file.string());
    out << to_json_string();
}

SplitPlan plan_balance_and_split(const std::vector<std::pair<std::string, std::string>>& id_labels,
                                 uint64_t seed, SplitFractions fractions,
                                 const std::vector<std::string>* expected_classes, bool balance) {
    if (fractions.train < 0 || fractions.dev < 0 || fractions.test < 0 ||
        std::abs(fractions.train + fractions.dev + fractions.test - 1.0) > 1e-9) {
        throw ConfigError("split fractions must be nonnegative and sum to 1");
    }

    std::map<std::string, std::vector<std::string>> by_class;
    std::set<std::string> seen_ids;
    for (const auto& [id, label] : id_labels) {
        if (label.empty()) throw DataError("unlabeled comment: " + id);
        if (!seen_ids.insert(id).second) throw DataError("duplicate comment id: " + id);
        by_class[label].push_back(id);
    }

    std::vector<std::string> class_labels;
    if (expected_classes) {
        class_labels = *expected_classes;
        for (const std::string& label : class_labels) {
            auto it = by_class.find(label);
            if (it == by_class.end() || it->second.empty()) {
                throw DataError("class '" + label + "' has 0 comments");
            }
        }
        for (const auto& [label, ids] : by_class) {
            if (std::find(class_labels.begin(), class_labels.end(), label) == class_labels.end()) {
                throw DataError("unexpected class label '" + label + "'");
            }
        }
    } else {
        for (const auto& [label, ids] : by_class) class_labels.push_back(label);
    }
    if (class_labels.empty()) throw DataError("empty corpus");

    size_t min_count = SIZE_MAX;
    for (const std::string& label : class_labels) min_count = std::min(min_count, by_class[label].size());

    SplitPlan plan;
    plan.manifest.class_labels = class_labels;
    plan.manifest.seed = seed;
    plan.manifest.fractions = fractions;
    plan.degenerate_single_class = class_labels.size() == 1;

    for (const std::string& label : class_labels) {
        std::vector<std::string>& ids = by_class[label];
        std::sort(ids.begin(), ids.end());  // input-order independence

        SplitMix64 sub_rng(derive_seed(seed, "subsample:" + label));
        deterministic_shuffle(ids, sub_rng);
        const size_t keep = balance ? min_count : ids.size();
        ids.resize(keep);

        SplitMix64 split_rng(derive_seed(seed, "split:" + label));
        deterministic_shuffle(ids, split_rng);

        const size_t n_train = static_cast<size_t>(std::floor(fractions.train * static_cast<double>(keep)));
        const size_t n_dev = static_cast<size_t>(std::floor(fractions.dev * static_cast<double>(keep)));
        const size_t n_test = static_cast<size_t>(std::floor(fractions.test * static_cast<double>(keep)));
        const size_t remainder = keep - n_train - n_dev - n_test;
        const size_t train_end = n_train + remainder;  // remainder goes to training
        const size_t dev_end = train_end + n_dev;

        for (size_t i = 0; i < keep; ++i) {
            const int split = i < train_end ? 0 : (i < dev_end ? 1 : 2);
            plan.split_of.emplace(ids[i], split);
        }
        plan.manifest.counts[label] = keep;
    }

    for (const auto& [id, split] : plan.split_of) plan.manifest.assignment.emplace_back(id, split);
    return plan;
}

namespace {

template <typename T>
SplitSets<T> apply_plan(const std::vector<T>& items, SplitPlan plan,
                        const std::string& (*label_of)(const T&), const std::string& (*id_of)(const T&)) {
    (void)label_of;
    SplitSets<T> out;
    for (const T& item : items) {
        auto it = plan.split_of.find(id_of(item));
        if (it == plan.split_of.end()) continue;  // subsampled away
        switch (it->second) {
            case 0: out.train.push_back(item); break;
            case 1: out.dev.push_back(item); break;
            default: out.test.push_back(item); break;
        }
    }
    out.manifest = std::move(plan.manifest);
    out.degenerate_single_class = plan.degenerate_single_class;
    return out;
}

const std::string& comment_id_of(const Comment& c) { return c.comment_id; }
const std::string& comment_label_of(const Comment& c) {
    static const std::string empty;
    return c.label ? *c.label : empty;
}
const std::string& processed_id_of(const ProcessedComment& c) { return c.comment_id; }
const std::string& processed_label_of(const ProcessedComment& c) { return c.label; }

}  // namespace

SplitSets<Comment> balance_and_split(const std::vector<Comment>& labeled, uint64_t seed,
                                     SplitFractions fractions,
                                     const std::vector<std::string>* expected_classes) {
    std::vector<std::pair<std::string, std::string>> id_labels;
    id_labels.reserve(labeled.size());
    for (const Comment& c : labeled) {
        if (!c.label || c.label->empty()) throw DataError("unlabeled comment: " + c.comment_id);
        id_labels.emplace_back(c.comment_id, *c.label);
    }
    return apply_plan(labeled, plan_balance_and_split(id_labels, seed, fractions, expected_classes, true),
                      comment_label_of, comment_id_of);
}

SplitSets<ProcessedComment> balance_and_split(const std::vector<ProcessedComment>& labeled,
                                              uint64_t seed, SplitFractions fractions,
                                              const std::vector<std::string>* expected_classes,
                                              bool balance) {
    std::vector<std::pair<std::string, std::string>> id_labels;
    id_labels.reserve(labeled.size());
    for (const ProcessedComment& c : labeled) {
        if (c.label.empty()) throw DataError("unlabeled comment: " + c.comment_id);
        id_labels.emplace_back(c.comment_id, c.label);
    }
    return apply_plan(labeled,
                      plan_balance_and_split(id_labels, seed, fractions, expected_classes, balance),
                      processed_label_of, processed_id_of);
}

}  // namespace wikinli

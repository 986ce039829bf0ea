#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "wikinli/text.hpp"

namespace wikinli {

// Babel 1-5 scale plus native.
enum class SkillLevel : int { L1 = 1, L2, L3, L4, L5, Native };

std::string_view skill_level_name(SkillLevel level);

struct LanguageSkill {
    std::string lang_code;  // non-empty lowercase ASCII, e.g. "en", "en-us"
    SkillLevel level;
};

struct UserProfile {
    std::string user_id;
    std::map<std::string, SkillLevel> skills;  // at most one entry per code

    std::vector<std::string> native_codes() const;
};

struct BabelParseStats {
    size_t malformed = 0;
    size_t duplicates = 0;
};

// Parses babel category strings of the form "User <code>" or
// "User <code>-<level>" with level in {1..5, N}. A missing level or level
// "N" means native. Malformed strings are skipped and counted. When one
// language appears twice the last occurrence wins (counted as duplicate).
UserProfile parse_babel(std::string user_id, const std::vector<std::string>& category_strings,
                        BabelParseStats* stats = nullptr);

struct Comment {
    std::string comment_id;
    std::string user_id;
    std::string page;
    std::string raw_text;
    std::optional<std::string> label;
};

// Ordered signature pattern list, loaded from a versioned data file so new
// signature styles can be added without touching code. Capture group 1 of
// each regex is the signing username.
class SignaturePatterns {
public:
    struct Entry {
        std::string name;
        std::string raw;
        std::regex re;
    };

    static SignaturePatterns load(const std::filesystem::path& file);
    static SignaturePatterns builtin();  // compiled-in copy of the shipped file

    int version() const { return version_; }
    const std::vector<Entry>& entries() const { return entries_; }

private:
    static SignaturePatterns parse(std::istream& in, const std::string& origin);

    int version_ = 0;
    std::vector<Entry> entries_;
};

struct ExtractStats {
    size_t trailing_dropped = 0;  // unmatched text after the last signature
    size_t empty_bodies = 0;      // signatures with no preceding text
};

// Splits a talk-page body into signed comments. Signatures are found by
// scanning for the earliest match over the pattern list (list order breaks
// ties at the same offset); each comment is the cleaned text between the
// previous signature and the current one, attributed to the signing user.
// Text after the final signature is dropped and counted.
std::vector<Comment> extract_signed_comments(std::string_view wikitext, const std::string& page,
                                             const SignaturePatterns& patterns,
                                             ExtractStats* stats = nullptr);

struct FilterStats {
    size_t no_native = 0;
    size_t multi_native = 0;
    size_t non_us_english = 0;
};

// The default 19-language pick (lowercase codes): de ja pl zh tr fi zh-yue
// ar da hu es pt fr nl ko it sv no ru.
const std::vector<std::string>& default_popular_languages();

// Human-readable names for the default class labels (used in reports).
const std::map<std::string, std::string>& language_names();

// Applies the user filtering rules:
//  - a user natively claiming any English variant is kept, labeled "en-us",
//    only when "en-us" is their sole native claim;
//  - otherwise a user is kept when exactly one native claim falls in the
//    picked set, and labeled with it;
//  - two or more picked native claims, or none, exclude the user (counted).
// popular_langs must have exactly 19 entries.
std::vector<std::pair<std::string, std::string>> filter_users(
    const std::vector<UserProfile>& profiles, const std::vector<std::string>& popular_langs,
    FilterStats* stats = nullptr);

struct SplitFractions {
    double train = 0.7;
    double dev = 0.1;
    double test = 0.2;
};

struct CorpusManifest {
    std::vector<std::string> class_labels;
    std::map<std::string, size_t> counts;  // balanced per-class comment counts
    uint64_t seed = 0;
    SplitFractions fractions;
    // comment_id -> 0 train, 1 dev, 2 test; sorted by comment_id
    std::vector<std::pair<std::string, int>> assignment;

    std::string to_json_string() const;
    void save(const std::filesystem::path& file) const;
};

struct SplitPlan {
    CorpusManifest manifest;
    std::map<std::string, int> split_of;  // comment_id -> split index
    bool degenerate_single_class = false;
};

// Balances per-class counts down to the global minimum by seeded uniform
// subsampling, then partitions each class 70/10/20 (floor rounding,
// remainder to training) with a seeded shuffle. Class members are ordered
// by comment_id before sampling so the plan is independent of input order.
// When expected_classes is given, a class with zero comments is an error;
// with balance=false the truncation step is skipped (per-class splits only).
SplitPlan plan_balance_and_split(const std::vector<std::pair<std::string, std::string>>& id_labels,
                                 uint64_t seed, SplitFractions fractions = {},
                                 const std::vector<std::string>* expected_classes = nullptr,
                                 bool balance = true);

template <typename T>
struct SplitSets {
    std::vector<T> train, dev, test;
    CorpusManifest manifest;
    bool degenerate_single_class = false;
};

SplitSets<Comment> balance_and_split(const std::vector<Comment>& labeled, uint64_t seed,
                                     SplitFractions fractions = {},
                                     const std::vector<std::string>* expected_classes = nullptr);

SplitSets<ProcessedComment> balance_and_split(const std::vector<ProcessedComment>& labeled,
                                              uint64_t seed, SplitFractions fractions = {},
                                              const std::vector<std::string>* expected_classes = nullptr,
                                              bool balance = true);

}  // namespace wikinli

#include "wikinli/text.hpp"

#include <cctype>

#include "wikinli/corpus.hpp"
#include "wikinli/errors.hpp"
#include "wikinli/postag.hpp"
#include "wikinli/utf8.hpp"

namespace wikinli {

std::string scrub_non_ascii(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    size_t i = 0;
    while (i < raw.size()) {
        const size_t before = i;
        const uint32_t cp = utf8::decode_next(raw, i);
        if (cp <= 0x7F) {
            out.push_back(raw[before]);
        } else {
            utf8::append(out, utf8::kReplacement);
        }
    }
    return out;
}

namespace {

inline bool is_word_char(uint32_t cp) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
}

inline bool is_separator(uint32_t cp) {
    // All ASCII control characters count as whitespace so that bytes like
    // U+001F can never end up inside a token (they would collide with the
    // n-gram key separator).
    return cp < 0x21 ? (cp <= 0x20) : cp == 0x7F;
}

inline bool single_uppercase(const std::string& tok) {
    return tok.size() == 1 && tok[0] >= 'A' && tok[0] <= 'Z';
}

}  // namespace

TokenStream tokenize(std::string_view text) {
    TokenStream out;
    std::vector<bool> space_before;  // whitespace between this token and the previous one

    std::string current;
    bool pending_space = false;
    auto flush_word = [&]() {
        if (!current.empty()) {
            out.tokens.push_back(current);
            space_before.push_back(pending_space);
            pending_space = false;
            current.clear();
        }
    };

    size_t i = 0;
    while (i < text.size()) {
        const size_t before = i;
        const uint32_t cp = utf8::decode_next(text, i);
        if (is_separator(cp)) {
            flush_word();
            pending_space = true;
        } else if (is_word_char(cp)) {
            current.append(text.substr(before, i - before));
        } else {
            flush_word();
            out.tokens.emplace_back(text.substr(before, i - before));
            space_before.push_back(pending_space);
            pending_space = false;
        }
    }
    flush_word();

    const size_t n = out.tokens.size();
    for (size_t t = 0; t < n; ++t) {
        const std::string& tok = out.tokens[t];
        if (tok != "." && tok != "!" && tok != "?") continue;
        const bool at_end = (t + 1 == n);
        const bool capital_follows =
            !at_end && space_before[t + 1] && !out.tokens[t + 1].empty() &&
            out.tokens[t + 1][0] >= 'A' && out.tokens[t + 1][0] <= 'Z';
        if (!at_end && !capital_follows) continue;
        if (tok == "." && t > 0 && single_uppercase(out.tokens[t - 1])) continue;  // initial
        out.sentence_bounds.push_back(t + 1);
    }
    if (n > 0 && (out.sentence_bounds.empty() || out.sentence_bounds.back() != n)) {
        out.sentence_bounds.push_back(n);
    }
    return out;
}

TokenStream mask_proper_nouns(const TokenStream& stream, const std::vector<std::string>& tags) {
    if (stream.tokens.size() != tags.size()) {
        throw DataError("mask_proper_nouns: " + std::to_string(stream.tokens.size()) +
                        " tokens vs " + std::to_string(tags.size()) + " tags");
    }
    TokenStream out;
    out.tokens.reserve(stream.tokens.size());
    out.sentence_bounds = stream.sentence_bounds;
    for (size_t i = 0; i < tags.size(); ++i) {
        if (tags[i] == "NNP" || tags[i] == "NNPS") {
            out.tokens.push_back(tags[i]);
        } else {
            out.tokens.push_back(stream.tokens[i]);
        }
    }
    return out;
}

bool admit(const ProcessedComment& comment, size_t min_tokens) {
    return comment.token_count() >= min_tokens;
}

ProcessedComment preprocess_comment(const Comment& comment, const TaggerModel& tagger) {
    ProcessedComment out;
    out.comment_id = comment.comment_id;
    out.label = comment.label.value_or("");
    TokenStream raw_stream = tokenize(scrub_non_ascii(comment.raw_text));
    out.pos_tags = tag(tagger, raw_stream.tokens);
    out.stream = mask_proper_nouns(raw_stream, out.pos_tags);
    out.masked = true;
    out.sentences = out.stream.sentence_count();
    return out;
}

}  // namespace wikinli

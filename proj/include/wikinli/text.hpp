#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wikinli {

struct Comment;
struct TaggerModel;

// Token sequence plus sentence segmentation. sentence_bounds holds the
// exclusive end index of each sentence; when tokens exist the final bound
// always equals the token count (a trailing fragment without terminal
// punctuation still counts as a sentence).
struct TokenStream {
    std::vector<std::string> tokens;
    std::vector<size_t> sentence_bounds;

    size_t sentence_count() const { return sentence_bounds.size(); }
};

// Replaces every code point above U+007F (and every malformed UTF-8 byte)
// with U+FFFD. Idempotent; preserves the code-point length.
std::string scrub_non_ascii(std::string_view raw);

// Rule-based tokenizer, fixed for reproducibility:
//  - ASCII control characters and whitespace separate tokens,
//  - runs of [A-Za-z0-9] form word tokens,
//  - every other code point (punctuation, U+FFFD) is a standalone token,
//  - a sentence ends at '.', '!' or '?' when followed by whitespace and an
//    uppercase ASCII letter, or at end of text; a '.' directly after a
//    single uppercase letter (an initial, "A. B. won") does not end one.
TokenStream tokenize(std::string_view text);

// Proper-noun masking: tokens tagged NNP become the literal token "NNP",
// NNPS likewise. Throws DataError on a token/tag length mismatch.
TokenStream mask_proper_nouns(const TokenStream& stream, const std::vector<std::string>& tags);

// A comment after the full pipeline: scrub -> tokenize -> tag -> mask.
struct ProcessedComment {
    std::string comment_id;
    std::string label;  // empty when unlabeled
    TokenStream stream;
    std::vector<std::string> pos_tags;
    bool masked = false;
    size_t sentences = 0;  // == stream.sentence_count() at construction

    size_t token_count() const { return stream.tokens.size(); }
};

// Length gate: admitted iff the comment has at least min_tokens tokens.
// Punctuation tokens count toward the minimum.
bool admit(const ProcessedComment& comment, size_t min_tokens = 20);

// Runs the fixed pipeline on one raw comment.
ProcessedComment preprocess_comment(const Comment& comment, const TaggerModel& tagger);

}  // namespace wikinli

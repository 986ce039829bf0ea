#pragma once

#include <filesystem>
#include <vector>

#include "wikinli/corpus.hpp"
#include "wikinli/text.hpp"

namespace wikinli {

// Comments: one {"comment_id","user_id","page","text"[,"label"]} object per line.
std::vector<Comment> read_comments_jsonl(const std::filesystem::path& file);
void write_comments_jsonl(const std::filesystem::path& file, const std::vector<Comment>& comments);

// Users: one {"user_id","babel":["User en-N",...]} object per line.
std::vector<UserProfile> read_users_jsonl(const std::filesystem::path& file,
                                          BabelParseStats* stats = nullptr);

// Processed comments: {"comment_id","label","tokens","tags","sentences"}.
std::vector<ProcessedComment> read_processed_jsonl(const std::filesystem::path& file);
void write_processed_jsonl(const std::filesystem::path& file,
                           const std::vector<ProcessedComment>& comments);

}  // namespace wikinli

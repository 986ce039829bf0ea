#include "wikinli/jsonl.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "wikinli/errors.hpp"

namespace wikinli {

namespace {

using nlohmann::json;

json parse_line(const std::string& line, const std::filesystem::path& file, size_t lineno) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw DataError(file.string() + ":" + std::to_string(lineno) + ": bad json: " + e.what());
    }
}

template <typename Fn>
void for_each_line(const std::filesystem::path& file, Fn fn) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("cannot open " + file.string());
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        fn(parse_line(line, file, lineno), lineno);
    }
}

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write " + file.string());
    return out;
}

}  // namespace

std::vector<Comment> read_comments_jsonl(const std::filesystem::path& file) {
    std::vector<Comment> out;
    for_each_line(file, [&](const json& j, size_t lineno) {
        try {
            Comment c;
            c.comment_id = j.at("comment_id").get<std::string>();
            c.user_id = j.at("user_id").get<std::string>();
            c.page = j.at("page").get<std::string>();
            c.raw_text = j.at("text").get<std::string>();
            if (j.contains("label")) c.label = j.at("label").get<std::string>();
            if (c.comment_id.empty() || c.raw_text.empty()) {
                throw DataError(file.string() + ":" + std::to_string(lineno) +
                                ": empty comment_id or text");
            }
            out.push_back(std::move(c));
        } catch (const json::exception& e) {
            throw DataError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    });
    return out;
}

void write_comments_jsonl(const std::filesystem::path& file, const std::vector<Comment>& comments) {
    auto out = open_out(file);
    for (const Comment& c : comments) {
        json j;
        j["comment_id"] = c.comment_id;
        j["user_id"] = c.user_id;
        j["page"] = c.page;
        j["text"] = c.raw_text;
        if (c.label) j["label"] = *c.label;
        out << j.dump() << '\n';
    }
}

std::vector<UserProfile> read_users_jsonl(const std::filesystem::path& file,
                                          BabelParseStats* stats) {
    std::vector<UserProfile> out;
    for_each_line(file, [&](const json& j, size_t lineno) {
        try {
            const auto user_id = j.at("user_id").get<std::string>();
            const auto babel = j.at("babel").get<std::vector<std::string>>();
            if (user_id.empty()) {
                throw DataError(file.string() + ":" + std::to_string(lineno) + ": empty user_id");
            }
            out.push_back(parse_babel(user_id, babel, stats));
        } catch (const json::exception& e) {
            throw DataError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    });
    return out;
}

std::vector<ProcessedComment> read_processed_jsonl(const std::filesystem::path& file) {
    std::vector<ProcessedComment> out;
    for_each_line(file, [&](const json& j, size_t lineno) {
        try {
            ProcessedComment c;
            c.comment_id = j.at("comment_id").get<std::string>();
            c.label = j.value("label", std::string());
            c.stream.tokens = j.at("tokens").get<std::vector<std::string>>();
            c.pos_tags = j.at("tags").get<std::vector<std::string>>();
            c.sentences = j.at("sentences").get<size_t>();
            c.masked = true;
            if (c.pos_tags.size() != c.stream.tokens.size()) {
                throw DataError(file.string() + ":" + std::to_string(lineno) +
                                ": tokens/tags length mismatch");
            }
            out.push_back(std::move(c));
        } catch (const json::exception& e) {
            throw DataError(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    });
    return out;
}

void write_processed_jsonl(const std::filesystem::path& file,
                           const std::vector<ProcessedComment>& comments) {
    auto out = open_out(file);
    for (const ProcessedComment& c : comments) {
        json j;
        j["comment_id"] = c.comment_id;
        j["label"] = c.label;
        j["tokens"] = c.stream.tokens;
        j["tags"] = c.pos_tags;
        j["sentences"] = c.sentences;
        out << j.dump() << '\n';
    }
}

}  // namespace wikinli

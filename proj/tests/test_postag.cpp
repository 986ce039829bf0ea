#include <doctest.h>

#include <algorithm>
#include <set>

#include "wikinli/errors.hpp"
#include "wikinli/postag.hpp"
#include "wikinli/rng.hpp"
#include "util.hpp"

using namespace wikinli;

namespace {

std::vector<TaggedSentence> toy_corpus() {
    return {
        {{"the", "dog", "runs"}, {"DT", "NN", "VBZ"}},
        {{"a", "cat", "sleeps"}, {"DT", "NN", "VBZ"}},
        {{"the", "big", "dog", "barks"}, {"DT", "JJ", "NN", "VBZ"}},
        {{"dogs", "run", "fast"}, {"NNS", "VBP", "RB"}},
        {{"she", "quickly", "reads", "books"}, {"PRP", "RB", "VBZ", "NNS"}},
        {{"John", "likes", "pizza"}, {"NNP", "VBZ", "NN"}},
        {{"we", "eat", "bread", "daily"}, {"PRP", "VBP", "NN", "RB"}},
        {{"the", "cats", "sleep"}, {"DT", "NNS", "VBP"}},
        {{"he", "writes", "code"}, {"PRP", "VBZ", "NN"}},
        {{"Mary", "sees", "the", "moon"}, {"NNP", "VBZ", "DT", "NN"}},
    };
}

TaggerModel lexicon_only_model() {
    TaggerModel m;
    m.fallback_lexicon = {
        {"the", TagSet::index("DT")},
        {"dog", TagSet::index("NN")},
        {"runs", TagSet::index("VBZ")},
    };
    return m;
}

}  // namespace

TEST_SUITE_BEGIN("postag");

TEST_CASE("tagset holds every tag the pipeline relies on") {
    for (const char* tag : {"IN", "DT", "NN", "PRP", "TO", "CD", "NNP", "VBZ", "RB", "-LRB-",
                            ",", "-RRB-", "NNPS", "NNS"}) {
        CHECK(TagSet::contains(tag));
    }
    CHECK_FALSE(TagSet::contains("XYZ"));
    // stable order: index doubles as the deterministic tie-break
    CHECK(TagSet::index("#") == 0);
    CHECK(TagSet::tags()[static_cast<size_t>(TagSet::index("NN"))] == "NN");
}

TEST_CASE("training memorizes a tiny separable corpus") {
    TaggerTrainReport report;
    const TaggerModel model = train_tagger(toy_corpus(), 5, 3, &report);
    REQUIRE(report.epoch_accuracy.size() == 5);

    size_t correct = 0, total = 0;
    for (const auto& [tokens, tags] : toy_corpus()) {
        const auto predicted = tag(model, tokens);
        REQUIRE(predicted.size() == tags.size());
        for (size_t i = 0; i < tags.size(); ++i) {
            ++total;
            if (predicted[i] == tags[i]) ++correct;
        }
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(total) >= 0.95);
}

TEST_CASE("training rejects bad inputs") {
    CHECK_THROWS_AS(train_tagger({}, 5, 1), DataError);
    CHECK_THROWS_AS(train_tagger(toy_corpus(), 0, 1), ConfigError);
    CHECK_THROWS_AS(train_tagger({{{"a"}, {"DT", "NN"}}}, 1, 1), DataError);
    CHECK_THROWS_AS(train_tagger({{{"a"}, {"BOGUS"}}}, 1, 1), DataError);
}

TEST_CASE("same corpus and seed give identical model bytes") {
    testutil::TempDir tmp;
    train_tagger(toy_corpus(), 5, 42).save(tmp / "m1");
    train_tagger(toy_corpus(), 5, 42).save(tmp / "m2");
    train_tagger(toy_corpus(), 5, 43).save(tmp / "m3");
    CHECK(testutil::slurp(tmp / "m1") == testutil::slurp(tmp / "m2"));
    CHECK(testutil::slurp(tmp / "m1") != testutil::slurp(tmp / "m3"));
}

TEST_CASE("model serialization round-trips exactly") {
    testutil::TempDir tmp;
    const TaggerModel model = train_tagger(toy_corpus(), 5, 7);
    model.save(tmp / "m1");
    const TaggerModel loaded = TaggerModel::load(tmp / "m1");
    loaded.save(tmp / "m2");
    CHECK(testutil::slurp(tmp / "m1") == testutil::slurp(tmp / "m2"));

    const std::vector<std::string> tokens = {"the", "dogs", "run", "tomorrow", "."};
    CHECK(tag(model, tokens) == tag(loaded, tokens));
}

TEST_CASE("lexicon-only model tags through lookup") {
    CHECK(tag(lexicon_only_model(), {"the", "dog", "runs"}) ==
          std::vector<std::string>{"DT", "NN", "VBZ"});
}

TEST_CASE("empty input gives empty output") {
    CHECK(tag(lexicon_only_model(), {}).empty());
    CHECK(tag(train_tagger(toy_corpus(), 2, 1), {}).empty());
}

TEST_CASE("tagging is total: unseen tokens always get some tagset tag") {
    const TaggerModel trained = train_tagger(toy_corpus(), 3, 1);
    const TaggerModel lexical = lexicon_only_model();
    SplitMix64 rng(5);
    for (int rep = 0; rep < 200; ++rep) {
        std::string token;
        const size_t len = 1 + rng.below(8);
        for (size_t i = 0; i < len; ++i) {
            token.push_back(static_cast<char>("abcdefghijklmnopqrstuvwxyzQX0.!?"[rng.below(32)]));
        }
        for (const TaggerModel* model : {&trained, &lexical}) {
            const auto tags = tag(*model, {token, "zzzqx"});
            REQUIRE(tags.size() == 2);
            CHECK(TagSet::contains(tags[0]));
            CHECK(TagSet::contains(tags[1]));
        }
    }
}

TEST_CASE("output length always equals input length") {
    const TaggerModel model = train_tagger(toy_corpus(), 3, 9);
    SplitMix64 rng(6);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<std::string> tokens;
        const size_t n = rng.below(30);
        for (size_t i = 0; i < n; ++i) tokens.push_back("w" + std::to_string(rng.below(50)));
        CHECK(tag(model, tokens).size() == n);
    }
}

TEST_CASE("fixed model and input give a fixed output") {
    const TaggerModel model = train_tagger(toy_corpus(), 4, 11);
    const std::vector<std::string> tokens = {"the", "unknown", "Dogs", "bark", "loudly", "."};
    const auto first = tag(model, tokens);
    for (int rep = 0; rep < 5; ++rep) CHECK(tag(model, tokens) == first);
}

TEST_CASE("bootstrap corpus loads, trains and reaches high training accuracy") {
    const auto corpus = load_tagged_corpus(testutil::source_dir() / "data" / "tagger_bootstrap.txt");
    CHECK(corpus.size() >= 50);
    for (const auto& [tokens, tags] : corpus) {
        REQUIRE(tokens.size() == tags.size());
        for (const std::string& t : tags) CHECK(TagSet::contains(t));
    }
    TaggerTrainReport report;
    const TaggerModel model = train_tagger(corpus, 8, 1, &report);
    CHECK(report.epoch_accuracy.back() > 0.9);

    // mid-sentence capitalized unknown words lean NNP so masking works
    const auto tags = tag(model, {"she", "visited", "Henriette", "in", "Tallinn", "."});
    CHECK(tags[2] == "NNP");
    CHECK(tags[4] == "NNP");
}

TEST_SUITE_END();

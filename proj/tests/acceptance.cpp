// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Runs on synthetic corpora plus the bundled fixture; the
// end-to-end criteria drive the installed CLI binary.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wikinli/classifier.hpp"
#include "wikinli/corpus.hpp"
#include "wikinli/features.hpp"
#include "wikinli/harness.hpp"
#include "wikinli/possim.hpp"
#include "wikinli/rng.hpp"
#include "oracles.hpp"
#include "synth.hpp"

namespace fs = std::filesystem;
using namespace wikinli;
using Clock = std::chrono::steady_clock;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
    if (!condition) throw CheckFailure(message);
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path source_dir() { return fs::path(WIKINLI_SOURCE_DIR); }

struct Scratch {
    fs::path path;
    Scratch() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("wikinli-acc-" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd =
        std::string(WIKINLI_CLI_PATH) + " " + args + " >> " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (status < 0) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --- criterion bodies -------------------------------------------------------

// FreqDist counts and Sim match an independent brute-force enumeration on
// random corpora of comments up to 50 tokens, in under 10 seconds.
void criterion_formula_oracle() {
    const auto start = Clock::now();
    const auto styles = synth::separable_styles();
    size_t corpora = 0;
    for (uint64_t seed = 1; seed <= 8; ++seed) {
        SplitMix64 rng(seed);
        const auto corpus = synth::make_corpus({"x"}, {styles[seed % 2]}, 10, 1, 50, seed * 101);
        const auto probe = synth::make_comment("p", "x", styles[(seed + 1) % 2], 1 + rng.below(50), rng);
        ++corpora;
        for (Level level : {Level::Word, Level::Char, Level::Pos}) {
            for (int order = 1; order <= 4; ++order) {
                const FreqDist dist = build_freqdist(corpus, level, order, "x");
                const auto brute = oracle::brute_counts(corpus, level, order);
                require(dist.counts.size() == brute.size(), "count-map size mismatch");
                uint64_t total = 0;
                for (const auto& [gram, n] : brute) {
                    require(dist.counts.at(oracle::key_of(gram)) == n, "count mismatch");
                    total += n;
                }
                require(dist.total == total, "total mismatch");
                for (const ProcessedComment* c : {&corpus[0], &corpus[5], &probe}) {
                    const double got = similarity(*c, dist);
                    const double want = oracle::brute_sim(*c, brute, level, order);
                    require(std::fabs(got - want) <= 1e-9, "sim mismatch vs brute force");
                }
            }
        }
    }
    require(corpora == 8, "expected 8 corpora");
    require(seconds_since(start) < 10.0, "formula oracle exceeded 10 s");
}

// Appending tokens whose n-grams are all unseen changes Sim by exactly 0.
void criterion_unseen_law() {
    const auto styles = synth::separable_styles();
    SplitMix64 rng(91);
    size_t cases = 0;
    while (cases < 1000) {
        const uint64_t seed = 7000 + cases;
        const auto corpus = synth::make_corpus({"x"}, {styles[0]}, 6, 2, 40, seed);
        const int order = 1 + static_cast<int>(rng.below(4));
        const FreqDist dist = build_freqdist(corpus, Level::Word, order, "x");
        for (int rep = 0; rep < 20 && cases < 1000; ++rep, ++cases) {
            auto c = synth::make_comment("c", "x", styles[0], 1 + rng.below(30), rng);
            const double before = similarity(c, dist);
            const size_t extra = 1 + rng.below(8);
            for (size_t i = 0; i < extra; ++i) {
                // vocabulary "uq..." is disjoint from the corpus styles, so
                // every appended n-gram, boundary ones included, is unseen
                c.stream.tokens.push_back("uq" + std::to_string(rng.below(10000)));
                c.pos_tags.push_back("NN");
            }
            require(similarity(c, dist) == before, "sim changed after unseen append");
        }
    }
}

// 6 classes -> 72 similarity features, 199 total; 2 classes -> 24 and 151.
void criterion_feature_schema() {
    const auto stopwords = load_stopwords(source_dir() / "data" / "stopwords_en.txt");
    require(stopwords.size() == 125, "stop-word list must hold 125 entries");

    auto schema_counts = [&](size_t k) {
        std::vector<std::string> labels;
        for (size_t i = 0; i < k; ++i) labels.push_back("class" + std::to_string(i));
        const auto corpus = synth::make_corpus(
            labels, std::vector<synth::Style>(k, synth::separable_styles()[0]), 3, 8, 20, 17);
        std::vector<FreqDist> dists;
        for (const std::string& label : labels) {
            std::vector<ProcessedComment> mine;
            for (const auto& c : corpus) {
                if (c.label == label) mine.push_back(c);
            }
            for (Level level : {Level::Word, Level::Char, Level::Pos}) {
                for (int order = 1; order <= 4; ++order) {
                    dists.push_back(build_freqdist(mine, level, order, label));
                }
            }
        }
        const FeatureExtractor fx(labels, std::move(dists), stopwords);
        const FeatureVector v = fx.featurize(corpus[0]);
        size_t sims = 0;
        for (const std::string& name : *v.schema) {
            if (name.rfind("sim:", 0) == 0) ++sims;
        }
        return std::pair<size_t, size_t>(sims, v.size());
    };

    const auto [sims6, total6] = schema_counts(6);
    require(sims6 == 72, "6-class similarity block must be 72 features");
    require(total6 == 199, "6-class total dimension must be 199");
    const auto [sims2, total2] = schema_counts(2);
    require(sims2 == 24, "2-class similarity block must be 24 features");
    require(total2 == 151, "2-class total dimension must be 151");
}

// Analytic gradients match central differences on 50 random instances.
void criterion_gradient_check() {
    SplitMix64 rng(303);
    const size_t n = 20, d = 5, d1 = d + 1, k = 3;
    for (int instance = 0; instance < 50; ++instance) {
        std::vector<double> X(n * d1);
        std::vector<int> y(n);
        std::vector<double> W(k * d1);
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < d; ++j) X[i * d1 + j] = (rng.unit() - 0.5) * 4.0;
            X[i * d1 + d] = 1.0;
            y[i] = static_cast<int>(rng.below(k));
        }
        for (double& w : W) w = (rng.unit() - 0.5) * 2.0;
        const double l2 = 1e-3;

        std::vector<double> grad(W.size());
        softmax_loss_grad(X, y, n, d1, k, W, l2, grad);

        double diff2 = 0.0, norm2 = 0.0;
        const double h = 1e-6;
        for (size_t p = 0; p < W.size(); ++p) {
            std::vector<double> Wp = W, Wm = W;
            Wp[p] += h;
            Wm[p] -= h;
            const double fd = (softmax_loss_grad(X, y, n, d1, k, Wp, l2, {}) -
                               softmax_loss_grad(X, y, n, d1, k, Wm, l2, {})) /
                              (2.0 * h);
            diff2 += (grad[p] - fd) * (grad[p] - fd);
            norm2 += fd * fd;
        }
        require(std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-12) < 1e-4,
                "gradient mismatch on instance " + std::to_string(instance));
    }
}

// With label-independent features, the trained model and Baseline-Max both
// sit at 1/K within 0.05, across 5 seeds.
void criterion_baseline_law() {
    const size_t k = 4;
    const std::vector<std::string> labels = {"c0", "c1", "c2", "c3"};
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        const auto corpus = synth::make_corpus(labels, synth::noise_styles(k), 800, 15, 40,
                                               9000 + seed);
        ExperimentSpec spec;
        spec.name = "baseline-law";
        spec.seed = seed;
        spec.min_tokens = 5;
        spec.stopwords_path = source_dir() / "data" / "stopwords_en.txt";
        spec.hyper.max_epochs = 200;

        const LogRegPipeline pipeline = build_logreg_pipeline(spec, corpus);
        const ClassifierModel model = fit(pipeline.train_rows, pipeline.dev_rows, spec.hyper, seed);
        const double acc = evaluate(model, pipeline.test_rows).accuracy;
        require(std::fabs(acc - 0.25) <= 0.05,
                "model accuracy " + std::to_string(acc) + " outside 1/K band (seed " +
                    std::to_string(seed) + ")");

        std::map<std::string, size_t> train_counts;
        for (const auto& row : pipeline.train_rows) ++train_counts[row.label];
        std::string majority = labels[0];
        for (const std::string& label : labels) {
            if (train_counts[label] > train_counts[majority]) majority = label;
        }
        std::vector<std::string> test_labels;
        for (const auto& row : pipeline.test_rows) test_labels.push_back(row.label);
        const BaselineResult bl = baselines(test_labels, labels, majority, seed);
        require(std::fabs(bl.max_acc - 0.25) <= 0.05, "baseline-max outside 1/K band");
    }
}

// A separable 2-class corpus reaches >= 90% test accuracy and the learning
// curve does not fall from fraction 0.1 to 1.0, all within 2 minutes.
void criterion_separability() {
    const auto start = Clock::now();
    Scratch scratch;
    const auto corpus =
        synth::make_corpus({"native", "learner"}, synth::separable_styles(), 2000, 25, 60, 424242);
    ExperimentSpec spec;
    spec.name = "separability";
    spec.seed = 5;
    spec.min_tokens = 5;
    spec.fractions = {0.1, 1.0};
    spec.stopwords_path = source_dir() / "data" / "stopwords_en.txt";

    const RunResult result = run_experiment(spec, corpus, scratch.path);
    require(result.report.accuracy >= 0.90,
            "test accuracy " + std::to_string(result.report.accuracy) + " below 0.90");
    require(result.curve.size() == 2, "expected two curve points");
    require(result.curve[1].test_acc >= result.curve[0].test_acc,
            "learning curve fell from fraction 0.1 to 1.0");
    require(seconds_since(start) < 120.0, "separability run exceeded 2 minutes");
}

// Randomized PosSim laws, 1000 cases each.
void criterion_possim_laws() {
    static const char* alphabet[] = {"DT", "NN", "VBZ", "IN", "JJ"};
    constexpr size_t kAlpha = 5;
    SplitMix64 rng(515);

    auto random_dist = [&](const std::string& label, int order, size_t entries) {
        FreqDist d;
        d.level = Level::Pos;
        d.order = order;
        d.class_label = label;
        for (size_t i = 0; i < entries; ++i) {
            std::vector<std::string> parts;
            for (int j = 0; j < order; ++j) parts.emplace_back(alphabet[rng.below(kAlpha)]);
            d.add(join_ngram(parts), 1 + rng.below(6));
        }
        return d;
    };
    auto random_comment = [&](size_t n, const std::string& label = "") {
        ProcessedComment c;
        c.comment_id = "c";
        c.label = label;
        for (size_t i = 0; i < n; ++i) c.pos_tags.emplace_back(alphabet[rng.below(kAlpha)]);
        c.stream.tokens.assign(n, "w");
        c.masked = true;
        return c;
    };

    // law 1: zero-comment fallback, checked against independent coverage
    PosSimConfig cfg;
    cfg.order = 2;
    cfg.min_pos_ngrams = 0;
    cfg.default_class = "zz-default";
    for (int rep = 0; rep < 1000; ++rep) {
        PosDists dists;
        const size_t n_classes = 2 + rng.below(3);
        for (size_t c = 0; c < n_classes; ++c) {
            const std::string label = "c" + std::to_string(c);
            dists.emplace(label, random_dist(label, 2, rng.below(10)));
        }
        auto comment = random_comment(2 + rng.below(8));
        if (rep % 2 == 0) comment.pos_tags.push_back("UNSEEN-TAG");  // forces a zero comment

        bool any_covered = false;
        const auto keys = extract_ngrams(comment, Level::Pos, 2);
        for (const auto& [label, dist] : dists) {
            bool covered = true;
            for (const std::string& key : keys) {
                if (!dist.counts.count(key)) {
                    covered = false;
                    break;
                }
            }
            any_covered = any_covered || covered;
        }
        const PosSimOutcome outcome = classify_possim(comment, dists, cfg);
        require(outcome.zero_comment == !any_covered, "zero-comment flag disagrees with coverage");
        if (outcome.zero_comment) {
            require(outcome.predicted == "zz-default", "zero comment must take the default class");
        }
    }

    // law 2: a present 4-gram short-circuits cascade estimation in all modes
    for (int rep = 0; rep < 1000; ++rep) {
        PosDistFamily family;
        for (int order = 1; order <= 4; ++order) {
            family.by_order.emplace(order, random_dist("a", order, 3 + rng.below(20)));
        }
        const auto& counts4 = family.by_order.at(4).counts;
        auto it = counts4.begin();
        std::advance(it, static_cast<long>(rng.below(counts4.size())));
        for (Cascade mode : {Cascade::TriBi, Cascade::BiUni, Cascade::Both}) {
            require(cascade_estimate(it->first, family, mode) == static_cast<double>(it->second),
                    "cascade did not short-circuit on a present 4-gram");
        }
    }

    // law 3: TopK(k) never leaves more than k entries
    for (int rep = 0; rep < 1000; ++rep) {
        PosDists dists;
        for (size_t c = 0; c < 3; ++c) {
            const std::string label = "c" + std::to_string(c);
            dists.emplace(label, random_dist(label, 2, rng.below(30)));
        }
        const uint64_t k = 1 + rng.below(12);
        const PosDists cut = apply_cutoff(dists, Cutoff{Cutoff::Kind::TopK, k});
        for (const auto& [label, dist] : cut) {
            require(dist.counts.size() <= k, "TopK left more than k entries");
        }
    }

    // law 4: tricky-filtered comments never fire zero_comment for the true class
    size_t retained_cases = 0;
    while (retained_cases < 1000) {
        PosDists dists;
        for (size_t c = 0; c < 3; ++c) {
            const std::string label = "c" + std::to_string(c);
            dists.emplace(label, random_dist(label, 2, 12 + rng.below(14)));
        }
        std::vector<ProcessedComment> test;
        for (int t = 0; t < 20; ++t) {
            test.push_back(random_comment(2 + rng.below(6), "c" + std::to_string(rng.below(3))));
        }
        const TrickyResult tricky = tricky_filter(test, dists, 2);
        for (size_t idx : tricky.retained) {
            const PosSimOutcome outcome = classify_possim(test[idx], dists, cfg);
            require(!outcome.zero_comment, "zero comment on tricky-filtered data");
            require(outcome.per_class_scores.at(test[idx].label).has_value(),
                    "true class eliminated on tricky-filtered data");
            ++retained_cases;
        }
    }
}

// --- the CLI chain over the bundled fixture ---------------------------------

struct ChainResult {
    fs::path dir;
    int worst_exit = 0;
};

ChainResult run_fixture_chain(const fs::path& dir) {
    fs::create_directories(dir);
    const fs::path log = dir / "cli.log";
    const fs::path fixtures = source_dir() / "fixtures";
    ChainResult result;
    result.dir = dir;

    auto step = [&](const std::string& args) {
        const int code = run_cli(args, log);
        result.worst_exit = std::max(result.worst_exit, code);
    };
    step("train-tagger --corpus " + (source_dir() / "data" / "tagger_bootstrap.txt").string() +
         " --out " + (dir / "tagger.model").string() + " --epochs 8 --seed 1");
    step("extract --patterns " + (source_dir() / "data" / "signature_patterns.txt").string() +
         " --out " + (dir / "comments.jsonl").string() + " " +
         (fixtures / "talk" / "Talk_Coffee.wiki").string() + " " +
         (fixtures / "talk" / "Talk_Berlin.wiki").string() + " " +
         (fixtures / "talk" / "Talk_Rivers.wiki").string());
    step("filter --users " + (fixtures / "users.jsonl").string() + " --comments " +
         (dir / "comments.jsonl").string() + " --out " + (dir / "labeled.jsonl").string());
    step("preprocess --in " + (dir / "labeled.jsonl").string() + " --tagger " +
         (dir / "tagger.model").string() + " --out " + (dir / "processed.jsonl").string());
    step("run --config " + (fixtures / "experiment.ini").string() + " --corpus " +
         (dir / "processed.jsonl").string() + " --out-dir " + (dir / "runs").string());
    step("possim --corpus " + (dir / "processed.jsonl").string() + " --out-dir " +
         (dir / "runs").string() + " --min-ngrams 10 --default-class en-us --seed 7");
    return result;
}

// Every stage rerun with the same config and seed produces byte-identical
// manifests, models and metric files.
void criterion_determinism() {
    Scratch scratch;
    const ChainResult a = run_fixture_chain(scratch.path / "a");
    const ChainResult b = run_fixture_chain(scratch.path / "b");
    require(a.worst_exit == 0 && b.worst_exit == 0, "fixture chain exited nonzero");

    const std::vector<std::string> files = {
        "tagger.model",
        "comments.jsonl",
        "labeled.jsonl",
        "processed.jsonl",
        "runs/fixture-seed42/manifest.json",
        "runs/fixture-seed42/model.json",
        "runs/fixture-seed42/metrics.json",
        "runs/fixture-seed42/confusion.csv",
        "runs/fixture-seed42/learning_curve.csv",
        "runs/fixture-seed42/learning_curve.svg",
        "runs/possim-seed7/manifest.json",
        "runs/possim-seed7/metrics.json",
        "runs/possim-seed7/table_orders.csv",
        "runs/possim-seed7/table_lengths_overall.csv",
        "runs/possim-seed7/table_lengths_nonzero.csv",
        "runs/possim-seed7/table_cutoffs.csv",
        "runs/possim-seed7/table_cascade.csv",
        "runs/possim-seed7/table_tricky.csv",
    };
    for (const std::string& file : files) {
        require(fs::exists(a.dir / file), file + " missing from first run");
        const std::string c1 = slurp(a.dir / file), c2 = slurp(b.dir / file);
        require(!c1.empty(), file + " is empty");
        require(c1 == c2, file + " differs between identical runs");
    }
}

// The fixture flows extract -> filter -> preprocess -> run with exit code 0
// and a confusion matrix whose entries sum to the test-split size.
void criterion_end_to_end_fixture() {
    Scratch scratch;
    const ChainResult chain = run_fixture_chain(scratch.path / "run");
    require(chain.worst_exit == 0, "fixture chain exited nonzero");

    // fixture shape guarantees from the corpus files themselves
    size_t users = 0;
    {
        std::ifstream in(source_dir() / "fixtures" / "users.jsonl");
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) ++users;
        }
    }
    require(users >= 3, "fixture must ship at least 3 users");
    size_t comments = 0;
    {
        std::ifstream in(chain.dir / "comments.jsonl");
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) ++comments;
        }
    }
    require(comments >= 12, "fixture must yield at least 12 signed comments");

    const fs::path run_dir = chain.dir / "runs" / "fixture-seed42";
    nlohmann::json manifest, metrics;
    {
        std::ifstream m(run_dir / "manifest.json");
        m >> manifest;
        std::ifstream t(run_dir / "metrics.json");
        t >> metrics;
    }
    size_t test_size = 0;
    for (const auto& entry : manifest.at("assignment")) {
        if (entry.at(1).get<int>() == 2) ++test_size;
    }
    require(test_size > 0, "test split is empty");

    const auto k = manifest.at("class_labels").size();
    uint64_t matrix_sum = 0;
    const auto& confusion = metrics.at("eval").at("confusion");
    require(confusion.size() == k, "confusion matrix row count");
    for (const auto& row : confusion) {
        require(row.size() == k, "confusion matrix column count");
        for (const auto& cell : row) matrix_sum += cell.get<uint64_t>();
    }
    require(matrix_sum == test_size,
            "confusion entries sum to " + std::to_string(matrix_sum) + ", test split is " +
                std::to_string(test_size));

    // report regeneration is idempotent
    const fs::path log = chain.dir / "cli.log";
    const std::string confusion_before = slurp(run_dir / "confusion.csv");
    const std::string svg_before = slurp(run_dir / "learning_curve.svg");
    require(run_cli("report --run-dir " + run_dir.string(), log) == 0, "report must exit 0");
    require(slurp(run_dir / "confusion.csv") == confusion_before, "report changed confusion.csv");
    require(slurp(run_dir / "learning_curve.svg") == svg_before, "report changed the svg");

    // exit-code contract: config errors 2, data errors 3
    require(run_cli("run --config /nonexistent.ini --corpus x --out-dir /tmp", log) == 2,
            "missing config must exit 2");
    require(run_cli("preprocess --in /nonexistent.jsonl --tagger " +
                        (chain.dir / "tagger.model").string() + " --out /tmp/out.jsonl",
                    log) == 3,
            "missing corpus must exit 3");
}

using CriterionFn = std::function<void()>;

}  // namespace

int main() {
    const std::vector<std::pair<const char*, CriterionFn>> criteria = {
        {"formula-oracle", criterion_formula_oracle},
        {"unseen-ngram-law", criterion_unseen_law},
        {"feature-schema", criterion_feature_schema},
        {"gradient-check", criterion_gradient_check},
        {"baseline-law", criterion_baseline_law},
        {"separability", criterion_separability},
        {"possim-laws", criterion_possim_laws},
        {"determinism", criterion_determinism},
        {"end-to-end-fixture", criterion_end_to_end_fixture},
    };

    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        const auto start = Clock::now();
        try {
            fn();
            std::printf("[PASS] %-20s (%.2fs)\n", name, seconds_since(start));
        } catch (const std::exception& e) {
            ++failures;
            std::printf("[FAIL] %-20s (%.2fs) %s\n", name, seconds_since(start), e.what());
        }
        std::fflush(stdout);
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}

#include <doctest.h>

#include <set>

#include "wikinli/errors.hpp"
#include "wikinli/harness.hpp"
#include "wikinli/report.hpp"
#include "synth.hpp"
#include "util.hpp"

using namespace wikinli;

namespace {

ExperimentSpec synthetic_spec(const std::string& name, uint64_t seed) {
    ExperimentSpec spec;
    spec.name = name;
    spec.seed = seed;
    spec.min_tokens = 5;
    spec.fractions = {1.0};
    spec.stopwords_path = testutil::source_dir() / "data" / "stopwords_en.txt";
    spec.hyper.max_epochs = 120;
    return spec;
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("ini parsing") {
    const IniFile ini = IniFile::parse(
        "# comment\n"
        "[experiment]\n"
        "name = demo\n"
        "fractions = 0.1, 0.5, 1.0\n"
        "seed = 99\n"
        "flag = true\n"
        "\n"
        "[classifier]\n"
        "l2 = 1e-3\n",
        "<test>");
    CHECK(ini.require("experiment", "name") == "demo");
    CHECK(ini.get_uint("experiment", "seed", 0) == 99);
    CHECK(ini.get_bool("experiment", "flag", false));
    CHECK(ini.get_double("classifier", "l2", 0.0) == doctest::Approx(1e-3));
    CHECK(ini.get_double_list("experiment", "fractions") == std::vector<double>{0.1, 0.5, 1.0});
    CHECK_FALSE(ini.get("experiment", "absent").has_value());
    CHECK_THROWS_AS(ini.require("experiment", "absent"), ConfigError);
    CHECK_THROWS_AS(IniFile::parse("[unterminated\n", "<t>"), ConfigError);
    CHECK_THROWS_AS(IniFile::parse("keyvalue\n", "<t>"), ConfigError);
}

TEST_CASE("experiment config parsing with defaults and overrides") {
    const IniFile ini = IniFile::parse(
        "[experiment]\n"
        "name = families-run\n"
        "mode = logreg\n"
        "class_map = families\n"
        "languages = de, fr, en-us\n"
        "seed = 7\n"
        "fractions = 0.5, 1.0\n"
        "stopwords = data/stopwords_en.txt\n"
        "[classifier]\n"
        "max_epochs = 42\n",
        "<test>");
    const ExperimentSpec spec = parse_experiment_config(ini, testutil::source_dir());
    CHECK(spec.name == "families-run");
    CHECK(spec.class_map == ClassMapKind::Families);
    CHECK(spec.languages == std::vector<std::string>{"de", "fr", "en-us"});
    CHECK(spec.seed == 7);
    CHECK(spec.hyper.max_epochs == 42);
    CHECK(spec.balance);
    CHECK(spec.fractions == std::vector<double>{0.5, 1.0});
    CHECK(std::filesystem::exists(spec.stopwords_path));

    // without an explicit list, the curve sweeps 0.1 .. 1.0 in steps of 0.1
    const ExperimentSpec defaults =
        parse_experiment_config(IniFile::parse("[experiment]\nname = d\n", "<t>"), ".");
    REQUIRE(defaults.fractions.size() == 10);
    CHECK(defaults.fractions.front() == doctest::Approx(0.1));
    CHECK(defaults.fractions.back() == doctest::Approx(1.0));

    CHECK_THROWS_AS(parse_experiment_config(IniFile::parse("[experiment]\nmode = x\nname = n\n", "<t>"),
                                            "."),
                    ConfigError);
}

TEST_CASE("family table groups 17 languages into 5 disjoint families") {
    const auto& table = family_table();
    CHECK(table.size() == 17);
    std::set<std::string> families;
    for (const auto& [code, family] : table) families.insert(family);
    CHECK(families == std::set<std::string>{"north-germanic", "roman", "uralic", "asian", "english"});
    CHECK(table.at("no") == "north-germanic");
    CHECK(table.at("de") == "north-germanic");
    CHECK(table.at("pt") == "roman");
    CHECK(table.at("hu") == "uralic");
    CHECK(table.at("ko") == "asian");
    CHECK(table.at("en-us") == "english");

    size_t ng = 0, roman = 0, uralic = 0, asian = 0, english = 0;
    for (const auto& [code, family] : table) {
        if (family == "north-germanic") ++ng;
        else if (family == "roman") ++roman;
        else if (family == "uralic") ++uralic;
        else if (family == "asian") ++asian;
        else ++english;
    }
    CHECK(ng == 5);
    CHECK(roman == 4);
    CHECK(uralic == 4);
    CHECK(asian == 3);
    CHECK(english == 1);
}

TEST_CASE("label mapping per kind") {
    ExperimentSpec spec;
    spec.class_map = ClassMapKind::Families;
    CHECK(map_label(spec, "no") == std::string("north-germanic"));
    CHECK_FALSE(map_label(spec, "ar").has_value());  // not in the family table

    spec.class_map = ClassMapKind::NativeVsNon;
    CHECK(map_label(spec, "en-us") == std::string("native"));
    CHECK(map_label(spec, "ja") == std::string("non-native"));

    spec.class_map = ClassMapKind::Identity;
    spec.languages = {"de", "fr"};
    CHECK(map_label(spec, "de") == std::string("de"));
    CHECK_FALSE(map_label(spec, "ru").has_value());
}

TEST_CASE("run_experiment separates a synthetic two-style corpus and beats baselines") {
    testutil::TempDir tmp;
    const auto corpus =
        synth::make_corpus({"native", "learner"}, synth::separable_styles(), 120, 15, 45, 2024);
    ExperimentSpec spec = synthetic_spec("synthetic-2style", 11);
    const RunResult result = run_experiment(spec, corpus, tmp.path);

    CHECK(result.report.accuracy > 0.5 + 0.2);  // far above the 1/K baseline
    CHECK(result.model.class_labels == std::vector<std::string>{"learner", "native"});
    CHECK(result.model.feature_schema.size() == 2 * 12 + 125 + 2);

    for (const char* file : {"manifest.json", "model.json", "metrics.json", "confusion.csv",
                             "learning_curve.csv", "learning_curve.svg"}) {
        CHECK(std::filesystem::exists(result.run_dir / file));
    }
    const std::string metrics = testutil::slurp(result.run_dir / "metrics.json");
    CHECK(metrics.find("\"feature_schema_size\": 151") != std::string::npos);
}

TEST_CASE("rerunning with the same config and seed is byte-identical") {
    testutil::TempDir tmp1, tmp2;
    const auto corpus =
        synth::make_corpus({"a", "b"}, synth::separable_styles(), 60, 12, 30, 55);
    ExperimentSpec spec = synthetic_spec("repro", 21);
    spec.fractions = {0.5, 1.0};
    const RunResult r1 = run_experiment(spec, corpus, tmp1.path);
    const RunResult r2 = run_experiment(spec, corpus, tmp2.path);
    for (const char* file : {"manifest.json", "model.json", "metrics.json", "confusion.csv",
                             "learning_curve.csv", "learning_curve.svg"}) {
        CHECK(testutil::slurp(r1.run_dir / file) == testutil::slurp(r2.run_dir / file));
    }
}

TEST_CASE("no test-split information reaches the training distributions") {
    const auto corpus =
        synth::make_corpus({"a", "b"}, synth::separable_styles(), 50, 12, 30, 77);
    ExperimentSpec spec = synthetic_spec("canary", 31);
    const LogRegPipeline pipeline = build_logreg_pipeline(spec, corpus);

    std::set<std::string> train_tokens;
    for (const auto& c : pipeline.splits.train) {
        for (const auto& t : c.stream.tokens) train_tokens.insert(t);
    }
    size_t canaries = 0;
    for (const auto& c : pipeline.splits.test) {
        for (const auto& t : c.stream.tokens) {
            if (train_tokens.count(t)) continue;
            ++canaries;
            // a test-only unigram must look unseen in every class distribution
            for (const std::string& label : pipeline.extractor.class_labels()) {
                CHECK(count_lookup(t, pipeline.extractor.dist(label, Level::Word, 1)) == 1);
            }
        }
    }
    CHECK(canaries > 0);  // the zipf tail guarantees test-only tokens exist
}

TEST_CASE("a six-language subset run carries the 199-dimensional schema") {
    testutil::TempDir tmp;
    const std::vector<std::string> six = {"en-us", "de", "es", "fr", "ru", "nl"};
    std::vector<std::string> all = six;
    all.push_back("ja");  // filtered out by the language subset
    all.push_back("pl");
    std::vector<synth::Style> styles;
    for (size_t i = 0; i < all.size(); ++i) {
        styles.push_back(i % 2 ? synth::separable_styles()[1] : synth::separable_styles()[0]);
    }
    const auto corpus = synth::make_corpus(all, styles, 30, 12, 30, 606);

    ExperimentSpec spec = synthetic_spec("popular6", 5);
    spec.languages = six;
    const RunResult result = run_experiment(spec, corpus, tmp.path);
    CHECK(result.model.class_labels.size() == 6);
    CHECK(result.model.feature_schema.size() == 199);  // 6*3*4 + 125 + 2
    const std::string metrics = testutil::slurp(result.run_dir / "metrics.json");
    CHECK(metrics.find("\"feature_schema_size\": 199") != std::string::npos);
    CHECK(metrics.find("\"ja\"") == std::string::npos);
    // 6 balanced classes of 30: per-class split 21/3/6
    CHECK(result.report.total() == 6 * 6);
}

TEST_CASE("native-vs-non on a synthetic 2-style corpus beats both baselines") {
    testutil::TempDir tmp;
    // en-us and de carry distinct styles; the map folds them to native/non-native
    const auto corpus =
        synth::make_corpus({"en-us", "de"}, synth::separable_styles(), 100, 15, 40, 909);
    ExperimentSpec spec = synthetic_spec("native-vs-non", 17);
    spec.class_map = ClassMapKind::NativeVsNon;
    const RunResult result = run_experiment(spec, corpus, tmp.path);

    CHECK(result.model.class_labels == std::vector<std::string>{"native", "non-native"});
    // balanced 2-class: most-common-label and random both sit at 1/2
    const double baseline = 0.5;
    CHECK(result.report.accuracy > baseline + 0.1);
}

TEST_CASE("every corpus label maps to exactly one experiment class") {
    const auto corpus =
        synth::make_corpus({"de", "nl", "en-us"}, std::vector<synth::Style>(3, synth::separable_styles()[0]),
                           20, 12, 25, 5);
    ExperimentSpec spec = synthetic_spec("families", 3);
    spec.class_map = ClassMapKind::Families;
    const LogRegPipeline pipeline = build_logreg_pipeline(spec, corpus);
    CHECK(pipeline.extractor.class_labels() ==
          std::vector<std::string>{"english", "north-germanic"});
    for (const auto& c : pipeline.splits.train) {
        CHECK((c.label == "english" || c.label == "north-germanic"));
    }
}

TEST_CASE("stage errors carry the stage name") {
    ExperimentSpec spec = synthetic_spec("broken", 1);
    spec.stopwords_path.clear();
    const auto corpus = synth::make_corpus({"a", "b"}, synth::separable_styles(), 20, 12, 25, 5);
    CHECK_THROWS_WITH_AS(run_experiment(spec, corpus, "/tmp"), doctest::Contains("stage stopwords"),
                         ConfigError);

    ExperimentSpec gated = synthetic_spec("gated", 1);
    gated.min_tokens = 1000;
    CHECK_THROWS_WITH_AS(run_experiment(gated, corpus, "/tmp"), doctest::Contains("stage map"),
                         DataError);
}

TEST_CASE("learning-curve csv and svg are well-formed") {
    const std::vector<CurveRow> rows = {{0.1, 0.6, 0.55, 0.5}, {1.0, 0.9, 0.8, 0.82}};
    const std::string csv = learning_curve_csv(rows);
    CHECK(csv.rfind("fraction,train_acc,dev_acc,test_acc\n", 0) == 0);
    CHECK(csv.find("1.000000,0.900000,0.800000,0.820000") != std::string::npos);

    testutil::TempDir tmp;
    write_text_file(tmp / "c.csv", csv);
    const auto parsed = parse_learning_curve_csv(tmp / "c.csv");
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[1].test_acc == doctest::Approx(0.82));

    const std::string svg = learning_curve_svg(rows);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("accuracy") != std::string::npos);

    // single point: marker but no line
    const std::string single = learning_curve_svg({{1.0, 0.9, 0.8, 0.82}});
    CHECK(single.find("<circle") != std::string::npos);
    CHECK(single.find("<polyline") == std::string::npos);
}

TEST_CASE("possim study produces the five tables with coherent counts") {
    testutil::TempDir tmp;
    const auto corpus =
        synth::make_corpus({"a", "b", "c"},
                           {synth::separable_styles()[0], synth::separable_styles()[1],
                            synth::make_style("g", 40, {"NN", "IN", "DT", "JJ", "NN", "."})},
                           80, 20, 60, 303);
    ExperimentSpec spec;
    spec.name = "possim-study";
    spec.mode = ExperimentMode::PosSim;
    spec.seed = 13;
    spec.min_tokens = 5;
    spec.balance = false;
    spec.possim.min_pos_ngrams = 10;
    spec.possim.default_class = "a";
    spec.length_gates = {5, 10, 20};
    spec.cutoff_grid = {"topk:50", "appears:2", "appears:3"};

    const PosSimStudyResult result = run_possim_study(spec, corpus, tmp.path);
    for (const char* file :
         {"manifest.json", "table_orders.csv", "table_lengths_overall.csv",
          "table_lengths_nonzero.csv", "table_cutoffs.csv", "table_cascade.csv",
          "table_tricky.csv", "metrics.json"}) {
        CHECK(std::filesystem::exists(result.run_dir / file));
    }
    for (const auto& [order, cell] : result.by_order) {
        CHECK(cell.nonzero <= cell.available);
        if (cell.available) {
            CHECK(cell.overall_acc >= 0.0);
            CHECK(cell.overall_acc <= 1.0);
        }
    }
    // off-cascade row equals the plain order-4 run
    CHECK(result.by_cascade.at("off").overall_acc == result.by_order.at(4).overall_acc);
    CHECK(result.by_cascade.at("off").available == result.by_order.at(4).available);
    // distinct styles per class: the study should beat random guessing
    CHECK(result.by_order.at(4).overall_acc > 1.0 / 3.0);

    // determinism of the whole study
    testutil::TempDir tmp2;
    const PosSimStudyResult again = run_possim_study(spec, corpus, tmp2.path);
    for (const char* file : {"manifest.json", "metrics.json", "table_orders.csv", "table_tricky.csv"}) {
        CHECK(testutil::slurp(result.run_dir / file) == testutil::slurp(again.run_dir / file));
    }
}

TEST_SUITE_END();

#include "wikinli/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include <nlohmann/json.hpp>

#include "wikinli/errors.hpp"
#include "wikinli/report.hpp"

namespace wikinli {

namespace {

using nlohmann::json;

template <typename Fn>
auto run_stage(const char* stage, Fn fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("stage ") + stage + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(std::string("stage ") + stage + ": " + e.what());
    } catch (const std::exception& e) {
        throw DataError(std::string("stage ") + stage + ": " + e.what());
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

const std::map<std::string, std::string>& family_table() {
    static const std::map<std::string, std::string> table = {
        {"de", "north-germanic"}, {"nl", "north-germanic"}, {"no", "north-germanic"},
        {"sv", "north-germanic"}, {"da", "north-germanic"},
        {"es", "roman"},          {"fr", "roman"},          {"pt", "roman"},
        {"it", "roman"},
        {"ru", "uralic"},         {"pl", "uralic"},         {"fi", "uralic"},
        {"hu", "uralic"},
        {"zh", "asian"},          {"ja", "asian"},          {"ko", "asian"},
        {"en-us", "english"},
    };
    return table;
}

std::optional<std::string> map_label(const ExperimentSpec& spec, const std::string& label) {
    if (!spec.languages.empty() &&
        std::find(spec.languages.begin(), spec.languages.end(), label) == spec.languages.end()) {
        return std::nullopt;
    }
    switch (spec.class_map) {
        case ClassMapKind::Identity:
            return label;
        case ClassMapKind::Families: {
            auto it = family_table().find(label);
            if (it == family_table().end()) return std::nullopt;
            return it->second;
        }
        case ClassMapKind::NativeVsNon:
            return label == "en-us" ? "native" : "non-native";
    }
    return std::nullopt;
}

ExperimentSpec parse_experiment_config(const IniFile& ini, const std::filesystem::path& base_dir) {
    ExperimentSpec spec;
    spec.name = ini.require("experiment", "name");

    const std::string mode = ini.get_or("experiment", "mode", "logreg");
    if (mode == "logreg") spec.mode = ExperimentMode::LogReg;
    else if (mode == "possim") spec.mode = ExperimentMode::PosSim;
    else throw ConfigError("unknown experiment mode '" + mode + "'");

    const std::string map = ini.get_or("experiment", "class_map", "identity");
    if (map == "identity") spec.class_map = ClassMapKind::Identity;
    else if (map == "families") spec.class_map = ClassMapKind::Families;
    else if (map == "native-vs-non") spec.class_map = ClassMapKind::NativeVsNon;
    else throw ConfigError("unknown class_map '" + map + "'");

    spec.languages = ini.get_list("experiment", "languages");
    if (ini.has("experiment", "fractions")) {
        spec.fractions = ini.get_double_list("experiment", "fractions");
    }
    spec.seed = ini.get_uint("experiment", "seed", spec.seed);
    spec.min_tokens = static_cast<size_t>(ini.get_uint("experiment", "min_tokens", spec.min_tokens));
    // PosSim studies follow the unbalanced-training setup unless asked otherwise.
    spec.balance = ini.get_bool("experiment", "balance", spec.mode == ExperimentMode::LogReg);

    if (ini.has("experiment", "split")) {
        const auto parts = ini.get_double_list("experiment", "split");
        if (parts.size() != 3) throw ConfigError("split needs exactly 3 fractions");
        spec.split = {parts[0], parts[1], parts[2]};
    }
    if (ini.has("experiment", "stopwords")) {
        std::filesystem::path p = ini.require("experiment", "stopwords");
        spec.stopwords_path = p.is_absolute() ? p : base_dir / p;
    }

    spec.hyper.lr0 = ini.get_double("classifier", "lr0", spec.hyper.lr0);
    spec.hyper.l2 = ini.get_double("classifier", "l2", spec.hyper.l2);
    spec.hyper.tol = ini.get_double("classifier", "tol", spec.hyper.tol);
    spec.hyper.max_epochs = static_cast<int>(ini.get_int("classifier", "max_epochs", spec.hyper.max_epochs));

    spec.possim.order = static_cast<int>(ini.get_int("possim", "order", spec.possim.order));
    spec.possim.min_pos_ngrams = ini.get_uint("possim", "min_pos_ngrams", spec.possim.min_pos_ngrams);
    spec.possim.cutoff = Cutoff::parse(ini.get_or("possim", "cutoff", "none"));
    spec.possim.cascade = cascade_from_name(ini.get_or("possim", "cascade", "off"));
    spec.possim.default_class = ini.get_or("possim", "default_class", spec.possim.default_class);
    if (ini.has("possim", "length_gates")) {
        spec.length_gates.clear();
        for (double v : ini.get_double_list("possim", "length_gates")) {
            spec.length_gates.push_back(static_cast<uint64_t>(v));
        }
    }
    if (ini.has("possim", "cutoff_grid")) {
        spec.cutoff_grid = ini.get_list("possim", "cutoff_grid");
        for (const std::string& c : spec.cutoff_grid) Cutoff::parse(c);  // validate early
    }
    spec.possim.validate();
    return spec;
}

// --- logreg pipeline -----------------------------------------------------

namespace {

std::vector<ProcessedComment> map_and_admit(const ExperimentSpec& spec,
                                            const std::vector<ProcessedComment>& corpus) {
    std::vector<ProcessedComment> mapped;
    for (const ProcessedComment& c : corpus) {
        if (c.label.empty()) throw DataError("unlabeled comment: " + c.comment_id);
        if (!admit(c, spec.min_tokens)) continue;
        auto label = map_label(spec, c.label);
        if (!label) continue;
        ProcessedComment copy = c;
        copy.label = *label;
        mapped.push_back(std::move(copy));
    }
    if (mapped.empty()) throw DataError("no comments survive the language map and length gate");
    return mapped;
}

std::vector<std::string> observed_classes(const std::vector<ProcessedComment>& comments) {
    std::set<std::string> labels;
    for (const ProcessedComment& c : comments) labels.insert(c.label);
    return {labels.begin(), labels.end()};
}

std::vector<FreqDist> build_all_dists(const std::vector<std::string>& classes,
                                      const std::vector<ProcessedComment>& train) {
    std::map<std::string, std::vector<ProcessedComment>> by_class;
    for (const ProcessedComment& c : train) by_class[c.label].push_back(c);
    std::vector<FreqDist> dists;
    for (const std::string& label : classes) {
        auto it = by_class.find(label);
        if (it == by_class.end()) throw DataError("class '" + label + "' has no training comments");
        for (Level level : {Level::Word, Level::Char, Level::Pos}) {
            for (int order = 1; order <= 4; ++order) {
                dists.push_back(build_freqdist(it->second, level, order, label));
            }
        }
    }
    return dists;
}

std::vector<TrainRow> featurize_all(const FeatureExtractor& extractor,
                                    const std::vector<ProcessedComment>& comments) {
    std::vector<TrainRow> rows;
    rows.reserve(comments.size());
    for (const ProcessedComment& c : comments) {
        rows.push_back({c.comment_id, extractor.featurize(c), c.label});
    }
    return rows;
}

}  // namespace

LogRegPipeline build_logreg_pipeline(const ExperimentSpec& spec,
                                     const std::vector<ProcessedComment>& corpus) {
    auto mapped = run_stage("map", [&] { return map_and_admit(spec, corpus); });
    const std::vector<std::string> classes = observed_classes(mapped);

    auto splits = run_stage("split", [&] {
        return balance_and_split(mapped, spec.seed, spec.split, &classes, spec.balance);
    });

    auto dists = run_stage("freqdists", [&] { return build_all_dists(classes, splits.train); });
    auto stopwords = run_stage("stopwords", [&] {
        if (spec.stopwords_path.empty()) {
            throw ConfigError("stopwords file required for logreg experiments");
        }
        return load_stopwords(spec.stopwords_path);
    });

    return run_stage("featurize", [&] {
        FeatureExtractor extractor(classes, std::move(dists), std::move(stopwords));
        std::vector<TrainRow> train_rows = featurize_all(extractor, splits.train);
        std::vector<TrainRow> dev_rows = featurize_all(extractor, splits.dev);
        std::vector<TrainRow> test_rows = featurize_all(extractor, splits.test);
        return LogRegPipeline{std::move(splits), std::move(extractor), std::move(train_rows),
                              std::move(dev_rows), std::move(test_rows)};
    });
}

namespace {

// One learning-curve point: the frequency distributions, standardization
// statistics and model are all rebuilt from the training subsample, so the
// curve reflects distribution coverage growth as well as classifier data.
CurveRow curve_point(const ExperimentSpec& spec, const LogRegPipeline& pipeline, double fraction) {
    std::vector<std::string> labels(pipeline.splits.train.size());
    for (size_t i = 0; i < labels.size(); ++i) labels[i] = pipeline.splits.train[i].label;

    std::vector<ProcessedComment> subtrain;
    for (size_t i : nested_subsample_indices(labels, fraction, spec.seed)) {
        subtrain.push_back(pipeline.splits.train[i]);
    }

    const std::vector<std::string> classes = pipeline.extractor.class_labels();
    std::vector<FreqDist> dists = build_all_dists(classes, subtrain);
    FeatureExtractor extractor(classes, std::move(dists), load_stopwords(spec.stopwords_path));

    std::vector<TrainRow> train_rows = featurize_all(extractor, subtrain);
    std::vector<TrainRow> dev_rows = featurize_all(extractor, pipeline.splits.dev);
    std::vector<TrainRow> test_rows = featurize_all(extractor, pipeline.splits.test);

    ClassifierModel model = fit(train_rows, dev_rows, spec.hyper, spec.seed);
    CurveRow row;
    row.fraction = fraction;
    row.train_acc = evaluate(model, train_rows).accuracy;
    row.dev_acc = dev_rows.empty() ? 0.0 : evaluate(model, dev_rows).accuracy;
    row.test_acc = test_rows.empty() ? 0.0 : evaluate(model, test_rows).accuracy;
    return row;
}

std::filesystem::path make_run_dir(const ExperimentSpec& spec, const std::filesystem::path& out_dir) {
    const std::filesystem::path run_dir =
        out_dir / (spec.name + "-seed" + std::to_string(spec.seed));
    std::filesystem::create_directories(run_dir);
    return run_dir;
}

}  // namespace

RunResult run_experiment(const ExperimentSpec& spec, const std::vector<ProcessedComment>& corpus,
                         const std::filesystem::path& out_dir) {
    if (spec.mode != ExperimentMode::LogReg) {
        throw ConfigError("run_experiment handles logreg mode; use run_possim_study for possim");
    }
    LogRegPipeline pipeline = build_logreg_pipeline(spec, corpus);

    RunResult result;
    FitReport fit_report;
    result.model = run_stage("fit", [&] {
        return fit(pipeline.train_rows, pipeline.dev_rows, spec.hyper, spec.seed, &fit_report);
    });
    result.dev_accuracy = fit_report.dev_accuracy;
    result.report = run_stage("evaluate", [&] { return evaluate(result.model, pipeline.test_rows); });

    result.curve = run_stage("curve", [&] {
        std::vector<CurveRow> rows;
        for (double fraction : spec.fractions) {
            if (fraction == 1.0) {
                CurveRow row;
                row.fraction = 1.0;
                row.train_acc = evaluate(result.model, pipeline.train_rows).accuracy;
                row.dev_acc = pipeline.dev_rows.empty()
                                  ? 0.0
                                  : evaluate(result.model, pipeline.dev_rows).accuracy;
                row.test_acc = result.report.accuracy;
                rows.push_back(row);
            } else {
                rows.push_back(curve_point(spec, pipeline, fraction));
            }
        }
        return rows;
    });

    result.manifest = pipeline.splits.manifest;
    result.run_dir = make_run_dir(spec, out_dir);
    run_stage("reports", [&] {
        result.manifest.save(result.run_dir / "manifest.json");
        result.model.save(result.run_dir / "model.json");
        write_text_file(result.run_dir / "confusion.csv", result.report.confusion_csv());
        write_text_file(result.run_dir / "learning_curve.csv", learning_curve_csv(result.curve));
        write_text_file(result.run_dir / "learning_curve.svg", learning_curve_svg(result.curve));

        json metrics;
        metrics["experiment"] = {
            {"name", spec.name},
            {"mode", "logreg"},
            {"seed", spec.seed},
            {"min_tokens", spec.min_tokens},
            {"balance", spec.balance},
            {"classes", result.model.class_labels},
            {"feature_schema_size", result.model.feature_schema.size()},
            {"fractions", spec.fractions},
        };
        metrics["sizes"] = {{"train", pipeline.train_rows.size()},
                            {"dev", pipeline.dev_rows.size()},
                            {"test", pipeline.test_rows.size()}};
        metrics["dev_accuracy"] = result.dev_accuracy;
        metrics["eval"] = json::parse(result.report.to_json_string());
        json curve_rows = json::array();
        for (const CurveRow& r : result.curve) {
            curve_rows.push_back({r.fraction, r.train_acc, r.dev_acc, r.test_acc});
        }
        metrics["curve"] = curve_rows;
        write_text_file(result.run_dir / "metrics.json", metrics.dump(2) + "\n");
        return 0;
    });
    return result;
}

// --- possim study ----------------------------------------------------------

namespace {

struct StudySets {
    SplitSets<ProcessedComment> splits;
    PosDistFamilies families;           // orders 1..4 per class, training split only
    std::map<int, PosDists> by_order;   // order -> class -> dist
    std::vector<std::string> classes;
    std::string majority_label;
};

StudySets build_study_sets(const ExperimentSpec& spec, const std::vector<ProcessedComment>& corpus) {
    StudySets sets;
    auto mapped = run_stage("map", [&] { return map_and_admit(spec, corpus); });
    sets.classes = observed_classes(mapped);
    sets.splits = run_stage("split", [&] {
        return balance_and_split(mapped, spec.seed, spec.split, &sets.classes, spec.balance);
    });

    run_stage("freqdists", [&] {
        std::map<std::string, std::vector<ProcessedComment>> by_class;
        for (const ProcessedComment& c : sets.splits.train) by_class[c.label].push_back(c);
        for (const std::string& label : sets.classes) {
            auto it = by_class.find(label);
            if (it == by_class.end()) throw DataError("class '" + label + "' has no training comments");
            for (int order = 1; order <= 4; ++order) {
                FreqDist dist = build_freqdist(it->second, Level::Pos, order, label);
                sets.by_order[order].emplace(label, dist);
                sets.families[label].by_order.emplace(order, std::move(dist));
            }
        }
        return 0;
    });

    size_t best_count = 0;
    for (const std::string& label : sets.classes) {
        size_t count = 0;
        for (const ProcessedComment& c : sets.splits.train) {
            if (c.label == label) ++count;
        }
        if (count > best_count) {
            best_count = count;
            sets.majority_label = label;
        }
    }
    return sets;
}

PosSimCell eval_cell(const std::vector<ProcessedComment>& test, const PosDists& dists,
                     const PosSimConfig& cfg, const PosDistFamilies* families) {
    PosSimCell cell;
    size_t correct_overall = 0, correct_nonzero = 0;
    for (const ProcessedComment& c : test) {
        const PosSimOutcome outcome = classify_possim(c, dists, cfg, families);
        if (outcome.gated_out) continue;
        ++cell.available;
        const bool correct = outcome.predicted == c.label;
        if (correct) ++correct_overall;
        if (!outcome.zero_comment) {
            ++cell.nonzero;
            if (correct) ++correct_nonzero;
        }
    }
    cell.overall_acc = cell.available ? static_cast<double>(correct_overall) / static_cast<double>(cell.available) : 0.0;
    cell.nonzero_acc = cell.nonzero ? static_cast<double>(correct_nonzero) / static_cast<double>(cell.nonzero) : 0.0;
    return cell;
}

std::vector<std::string> gated_labels(const std::vector<ProcessedComment>& test,
                                      const PosSimConfig& cfg) {
    std::vector<std::string> labels;
    for (const ProcessedComment& c : test) {
        if (extract_ngrams(c, Level::Pos, cfg.order).size() > cfg.min_pos_ngrams) {
            labels.push_back(c.label);
        }
    }
    return labels;
}

}  // namespace

PosSimStudyResult run_possim_study(const ExperimentSpec& spec,
                                   const std::vector<ProcessedComment>& corpus,
                                   const std::filesystem::path& out_dir) {
    StudySets sets = build_study_sets(spec, corpus);
    const std::vector<ProcessedComment>& test = sets.splits.test;

    PosSimStudyResult result;
    result.manifest = sets.splits.manifest;
    result.majority_label = sets.majority_label;

    PosSimConfig base = spec.possim;
    base.cutoff = Cutoff{};
    base.cascade = Cascade::Off;

    // Table: per-order accuracy at the configured gate.
    for (int order = 4; order >= 1; --order) {
        PosSimConfig cfg = base;
        cfg.order = order;
        result.by_order[order] = eval_cell(test, sets.by_order.at(order), cfg, nullptr);
    }

    // Tables: varying length gate at order 4.
    for (uint64_t gate : spec.length_gates) {
        PosSimConfig cfg = base;
        cfg.order = 4;
        cfg.min_pos_ngrams = gate;
        result.by_length_gate[gate] = eval_cell(test, sets.by_order.at(4), cfg, nullptr);
    }

    // Table: cutoffs at order 4; a cutoff configured on the study itself
    // joins the sweep.
    {
        PosSimConfig cfg = base;
        cfg.order = 4;
        result.by_cutoff["none"] = eval_cell(test, sets.by_order.at(4), cfg, nullptr);
        std::vector<std::string> grid = spec.cutoff_grid;
        if (spec.possim.cutoff.kind != Cutoff::Kind::None) {
            grid.push_back(spec.possim.cutoff.to_string());
        }
        for (const std::string& cut : grid) {
            const PosDists filtered = apply_cutoff(sets.by_order.at(4), Cutoff::parse(cut));
            result.by_cutoff[cut] = eval_cell(test, filtered, cfg, nullptr);
        }
    }

    // Table: cascade estimation modes at order 4.
    for (Cascade mode : {Cascade::Off, Cascade::TriBi, Cascade::BiUni, Cascade::Both}) {
        PosSimConfig cfg = base;
        cfg.order = 4;
        cfg.cascade = mode;
        result.by_cascade[std::string(cascade_name(mode))] =
            eval_cell(test, sets.by_order.at(4), cfg, mode == Cascade::Off ? nullptr : &sets.families);
    }

    // Tricky data: drop every comment with an n-gram unseen in its true class.
    PosSimConfig tricky_cfg = base;
    tricky_cfg.order = 4;
    std::vector<ProcessedComment> gated;
    for (const ProcessedComment& c : test) {
        if (extract_ngrams(c, Level::Pos, 4).size() > tricky_cfg.min_pos_ngrams) gated.push_back(c);
    }
    const TrickyResult tricky = tricky_filter(gated, sets.by_order.at(4), 4);
    result.tricky_discard_ratio = tricky.discard_ratio;

    std::map<std::string, size_t> actual, predicted, correct;
    for (const std::string& label : sets.classes) actual[label] = predicted[label] = correct[label] = 0;
    size_t tricky_correct = 0;
    for (size_t idx : tricky.retained) {
        const ProcessedComment& c = gated[idx];
        const PosSimOutcome outcome = classify_possim(c, sets.by_order.at(4), tricky_cfg, nullptr);
        if (outcome.gated_out) continue;
        ++actual[c.label];
        ++predicted[outcome.predicted];
        if (outcome.predicted == c.label) {
            ++correct[c.label];
            ++tricky_correct;
        }
    }
    result.tricky_accuracy =
        tricky.retained.empty() ? 0.0
                                : static_cast<double>(tricky_correct) / static_cast<double>(tricky.retained.size());

    // Baselines over the order-4 gated subset.
    PosSimConfig gate4 = base;
    gate4.order = 4;
    const std::vector<std::string> labels4 = gated_labels(test, gate4);
    const BaselineResult bl = baselines(labels4, sets.classes, sets.majority_label, spec.seed);

    // --- artifacts ---
    result.run_dir = make_run_dir(spec, out_dir);
    run_stage("reports", [&] {
        result.manifest.save(result.run_dir / "manifest.json");

        std::string orders_csv = "ngrams,overall_acc,nonzero_acc,available,nonzero\n";
        for (int order = 4; order >= 1; --order) {
            const PosSimCell& c = result.by_order[order];
            orders_csv += std::to_string(order) + "-grams," + fmt(c.overall_acc) + "," +
                          fmt(c.nonzero_acc) + "," + std::to_string(c.available) + "," +
                          std::to_string(c.nonzero) + "\n";
        }
        orders_csv += "baseline-max," + fmt(bl.max_acc) + "," + fmt(bl.max_acc) + "," +
                      std::to_string(labels4.size()) + "," + std::to_string(labels4.size()) + "\n";
        orders_csv += "baseline-random," + fmt(bl.random_acc) + "," + fmt(bl.random_acc) + "," +
                      std::to_string(labels4.size()) + "," + std::to_string(labels4.size()) + "\n";
        write_text_file(result.run_dir / "table_orders.csv", orders_csv);

        std::string overall_csv = "accuracy";
        std::string nonzero_csv = "accuracy";
        for (uint64_t gate : spec.length_gates) {
            overall_csv += ",len>" + std::to_string(gate);
            nonzero_csv += ",len>" + std::to_string(gate);
        }
        overall_csv += "\n4-grams";
        nonzero_csv += "\n4-grams";
        for (uint64_t gate : spec.length_gates) {
            overall_csv += "," + fmt(result.by_length_gate[gate].overall_acc);
            nonzero_csv += "," + fmt(result.by_length_gate[gate].nonzero_acc);
        }
        overall_csv += "\nbaseline-max";
        nonzero_csv += "\nbaseline-max";
        for (uint64_t gate : spec.length_gates) {
            PosSimConfig cfg = base;
            cfg.order = 4;
            cfg.min_pos_ngrams = gate;
            const auto labels = gated_labels(test, cfg);
            const BaselineResult b = baselines(labels, sets.classes, sets.majority_label, spec.seed);
            overall_csv += "," + fmt(b.max_acc);
            nonzero_csv += "," + fmt(b.max_acc);
        }
        overall_csv += "\nbaseline-random";
        nonzero_csv += "\nbaseline-random";
        for (uint64_t gate : spec.length_gates) {
            PosSimConfig cfg = base;
            cfg.order = 4;
            cfg.min_pos_ngrams = gate;
            const auto labels = gated_labels(test, cfg);
            const BaselineResult b = baselines(labels, sets.classes, sets.majority_label, spec.seed);
            overall_csv += "," + fmt(b.random_acc);
            nonzero_csv += "," + fmt(b.random_acc);
        }
        overall_csv += "\n";
        nonzero_csv += "\n";
        write_text_file(result.run_dir / "table_lengths_overall.csv", overall_csv);
        write_text_file(result.run_dir / "table_lengths_nonzero.csv", nonzero_csv);

        std::string cutoffs_csv = "cutoff,overall_acc,nonzero_acc,available,nonzero\n";
        for (const auto& [name, cell] : result.by_cutoff) {
            cutoffs_csv += name + "," + fmt(cell.overall_acc) + "," + fmt(cell.nonzero_acc) + "," +
                           std::to_string(cell.available) + "," + std::to_string(cell.nonzero) + "\n";
        }
        write_text_file(result.run_dir / "table_cutoffs.csv", cutoffs_csv);

        std::string cascade_csv = "cascade,overall_acc,nonzero_acc,available,nonzero\n";
        for (const auto& [name, cell] : result.by_cascade) {
            cascade_csv += name + "," + fmt(cell.overall_acc) + "," + fmt(cell.nonzero_acc) + "," +
                           std::to_string(cell.available) + "," + std::to_string(cell.nonzero) + "\n";
        }
        write_text_file(result.run_dir / "table_cascade.csv", cascade_csv);

        std::string tricky_csv = "class,actual,predicted,correct\n";
        for (const std::string& label : sets.classes) {
            tricky_csv += label + "," + std::to_string(actual[label]) + "," +
                          std::to_string(predicted[label]) + "," + std::to_string(correct[label]) + "\n";
        }
        write_text_file(result.run_dir / "table_tricky.csv", tricky_csv);

        json metrics;
        metrics["experiment"] = {{"name", spec.name},
                                 {"mode", "possim"},
                                 {"seed", spec.seed},
                                 {"min_pos_ngrams", spec.possim.min_pos_ngrams},
                                 {"default_class", spec.possim.default_class},
                                 {"classes", sets.classes},
                                 {"majority_label", sets.majority_label},
                                 {"balance", spec.balance}};
        json orders = json::object();
        for (const auto& [order, cell] : result.by_order) {
            orders[std::to_string(order)] = {{"overall_acc", cell.overall_acc},
                                             {"nonzero_acc", cell.nonzero_acc},
                                             {"available", cell.available},
                                             {"nonzero", cell.nonzero}};
        }
        metrics["by_order"] = orders;
        metrics["baseline_max"] = bl.max_acc;
        metrics["baseline_random"] = bl.random_acc;
        metrics["tricky"] = {{"discard_ratio", result.tricky_discard_ratio},
                             {"retained", tricky.retained.size()},
                             {"accuracy", result.tricky_accuracy}};
        write_text_file(result.run_dir / "metrics.json", metrics.dump(2) + "\n");
        return 0;
    });
    return result;
}

}  // namespace wikinli

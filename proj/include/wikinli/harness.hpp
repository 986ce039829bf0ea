#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wikinli/classifier.hpp"
#include "wikinli/corpus.hpp"
#include "wikinli/features.hpp"
#include "wikinli/ini.hpp"
#include "wikinli/possim.hpp"

namespace wikinli {

enum class ClassMapKind { Identity, Families, NativeVsNon };
enum class ExperimentMode { LogReg, PosSim };

struct ExperimentSpec {
    std::string name;
    ExperimentMode mode = ExperimentMode::LogReg;
    ClassMapKind class_map = ClassMapKind::Identity;
    std::vector<std::string> languages;  // corpus labels admitted before mapping; empty = all
    std::vector<double> fractions = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    uint64_t seed = 42;
    size_t min_tokens = 20;
    SplitFractions split;
    bool balance = true;
    Hyper hyper;
    std::filesystem::path stopwords_path;
    PosSimConfig possim;
    std::vector<uint64_t> length_gates = {50, 100, 150, 200};
    std::vector<std::string> cutoff_grid = {"topk:100",   "topk:500",  "topk:2000", "topk:5000",
                                            "appears:10", "appears:15", "appears:20"};
};

// Reads the [experiment] / [classifier] / [possim] sections; relative paths
// resolve against base_dir.
ExperimentSpec parse_experiment_config(const IniFile& ini, const std::filesystem::path& base_dir);

// The five-way language-family grouping over 17 codes.
const std::map<std::string, std::string>& family_table();

// Experiment class for a corpus label, or nullopt when the label does not
// participate (outside the language subset / family table).
std::optional<std::string> map_label(const ExperimentSpec& spec, const std::string& label);

// Stages map -> admit -> split -> freqdists -> featurize, shared by the
// main run and the per-fraction learning-curve refits.
struct LogRegPipeline {
    SplitSets<ProcessedComment> splits;
    FeatureExtractor extractor;  // built from the training split only
    std::vector<TrainRow> train_rows, dev_rows, test_rows;
};

LogRegPipeline build_logreg_pipeline(const ExperimentSpec& spec,
                                     const std::vector<ProcessedComment>& corpus);

struct RunResult {
    std::filesystem::path run_dir;
    CorpusManifest manifest;
    ClassifierModel model;
    EvalReport report;
    std::vector<CurveRow> curve;
    double dev_accuracy = 0.0;
};

// Full logistic-regression experiment: pipeline, fit, evaluate, learning
// curve (distributions and model rebuilt per fraction), artifacts written
// under out_dir/<name>-seed<seed>/. Stage failures are rethrown with the
// stage name prefixed.
RunResult run_experiment(const ExperimentSpec& spec, const std::vector<ProcessedComment>& corpus,
                         const std::filesystem::path& out_dir);

struct PosSimCell {
    size_t available = 0;
    size_t nonzero = 0;
    double overall_acc = 0.0;
    double nonzero_acc = 0.0;
};

struct PosSimStudyResult {
    std::filesystem::path run_dir;
    CorpusManifest manifest;
    std::string majority_label;
    std::map<int, PosSimCell> by_order;
    std::map<uint64_t, PosSimCell> by_length_gate;
    std::map<std::string, PosSimCell> by_cutoff;
    std::map<std::string, PosSimCell> by_cascade;
    double tricky_discard_ratio = 0.0;
    double tricky_accuracy = 0.0;
};

// The PoS-similarity study: per-order, per-length-gate, per-cutoff and
// per-cascade sweeps plus the tricky-data evaluation, written as CSV tables
// under out_dir/<name>-seed<seed>/.
PosSimStudyResult run_possim_study(const ExperimentSpec& spec,
                                   const std::vector<ProcessedComment>& corpus,
                                   const std::filesystem::path& out_dir);

}  // namespace wikinli

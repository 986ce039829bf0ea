#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wikinli/features.hpp"

namespace wikinli {

struct Hyper {
    double lr0 = 1.0;       // initial step for the backtracking line search
    double l2 = 1e-4;       // L2 penalty on non-bias weights
    double tol = 1e-6;      // stop when the loss delta falls below this
    int max_epochs = 500;
};

struct TrainRow {
    std::string id;  // comment id, used for error messages
    FeatureVector x;
    std::string label;
};

// Multinomial logistic regression over z-scored features. weights is
// K x (D+1) row-major with the bias in the last column.
struct ClassifierModel {
    std::vector<std::string> class_labels;
    std::vector<std::string> feature_schema;
    std::vector<double> weights;
    std::vector<double> means;  // per-feature training mean
    std::vector<double> stds;   // per-feature training stddev; 1 where variance was 0
    uint64_t seed = 0;
    Hyper hyper;

    size_t n_classes() const { return class_labels.size(); }
    size_t n_features() const { return feature_schema.size(); }

    // Softmax probabilities in class order plus the argmax label
    // (ties break toward the earlier class).
    std::pair<std::string, std::vector<double>> predict(const FeatureVector& x) const;

    std::string to_json_string() const;
    void save(const std::filesystem::path& file) const;
    static ClassifierModel load(const std::filesystem::path& file);
};

struct FitReport {
    std::vector<double> epoch_loss;
    double dev_accuracy = 0.0;  // 0 when no dev set was given
    int epochs_run = 0;
};

// Full-batch gradient descent on the softmax cross-entropy with L2 penalty
// and Armijo backtracking, so the loss never increases between epochs.
// Features are standardized by training statistics; the dev set is only
// evaluated for reporting. Deterministic for fixed inputs.
ClassifierModel fit(const std::vector<TrainRow>& train, const std::vector<TrainRow>& dev,
                    Hyper hyper, uint64_t seed, FitReport* report = nullptr);

struct EvalReport {
    std::vector<std::string> class_labels;
    std::vector<uint64_t> confusion;  // K x K row-major, rows = true class
    double accuracy = 0.0;
    struct PerClass {
        double precision = 0.0;
        double recall = 0.0;
        bool precision_undefined = false;  // no predictions for this class
    };
    std::vector<PerClass> per_class;

    uint64_t total() const;
    std::string to_json_string() const;
    std::string confusion_csv() const;
};

EvalReport evaluate(const ClassifierModel& model, const std::vector<TrainRow>& test);

struct CurveRow {
    double fraction = 0.0;
    double train_acc = 0.0;
    double dev_acc = 0.0;
    double test_acc = 0.0;
};

// Retrains on nested, seeded, per-class prefixes of the training set:
// the subsample at a smaller fraction is a subset of every larger one.
// Fractions must be increasing and in (0, 1]; a fraction leaving any class
// without comments is an error.
std::vector<CurveRow> learning_curve(const std::vector<TrainRow>& train,
                                     const std::vector<TrainRow>& dev,
                                     const std::vector<TrainRow>& test,
                                     const std::vector<double>& fractions, Hyper hyper,
                                     uint64_t seed);

// Regularized loss and gradient at W for standardized data; exposed so the
// finite-difference check can probe the exact training objective.
// X is N x (D+1) row-major (bias column included), y holds class indices.
double softmax_loss_grad(std::span<const double> X, std::span<const int> y, size_t n, size_t d1,
                         size_t k, std::span<const double> W, double l2,
                         std::span<double> grad_out);

// Nested per-class prefix subsample of row indices (shared with the harness
// learning curve so both stay aligned).
std::vector<size_t> nested_subsample_indices(const std::vector<std::string>& labels,
                                             double fraction, uint64_t seed);

}  // namespace wikinli

#include "wikinli/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "wikinli/errors.hpp"
#include "wikinli/kernels.hpp"
#include "wikinli/rng.hpp"

namespace wikinli {

namespace {

void check_schema(const std::vector<TrainRow>& rows, const std::vector<std::string>& schema,
                  const char* where) {
    for (const TrainRow& row : rows) {
        if (!row.x.schema || *row.x.schema != schema || row.x.values.size() != schema.size()) {
            throw DataError(std::string(where) + ": feature schema mismatch for comment " + row.id);
        }
        for (double v : row.x.values) {
            if (!std::isfinite(v)) {
                throw DataError(std::string(where) + ": non-finite feature in comment " + row.id);
            }
        }
    }
}

int index_of(const std::vector<std::string>& labels, const std::string& label) {
    auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

double softmax_into(std::span<const double> scores, std::span<double> probs) {
    double max_score = scores[0];
    for (double s : scores) max_score = std::max(max_score, s);
    double sum = 0.0;
    for (size_t i = 0; i < scores.size(); ++i) {
        probs[i] = std::exp(scores[i] - max_score);
        sum += probs[i];
    }
    for (size_t i = 0; i < scores.size(); ++i) probs[i] /= sum;
    // log-sum-exp, handy for the loss
    return max_score + std::log(sum);
}

}  // namespace

double softmax_loss_grad(std::span<const double> X, std::span<const int> y, size_t n, size_t d1,
                         size_t k, std::span<const double> W, double l2,
                         std::span<double> grad_out) {
    const bool want_grad = !grad_out.empty();
    if (want_grad) std::fill(grad_out.begin(), grad_out.end(), 0.0);

    std::vector<double> scores(k), probs(k);
    double loss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double* xi = X.data() + i * d1;
        for (size_t c = 0; c < k; ++c) scores[c] = kernels::dot(W.data() + c * d1, xi, d1);
        const double lse = softmax_into(scores, probs);
        loss += lse - scores[static_cast<size_t>(y[i])];
        if (want_grad) {
            for (size_t c = 0; c < k; ++c) {
                const double coeff = probs[c] - (static_cast<int>(c) == y[i] ? 1.0 : 0.0);
                kernels::axpy(coeff, xi, grad_out.data() + c * d1, d1);
            }
        }
    }
    loss /= static_cast<double>(n);

    double penalty = 0.0;
    for (size_t c = 0; c < k; ++c) {
        // bias column (last) is not penalized
        penalty += kernels::dot(W.data() + c * d1, W.data() + c * d1, d1 - 1);
    }
    loss += 0.5 * l2 * penalty;

    if (want_grad) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (size_t c = 0; c < k; ++c) {
            double* g = grad_out.data() + c * d1;
            kernels::scale_shift(g, d1, inv_n, 0.0);
            kernels::axpy(l2, W.data() + c * d1, g, d1 - 1);
        }
    }
    return loss;
}

ClassifierModel fit(const std::vector<TrainRow>& train, const std::vector<TrainRow>& dev,
                    Hyper hyper, uint64_t seed, FitReport* report) {
    if (train.empty()) throw DataError("fit: empty training set");
    if (!train[0].x.schema) throw DataError("fit: training rows carry no schema");
    const std::vector<std::string> schema = *train[0].x.schema;
    check_schema(train, schema, "fit(train)");
    check_schema(dev, schema, "fit(dev)");

    std::set<std::string> label_set;
    for (const TrainRow& row : train) label_set.insert(row.label);
    std::vector<std::string> labels(label_set.begin(), label_set.end());
    if (labels.size() < 2) throw DataError("fit: need at least 2 classes, got " + std::to_string(labels.size()));

    const size_t n = train.size();
    const size_t d = schema.size();
    const size_t d1 = d + 1;
    const size_t k = labels.size();

    ClassifierModel model;
    model.class_labels = labels;
    model.feature_schema = schema;
    model.seed = seed;
    model.hyper = hyper;
    model.means.assign(d, 0.0);
    model.stds.assign(d, 1.0);

    // Column statistics from the training split only.
    std::vector<double> column(n);
    for (size_t j = 0; j < d; ++j) {
        for (size_t i = 0; i < n; ++i) column[i] = train[i].x.values[j];
        const double mean = kernels::reduce_add(column.data(), n) / static_cast<double>(n);
        const double var = kernels::reduce_sqdev(column.data(), n, mean) / static_cast<double>(n);
        model.means[j] = mean;
        model.stds[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }

    std::vector<double> X(n * d1);
    for (size_t i = 0; i < n; ++i) {
        double* xi = X.data() + i * d1;
        for (size_t j = 0; j < d; ++j) xi[j] = (train[i].x.values[j] - model.means[j]) / model.stds[j];
        xi[d] = 1.0;
    }
    std::vector<int> y(n);
    for (size_t i = 0; i < n; ++i) y[i] = index_of(labels, train[i].label);

    std::vector<double> W(k * d1, 0.0), grad(k * d1), trial(k * d1);
    double loss = softmax_loss_grad(X, y, n, d1, k, W, hyper.l2, grad);

    int epochs_run = 0;
    constexpr double kArmijo = 1e-4;
    for (int epoch = 0; epoch < hyper.max_epochs; ++epoch) {
        const double gnorm2 = kernels::dot(grad.data(), grad.data(), grad.size());
        if (gnorm2 == 0.0) break;

        double step = hyper.lr0;
        double new_loss = loss;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving) {
            trial = W;
            kernels::axpy(-step, grad.data(), trial.data(), trial.size());
            new_loss = softmax_loss_grad(X, y, n, d1, k, trial, hyper.l2, {});
            if (new_loss <= loss - kArmijo * step * gnorm2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        W.swap(trial);
        ++epochs_run;
        const double delta = loss - new_loss;
        loss = new_loss;
        if (report) report->epoch_loss.push_back(loss);
        if (delta < hyper.tol) break;
        loss = softmax_loss_grad(X, y, n, d1, k, W, hyper.l2, grad);
    }

    model.weights = std::move(W);
    if (report) {
        report->epochs_run = epochs_run;
        if (!dev.empty()) {
            size_t correct = 0;
            for (const TrainRow& row : dev) {
                if (model.predict(row.x).first == row.label) ++correct;
            }
            report->dev_accuracy = static_cast<double>(correct) / static_cast<double>(dev.size());
        }
    }
    return model;
}

std::pair<std::string, std::vector<double>> ClassifierModel::predict(const FeatureVector& x) const {
    const size_t d = n_features();
    if (x.values.size() != d || !x.schema || *x.schema != feature_schema) {
        throw DataError("predict: feature schema mismatch");
    }
    const size_t d1 = d + 1;
    const size_t k = n_classes();

    std::vector<double> z(d1);
    for (size_t j = 0; j < d; ++j) z[j] = (x.values[j] - means[j]) / stds[j];
    z[d] = 1.0;

    std::vector<double> scores(k), probs(k);
    for (size_t c = 0; c < k; ++c) scores[c] = kernels::dot(weights.data() + c * d1, z.data(), d1);
    softmax_into(scores, probs);

    size_t best = 0;
    for (size_t c = 1; c < k; ++c) {
        if (probs[c] > probs[best]) best = c;
    }
    return {class_labels[best], probs};
}

// --- evaluation -----------------------------------------------------------

uint64_t EvalReport::total() const {
    uint64_t sum = 0;
    for (uint64_t v : confusion) sum += v;
    return sum;
}

EvalReport evaluate(const ClassifierModel& model, const std::vector<TrainRow>& test) {
    if (test.empty()) throw DataError("evaluate: empty test set");
    const size_t k = model.n_classes();
    EvalReport report;
    report.class_labels = model.class_labels;
    report.confusion.assign(k * k, 0);

    for (const TrainRow& row : test) {
        const int truth = index_of(model.class_labels, row.label);
        if (truth < 0) throw DataError("evaluate: label '" + row.label + "' unseen in training");
        const int pred = index_of(model.class_labels, model.predict(row.x).first);
        ++report.confusion[static_cast<size_t>(truth) * k + static_cast<size_t>(pred)];
    }

    uint64_t diag = 0;
    for (size_t c = 0; c < k; ++c) diag += report.confusion[c * k + c];
    report.accuracy = static_cast<double>(diag) / static_cast<double>(test.size());

    report.per_class.resize(k);
    for (size_t c = 0; c < k; ++c) {
        uint64_t row_sum = 0, col_sum = 0;
        for (size_t j = 0; j < k; ++j) {
            row_sum += report.confusion[c * k + j];
            col_sum += report.confusion[j * k + c];
        }
        const uint64_t tp = report.confusion[c * k + c];
        auto& pc = report.per_class[c];
        if (col_sum == 0) {
            pc.precision = 0.0;
            pc.precision_undefined = true;
        } else {
            pc.precision = static_cast<double>(tp) / static_cast<double>(col_sum);
        }
        pc.recall = row_sum == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(row_sum);
    }
    return report;
}

std::string EvalReport::to_json_string() const {
    nlohmann::json j;
    j["version"] = 1;
    j["accuracy"] = accuracy;
    j["class_labels"] = class_labels;
    const size_t k = class_labels.size();
    nlohmann::json rows = nlohmann::json::array();
    for (size_t c = 0; c < k; ++c) {
        nlohmann::json row = nlohmann::json::array();
        for (size_t p = 0; p < k; ++p) row.push_back(confusion[c * k + p]);
        rows.push_back(row);
    }
    j["confusion"] = rows;
    nlohmann::json per = nlohmann::json::array();
    for (size_t c = 0; c < k; ++c) {
        per.push_back({{"label", class_labels[c]},
                       {"precision", per_class[c].precision},
                       {"recall", per_class[c].recall},
                       {"precision_undefined", per_class[c].precision_undefined}});
    }
    j["per_class"] = per;
    j["total"] = total();
    return j.dump(2) + "\n";
}

std::string EvalReport::confusion_csv() const {
    std::string csv = "true\\predicted";
    for (const std::string& label : class_labels) csv += "," + label;
    csv += "\n";
    const size_t k = class_labels.size();
    for (size_t c = 0; c < k; ++c) {
        csv += class_labels[c];
        for (size_t p = 0; p < k; ++p) csv += "," + std::to_string(confusion[c * k + p]);
        csv += "\n";
    }
    return csv;
}

// --- learning curve ---------------------------------------------------------

std::vector<size_t> nested_subsample_indices(const std::vector<std::string>& labels,
                                             double fraction, uint64_t seed) {
    std::map<std::string, std::vector<size_t>> by_class;
    for (size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

    std::vector<size_t> picked;
    for (auto& [label, idx] : by_class) {
        SplitMix64 rng(derive_seed(seed, "curve:" + label));
        deterministic_shuffle(idx, rng);
        const size_t keep = static_cast<size_t>(std::floor(fraction * static_cast<double>(idx.size())));
        if (keep == 0) {
            throw DataError("learning_curve: fraction " + std::to_string(fraction) +
                            " leaves class '" + label + "' empty");
        }
        picked.insert(picked.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep));
    }
    // Restore original relative order so fraction 1.0 reproduces a plain fit.
    std::sort(picked.begin(), picked.end());
    return picked;
}

std::vector<CurveRow> learning_curve(const std::vector<TrainRow>& train,
                                     const std::vector<TrainRow>& dev,
                                     const std::vector<TrainRow>& test,
                                     const std::vector<double>& fractions, Hyper hyper,
                                     uint64_t seed) {
    if (fractions.empty()) throw ConfigError("learning_curve: no fractions");
    for (size_t i = 0; i < fractions.size(); ++i) {
        if (fractions[i] <= 0.0 || fractions[i] > 1.0) {
            throw ConfigError("learning_curve: fractions must lie in (0, 1]");
        }
        if (i > 0 && fractions[i] <= fractions[i - 1]) {
            throw ConfigError("learning_curve: fractions must be increasing");
        }
    }

    std::vector<std::string> labels(train.size());
    for (size_t i = 0; i < train.size(); ++i) labels[i] = train[i].label;

    std::vector<CurveRow> rows;
    for (double fraction : fractions) {
        std::vector<TrainRow> subtrain;
        for (size_t i : nested_subsample_indices(labels, fraction, seed)) subtrain.push_back(train[i]);

        ClassifierModel model = fit(subtrain, dev, hyper, seed);
        CurveRow row;
        row.fraction = fraction;
        row.train_acc = evaluate(model, subtrain).accuracy;
        row.dev_acc = dev.empty() ? 0.0 : evaluate(model, dev).accuracy;
        row.test_acc = test.empty() ? 0.0 : evaluate(model, test).accuracy;
        rows.push_back(row);
    }
    return rows;
}

// --- persistence -------------------------------------------------------------

std::string ClassifierModel::to_json_string() const {
    nlohmann::json j;
    j["version"] = 1;
    j["class_labels"] = class_labels;
    j["feature_schema"] = feature_schema;
    j["standardization"] = {{"means", means}, {"stds", stds}};
    const size_t d1 = n_features() + 1;
    nlohmann::json rows = nlohmann::json::array();
    for (size_t c = 0; c < n_classes(); ++c) {
        rows.push_back(std::vector<double>(weights.begin() + static_cast<std::ptrdiff_t>(c * d1),
                                           weights.begin() + static_cast<std::ptrdiff_t>((c + 1) * d1)));
    }
    j["weights"] = rows;
    j["seed"] = seed;
    j["hyper"] = {{"lr0", hyper.lr0}, {"l2", hyper.l2}, {"tol", hyper.tol}, {"max_epochs", hyper.max_epochs}};
    return j.dump(2) + "\n";
}

void ClassifierModel::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write model: " + file.string());
    out << to_json_string();
}

ClassifierModel ClassifierModel::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("cannot open model: " + file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad model json: " + file.string() + ": " + e.what());
    }
    ClassifierModel model;
    try {
        model.class_labels = j.at("class_labels").get<std::vector<std::string>>();
        model.feature_schema = j.at("feature_schema").get<std::vector<std::string>>();
        model.means = j.at("standardization").at("means").get<std::vector<double>>();
        model.stds = j.at("standardization").at("stds").get<std::vector<double>>();
        for (const auto& row : j.at("weights")) {
            const auto values = row.get<std::vector<double>>();
            model.weights.insert(model.weights.end(), values.begin(), values.end());
        }
        model.seed = j.at("seed").get<uint64_t>();
        model.hyper.lr0 = j.at("hyper").at("lr0").get<double>();
        model.hyper.l2 = j.at("hyper").at("l2").get<double>();
        model.hyper.tol = j.at("hyper").at("tol").get<double>();
        model.hyper.max_epochs = j.at("hyper").at("max_epochs").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad model json: " + file.string() + ": " + e.what());
    }
    const size_t d1 = model.n_features() + 1;
    if (model.weights.size() != model.n_classes() * d1 || model.means.size() != model.n_features() ||
        model.stds.size() != model.n_features()) {
        throw DataError("model dimensions inconsistent: " + file.string());
    }
    return model;
}

}  // namespace wikinli

// wikinli command line: corpus extraction, preprocessing, experiments.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wikinli/classifier.hpp"
#include "wikinli/corpus.hpp"
#include "wikinli/errors.hpp"
#include "wikinli/harness.hpp"
#include "wikinli/jsonl.hpp"
#include "wikinli/postag.hpp"
#include "wikinli/report.hpp"
#include "wikinli/text.hpp"

namespace fs = std::filesystem;
using namespace wikinli;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_extract(const std::vector<std::string>& pages, const std::string& patterns_file,
                const std::string& out_file) {
    const SignaturePatterns patterns =
        patterns_file.empty() ? SignaturePatterns::builtin() : SignaturePatterns::load(patterns_file);
    std::vector<Comment> all;
    ExtractStats stats;
    for (const std::string& page_file : pages) {
        const fs::path path(page_file);
        const std::string page = path.stem().string();
        auto comments = extract_signed_comments(read_file(path), page, patterns, &stats);
        all.insert(all.end(), comments.begin(), comments.end());
    }
    write_comments_jsonl(out_file, all);
    std::cerr << "extract: " << all.size() << " comments from " << pages.size() << " pages ("
              << stats.empty_bodies << " empty bodies, " << stats.trailing_dropped
              << " pages with trailing text dropped)\n";
    return 0;
}

int cmd_filter(const std::string& users_file, const std::string& comments_file,
               const std::string& out_file, const std::vector<std::string>& languages) {
    BabelParseStats babel_stats;
    const auto profiles = read_users_jsonl(users_file, &babel_stats);
    FilterStats stats;
    const auto& langs = languages.empty() ? default_popular_languages() : languages;
    const auto labeled_users = filter_users(profiles, langs, &stats);

    std::map<std::string, std::string> label_of;
    for (const auto& [user, label] : labeled_users) label_of.emplace(user, label);

    auto comments = read_comments_jsonl(comments_file);
    std::vector<Comment> kept;
    for (Comment& c : comments) {
        auto it = label_of.find(c.user_id);
        if (it == label_of.end()) continue;
        c.label = it->second;
        kept.push_back(std::move(c));
    }
    write_comments_jsonl(out_file, kept);
    std::cerr << "filter: " << labeled_users.size() << "/" << profiles.size() << " users kept ("
              << stats.no_native << " without native claim, " << stats.multi_native
              << " multi-native, " << stats.non_us_english << " non-US English), " << kept.size()
              << "/" << comments.size() << " comments labeled";
    if (babel_stats.malformed || babel_stats.duplicates) {
        std::cerr << "; babel: " << babel_stats.malformed << " malformed, "
                  << babel_stats.duplicates << " duplicate claims";
    }
    std::cerr << "\n";
    return 0;
}

int cmd_preprocess(const std::string& in_file, const std::string& tagger_file,
                   const std::string& out_file, size_t min_tokens) {
    const TaggerModel tagger = TaggerModel::load(tagger_file);
    const auto comments = read_comments_jsonl(in_file);
    std::vector<ProcessedComment> processed;
    size_t below_gate = 0;
    for (const Comment& c : comments) {
        ProcessedComment p = preprocess_comment(c, tagger);
        if (!admit(p, min_tokens)) {
            ++below_gate;
            continue;
        }
        processed.push_back(std::move(p));
    }
    write_processed_jsonl(out_file, processed);
    std::cerr << "preprocess: " << processed.size() << " comments admitted, " << below_gate
              << " below " << min_tokens << " tokens\n";
    return 0;
}

int cmd_train_tagger(const std::string& corpus_file, const std::string& out_file, int epochs,
                     uint64_t seed) {
    const auto corpus = load_tagged_corpus(corpus_file);
    TaggerTrainReport report;
    const TaggerModel model = train_tagger(corpus, epochs, seed, &report);
    model.save(out_file);
    std::cerr << "train-tagger: " << corpus.size() << " sentences, per-epoch accuracy:";
    for (double acc : report.epoch_accuracy) {
        std::cerr << ' ' << static_cast<int>(acc * 1000) / 10.0 << '%';
    }
    std::cerr << "\n";
    return 0;
}

int cmd_run(const std::string& config_file, const std::string& corpus_file,
            const std::string& out_dir, const std::optional<uint64_t>& seed,
            const std::optional<size_t>& min_tokens, const std::vector<double>& fractions) {
    const fs::path config_path(config_file);
    ExperimentSpec spec = parse_experiment_config(IniFile::load(config_path),
                                                  config_path.has_parent_path()
                                                      ? config_path.parent_path()
                                                      : fs::path("."));
    if (seed) spec.seed = *seed;
    if (min_tokens) spec.min_tokens = *min_tokens;
    if (!fractions.empty()) spec.fractions = fractions;

    const auto corpus = read_processed_jsonl(corpus_file);
    if (spec.mode == ExperimentMode::LogReg) {
        const RunResult result = run_experiment(spec, corpus, out_dir);
        std::cout << "run " << spec.name << ": test accuracy " << result.report.accuracy
                  << " over " << result.report.total() << " comments; artifacts in "
                  << result.run_dir.string() << "\n";
    } else {
        const PosSimStudyResult result = run_possim_study(spec, corpus, out_dir);
        std::cout << "possim " << spec.name << ": order-4 overall accuracy "
                  << result.by_order.at(4).overall_acc << "; artifacts in "
                  << result.run_dir.string() << "\n";
    }
    return 0;
}

int cmd_possim(const std::string& corpus_file, const std::string& out_dir, const std::string& name,
               int order, uint64_t min_ngrams, const std::string& cutoff,
               const std::string& cascade, const std::string& default_class, uint64_t seed,
               size_t min_tokens, bool balance) {
    ExperimentSpec spec;
    spec.name = name;
    spec.mode = ExperimentMode::PosSim;
    spec.seed = seed;
    spec.min_tokens = min_tokens;
    spec.balance = balance;
    spec.possim.order = order;
    spec.possim.min_pos_ngrams = min_ngrams;
    spec.possim.cutoff = Cutoff::parse(cutoff);
    spec.possim.cascade = cascade_from_name(cascade);
    spec.possim.default_class = default_class;
    spec.possim.validate();

    const auto corpus = read_processed_jsonl(corpus_file);
    const PosSimStudyResult result = run_possim_study(spec, corpus, out_dir);
    std::cout << "possim " << name << ": order-4 overall accuracy "
              << result.by_order.at(4).overall_acc << ", tricky discard ratio "
              << result.tricky_discard_ratio << "; artifacts in " << result.run_dir.string()
              << "\n";
    return 0;
}

int cmd_report(const std::string& run_dir) {
    const fs::path dir(run_dir);
    const fs::path metrics_path = dir / "metrics.json";
    nlohmann::json metrics;
    {
        std::ifstream in(metrics_path);
        if (!in) throw DataError("cannot open " + metrics_path.string());
        in >> metrics;
    }
    if (metrics.contains("curve")) {
        std::vector<CurveRow> rows;
        for (const auto& r : metrics["curve"]) {
            rows.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                            r[3].get<double>()});
        }
        write_text_file(dir / "learning_curve.csv", learning_curve_csv(rows));
        write_text_file(dir / "learning_curve.svg", learning_curve_svg(rows));
    }
    if (metrics.contains("eval")) {
        const auto& eval = metrics["eval"];
        EvalReport report;
        report.class_labels = eval.at("class_labels").get<std::vector<std::string>>();
        for (const auto& row : eval.at("confusion")) {
            for (const auto& v : row) report.confusion.push_back(v.get<uint64_t>());
        }
        write_text_file(dir / "confusion.csv", report.confusion_csv());
        std::cout << "accuracy " << eval.at("accuracy").get<double>() << " over "
                  << eval.at("total").get<uint64_t>() << " comments\n";
    } else if (metrics.contains("by_order")) {
        for (const auto& [order, cell] : metrics["by_order"].items()) {
            std::cout << order << "-grams: overall " << cell.at("overall_acc").get<double>()
                      << ", nonzero " << cell.at("nonzero_acc").get<double>() << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"native-language identification from signed wiki discussion comments"};
    app.require_subcommand(1);

    auto* extract = app.add_subcommand("extract", "extract signed comments from wikitext pages");
    std::vector<std::string> extract_pages;
    std::string extract_patterns, extract_out;
    extract->add_option("pages", extract_pages, "wikitext page files")->required()->expected(-1);
    extract->add_option("--patterns", extract_patterns, "signature pattern file (default: built-in)");
    extract->add_option("--out", extract_out, "output comments jsonl")->required();

    auto* filter = app.add_subcommand("filter", "label comments by their author's native language");
    std::string filter_users_path, filter_comments, filter_out;
    std::vector<std::string> filter_langs;
    filter->add_option("--users", filter_users_path, "users jsonl")->required();
    filter->add_option("--comments", filter_comments, "comments jsonl")->required();
    filter->add_option("--out", filter_out, "output labeled jsonl")->required();
    filter->add_option("--languages", filter_langs, "19 picked language codes")->delimiter(',');

    auto* preprocess = app.add_subcommand("preprocess", "scrub, tokenize, tag and mask comments");
    std::string pre_in, pre_tagger, pre_out;
    size_t pre_min_tokens = 20;
    preprocess->add_option("--in", pre_in, "labeled comments jsonl")->required();
    preprocess->add_option("--tagger", pre_tagger, "tagger model file")->required();
    preprocess->add_option("--out", pre_out, "output processed jsonl")->required();
    preprocess->add_option("--min-tokens", pre_min_tokens, "admission gate (default 20)");

    auto* train_tagger_cmd = app.add_subcommand("train-tagger", "train the averaged-perceptron tagger");
    std::string tt_corpus, tt_out;
    int tt_epochs = 10;
    uint64_t tt_seed = 1;
    train_tagger_cmd->add_option("--corpus", tt_corpus, "tagged corpus (token<TAB>tag)")->required();
    train_tagger_cmd->add_option("--out", tt_out, "output model file")->required();
    train_tagger_cmd->add_option("--epochs", tt_epochs, "training epochs (default 10)");
    train_tagger_cmd->add_option("--seed", tt_seed, "shuffle seed (default 1)");

    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    std::string run_config, run_corpus, run_out = "runs";
    std::optional<uint64_t> run_seed;
    std::optional<size_t> run_min_tokens;
    std::vector<double> run_fractions;
    run->add_option("--config", run_config, "experiment config (ini)")->required();
    run->add_option("--corpus", run_corpus, "processed comments jsonl")->required();
    run->add_option("--out-dir", run_out, "artifact directory (default: runs)");
    run->add_option("--seed", run_seed, "override config seed");
    run->add_option("--min-tokens", run_min_tokens, "override admission gate");
    run->add_option("--fractions", run_fractions, "override learning-curve fractions")->delimiter(',');

    auto* possim = app.add_subcommand("possim", "PoS n-gram similarity study");
    std::string ps_corpus, ps_out = "runs", ps_name = "possim", ps_cutoff = "none",
                ps_cascade = "off", ps_default = "en-us";
    int ps_order = 4;
    uint64_t ps_min_ngrams = 100, ps_seed = 42;
    size_t ps_min_tokens = 20;
    bool ps_balance = false;
    possim->add_option("--corpus", ps_corpus, "processed comments jsonl")->required();
    possim->add_option("--out-dir", ps_out, "artifact directory (default: runs)");
    possim->add_option("--name", ps_name, "study name (default: possim)");
    possim->add_option("--order", ps_order, "PoS n-gram order (default 4)");
    possim->add_option("--min-ngrams", ps_min_ngrams, "length gate on PoS n-grams (default 100)");
    possim->add_option("--cutoff", ps_cutoff, "none|topk:K|appears:K (default none)");
    possim->add_option("--cascade", ps_cascade, "off|tribi|biuni|both (default off)");
    possim->add_option("--default-class", ps_default, "zero-comment fallback class");
    possim->add_option("--seed", ps_seed, "split seed (default 42)");
    possim->add_option("--min-tokens", ps_min_tokens, "admission gate (default 20)");
    possim->add_flag("--balance", ps_balance, "balance classes before splitting");

    auto* report = app.add_subcommand("report", "regenerate reports from a run directory");
    std::string report_dir;
    report->add_option("--run-dir", report_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (extract->parsed()) return cmd_extract(extract_pages, extract_patterns, extract_out);
        if (filter->parsed()) return cmd_filter(filter_users_path, filter_comments, filter_out, filter_langs);
        if (preprocess->parsed()) return cmd_preprocess(pre_in, pre_tagger, pre_out, pre_min_tokens);
        if (train_tagger_cmd->parsed()) return cmd_train_tagger(tt_corpus, tt_out, tt_epochs, tt_seed);
        if (run->parsed()) return cmd_run(run_config, run_corpus, run_out, run_seed, run_min_tokens, run_fractions);
        if (possim->parsed()) {
            return cmd_possim(ps_corpus, ps_out, ps_name, ps_order, ps_min_ngrams, ps_cutoff,
                              ps_cascade, ps_default, ps_seed, ps_min_tokens, ps_balance);
        }
        if (report->parsed()) return cmd_report(report_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

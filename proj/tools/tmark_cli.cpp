// tmark: extract temporal clause pairs from parsed text, train marker models and
// ensembles, and evaluate them.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmark/tmark.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tmark;

namespace {

constexpr int kFormatVersion = 1;

struct Common {
    std::string lexicon_dir;
    std::uint64_t seed = 1;
    std::string format = "table";
};

class FileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string default_lexicon_dir() {
    if (const char* env = std::getenv("TMARK_LEXICON_DIR"); env && *env) return env;
    return std::string(TMARK_DATA_DIR) + "/lexicons";
}

Lexicons load_lexicons(const Common& common) {
    return Lexicons::load_dir(common.lexicon_dir.empty() ? default_lexicon_dir() : common.lexicon_dir);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot read " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

/// Writes to a sibling temporary file, then renames it into place.
void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FileError("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw FileError("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) { write_atomic(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& err) {
        throw ConfigError(path.string() + ": " + err.what());
    }
}

std::vector<ClausePair> load_pairs(const fs::path& path) {
    std::istringstream in(read_file(path));
    auto pairs = read_instances(in);
    if (pairs.empty()) throw ConfigError(path.string() + " contains no instances");
    return pairs;
}

std::string pairs_to_jsonl(const std::vector<ClausePair>& pairs) {
    std::ostringstream out;
    write_instances(out, pairs);
    return out.str();
}

std::string percent(double fraction) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << 100.0 * fraction;
    return out.str();
}

SplitRatios parse_ratios(const std::string& text) {
    std::vector<double> parts;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("split ratio '" + item + "' is not a number");
        }
    }
    if (parts.size() != 3) throw ConfigError("--split-ratios needs three comma-separated values");
    return SplitRatios{parts[0], parts[1], parts[2]};
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            long long v = std::stoll(item, &used);
            if (used != item.size() || v <= 0) throw std::invalid_argument(item);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ConfigError("curve size '" + item + "' is not a positive integer");
        }
    }
    if (out.empty()) throw ConfigError("--sizes needs at least one value");
    return out;
}

std::vector<FeatureClass> parse_classes(const std::string& text) { return FeatureConfig::parse(text).classes(); }

/// A trained single model or a stacked ensemble, loaded from disk.
struct Predictor {
    std::optional<MarkerModel> model;
    std::optional<StackedEnsemble> ensemble;
    std::string name;

    FeatureConfig features() const {
        if (model) return model->config();
        FeatureConfig all;
        for (const auto& c : ensemble->components()) {
            for (auto cls : c.spec.config.classes()) all.add(cls);
        }
        return all;
    }

    const MarkerCounts& priors() const { return model ? model->priors() : ensemble->components().front().model.priors(); }
};

Predictor load_predictor(const std::string& model_path, const std::string& ensemble_path) {
    Predictor p;
    if (!model_path.empty() == !ensemble_path.empty()) throw ConfigError("give exactly one of --model or --ensemble");
    if (!model_path.empty()) {
        p.model = MarkerModel::from_json(read_json(model_path));
        p.name = std::string(to_string(p.model->kind())) + ":" + p.model->config().to_string();
    } else {
        fs::path dir = fs::path(ensemble_path).parent_path();
        p.ensemble = StackedEnsemble::from_json(read_json(ensemble_path), [&](const std::string& ref) {
            return MarkerModel::from_json(read_json(dir / ref));
        });
        p.name = "ensemble(" + std::to_string(p.ensemble->components().size()) + " components)";
    }
    return p;
}

std::vector<Example> examples_for(const Predictor& p, const std::vector<ClausePair>& pairs, const Lexicons& lex) {
    FeatureConfig config = p.model && p.model->kind() == ModelKind::WordBased ? FeatureConfig::words() : p.features();
    return build_examples(pairs, config, lex);
}

json ranked_json(const Prediction& pred) {
    json out = json::array();
    for (const auto& [label, score] : pred.ranked) out.push_back({{"label", label}, {"log_score", score}});
    return out;
}

struct Labelled {
    std::vector<std::string> gold;
    std::vector<std::string> predicted;
    json rows = json::array();
};

Labelled run_predictions(const Predictor& p, const std::vector<Example>& examples, Task task, std::uint64_t seed) {
    if (p.ensemble && p.ensemble->task() != task) {
        throw ConfigError("ensemble was trained for the " + std::string(to_string(p.ensemble->task())) +
                          " task, not " + std::string(to_string(task)));
    }
    Labelled out;
    if (task == Task::Interpretation) {
        for (const auto& ex : examples) {
            json row{{"id", ex.id}, {"gold", ex.marker}};
            std::string chosen;
            if (p.model) {
                auto pred = p.model->predict_marker(ex.main, ex.sub);
                chosen = pred.chosen;
                row["tie"] = pred.tie;
                row["ranked"] = ranked_json(pred);
            } else {
                chosen = p.ensemble->predict(ex);
                row["components"] = p.ensemble->attributes(ex);
            }
            row["predicted"] = chosen;
            out.gold.push_back(ex.marker);
            out.predicted.push_back(chosen);
            out.rows.push_back(std::move(row));
        }
    } else {
        for (const auto& fc : make_fusion_cases(examples, seed)) {
            std::string gold(to_string(fc.gold));
            json row{{"id", fc.id}, {"marker", fc.marker}, {"gold", gold}};
            std::string chosen;
            if (p.model) {
                auto pred = p.model->predict_fusion(fc.a, fc.b, fc.marker);
                chosen = pred.chosen;
                row["tie"] = pred.tie;
                row["ranked"] = ranked_json(pred);
            } else {
                chosen = p.ensemble->predict(fc);
                row["components"] = p.ensemble->attributes(fc);
            }
            row["predicted"] = chosen;
            out.gold.push_back(gold);
            out.predicted.push_back(chosen);
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

void print_report(const Common& common, const json& result, const std::string& table) {
    if (common.format == "json") {
        std::cout << result.dump(2) << '\n';
    } else {
        std::cout << table;
    }
}

// ---------------------------------------------------------------------------
// Commands

struct ExtractArgs {
    std::string corpus, markers = MarkerSet::standard().to_string(), out;
    bool lenient = false, multiline = false;
};

void cmd_extract(const Common& common, const ExtractArgs& args) {
    auto markers = MarkerSet::parse(args.markers);
    std::istringstream in(read_file(args.corpus));
    auto entries = read_corpus(in, args.multiline);
    if (entries.empty()) throw ConfigError(args.corpus + " contains no trees");

    std::vector<ClausePair> pairs;
    for (const auto& entry : entries) {
        auto found = extract_pairs(entry.tree, markers, ExtractOptions{args.lenient}, "s" + std::to_string(entry.line));
        pairs.insert(pairs.end(), found.begin(), found.end());
    }
    if (pairs.empty()) throw ConfigError("no temporal clause pairs found in " + args.corpus);

    std::map<std::string, std::size_t> counts;
    std::size_t sub_first = 0;
    for (const auto& p : pairs) {
        ++counts[p.marker];
        sub_first += p.position == Position::SubFirst;
    }
    json per_marker = json::object();
    std::ostringstream table;
    table << std::left << std::setw(10) << "Marker" << std::right << std::setw(10) << "Frequency" << std::setw(14)
          << "Distribution" << '\n';
    std::vector<std::string> by_frequency = markers.markers();
    std::stable_sort(by_frequency.begin(), by_frequency.end(),
                     [&](const std::string& a, const std::string& b) { return counts[a] > counts[b]; });
    for (const auto& m : by_frequency) {
        std::size_t n = counts[m];
        double share = static_cast<double>(n) / static_cast<double>(pairs.size());
        per_marker[m] = {{"count", n}, {"percent", 100.0 * share}};
        table << std::left << std::setw(10) << m << std::right << std::setw(10) << n << std::setw(13) << percent(share)
              << "%\n";
    }
    table << std::left << std::setw(10) << "Total" << std::right << std::setw(10) << pairs.size() << std::setw(13)
          << "100.00" << "%\n";

    json summary{{"version", kFormatVersion},
                 {"markers", markers.markers()},
                 {"lenient", args.lenient},
                 {"sentences", entries.size()},
                 {"instances", pairs.size()},
                 {"per_marker", per_marker},
                 {"positions", {{"sub_first", sub_first}, {"sub_second", pairs.size() - sub_first}}}};
    fs::path out(args.out);
    write_atomic(out / "instances.jsonl", pairs_to_jsonl(pairs));
    write_json(out / "extract_summary.json", summary);
    print_report(common, summary, table.str() + "wrote " + (out / "instances.jsonl").string() + "\n");
}

struct SplitArgs {
    std::string instances, out, ratios = "0.8,0.1,0.1";
};

void cmd_split(const Common& common, const SplitArgs& args) {
    auto pairs = load_pairs(args.instances);
    std::vector<std::string> ids;
    std::map<std::string, const ClausePair*> by_id;
    for (const auto& p : pairs) {
        ids.push_back(p.source_id);
        by_id[p.source_id] = &p;
    }
    auto part = partition(ids, common.seed, parse_ratios(args.ratios));
    auto subset = [&](const std::vector<std::string>& chosen) {
        std::vector<ClausePair> out;
        for (const auto& id : chosen) out.push_back(*by_id.at(id));
        return out;
    };
    fs::path out(args.out);
    write_atomic(out / "train.jsonl", pairs_to_jsonl(subset(part.train_ids)));
    write_atomic(out / "dev.jsonl", pairs_to_jsonl(subset(part.dev_ids)));
    write_atomic(out / "test.jsonl", pairs_to_jsonl(subset(part.test_ids)));
    json summary{{"version", kFormatVersion},
                 {"seed", common.seed},
                 {"train", part.train_ids.size()},
                 {"dev", part.dev_ids.size()},
                 {"test", part.test_ids.size()}};
    write_json(out / "partition.json", summary);
    std::ostringstream table;
    table << "train " << part.train_ids.size() << "  dev " << part.dev_ids.size() << "  test " << part.test_ids.size()
          << "  (seed " << common.seed << ")\n";
    print_report(common, summary, table.str());
}

struct TrainArgs {
    std::string instances, kind = "disj", features = "SV", markers = MarkerSet::standard().to_string(), out;
};

void cmd_train(const Common& common, const TrainArgs& args) {
    auto kind = parse_model_kind(args.kind);
    auto config = kind == ModelKind::WordBased ? FeatureConfig::words() : FeatureConfig::parse(args.features);
    auto lex = load_lexicons(common);
    auto examples = build_examples(load_pairs(args.instances), config, lex);
    auto model = MarkerModel::train(examples, kind, config, MarkerSet::parse(args.markers));
    write_json(args.out, model.to_json());
    json summary{{"version", kFormatVersion},
                 {"model", args.out},
                 {"kind", std::string(to_string(kind))},
                 {"config", config.to_string()},
                 {"instances", model.instance_count()},
                 {"priors", model.priors()}};
    std::ostringstream table;
    table << "trained " << to_string(kind) << " model on " << config.to_string() << " from " << model.instance_count()
          << " instances -> " << args.out << '\n';
    print_report(common, summary, table.str());
}

struct PredictArgs {
    std::string model, ensemble, instances, task = "interpretation", out;
};

void cmd_predict(const Common& common, const PredictArgs& args) {
    auto predictor = load_predictor(args.model, args.ensemble);
    auto task = parse_task(args.task);
    auto lex = load_lexicons(common);
    auto examples = examples_for(predictor, load_pairs(args.instances), lex);
    auto result = run_predictions(predictor, examples, task, common.seed);

    std::ostringstream lines;
    for (const auto& row : result.rows) lines << row.dump() << '\n';
    write_atomic(args.out, lines.str());

    std::size_t correct = 0;
    for (std::size_t i = 0; i < result.gold.size(); ++i) correct += result.gold[i] == result.predicted[i];
    double acc = static_cast<double>(correct) / static_cast<double>(result.gold.size());
    json summary{{"version", kFormatVersion},
                 {"predictor", predictor.name},
                 {"task", std::string(to_string(task))},
                 {"instances", result.gold.size()},
                 {"accuracy", acc}};
    std::ostringstream table;
    std::size_t shown = 0;
    for (const auto& row : result.rows) {
        if (shown++ == 5) break;
        table << std::left << std::setw(12) << row["id"].get<std::string>() << " gold " << std::setw(10)
              << row["gold"].get<std::string>() << " predicted " << row["predicted"].get<std::string>();
        if (row.contains("ranked")) {
            table << "  [";
            bool first = true;
            for (const auto& r : row["ranked"]) {
                table << (first ? "" : ", ") << r["label"].get<std::string>() << ' ' << std::fixed
                      << std::setprecision(3) << r["log_score"].get<double>();
                first = false;
            }
            table << ']';
        }
        table << '\n';
    }
    table << predictor.name << " " << to_string(task) << ": " << result.gold.size() << " predictions, accuracy "
          << percent(acc) << "% -> " << args.out << '\n';
    print_report(common, summary, table.str());
}

struct EvalArgs {
    std::string model, ensemble, instances, task = "interpretation", out;
};

void cmd_eval(const Common& common, const EvalArgs& args) {
    auto predictor = load_predictor(args.model, args.ensemble);
    auto task = parse_task(args.task);
    auto lex = load_lexicons(common);
    auto examples = examples_for(predictor, load_pairs(args.instances), lex);
    auto result = run_predictions(predictor, examples, task, common.seed);

    std::vector<std::string> baseline;
    std::string baseline_name;
    if (task == Task::Interpretation) {
        auto majority = MajorityBaseline::from_counts(predictor.priors());
        baseline.assign(result.gold.size(), majority.predict());
        baseline_name = "majority(" + majority.predict() + ")";
    } else {
        RandomBaseline coin(common.seed);
        for (std::size_t i = 0; i < result.gold.size(); ++i) baseline.emplace_back(to_string(coin.predict()));
        baseline_name = "random";
    }
    auto system_report = score(result.gold, result.predicted);
    auto baseline_report = score(result.gold, baseline);
    auto chi = chi_square(result.gold, result.predicted, baseline);

    // fusion has two symmetric roles, so only accuracy is reported
    auto summarize = [&](const EvalReport& r) {
        return task == Task::Interpretation ? r.to_json()
                                            : json{{"accuracy", r.overall_accuracy}, {"instances", r.instances}};
    };
    json report{{"version", kFormatVersion},
                {"task", std::string(to_string(task))},
                {"instances", result.gold.size()},
                {"system", {{"name", predictor.name}, {"report", summarize(system_report)}}},
                {"baseline", {{"name", baseline_name}, {"report", summarize(baseline_report)}}},
                {"chi_square", {{"statistic", chi.statistic}, {"significant", chi.significant}}}};
    write_json(args.out, report);

    std::ostringstream table;
    if (task == Task::Interpretation) {
        table << system_report.to_table(predictor.name) << '\n' << baseline_report.to_table(baseline_name) << '\n';
    } else {
        table << predictor.name << " fusion accuracy " << percent(system_report.overall_accuracy) << "%\n"
              << baseline_name << " fusion accuracy " << percent(baseline_report.overall_accuracy) << "%\n";
    }
    table << "chi-square " << std::fixed << std::setprecision(3) << chi.statistic
          << (chi.significant ? " (significant, p < 0.05)" : " (not significant)") << '\n';
    print_report(common, report, table.str());
}

struct SearchArgs {
    std::string train, dev, kind = "disj", classes = "ANNWPRSTVVLVW", markers = MarkerSet::standard().to_string(), out;
    std::size_t top = 10;
};

void cmd_search(const Common& common, const SearchArgs& args) {
    auto kind = parse_model_kind(args.kind);
    auto classes = parse_classes(args.classes);
    auto lex = load_lexicons(common);
    FeatureConfig all;
    for (auto c : classes) all.add(c);
    auto train = build_examples(load_pairs(args.train), all, lex);
    auto dev = build_examples(load_pairs(args.dev), all, lex);
    auto ranked = feature_search(train, dev, kind, classes, MarkerSet::parse(args.markers));

    json rows = json::array();
    for (const auto& r : ranked) rows.push_back({{"config", r.config.to_string()}, {"dev_accuracy", r.dev_accuracy}});
    json result{{"version", kFormatVersion},
                {"kind", std::string(to_string(kind))},
                {"classes", all.to_string()},
                {"evaluated", ranked.size()},
                {"ranked", rows}};
    write_json(args.out, result);
    std::ostringstream table;
    table << "evaluated " << ranked.size() << " feature combinations (" << to_string(kind) << ")\n";
    for (std::size_t i = 0; i < ranked.size() && i < args.top; ++i) {
        table << std::right << std::setw(4) << i + 1 << "  " << std::left << std::setw(16) << ranked[i].config.to_string()
              << percent(ranked[i].dev_accuracy) << "%\n";
    }
    print_report(common, result, table.str());
}

struct EnsembleArgs {
    std::string train, dev, preset, components, task = "interpretation", markers = MarkerSet::standard().to_string(),
                                                out;
    std::size_t folds = 10, min_leaf = 2;
};

void cmd_ensemble(const Common& common, const EnsembleArgs& args) {
    if (args.preset.empty() == args.components.empty()) throw ConfigError("give exactly one of --preset or --components");
    std::vector<ComponentSpec> specs;
    if (!args.preset.empty()) {
        specs = preset_roster(args.preset);
    } else {
        std::string text = args.components;
        for (auto& ch : text) {
            if (ch == ',') ch = '\n';
        }
        specs = parse_roster(text);
    }
    auto task = parse_task(args.task);
    FeatureConfig all;
    for (const auto& s : specs) {
        for (auto c : s.config.classes()) all.add(c);
    }
    auto lex = load_lexicons(common);
    auto primary = build_examples(load_pairs(args.train), all, lex);
    auto secondary = build_examples(load_pairs(args.dev), all, lex);
    auto ens = train_ensemble(specs, primary, secondary, MarkerSet::parse(args.markers),
                              EnsembleOptions{task, args.folds, args.min_leaf, common.seed});

    fs::path out(args.out);
    std::vector<std::string> refs;
    for (std::size_t i = 0; i < ens.components().size(); ++i) {
        std::ostringstream name;
        name << "component-" << std::setw(2) << std::setfill('0') << i << ".json";
        refs.push_back(name.str());
        write_json(out / refs.back(), ens.components()[i].model.to_json());
    }
    json j = ens.to_json(refs);
    write_json(out / "ensemble.json", j);

    std::ostringstream table;
    table << "stacked " << specs.size() << " components (" << to_string(task) << "), " << args.folds
          << "-fold CV accuracy " << percent(ens.cv_accuracy) << "%\n";
    double best = 0.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (ens.component_secondary_accuracy[i] > best) {
            best = ens.component_secondary_accuracy[i];
            best_i = i;
        }
    }
    table << "best component on the secondary set: " << specs[best_i].to_string() << " " << percent(best) << "%\n";
    table << "tree depth " << ens.tree().depth() << ", " << ens.tree().nodes().size() << " nodes -> "
          << (out / "ensemble.json").string() << '\n';
    print_report(common, j, table.str());
}

struct CurveArgs {
    std::string train, eval, kind = "disj", features = "SV", sizes, markers = MarkerSet::standard().to_string(), out;
};

void cmd_curve(const Common& common, const CurveArgs& args) {
    auto kind = parse_model_kind(args.kind);
    auto config = kind == ModelKind::WordBased ? FeatureConfig::words() : FeatureConfig::parse(args.features);
    auto lex = load_lexicons(common);
    auto train = build_examples(load_pairs(args.train), config, lex);
    auto eval_set = build_examples(load_pairs(args.eval), config, lex);
    auto points = learning_curve(train, eval_set, kind, config, MarkerSet::parse(args.markers), parse_sizes(args.sizes),
                                 common.seed);
    json rows = json::array();
    std::ostringstream table;
    table << std::right << std::setw(8) << "Size" << std::setw(10) << "Accuracy" << '\n';
    for (const auto& p : points) {
        rows.push_back({{"size", p.size}, {"accuracy", p.accuracy}});
        table << std::setw(8) << p.size << std::setw(9) << percent(p.accuracy) << "%\n";
    }
    json result{{"version", kFormatVersion},
                {"kind", std::string(to_string(kind))},
                {"config", config.to_string()},
                {"seed", common.seed},
                {"points", rows}};
    write_json(args.out, result);
    print_report(common, result, table.str());
}

struct KappaArgs {
    std::vector<std::string> predictions;
    std::string field = "predicted", out;
};

void cmd_kappa(const Common& common, const KappaArgs& args) {
    if (args.predictions.size() < 2) throw ConfigError("kappa needs at least two prediction files");
    std::vector<std::map<std::string, std::string>> raters;
    for (const auto& path : args.predictions) {
        std::istringstream in(read_file(path));
        std::map<std::string, std::string> labels;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                auto row = json::parse(line);
                labels[row.at("id").get<std::string>()] = row.at(args.field).get<std::string>();
            } catch (const json::exception& err) {
                throw ConfigError(path + " line " + std::to_string(line_no) + ": " + err.what());
            }
        }
        if (labels.empty()) throw ConfigError(path + " contains no predictions");
        raters.push_back(std::move(labels));
    }
    for (std::size_t r = 1; r < raters.size(); ++r) {
        if (raters[r].size() != raters[0].size()) throw ConfigError("prediction files cover different items");
        for (const auto& [id, label] : raters[0]) {
            if (!raters[r].count(id)) throw ConfigError("item '" + id + "' missing from " + args.predictions[r]);
        }
    }
    std::vector<std::vector<std::string>> aligned(raters.size());
    for (const auto& [id, label] : raters[0]) {
        for (std::size_t r = 0; r < raters.size(); ++r) aligned[r].push_back(raters[r].at(id));
    }
    json pairs = json::array();
    double agreement_sum = 0.0;
    std::size_t n_pairs = 0;
    for (std::size_t a = 0; a < aligned.size(); ++a) {
        for (std::size_t b = a + 1; b < aligned.size(); ++b) {
            std::size_t same = 0;
            for (std::size_t i = 0; i < aligned[a].size(); ++i) same += aligned[a][i] == aligned[b][i];
            double agree = static_cast<double>(same) / static_cast<double>(aligned[a].size());
            agreement_sum += agree;
            ++n_pairs;
            pairs.push_back({{"a", args.predictions[a]},
                             {"b", args.predictions[b]},
                             {"kappa", kappa(aligned[a], aligned[b])},
                             {"agreement", agree}});
        }
    }
    double mean_kappa = pairwise_mean_kappa(aligned);
    double mean_agreement = agreement_sum / static_cast<double>(n_pairs);
    json result{{"version", kFormatVersion},
                {"raters", aligned.size()},
                {"items", aligned[0].size()},
                {"mean_kappa", mean_kappa},
                {"mean_agreement", mean_agreement},
                {"pairs", pairs}};
    write_json(args.out, result);
    std::ostringstream table;
    table << "raters " << aligned.size() << ", items " << aligned[0].size() << ", mean kappa " << std::fixed
          << std::setprecision(3) << mean_kappa << ", mean agreement " << percent(mean_agreement) << "%\n";
    print_report(common, result, table.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal marker interpretation and fusion"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub, bool reporting) {
        sub->add_option("--lexicon-dir", common.lexicon_dir,
                        "Directory with wordnet_verbs.tsv, levin.tsv, wordnet_nouns.tsv, ner_rules.tsv "
                        "(default: $TMARK_LEXICON_DIR or the bundled fixtures)");
        sub->add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();
        if (reporting) {
            sub->add_option("--format", common.format, "Standard output format")
                ->check(CLI::IsMember({"json", "table"}))
                ->capture_default_str();
        }
    };

    ExtractArgs extract;
    auto* c_extract = app.add_subcommand("extract", "Extract clause pairs from a bracketed corpus");
    c_extract->add_option("--corpus", extract.corpus, "Corpus file, one tree per line")->required();
    c_extract->add_option("--markers", extract.markers, "Comma-separated temporal markers")->capture_default_str();
    c_extract->add_flag("--lenient", extract.lenient, "Also accept untagged SBARs that start with a marker");
    c_extract->add_flag("--multiline", extract.multiline, "Trees may span several lines");
    c_extract->add_option("--out", extract.out, "Output directory")->required();
    add_common(c_extract, true);

    SplitArgs split;
    auto* c_split = app.add_subcommand("split", "Partition instances into train/dev/test");
    c_split->add_option("--instances", split.instances, "Instance file (JSON lines)")->required();
    c_split->add_option("--split-ratios", split.ratios, "train,dev,test ratios")->capture_default_str();
    c_split->add_option("--out", split.out, "Output directory")->required();
    add_common(c_split, true);

    TrainArgs train;
    auto* c_train = app.add_subcommand("train", "Train a marker model");
    c_train->add_option("--instances", train.instances, "Training instances")->required();
    c_train->add_option("--kind", train.kind, "conj, disj or word")->capture_default_str();
    c_train->add_option("--features", train.features, "Feature classes, e.g. NPRSTV")->capture_default_str();
    c_train->add_option("--markers", train.markers, "Comma-separated temporal markers")->capture_default_str();
    c_train->add_option("--out", train.out, "Model file")->required();
    add_common(c_train, true);

    PredictArgs predict;
    auto* c_predict = app.add_subcommand("predict", "Predict markers or clause roles");
    c_predict->add_option("--model", predict.model, "Model file");
    c_predict->add_option("--ensemble", predict.ensemble, "Ensemble file");
    c_predict->add_option("--instances", predict.instances, "Instances to predict")->required();
    c_predict->add_option("--task", predict.task, "interpretation or fusion")->capture_default_str();
    c_predict->add_option("--out", predict.out, "Predictions file (JSON lines)")->required();
    add_common(c_predict, true);

    EvalArgs eval;
    auto* c_eval = app.add_subcommand("eval", "Score a model against the baseline");
    c_eval->add_option("--model", eval.model, "Model file");
    c_eval->add_option("--ensemble", eval.ensemble, "Ensemble file");
    c_eval->add_option("--instances", eval.instances, "Test instances")->required();
    c_eval->add_option("--task", eval.task, "interpretation or fusion")->capture_default_str();
    c_eval->add_option("--out", eval.out, "Report file")->required();
    add_common(c_eval, true);

    SearchArgs search;
    auto* c_search = app.add_subcommand("search", "Rank every feature combination on the development set");
    c_search->add_option("--train", search.train, "Training instances")->required();
    c_search->add_option("--dev", search.dev, "Development instances")->required();
    c_search->add_option("--kind", search.kind, "conj or disj")->capture_default_str();
    c_search->add_option("--classes", search.classes, "Classes to combine")->capture_default_str();
    c_search->add_option("--markers", search.markers, "Comma-separated temporal markers")->capture_default_str();
    c_search->add_option("--top", search.top, "Rows to print")->capture_default_str();
    c_search->add_option("--out", search.out, "Ranking file")->required();
    add_common(c_search, true);

    EnsembleArgs ensemble;
    auto* c_ensemble = app.add_subcommand("ensemble", "Train a stacked ensemble");
    c_ensemble->add_option("--train", ensemble.train, "Primary training instances")->required();
    c_ensemble->add_option("--dev", ensemble.dev, "Secondary training instances")->required();
    c_ensemble->add_option("--preset", ensemble.preset, "Named component roster");
    c_ensemble->add_option("--components", ensemble.components, "Comma-separated specs, e.g. disj:SV,conj:PV");
    c_ensemble->add_option("--task", ensemble.task, "interpretation or fusion")->capture_default_str();
    c_ensemble->add_option("--folds", ensemble.folds, "Cross-validation folds")->capture_default_str();
    c_ensemble->add_option("--min-leaf", ensemble.min_leaf, "Smallest node the tree may split")->capture_default_str();
    c_ensemble->add_option("--markers", ensemble.markers, "Comma-separated temporal markers")->capture_default_str();
    c_ensemble->add_option("--out", ensemble.out, "Output directory")->required();
    add_common(c_ensemble, true);

    CurveArgs curve;
    auto* c_curve = app.add_subcommand("curve", "Accuracy as a function of training size");
    c_curve->add_option("--train", curve.train, "Training instances")->required();
    c_curve->add_option("--eval", curve.eval, "Evaluation instances")->required();
    c_curve->add_option("--kind", curve.kind, "conj, disj or word")->capture_default_str();
    c_curve->add_option("--features", curve.features, "Feature classes")->capture_default_str();
    c_curve->add_option("--sizes", curve.sizes, "Ascending training sizes, e.g. 100,200,400")->required();
    c_curve->add_option("--markers", curve.markers, "Comma-separated temporal markers")->capture_default_str();
    c_curve->add_option("--out", curve.out, "Curve file")->required();
    add_common(c_curve, true);

    KappaArgs kappa_args;
    auto* c_kappa = app.add_subcommand("kappa", "Pairwise agreement between prediction files");
    c_kappa->add_option("--predictions", kappa_args.predictions, "Two or more prediction files")->required();
    c_kappa->add_option("--field", kappa_args.field, "Label field to compare")->capture_default_str();
    c_kappa->add_option("--out", kappa_args.out, "Result file")->required();
    add_common(c_kappa, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*c_extract) cmd_extract(common, extract);
        else if (*c_split) cmd_split(common, split);
        else if (*c_train) cmd_train(common, train);
        else if (*c_predict) cmd_predict(common, predict);
        else if (*c_eval) cmd_eval(common, eval);
        else if (*c_search) cmd_search(common, search);
        else if (*c_ensemble) cmd_ensemble(common, ensemble);
        else if (*c_curve) cmd_curve(common, curve);
        else if (*c_kappa) cmd_kappa(common, kappa_args);
        return 0;
    } catch (const InvariantError& err) {
        std::cerr << "tmark: internal error: " << err.what() << '\n';
        return 3;
    } catch (const ConfigError& err) {
        std::cerr << "tmark: " << err.what() << '\n';
        return 2;
    } catch (const ParseError& err) {
        std::cerr << "tmark: parse error: " << err.what() << '\n';
        return 2;
    } catch (const FileError& err) {
        std::cerr << "tmark: " << err.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& err) {
        std::cerr << "tmark: " << err.what() << '\n';
        return 2;
    }
}

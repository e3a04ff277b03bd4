// Acceptance suite: one PASS/FAIL line per criterion. `--criterion NAME` runs one.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../fixtures.hpp"
#include "../oracles.hpp"
#include "../synthetic.hpp"
#include "tmark/tmark.hpp"

namespace fs = std::filesystem;
using namespace tmark;
using namespace tmark::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<Outcome()> run;
};

std::string fmt(double v, int precision = 4) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(precision) << v;
    return out.str();
}

std::vector<Example> slice(const std::vector<Example>& v, std::size_t from, std::size_t to) {
    return {v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(to)};
}

Outcome worked_example_golden() {
    auto pairs = extract_pairs(parse_tree(kWorkedExampleTree), MarkerSet::standard(), {}, "ex1");
    if (pairs.size() != 1) return {false, "expected one pair, got " + std::to_string(pairs.size())};
    const auto& p = pairs.front();
    Lexicon empty;
    auto temporal = [](const ParseTree& clause) {
        std::vector<std::string> out;
        for (const auto& s : temporal_signature(clause)) out.push_back(s.to_string());
        return out;
    };
    using Bag = std::vector<std::string>;
    std::vector<std::pair<std::string, bool>> checks = {
        {"marker", p.marker == "after"},
        {"position", p.position == Position::SubSecond},
        {"main syntactic", syntactic_signature(p.main).to_string() == "NP:2 VP:2 ADJP:0 ADVP:0 PP:0"},
        {"sub syntactic", syntactic_signature(p.sub).to_string() == "NP:1 VP:1 ADJP:0 ADVP:0 PP:0"},
        {"main arguments", argument_signature(p.main).to_string() == "[SUBJ,OBJ]"},
        {"sub arguments", argument_signature(p.sub).to_string() == "[OBJ]"},
        {"main temporal", temporal(p.main) == Bag{"present,future,imperfective,active,affirmative"}},
        {"sub temporal", temporal(p.sub) == Bag{"present,none,imperfective,passive,affirmative"}},
        {"main verbs", verb_features(p.main, empty, empty).verbs == Bag{"lose"}},
        {"sub verbs", verb_features(p.sub, empty, empty).verbs == Bag{"complete"}},
    };
    Outcome out;
    for (const auto& [what, ok] : checks) {
        if (!ok) {
            out.pass = false;
            out.detail += (out.detail.empty() ? "mismatch: " : ", ") + what;
        }
    }
    if (out.pass) out.detail = "all 10 feature values match";
    return out;
}

Outcome smoothing_normalization() {
    Rng rng(101);
    double worst = 0.0;
    std::size_t tables = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto toy = random_toy(rng);
        auto kind = trial % 2 ? ModelKind::Conjunctive : ModelKind::Disjunctive;
        auto model = MarkerModel::train(toy.train, kind, toy.config, toy.markers);
        for (const auto& [name, table] : model.tables()) {
            if (table.space_size() == 0) continue;
            ++tables;
            for (const auto& marker : toy.markers.markers()) {
                double sum = 0.0;
                for (const auto& [key, counts] : table.rows) sum += model.probability(name, key, marker);
                worst = std::max(worst, std::abs(sum - 1.0));
            }
        }
    }
    return {worst <= 1e-9, std::to_string(tables) + " tables from 1000 models, max |sum - 1| = " + fmt(worst, 17)};
}

Outcome posterior_oracle() {
    Rng rng(202);
    double worst = 0.0;
    std::size_t argmax_mismatch = 0, compared = 0;
    for (int trial = 0; trial < 500; ++trial) {
        auto toy = random_toy(rng);
        auto main = random_bundle(rng, toy.config, 4);
        auto sub = random_bundle(rng, toy.config, 4);
        for (auto kind : {ModelKind::Conjunctive, ModelKind::Disjunctive}) {
            auto model = MarkerModel::train(toy.train, kind, toy.config, toy.markers);
            auto p = model.predict_marker(main, sub);
            auto oracle = brute_force_scores(toy.train, kind, toy.config, main, sub);
            if (p.ranked.size() != oracle.size()) return {false, "ranked marker sets differ"};
            for (const auto& [label, log_score] : p.ranked) {
                double expected = oracle.at(label);
                worst = std::max(worst, std::abs(std::exp(log_score) - expected) / expected);
            }
            // oracle argmax: best score, then higher prior count, then marker name
            std::string best;
            double best_score = -1.0;
            for (const auto& [label, s] : oracle) {
                bool tied = std::abs(s - best_score) <= 1e-12 * s;
                if ((!tied && s > best_score) || (tied && model.prior_count(label) > model.prior_count(best))) {
                    best_score = s;
                    best = label;
                }
            }
            ++compared;
            argmax_mismatch += p.chosen != best;
        }
    }
    Outcome out{worst < 1e-12 && argmax_mismatch == 0, ""};
    out.detail = std::to_string(compared) + " posteriors, max relative error " + fmt(worst * 1e12, 3) +
                 "e-12, argmax mismatches " + std::to_string(argmax_mismatch);
    return out;
}

Outcome majority_baseline() {
    Rng rng(303);
    std::vector<std::string> gold;
    for (int i = 0; i < 50000; ++i) gold.push_back(draw_corpus_marker(rng));
    auto baseline = MajorityBaseline::train(gold);
    std::vector<std::string> pred(gold.size(), baseline.predict());
    double acc = score(gold, pred).overall_accuracy;
    return {baseline.predict() == "when" && std::abs(acc - 0.4283) <= 0.005,
            "always-" + baseline.predict() + " accuracy " + fmt(100 * acc, 2) + "% (target 42.83 +/- 0.5)"};
}

Outcome fusion_symmetry() {
    Rng rng(404);
    std::size_t flips = 0, missing_ties = 0, distinct = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto toy = random_toy(rng);
        auto kind = trial % 2 ? ModelKind::Conjunctive : ModelKind::Disjunctive;
        auto model = MarkerModel::train(toy.train, kind, toy.config, toy.markers);
        auto a = random_bundle(rng, toy.config, 3);
        auto b = random_bundle(rng, toy.config, 3);
        const auto& marker = toy.train[rng.below(toy.train.size())].marker;
        auto ab = model.predict_fusion(a, b, marker);
        auto ba = model.predict_fusion(b, a, marker);
        if (a.values == b.values) {
            missing_ties += !ab.tie || !ba.tie;
        } else {
            bool a_main_ab = ab.chosen == "a_is_main";
            bool a_main_ba = ba.chosen == "b_is_main";
            flips += a_main_ab != a_main_ba;
            ++distinct;
        }
        missing_ties += !model.predict_fusion(a, a, marker).tie;
    }
    Outcome out{flips == 0 && missing_ties == 0, ""};
    out.detail = "1000 instances (" + std::to_string(distinct) + " with distinct fragments), role flips under swap " +
                 std::to_string(flips) + ", identical fragments without tie " + std::to_string(missing_ties);
    return out;
}

Outcome planted_signal_recovery() {
    std::vector<FeatureClass> noise;
    for (auto c : FeatureConfig::all_linguistic().classes()) {
        if (c != FeatureClass::V) noise.push_back(c);
    }
    auto data = planted_examples(5000, 505, FeatureClass::V, noise);
    auto train = slice(data, 0, 4000), dev = slice(data, 4000, 5000);
    auto classes = FeatureConfig::all_linguistic().classes();
    Outcome out;
    for (auto kind : {ModelKind::Disjunctive, ModelKind::Conjunctive}) {
        auto ranked = feature_search(train, dev, kind, classes, MarkerSet::standard());
        const auto& top = ranked.front();
        bool ok = top.config.to_string() == "V" && top.dev_accuracy >= 0.99;
        auto curve = learning_curve(train, dev, kind, FeatureConfig{FeatureClass::V}, MarkerSet::standard(),
                                    {50, 100, 250, 500, 1000}, 505);
        ok = ok && curve.back().accuracy >= 0.99;
        out.pass = out.pass && ok;
        out.detail += std::string(out.detail.empty() ? "" : "; ") + std::string(to_string(kind)) + ": top " +
                      top.config.to_string() + " of " + std::to_string(ranked.size()) + " at " +
                      fmt(top.dev_accuracy) + ", curve";
        for (const auto& pt : curve) out.detail += " " + std::to_string(pt.size) + "=" + fmt(pt.accuracy, 3);
    }
    return out;
}

Outcome ensemble_complementarity() {
    auto data = complementary_examples(6000, 606);
    auto primary = slice(data, 0, 3000), secondary = slice(data, 3000, 4500), test = slice(data, 4500, 6000);
    std::vector<ComponentSpec> specs = {ComponentSpec::parse("disj:V"), ComponentSpec::parse("disj:N")};
    auto ens = train_ensemble(specs, primary, secondary, MarkerSet::standard(), EnsembleOptions{Task::Interpretation});
    double best = 0.0;
    for (const auto& c : ens.components()) best = std::max(best, accuracy(c.model, test));
    std::size_t ok = 0;
    for (const auto& ex : test) ok += ens.predict(ex) == ex.marker;
    double acc = static_cast<double>(ok) / static_cast<double>(test.size());
    return {acc - best >= 0.10,
            "ensemble " + fmt(100 * acc, 2) + "% vs best component " + fmt(100 * best, 2) + "% (margin " +
                fmt(100 * (acc - best), 2) + " points)"};
}

Outcome statistics_oracles() {
    auto chi = chi_square(90, 10, 50, 50);
    bool chi_ok = std::abs(chi.statistic - 38.6) <= 0.1 && chi.significant;
    double k = kappa({"x", "x", "y", "y"}, {"x", "y", "y", "y"});
    std::vector<std::string> a = {"when", "after", "as", "when", "until"};
    double self = kappa(a, a);
    Outcome out{chi_ok && k == 0.5 && self == 1.0, ""};
    out.detail = "chi-square " + fmt(chi.statistic, 4) + (chi.significant ? " significant" : " not significant") +
                 " (criterion 38.6 +/- 0.1), kappa " + fmt(k, 4) + ", kappa(a,a) " + fmt(self, 4);
    return out;
}

int run_cli(const std::string& args, const fs::path& log) {
    std::string cmd = std::string("'") + TMARK_CLI_PATH + "' " + args + " >> '" + log.string() + "' 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> artifacts(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension();
        if (ext != ".json" && ext != ".jsonl") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream bytes;
        bytes << in.rdbuf();
        out[fs::relative(entry.path(), dir).string()] = bytes.str();
    }
    return out;
}

Outcome pipeline_determinism() {
    fs::path root = fs::temp_directory_path() / ("tmark_accept_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const std::string corpus = std::string(TMARK_DATA_DIR) + "/mini_corpus.mrg";
    for (const char* run : {"a", "b"}) {
        fs::path d = root / run;
        fs::create_directories(d);
        fs::path log = root / (std::string(run) + ".log");
        auto p = [&](const std::string& name) { return (d / name).string(); };
        std::vector<std::string> steps = {
            "extract --corpus " + corpus + " --out " + p("extract"),
            "split --seed 7 --instances " + p("extract/instances.jsonl") + " --out " + p("split"),
            "train --instances " + p("split/train.jsonl") + " --kind disj --features SV --out " + p("model.json"),
            "ensemble --seed 7 --train " + p("split/train.jsonl") + " --dev " + p("split/dev.jsonl") +
                " --preset disjunctive-ensemble --out " + p("ens"),
            "eval --model " + p("model.json") + " --instances " + p("split/test.jsonl") + " --out " + p("eval.json"),
            "eval --ensemble " + p("ens/ensemble.json") + " --instances " + p("split/test.jsonl") + " --out " +
                p("eval_ensemble.json"),
            "predict --ensemble " + p("ens/ensemble.json") + " --instances " + p("split/test.jsonl") + " --out " +
                p("pred.jsonl"),
        };
        for (const auto& step : steps) {
            if (int code = run_cli(step, log); code != 0) {
                return {false, "run " + std::string(run) + " failed (exit " + std::to_string(code) + "): " + step};
            }
        }
    }
    auto a = artifacts(root / "a"), b = artifacts(root / "b");
    std::vector<std::string> differing;
    for (const auto& [name, bytes] : a) {
        auto it = b.find(name);
        if (it == b.end() || it->second != bytes) differing.push_back(name);
    }
    if (a.size() != b.size()) differing.push_back("(artifact sets differ)");
    fs::remove_all(root);
    Outcome out{differing.empty() && !a.empty(), ""};
    out.detail = std::to_string(a.size()) + " JSON artifacts compared";
    for (const auto& name : differing) out.detail += ", differs: " + name;
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::string only;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            only = argv[++i];
        } else {
            std::cerr << "usage: tmark_acceptance [--criterion NAME]\n";
            return 2;
        }
    }
    const std::vector<Criterion> criteria = {
        {"worked_example_golden", 1, worked_example_golden},
        {"smoothing_normalization", 5, smoothing_normalization},
        {"posterior_oracle", 10, posterior_oracle},
        {"majority_baseline", 10, majority_baseline},
        {"fusion_symmetry", 5, fusion_symmetry},
        {"planted_signal_recovery", 60, planted_signal_recovery},
        {"ensemble_complementarity", 60, ensemble_complementarity},
        {"statistics_oracles", 1, statistics_oracles},
        {"pipeline_determinism", 120, pipeline_determinism},
    };
    bool all = true, matched = false;
    for (const auto& c : criteria) {
        if (!only.empty() && c.name != only) continue;
        matched = true;
        auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& err) {
            out = {false, std::string("exception: ") + err.what()};
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds > c.budget_seconds) {
            out.pass = false;
            out.detail += "; over time budget of " + fmt(c.budget_seconds, 0) + " s";
        }
        std::cout << (out.pass ? "PASS " : "FAIL ") << c.name << " (" << fmt(seconds, 2) << " s): " << out.detail
                  << std::endl;
        all = all && out.pass;
    }
    if (!matched) {
        std::cerr << "unknown criterion '" << only << "'\n";
        return 2;
    }
    return all ? 0 : 1;
}

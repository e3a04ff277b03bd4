#pragma once

// Feature-combination search and stacked ensembles: component marker models whose
// categorical outputs feed a decision-tree second-level learner.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmark/decision_tree.hpp"
#include "tmark/error.hpp"
#include "tmark/extraction.hpp"
#include "tmark/features.hpp"
#include "tmark/models.hpp"

namespace tmark {

namespace detail {

/// Runs fn(i) for i in [0, n) on a small pool; results are indexed, so order is fixed.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t n, Fn fn) {
    std::vector<std::optional<Result>> slots(n);
    std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8));
    workers = std::min(workers, std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) slots[i].emplace(fn(i));
    } else {
        std::vector<std::future<void>> jobs;
        for (std::size_t w = 0; w < workers; ++w) {
            jobs.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < n; i += workers) slots[i].emplace(fn(i));
            }));
        }
        for (auto& job : jobs) job.get();
    }
    std::vector<Result> out;
    out.reserve(n);
    for (auto& slot : slots) out.push_back(std::move(*slot));
    return out;
}

}  // namespace detail

/// Every non-empty subset of `classes`, ordered by canonical config string.
inline std::vector<FeatureConfig> enumerate_configs(const std::vector<FeatureClass>& classes) {
    std::vector<FeatureClass> unique;
    for (auto c : classes) {
        if (std::find(unique.begin(), unique.end(), c) == unique.end()) unique.push_back(c);
    }
    if (unique.empty() || unique.size() > kLinguisticClasses.size()) {
        throw ConfigError("enumerate_configs needs between 1 and 10 feature classes");
    }
    std::vector<FeatureConfig> out;
    const std::uint32_t limit = 1u << unique.size();
    for (std::uint32_t mask = 1; mask < limit; ++mask) {
        FeatureConfig config;
        for (std::size_t b = 0; b < unique.size(); ++b) {
            if (mask & (1u << b)) config.add(unique[b]);
        }
        out.push_back(config);
    }
    std::sort(out.begin(), out.end(),
              [](const FeatureConfig& a, const FeatureConfig& b) { return a.to_string() < b.to_string(); });
    return out;
}

inline double accuracy(const MarkerModel& model, const std::vector<Example>& examples) {
    if (examples.empty()) throw ConfigError("cannot score an empty instance set");
    std::size_t correct = 0;
    for (const auto& ex : examples) {
        if (model.predict_marker(ex.main, ex.sub).chosen == ex.marker) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(examples.size());
}

struct SearchResult {
    FeatureConfig config;
    double dev_accuracy;
};

/// Ranks every feature combination by accuracy on `dev` when trained on `train`.
/// Ties prefer fewer classes, then the config string.
///
/// Count tables are per class, so one model over all classes holds every subset's
/// tables. Each dev instance's per-class log likelihoods are computed once and summed
/// per subset in canonical class order, which reproduces a separately trained
/// model's scores exactly.
inline std::vector<SearchResult> feature_search(const std::vector<Example>& train, const std::vector<Example>& dev,
                                                ModelKind kind, const std::vector<FeatureClass>& classes,
                                                const MarkerSet& markers) {
    if (dev.empty()) throw ConfigError("feature search needs a non-empty development set");
    if (train.empty()) throw ConfigError("feature search needs a non-empty training set");
    if (kind == ModelKind::WordBased) throw ConfigError("feature search applies to conjunctive/disjunctive models");
    auto configs = enumerate_configs(classes);
    FeatureConfig all;
    for (auto c : classes) all.add(c);
    const auto full = MarkerModel::train(train, kind, all, markers);
    for (const auto& ex : dev) {
        if (!all.subset_of(ex.main.computed) || !all.subset_of(ex.sub.computed)) {
            throw ConfigError("dev instance '" + ex.id + "' does not provide the searched classes " + all.to_string());
        }
    }

    std::vector<std::string> ranked_markers;
    std::vector<double> log_priors;
    std::vector<std::uint64_t> prior_counts;
    for (const auto& m : markers.markers()) {
        if (full.prior_count(m) == 0) continue;
        ranked_markers.push_back(m);
        log_priors.push_back(full.log_prior(m));
        prior_counts.push_back(full.prior_count(m));
    }
    const auto class_list = all.classes();
    auto class_index = [&](FeatureClass c) {
        return static_cast<std::size_t>(std::find(class_list.begin(), class_list.end(), c) - class_list.begin());
    };
    // contrib[i][k][m]: dev instance i, class k, marker m
    std::vector<std::vector<std::vector<double>>> contrib(dev.size());
    for (std::size_t i = 0; i < dev.size(); ++i) {
        contrib[i].resize(class_list.size());
        for (std::size_t k = 0; k < class_list.size(); ++k) {
            for (const auto& m : ranked_markers) {
                contrib[i][k].push_back(full.class_log_likelihood(class_list[k], m, dev[i].main, dev[i].sub));
            }
        }
    }

    auto results = detail::parallel_map<SearchResult>(configs.size(), [&](std::size_t c) {
        std::vector<std::size_t> ks;
        for (auto cls : configs[c].classes()) ks.push_back(class_index(cls));
        std::size_t correct = 0;
        for (std::size_t i = 0; i < dev.size(); ++i) {
            std::size_t best = 0;
            double best_score = 0.0;
            for (std::size_t m = 0; m < ranked_markers.size(); ++m) {
                double ll = 0.0;
                for (auto k : ks) ll += contrib[i][k][m];
                double score = log_priors[m] + ll;
                bool better = m == 0 || score > best_score ||
                              (score == best_score && (prior_counts[m] > prior_counts[best] ||
                                                       (prior_counts[m] == prior_counts[best] &&
                                                        ranked_markers[m] < ranked_markers[best])));
                if (better) {
                    best = m;
                    best_score = score;
                }
            }
            correct += ranked_markers[best] == dev[i].marker;
        }
        return SearchResult{configs[c], static_cast<double>(correct) / static_cast<double>(dev.size())};
    });
    std::stable_sort(results.begin(), results.end(), [](const SearchResult& a, const SearchResult& b) {
        if (a.dev_accuracy != b.dev_accuracy) return a.dev_accuracy > b.dev_accuracy;
        if (a.config.size() != b.config.size()) return a.config.size() < b.config.size();
        return a.config.to_string() < b.config.to_string();
    });
    return results;
}

/// A component model: kind plus feature combination, written "disj:SV" / "conj:NPV".
struct ComponentSpec {
    ModelKind kind;
    FeatureConfig config;

    std::string to_string() const {
        return std::string(kind == ModelKind::Conjunctive ? "conj" : "disj") + ":" + config.to_string();
    }

    static ComponentSpec parse(std::string_view text) {
        auto colon = text.find(':');
        if (colon == std::string_view::npos) throw ConfigError("component spec '" + std::string(text) + "' must be kind:FEATURES");
        ModelKind kind = parse_model_kind(text.substr(0, colon));
        if (kind == ModelKind::WordBased) throw ConfigError("ensemble components must be conj or disj");
        return ComponentSpec{kind, FeatureConfig::parse(text.substr(colon + 1))};
    }

    bool operator==(const ComponentSpec&) const = default;
};

/// Roster text: one spec per line, '#' comments.
inline std::vector<ComponentSpec> parse_roster(std::string_view text) {
    std::vector<ComponentSpec> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        auto end = line.find_last_not_of(" \t\r");
        auto spec = ComponentSpec::parse(std::string_view(line).substr(begin, end - begin + 1));
        if (std::find(out.begin(), out.end(), spec) == out.end()) out.push_back(spec);
    }
    if (out.empty()) throw ConfigError("component roster is empty");
    return out;
}

/// Published component rosters, keyed by preset name. The text matches data/presets/<name>.txt.
inline const std::map<std::string, std::string>& preset_rosters() {
    static const std::map<std::string, std::string> presets = {
        {"conjunctive-ensemble",
         "# interpretation, conjunctive components (22)\n"
         "conj:APTV\nconj:NWPSVVLVW\nconj:NPVVLVW\nconj:PRTVVLVW\nconj:PSVLVW\nconj:PSVVLVW\nconj:PVVLVW\n"
         "conj:SVVLVW\nconj:NSVVW\nconj:PSVVW\nconj:PVVW\nconj:NWPSVVL\nconj:PSVL\nconj:PVVL\nconj:NPSV\n"
         "conj:NPV\nconj:NSV\nconj:PSV\nconj:PV\nconj:SV\nconj:TV\nconj:V\n"},
        {"disjunctive-ensemble",
         "# interpretation, disjunctive components (12)\n"
         "disj:ANNWPSV\ndisj:APSV\ndisj:ASV\ndisj:PRSVW\ndisj:NWPS\ndisj:SVL\ndisj:NPRSTV\ndisj:PRS\n"
         "disj:PRST\ndisj:PRSV\ndisj:PSV\ndisj:SV\n"},
        {"fusion-conjunctive-ensemble",
         "# fusion, conjunctive components (8)\n"
         "conj:ANNWSTVVL\nconj:ASV\nconj:NNWS\nconj:NNWST\nconj:NWST\nconj:NNWT\nconj:NT\nconj:NNWR\n"},
        {"fusion-disjunctive-ensemble",
         "# fusion, disjunctive components (19 distinct)\n"
         "disj:ANRSTVVW\ndisj:ANNWSTV\ndisj:ANNWV\ndisj:ANWRS\ndisj:ANV\ndisj:ARS\ndisj:ARSTV\ndisj:ARSV\n"
         "disj:ARV\ndisj:AV\ndisj:SVW\ndisj:RTVW\ndisj:TVVW\ndisj:NWRST\ndisj:NWS\ndisj:NWST\ndisj:TVW\n"
         "disj:RT\ndisj:STV\n"},
    };
    return presets;
}

inline std::vector<ComponentSpec> preset_roster(const std::string& name) {
    const auto& presets = preset_rosters();
    auto it = presets.find(name);
    if (it == presets.end()) {
        std::string known;
        for (const auto& [key, text] : presets) known += (known.empty() ? "" : ", ") + key;
        throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
    }
    return parse_roster(it->second);
}

/// Fusion view of a labelled pair: fragments in seeded random order, side hidden.
struct FusionCase {
    std::string id;
    FeatureBundle a;
    FeatureBundle b;
    std::string marker;
    Role gold;
};

inline FusionCase make_fusion_case(const Example& ex, std::uint64_t seed) {
    Role gold = fusion_order(seed, ex.id);
    FeatureBundle first = gold == Role::AIsMain ? ex.main : ex.sub;
    FeatureBundle second = gold == Role::AIsMain ? ex.sub : ex.main;
    first.side.reset();
    second.side.reset();
    first.values.erase(FeatureClass::P);
    second.values.erase(FeatureClass::P);
    return FusionCase{ex.id, std::move(first), std::move(second), ex.marker, gold};
}

inline std::vector<FusionCase> make_fusion_cases(const std::vector<Example>& examples, std::uint64_t seed) {
    std::vector<FusionCase> out;
    out.reserve(examples.size());
    for (const auto& ex : examples) out.push_back(make_fusion_case(ex, seed));
    return out;
}

inline double fusion_accuracy(const MarkerModel& model, const std::vector<FusionCase>& cases) {
    if (cases.empty()) throw ConfigError("cannot score an empty instance set");
    std::size_t correct = 0;
    for (const auto& c : cases) {
        if (model.predict_fusion(c.a, c.b, c.marker).chosen == to_string(c.gold)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(cases.size());
}

struct EnsembleComponent {
    ComponentSpec spec;
    MarkerModel model;
};

struct EnsembleOptions {
    Task task = Task::Interpretation;
    std::size_t folds = 10;
    std::size_t min_leaf = 2;
    std::uint64_t seed = 0;  ///< fusion fragment order
};

/// Component roster plus the decision tree trained over their predictions.
class StackedEnsemble {
public:
    static constexpr int kVersion = 1;

    StackedEnsemble(Task task, std::vector<EnsembleComponent> components, DecisionTree tree, std::uint64_t seed)
        : task_(task), components_(std::move(components)), tree_(std::move(tree)), seed_(seed) {
        if (components_.empty()) throw ConfigError("an ensemble needs at least one component");
        if (tree_.arity() != components_.size()) {
            throw InvariantError("decision tree arity does not match the component count");
        }
        for (const auto& node : tree_.nodes()) {
            if (node.attribute && *node.attribute >= components_.size()) {
                throw InvariantError("decision tree references a component that does not exist");
            }
        }
    }

    /// Component outputs for an interpretation example (the tree's attribute record).
    std::vector<std::string> attributes(const Example& ex) const {
        std::vector<std::string> out;
        for (const auto& c : components_) out.push_back(c.model.predict_marker(ex.main, ex.sub).chosen);
        return out;
    }

    std::vector<std::string> attributes(const FusionCase& fc) const {
        std::vector<std::string> out;
        for (const auto& c : components_) out.push_back(c.model.predict_fusion(fc.a, fc.b, fc.marker).chosen);
        return out;
    }

    std::string predict(const Example& ex) const { return tree_.classify(attributes(ex)); }
    std::string predict(const FusionCase& fc) const { return tree_.classify(attributes(fc)); }

    Task task() const noexcept { return task_; }
    const std::vector<EnsembleComponent>& components() const noexcept { return components_; }
    const DecisionTree& tree() const noexcept { return tree_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Accuracy estimated by k-fold cross-validation of the tree on the secondary set.
    double cv_accuracy = 0.0;
    /// Resubstitution accuracy of the final tree on the secondary records.
    double secondary_accuracy = 0.0;
    /// Each component's accuracy on the secondary set (trained on the primary set only).
    std::vector<double> component_secondary_accuracy;

    /// `model_refs[i]` names where component i's model is stored.
    nlohmann::json to_json(const std::vector<std::string>& model_refs) const {
        if (model_refs.size() != components_.size()) throw ConfigError("one model reference per component required");
        nlohmann::json comps = nlohmann::json::array();
        for (std::size_t i = 0; i < components_.size(); ++i) {
            comps.push_back({{"spec", components_[i].spec.to_string()}, {"model_ref", model_refs[i]}});
        }
        return nlohmann::json{{"version", kVersion},
                              {"task", std::string(to_string(task_))},
                              {"seed", seed_},
                              {"components", std::move(comps)},
                              {"tree", tree_.to_json()},
                              {"cv_accuracy", cv_accuracy},
                              {"secondary_accuracy", secondary_accuracy},
                              {"component_secondary_accuracy", component_secondary_accuracy}};
    }

    /// `load_model(ref)` resolves a model reference written by to_json.
    static StackedEnsemble from_json(const nlohmann::json& j,
                                     const std::function<MarkerModel(const std::string&)>& load_model) {
        try {
            if (j.at("version").get<int>() != kVersion) throw ConfigError("unsupported ensemble version");
            std::vector<EnsembleComponent> comps;
            for (const auto& c : j.at("components")) {
                auto spec = ComponentSpec::parse(c.at("spec").get<std::string>());
                auto model = load_model(c.at("model_ref").get<std::string>());
                if (model.kind() != spec.kind || !(model.config() == spec.config)) {
                    throw ConfigError("component model does not match its spec " + spec.to_string());
                }
                comps.push_back({spec, std::move(model)});
            }
            StackedEnsemble out(parse_task(j.at("task").get<std::string>()), std::move(comps),
                                DecisionTree::from_json(j.at("tree")), j.at("seed").get<std::uint64_t>());
            out.cv_accuracy = j.value("cv_accuracy", 0.0);
            out.secondary_accuracy = j.value("secondary_accuracy", 0.0);
            out.component_secondary_accuracy = j.value("component_secondary_accuracy", std::vector<double>{});
            return out;
        } catch (const nlohmann::json::exception& err) {
            throw ConfigError(std::string("malformed ensemble file: ") + err.what());
        }
    }

private:
    Task task_;
    std::vector<EnsembleComponent> components_;
    DecisionTree tree_;
    std::uint64_t seed_;
};

/// Stacking. Components are trained on `primary`; their predictions on `secondary`
/// become the tree's training records (cross-validated over `folds` for the accuracy
/// estimate, then fit on all records); finally the components are retrained on
/// primary + secondary for use at test time.
inline StackedEnsemble train_ensemble(const std::vector<ComponentSpec>& specs, const std::vector<Example>& primary,
                                      const std::vector<Example>& secondary, const MarkerSet& markers,
                                      const EnsembleOptions& options = {}) {
    if (specs.empty()) throw ConfigError("ensemble component list is empty");
    if (options.folds < 2) throw ConfigError("ensemble cross-validation needs at least 2 folds");
    if (secondary.size() < options.folds) {
        throw ConfigError("fold count " + std::to_string(options.folds) + " exceeds the " +
                          std::to_string(secondary.size()) + " secondary instances");
    }
    if (primary.empty()) throw ConfigError("ensemble primary training set is empty");
    if (options.task == Task::Fusion) {
        for (const auto& s : specs) {
            if (s.config.contains(FeatureClass::P)) {
                throw ConfigError("fusion component " + s.to_string() + " uses the position feature");
            }
        }
    }

    auto first_stage = detail::parallel_map<MarkerModel>(specs.size(), [&](std::size_t i) {
        return MarkerModel::train(primary, specs[i].kind, specs[i].config, markers);
    });

    std::vector<FusionCase> cases;
    if (options.task == Task::Fusion) cases = make_fusion_cases(secondary, options.seed);

    std::vector<Record> records(secondary.size());
    std::vector<double> component_correct(specs.size(), 0.0);
    for (std::size_t r = 0; r < secondary.size(); ++r) {
        auto& rec = records[r];
        for (std::size_t i = 0; i < specs.size(); ++i) {
            std::string out = options.task == Task::Interpretation
                                  ? first_stage[i].predict_marker(secondary[r].main, secondary[r].sub).chosen
                                  : first_stage[i].predict_fusion(cases[r].a, cases[r].b, cases[r].marker).chosen;
            rec.attributes.push_back(std::move(out));
        }
        rec.label = options.task == Task::Interpretation ? secondary[r].marker : std::string(to_string(cases[r].gold));
        for (std::size_t i = 0; i < specs.size(); ++i) {
            if (rec.attributes[i] == rec.label) component_correct[i] += 1.0;
        }
    }

    std::size_t cv_correct = 0;
    for (std::size_t fold = 0; fold < options.folds; ++fold) {
        std::vector<Record> fit;
        for (std::size_t r = 0; r < records.size(); ++r) {
            if (r % options.folds != fold) fit.push_back(records[r]);
        }
        auto tree = DecisionTree::build(fit, options.min_leaf);
        for (std::size_t r = fold; r < records.size(); r += options.folds) {
            if (tree.classify(records[r].attributes) == records[r].label) ++cv_correct;
        }
    }

    auto tree = DecisionTree::build(records, options.min_leaf);
    std::size_t resub = 0;
    for (const auto& rec : records) {
        if (tree.classify(rec.attributes) == rec.label) ++resub;
    }

    std::vector<Example> combined = primary;
    combined.insert(combined.end(), secondary.begin(), secondary.end());
    auto final_models = detail::parallel_map<MarkerModel>(specs.size(), [&](std::size_t i) {
        return MarkerModel::train(combined, specs[i].kind, specs[i].config, markers);
    });

    std::vector<EnsembleComponent> components;
    for (std::size_t i = 0; i < specs.size(); ++i) components.push_back({specs[i], std::move(final_models[i])});

    StackedEnsemble ensemble(options.task, std::move(components), std::move(tree), options.seed);
    const double n = static_cast<double>(records.size());
    ensemble.cv_accuracy = static_cast<double>(cv_correct) / n;
    ensemble.secondary_accuracy = static_cast<double>(resub) / n;
    for (double c : component_correct) ensemble.component_secondary_accuracy.push_back(c / n);
    return ensemble;
}

}  // namespace tmark

#pragma once

// Conjunctive / disjunctive marker models (interpretation and fusion) and baselines.
//
// Interpretation scores each marker t as
//   log P(t) + sum over classes i of the log smoothed likelihood of the clause features,
// where the disjunctive model treats every main- and subordinate-side value as an
// independent factor P(a_M | t), P(a_S | t), and the conjunctive model uses one factor
// P(a_M, a_S | t) per same-class value pair. P(S_M) and P(S_S | S_M) are constant
// across markers and never computed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmark/error.hpp"
#include "tmark/extraction.hpp"
#include "tmark/features.hpp"
#include "tmark/rng.hpp"

namespace tmark {

enum class ModelKind { Conjunctive, Disjunctive, WordBased };

inline std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Conjunctive: return "conjunctive";
        case ModelKind::Disjunctive: return "disjunctive";
        case ModelKind::WordBased: return "word";
    }
    return "?";
}

/// Accepts "conjunctive"/"conj", "disjunctive"/"disj", "word"/"word-based".
inline ModelKind parse_model_kind(std::string_view text) {
    if (text == "conjunctive" || text == "conj") return ModelKind::Conjunctive;
    if (text == "disjunctive" || text == "disj") return ModelKind::Disjunctive;
    if (text == "word" || text == "word-based" || text == "wordbased") return ModelKind::WordBased;
    throw ConfigError("unknown model kind '" + std::string(text) + "' (expected conj|disj|word)");
}

/// One labelled training/test instance: both clause bundles and the gold marker.
struct Example {
    std::string id;
    FeatureBundle main;
    FeatureBundle sub;
    std::string marker;
};

inline std::vector<Example> build_examples(const std::vector<ClausePair>& pairs, const FeatureConfig& config,
                                           const Lexicons& lex) {
    std::vector<Example> out;
    out.reserve(pairs.size());
    for (const auto& pair : pairs) {
        auto bundles = extract_bundle(pair, config, lex);
        out.push_back(Example{pair.source_id, std::move(bundles.main), std::move(bundles.sub), pair.marker});
    }
    return out;
}

/// m-estimate with a uniform prior 1/m and m equal to the size of the feature space:
/// (count + m * 1/m) / (class_total + m).
inline double smoothed_prob(std::uint64_t count, std::uint64_t class_total, std::uint64_t space_size) {
    if (space_size == 0) throw ConfigError("smoothed_prob: space size must be positive");
    return (static_cast<double>(count) + 1.0) / (static_cast<double>(class_total) + static_cast<double>(space_size));
}

using MarkerCounts = std::map<std::string, std::uint64_t>;
using FeatureKey = std::vector<std::string>;

/// Per-marker counts for one feature table (a class/side for disjunctive models,
/// a class for conjunctive ones).
struct CountTable {
    std::map<FeatureKey, MarkerCounts> rows;
    MarkerCounts totals;

    void add(const FeatureKey& key, const std::string& marker, std::uint64_t n = 1) {
        rows[key][marker] += n;
        totals[marker] += n;
    }

    std::uint64_t count(const FeatureKey& key, const std::string& marker) const {
        auto row = rows.find(key);
        if (row == rows.end()) return 0;
        auto it = row->second.find(marker);
        return it == row->second.end() ? 0 : it->second;
    }

    std::uint64_t total(const std::string& marker) const {
        auto it = totals.find(marker);
        return it == totals.end() ? 0 : it->second;
    }

    /// m: number of distinct keys seen in training.
    std::size_t space_size() const noexcept { return rows.size(); }

    bool operator==(const CountTable&) const = default;
};

struct Prediction {
    std::vector<std::pair<std::string, double>> ranked;  ///< (label, log score), best first
    std::string chosen;
    bool tie = false;
};

namespace detail {

inline std::string table_name(FeatureClass c) { return std::string(symbol(c)); }
inline std::string table_name(FeatureClass c, Side side) {
    return std::string(symbol(c)) + "/" + std::string(to_string(side));
}

}  // namespace detail

/// Smoothed count tables plus marker priors. Immutable once trained.
class MarkerModel {
public:
    static constexpr int kVersion = 1;

    static MarkerModel train(const std::vector<Example>& instances, ModelKind kind, FeatureConfig config,
                             MarkerSet markers) {
        if (instances.empty()) throw ConfigError("cannot train on an empty instance set");
        MarkerModel model(kind, std::move(config), std::move(markers));
        for (const auto& ex : instances) model.observe(ex);
        return model;
    }

    /// Empty model with all tables declared; used for sharded accumulation.
    static MarkerModel empty(ModelKind kind, FeatureConfig config, MarkerSet markers) {
        return MarkerModel(kind, std::move(config), std::move(markers));
    }

    /// Adds one training instance's counts.
    void observe(const Example& ex) {
        if (!markers_.contains(ex.marker)) {
            throw ConfigError("instance '" + ex.id + "': marker '" + ex.marker + "' is not in the marker set {" +
                              markers_.to_string() + "}");
        }
        check_bundles(ex.main, ex.sub);
        priors_[ex.marker] += 1;
        ++instances_;
        for (auto c : config_.classes()) {
            const auto& main_bag = ex.main.bag(c);
            const auto& sub_bag = ex.sub.bag(c);
            if (kind_ == ModelKind::Conjunctive) {
                auto& table = tables_[detail::table_name(c)];
                for (const auto& vm : main_bag) {
                    for (const auto& vs : sub_bag) table.add({vm, vs}, ex.marker);
                }
            } else {
                auto& main_table = tables_[detail::table_name(c, Side::Main)];
                for (const auto& v : main_bag) main_table.add({v}, ex.marker);
                auto& sub_table = tables_[detail::table_name(c, Side::Sub)];
                for (const auto& v : sub_bag) sub_table.add({v}, ex.marker);
            }
        }
    }

    /// Additive merge of two models trained on disjoint shards.
    static MarkerModel merge(const MarkerModel& a, const MarkerModel& b) {
        if (a.kind_ != b.kind_ || !(a.config_ == b.config_) || !(a.markers_ == b.markers_)) {
            throw ConfigError("cannot merge models with different kind, features or marker sets");
        }
        MarkerModel out = a;
        out.instances_ += b.instances_;
        for (const auto& [m, n] : b.priors_) out.priors_[m] += n;
        for (const auto& [name, table] : b.tables_) {
            auto& target = out.tables_[name];
            for (const auto& [key, counts] : table.rows) {
                for (const auto& [m, n] : counts) target.add(key, m, n);
            }
        }
        return out;
    }

    ModelKind kind() const noexcept { return kind_; }
    const FeatureConfig& config() const noexcept { return config_; }
    const MarkerSet& markers() const noexcept { return markers_; }
    const MarkerCounts& priors() const noexcept { return priors_; }
    const std::map<std::string, CountTable>& tables() const noexcept { return tables_; }
    std::uint64_t instance_count() const noexcept { return instances_; }

    std::uint64_t prior_count(const std::string& marker) const {
        auto it = priors_.find(marker);
        return it == priors_.end() ? 0 : it->second;
    }

    double log_prior(const std::string& marker) const {
        return std::log(static_cast<double>(prior_count(marker)) / static_cast<double>(instances_));
    }

    /// One class's contribution to the log likelihood of `main`/`sub` under `marker`.
    /// A model's likelihood is the sum of these over its classes, in canonical order.
    double class_log_likelihood(FeatureClass c, const std::string& marker, const FeatureBundle& main,
                                const FeatureBundle& sub) const {
        double score = 0.0;
        const auto& main_bag = main.bag(c);
        const auto& sub_bag = sub.bag(c);
        if (kind_ == ModelKind::Conjunctive) {
            const std::string name = detail::table_name(c);
            for (const auto& vm : main_bag) {
                for (const auto& vs : sub_bag) score += std::log(probability(name, {vm, vs}, marker));
            }
        } else {
            const std::string main_name = detail::table_name(c, Side::Main);
            const std::string sub_name = detail::table_name(c, Side::Sub);
            for (const auto& v : main_bag) score += std::log(probability(main_name, {v}, marker));
            for (const auto& v : sub_bag) score += std::log(probability(sub_name, {v}, marker));
        }
        return score;
    }

    /// Smoothed P(key | marker) in `table`. Keys never seen in training get 1/m for
    /// every marker, so they never change a ranking.
    double probability(const std::string& table, const FeatureKey& key, const std::string& marker) const {
        const CountTable& t = tables_.at(table);
        std::size_t m = std::max<std::size_t>(1, t.space_size());
        auto row = t.rows.find(key);
        if (row == t.rows.end()) return 1.0 / static_cast<double>(m);
        auto it = row->second.find(marker);
        std::uint64_t count = it == row->second.end() ? 0 : it->second;
        return smoothed_prob(count, t.total(marker), m);
    }

    /// log P(t) + sum of log likelihood factors for `main`/`sub` in their given roles.
    double log_score(const std::string& marker, const FeatureBundle& main, const FeatureBundle& sub) const {
        return log_prior(marker) + log_likelihood(marker, main, sub);
    }

    /// Ranked markers for a main/subordinate pair. Markers never seen in training are
    /// not ranked (their prior is zero). Ties: higher prior count, then marker name.
    Prediction predict_marker(const FeatureBundle& main, const FeatureBundle& sub) const {
        check_bundles(main, sub);
        Prediction out;
        for (const auto& marker : markers_.markers()) {
            if (prior_count(marker) == 0) continue;
            out.ranked.emplace_back(marker, log_score(marker, main, sub));
        }
        std::stable_sort(out.ranked.begin(), out.ranked.end(), [&](const auto& x, const auto& y) {
            if (x.second != y.second) return x.second > y.second;
            auto px = prior_count(x.first), py = prior_count(y.first);
            if (px != py) return px > py;
            return x.first < y.first;
        });
        out.chosen = out.ranked.front().first;
        out.tie = out.ranked.size() > 1 && out.ranked[0].second == out.ranked[1].second;
        return out;
    }

    /// Which fragment is the main clause, given the marker joining them.
    ///
    /// Each assignment is scored by the same function with the arguments in role
    /// order, so swapping the inputs swaps the scores exactly. Equal scores are a tie;
    /// the main role then goes to `a` when the fragments' features are identical and
    /// otherwise to the fragment whose features sort first, so the decision never
    /// depends on input order.
    Prediction predict_fusion(const FeatureBundle& a, const FeatureBundle& b, const std::string& marker) const {
        if (config_.contains(FeatureClass::P)) {
            throw ConfigError("fusion models cannot use the position feature (P)");
        }
        if (!markers_.contains(marker)) throw ConfigError("marker '" + marker + "' is not in the model's marker set");
        check_bundles(a, b);
        double prior = prior_count(marker) > 0
                           ? std::log(static_cast<double>(prior_count(marker)) / static_cast<double>(instances_))
                           : 0.0;
        double a_main = prior + log_likelihood(marker, a, b);
        double b_main = prior + log_likelihood(marker, b, a);

        Prediction out;
        Role chosen;
        if (a_main > b_main) {
            chosen = Role::AIsMain;
        } else if (b_main > a_main) {
            chosen = Role::BIsMain;
        } else {
            out.tie = true;
            chosen = (b.values < a.values) ? Role::BIsMain : Role::AIsMain;
        }
        std::pair<std::string, double> ra{std::string(to_string(Role::AIsMain)), a_main};
        std::pair<std::string, double> rb{std::string(to_string(Role::BIsMain)), b_main};
        out.ranked = chosen == Role::AIsMain ? std::vector{ra, rb} : std::vector{rb, ra};
        out.chosen = out.ranked.front().first;
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json tables = nlohmann::json::object();
        nlohmann::json sizes = nlohmann::json::object();
        for (const auto& [name, table] : tables_) {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& [key, counts] : table.rows) rows.push_back({{"key", key}, {"counts", counts}});
            tables[name] = std::move(rows);
            sizes[name] = table.space_size();
        }
        return nlohmann::json{{"version", kVersion},
                              {"kind", std::string(to_string(kind_))},
                              {"config", config_.to_string()},
                              {"marker_set", markers_.markers()},
                              {"priors", priors_},
                              {"tables", std::move(tables)},
                              {"space_sizes", std::move(sizes)}};
    }

    static MarkerModel from_json(const nlohmann::json& j) {
        try {
            if (j.at("version").get<int>() != kVersion) {
                throw ConfigError("unsupported model version " + j.at("version").dump());
            }
            MarkerModel model(parse_model_kind(j.at("kind").get<std::string>()),
                              FeatureConfig::parse(j.at("config").get<std::string>()),
                              MarkerSet(j.at("marker_set").get<std::vector<std::string>>()));
            for (const auto& [m, n] : j.at("priors").items()) {
                if (!model.markers_.contains(m)) throw ConfigError("model prior for unknown marker '" + m + "'");
                model.priors_[m] = n.get<std::uint64_t>();
                model.instances_ += n.get<std::uint64_t>();
            }
            for (const auto& [name, rows] : j.at("tables").items()) {
                if (!model.tables_.count(name)) throw ConfigError("model table '" + name + "' does not match its config");
                auto& table = model.tables_[name];
                for (const auto& row : rows) {
                    auto key = row.at("key").get<FeatureKey>();
                    for (const auto& [m, n] : row.at("counts").items()) table.add(key, m, n.get<std::uint64_t>());
                }
            }
            for (const auto& [name, size] : j.at("space_sizes").items()) {
                auto it = model.tables_.find(name);
                if (it == model.tables_.end() || it->second.space_size() != size.get<std::size_t>()) {
                    throw ConfigError("model space size for table '" + name + "' is inconsistent with its counts");
                }
            }
            return model;
        } catch (const nlohmann::json::exception& err) {
            throw ConfigError(std::string("malformed model file: ") + err.what());
        }
    }

    bool operator==(const MarkerModel&) const = default;

private:
    MarkerModel(ModelKind kind, FeatureConfig config, MarkerSet markers)
        : kind_(kind), config_(std::move(config)), markers_(std::move(markers)) {
        if (kind_ == ModelKind::WordBased) config_ = FeatureConfig::words();
        if (config_.empty()) throw ConfigError("model feature configuration must be non-empty");
        for (auto c : config_.classes()) {
            if (kind_ == ModelKind::Conjunctive) {
                tables_[detail::table_name(c)];
            } else {
                tables_[detail::table_name(c, Side::Main)];
                tables_[detail::table_name(c, Side::Sub)];
            }
        }
    }

    void check_bundles(const FeatureBundle& main, const FeatureBundle& sub) const {
        if (!config_.subset_of(main.computed) || !config_.subset_of(sub.computed)) {
            throw ConfigError("feature bundles (" + main.computed.to_string() + "/" + sub.computed.to_string() +
                              ") do not provide the model's classes " + config_.to_string());
        }
    }

    double log_likelihood(const std::string& marker, const FeatureBundle& main, const FeatureBundle& sub) const {
        double score = 0.0;
        for (auto c : config_.classes()) score += class_log_likelihood(c, marker, main, sub);
        return score;
    }

    ModelKind kind_;
    FeatureConfig config_;
    MarkerSet markers_;
    MarkerCounts priors_;
    std::uint64_t instances_ = 0;
    std::map<std::string, CountTable> tables_;
};

/// Always predicts the most frequent training marker (ties: lexicographically first).
class MajorityBaseline {
public:
    static MajorityBaseline train(const std::vector<std::string>& markers) {
        MarkerCounts counts;
        for (const auto& m : markers) ++counts[m];
        return from_counts(counts);
    }

    static MajorityBaseline from_counts(const MarkerCounts& counts) {
        MajorityBaseline out;
        std::uint64_t best = 0;
        for (const auto& [m, n] : counts) {
            if (n > best) {
                best = n;
                out.marker_ = m;
            }
        }
        if (best == 0) throw ConfigError("cannot train the majority baseline on an empty set");
        return out;
    }

    static MajorityBaseline train(const std::vector<Example>& examples) {
        std::vector<std::string> markers;
        for (const auto& ex : examples) markers.push_back(ex.marker);
        return train(markers);
    }

    const std::string& predict() const noexcept { return marker_; }

private:
    std::string marker_;
};

/// Fusion baseline: a seeded fair coin over the two role assignments.
class RandomBaseline {
public:
    explicit RandomBaseline(std::uint64_t seed) : rng_(seed) {}

    Role predict() { return rng_.below(2) == 0 ? Role::AIsMain : Role::BIsMain; }

private:
    Rng rng_;
};

}  // namespace tmark

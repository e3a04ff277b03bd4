#pragma once

// Test-only reference computations, written independently of the library code
// paths they check.

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tmark/features.hpp"
#include "tmark/models.hpp"
#include "tmark/treebank.hpp"

namespace tmark::testing {

/// Node counts by category with an explicit stack (no recursion), root excluded.
/// Auxiliary-shell VPs are skipped through the same public predicate the
/// signature definition uses.
inline std::map<std::string, std::size_t> enumerate_categories(const ParseTree& clause) {
    std::map<std::string, std::size_t> counts;
    std::vector<const ParseTree*> stack;
    for (const auto& child : clause.children()) stack.push_back(&child);
    while (!stack.empty()) {
        const ParseTree* node = stack.back();
        stack.pop_back();
        std::string label = node->label();
        std::string cat = label[0] == '-' ? label : label.substr(0, label.find_first_of("-="));
        if (!(cat == "VP" && is_auxiliary_shell(*node))) ++counts[cat];
        for (const auto& child : node->children()) stack.push_back(&child);
    }
    return counts;
}

/// Direct probability-space evaluation of the marker posterior numerator
///   P(t) * prod_i factors
/// counting straight from the raw examples. Returns marker -> unnormalized score.
inline std::map<std::string, double> brute_force_scores(const std::vector<Example>& train, ModelKind kind,
                                                        const FeatureConfig& config, const FeatureBundle& main,
                                                        const FeatureBundle& sub) {
    std::map<std::string, double> prior;
    for (const auto& ex : train) prior[ex.marker] += 1.0;

    std::map<std::string, double> out;
    for (const auto& [marker, n_t] : prior) {
        double score = n_t / static_cast<double>(train.size());
        for (auto c : config.classes()) {
            if (kind == ModelKind::Conjunctive) {
                // keys and per-marker counts over all (main, sub) pairs of this class
                std::set<std::pair<std::string, std::string>> keys;
                double total_t = 0.0;
                for (const auto& ex : train) {
                    for (const auto& vm : ex.main.bag(c)) {
                        for (const auto& vs : ex.sub.bag(c)) {
                            keys.insert({vm, vs});
                            if (ex.marker == marker) total_t += 1.0;
                        }
                    }
                }
                double m = keys.empty() ? 1.0 : static_cast<double>(keys.size());
                for (const auto& vm : main.bag(c)) {
                    for (const auto& vs : sub.bag(c)) {
                        if (!keys.count({vm, vs})) {
                            score *= 1.0 / m;
                            continue;
                        }
                        double f = 0.0;
                        for (const auto& ex : train) {
                            if (ex.marker != marker) continue;
                            for (const auto& a : ex.main.bag(c)) {
                                for (const auto& b : ex.sub.bag(c)) f += (a == vm && b == vs);
                            }
                        }
                        score *= (f + m * (1.0 / m)) / (total_t + m);
                    }
                }
            } else {
                for (int side = 0; side < 2; ++side) {
                    std::set<std::string> keys;
                    double total_t = 0.0;
                    for (const auto& ex : train) {
                        for (const auto& v : (side == 0 ? ex.main : ex.sub).bag(c)) {
                            keys.insert(v);
                            if (ex.marker == marker) total_t += 1.0;
                        }
                    }
                    double m = keys.empty() ? 1.0 : static_cast<double>(keys.size());
                    for (const auto& v : (side == 0 ? main : sub).bag(c)) {
                        if (!keys.count(v)) {
                            score *= 1.0 / m;
                            continue;
                        }
                        double f = 0.0;
                        for (const auto& ex : train) {
                            if (ex.marker != marker) continue;
                            for (const auto& w : (side == 0 ? ex.main : ex.sub).bag(c)) f += (w == v);
                        }
                        score *= (f + m * (1.0 / m)) / (total_t + m);
                    }
                }
            }
        }
        out[marker] = score;
    }
    return out;
}

/// Pearson chi-square from observed/expected cell counts.
inline double chi_square_by_cells(double a, double b, double c, double d) {
    const double n = a + b + c + d;
    const double rows[2] = {a + b, c + d};
    const double cols[2] = {a + c, b + d};
    const double cells[2][2] = {{a, b}, {c, d}};
    double stat = 0.0;
    for (int r = 0; r < 2; ++r) {
        for (int k = 0; k < 2; ++k) {
            double e = rows[r] * cols[k] / n;
            stat += (cells[r][k] - e) * (cells[r][k] - e) / e;
        }
    }
    return stat;
}

/// Bundle with the given class bags; `computed` covers every listed class.
inline FeatureBundle make_bundle(const std::map<FeatureClass, std::vector<std::string>>& values,
                                 const FeatureConfig& computed) {
    FeatureBundle b;
    b.values = values;
    b.computed = computed;
    return b;
}

}  // namespace tmark::testing

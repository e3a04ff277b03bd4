#pragma once

// Multiway decision tree over categorical attributes, grown greedily by information gain.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmark/error.hpp"

namespace tmark {

struct Record {
    std::vector<std::string> attributes;
    std::string label;
};

using LabelCounts = std::map<std::string, std::uint64_t>;

/// Most frequent label; ties go to the lexicographically smallest.
inline std::string majority_label(const LabelCounts& counts) {
    std::string best;
    std::uint64_t best_n = 0;
    for (const auto& [label, n] : counts) {
        if (n > best_n) {
            best_n = n;
            best = label;
        }
    }
    return best;
}

inline double entropy(const LabelCounts& counts) {
    std::uint64_t total = 0;
    for (const auto& [label, n] : counts) total += n;
    if (total == 0) return 0.0;
    double h = 0.0;
    for (const auto& [label, n] : counts) {
        if (n == 0) continue;
        double p = static_cast<double>(n) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

class DecisionTree {
public:
    struct Node {
        LabelCounts counts;                          ///< labels of the training records reaching this node
        std::optional<std::size_t> attribute;        ///< split attribute; nullopt for a leaf
        std::map<std::string, std::size_t> branches; ///< attribute value -> child node index

        bool operator==(const Node&) const = default;
    };

    /// Greedy top-down induction. A node becomes a leaf when its labels are pure, it
    /// holds fewer than `min_leaf` records, or no attribute has positive gain.
    static DecisionTree build(const std::vector<Record>& records, std::size_t min_leaf = 2) {
        if (records.empty()) throw ConfigError("cannot build a decision tree from zero records");
        if (min_leaf == 0) throw ConfigError("min_leaf must be positive");
        const std::size_t arity = records.front().attributes.size();
        for (const auto& r : records) {
            if (r.attributes.size() != arity) throw ConfigError("records must all have the same number of attributes");
        }
        DecisionTree tree;
        tree.arity_ = arity;
        std::vector<std::size_t> all(records.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        tree.grow(records, all, min_leaf);
        return tree;
    }

    /// Descends while a branch matches the record; answers with the majority label of
    /// the last node reached.
    std::string classify(const std::vector<std::string>& attributes) const {
        if (attributes.size() != arity_) {
            throw ConfigError("record has " + std::to_string(attributes.size()) + " attributes, tree expects " +
                              std::to_string(arity_));
        }
        std::size_t at = 0;
        while (nodes_[at].attribute) {
            const auto& node = nodes_[at];
            auto it = node.branches.find(attributes[*node.attribute]);
            if (it == node.branches.end()) break;
            at = it->second;
        }
        return majority_label(nodes_[at].counts);
    }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    std::size_t arity() const noexcept { return arity_; }

    std::size_t depth() const { return depth_from(0); }

    nlohmann::json to_json() const { return nlohmann::json{{"arity", arity_}, {"root", node_json(0)}}; }

    static DecisionTree from_json(const nlohmann::json& j) {
        try {
            DecisionTree tree;
            tree.arity_ = j.at("arity").get<std::size_t>();
            tree.read_node(j.at("root"));
            return tree;
        } catch (const nlohmann::json::exception& err) {
            throw ConfigError(std::string("malformed decision tree: ") + err.what());
        }
    }

    bool operator==(const DecisionTree&) const = default;

private:
    std::size_t grow(const std::vector<Record>& records, const std::vector<std::size_t>& subset, std::size_t min_leaf) {
        std::size_t index = nodes_.size();
        nodes_.emplace_back();
        for (auto i : subset) ++nodes_[index].counts[records[i].label];

        const LabelCounts counts = nodes_[index].counts;
        if (counts.size() <= 1 || subset.size() < min_leaf) return index;

        const double parent = entropy(counts);
        std::vector<double> gains(arity_, 0.0);
        std::optional<std::size_t> best;
        for (std::size_t a = 0; a < arity_; ++a) {
            std::map<std::string, LabelCounts> split;
            for (auto i : subset) ++split[records[i].attributes[a]][records[i].label];
            double remainder = 0.0;
            for (const auto& [value, part] : split) {
                std::uint64_t n = 0;
                for (const auto& [label, c] : part) n += c;
                remainder += static_cast<double>(n) / static_cast<double>(subset.size()) * entropy(part);
            }
            gains[a] = parent - remainder;
            if (!best || gains[a] > gains[*best]) best = a;
        }
        for (std::size_t a = 0; a < arity_; ++a) {
            if (gains[a] > gains[*best]) throw InvariantError("split attribute does not have maximal information gain");
        }
        // gains within rounding of zero are not informative
        if (gains[*best] <= 1e-12) return index;

        std::map<std::string, std::vector<std::size_t>> partition;
        for (auto i : subset) partition[records[i].attributes[*best]].push_back(i);
        nodes_[index].attribute = *best;
        for (const auto& [value, part] : partition) {
            std::size_t child = grow(records, part, min_leaf);
            nodes_[index].branches[value] = child;
        }
        return index;
    }

    std::size_t depth_from(std::size_t at) const {
        std::size_t deepest = 0;
        for (const auto& [value, child] : nodes_[at].branches) deepest = std::max(deepest, 1 + depth_from(child));
        return deepest;
    }

    nlohmann::json node_json(std::size_t at) const {
        const auto& node = nodes_[at];
        nlohmann::json j{{"counts", node.counts}};
        if (node.attribute) {
            j["attribute"] = *node.attribute;
            nlohmann::json branches = nlohmann::json::object();
            for (const auto& [value, child] : node.branches) branches[value] = node_json(child);
            j["branches"] = std::move(branches);
        }
        return j;
    }

    std::size_t read_node(const nlohmann::json& j) {
        std::size_t index = nodes_.size();
        nodes_.emplace_back();
        nodes_[index].counts = j.at("counts").get<LabelCounts>();
        if (j.contains("attribute")) {
            std::size_t attribute = j.at("attribute").get<std::size_t>();
            if (attribute >= arity_) throw ConfigError("decision tree split attribute out of range");
            nodes_[index].attribute = attribute;
            for (const auto& [value, child] : j.at("branches").items()) {
                std::size_t c = read_node(child);
                nodes_[index].branches[value] = c;
            }
        }
        return index;
    }

    std::size_t arity_ = 0;
    std::vector<Node> nodes_;
};

inline DecisionTree build_tree(const std::vector<Record>& records, std::size_t min_leaf = 2) {
    return DecisionTree::build(records, min_leaf);
}

inline std::string classify(const DecisionTree& tree, const std::vector<std::string>& attributes) {
    return tree.classify(attributes);
}

}  // namespace tmark

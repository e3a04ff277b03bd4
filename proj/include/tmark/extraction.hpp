#pragma once

// Main/subordinate clause pairs joined by a temporal marker.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmark/error.hpp"
#include "tmark/lemmatizer.hpp"
#include "tmark/rng.hpp"
#include "tmark/treebank.hpp"

namespace tmark {

/// Ordered, non-empty set of lowercase single-token markers.
class MarkerSet {
public:
    /// {after, before, while, when, as, once, until, since}
    static MarkerSet standard() { return MarkerSet({"after", "before", "while", "when", "as", "once", "until", "since"}); }

    explicit MarkerSet(std::vector<std::string> markers) {
        if (markers.empty()) throw ConfigError("marker set must be non-empty");
        for (auto& m : markers) {
            if (m.empty() || m.find_first_of(" \t") != std::string::npos) {
                throw ConfigError("marker '" + m + "' must be a single token");
            }
            if (m != to_lower(m)) throw ConfigError("marker '" + m + "' must be lowercase");
            if (std::find(markers_.begin(), markers_.end(), m) == markers_.end()) markers_.push_back(m);
        }
    }

    /// Comma-separated list, e.g. "after,before".
    static MarkerSet parse(std::string_view text) {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (start <= text.size()) {
            auto cut = text.find(',', start);
            auto piece = text.substr(start, cut == std::string_view::npos ? std::string_view::npos : cut - start);
            while (!piece.empty() && (piece.front() == ' ' || piece.front() == '\t')) piece.remove_prefix(1);
            while (!piece.empty() && (piece.back() == ' ' || piece.back() == '\t')) piece.remove_suffix(1);
            if (!piece.empty()) out.push_back(to_lower(piece));
            if (cut == std::string_view::npos) break;
            start = cut + 1;
        }
        return MarkerSet(std::move(out));
    }

    bool contains(std::string_view marker) const {
        return std::find(markers_.begin(), markers_.end(), marker) != markers_.end();
    }

    const std::vector<std::string>& markers() const noexcept { return markers_; }
    std::size_t size() const noexcept { return markers_.size(); }

    std::string to_string() const {
        std::string out;
        for (const auto& m : markers_) {
            if (!out.empty()) out += ',';
            out += m;
        }
        return out;
    }

    bool operator==(const MarkerSet&) const = default;

private:
    std::vector<std::string> markers_;
};

enum class Position { SubFirst, SubSecond };

inline std::string_view to_string(Position p) { return p == Position::SubFirst ? "sub_first" : "sub_second"; }

inline Position parse_position(std::string_view text) {
    if (text == "sub_first") return Position::SubFirst;
    if (text == "sub_second") return Position::SubSecond;
    throw ConfigError("unknown position '" + std::string(text) + "'");
}

struct ClausePair {
    ParseTree main;  ///< S_M with the temporal SBAR excised
    ParseTree sub;   ///< S_S, the clause inside the SBAR (marker outside it)
    std::string marker;
    Position position;
    std::string source_id;

    bool operator==(const ClausePair&) const = default;
};

struct ExtractOptions {
    /// Also accept SBARs without a -TMP tag whose first leaf is a marker.
    bool lenient = false;
};

namespace detail {

struct Located {
    const ParseTree* node;
    std::size_t first_leaf;
};

// Pre-order walk recording each node's first leaf index and its ancestor chain.
inline void walk_with_ancestors(const ParseTree& node, std::vector<const ParseTree*>& ancestors,
                                std::size_t& leaf_index,
                                const std::function<void(const ParseTree&, const std::vector<const ParseTree*>&,
                                                         std::size_t)>& visit) {
    visit(node, ancestors, leaf_index);
    if (node.is_leaf()) {
        ++leaf_index;
        return;
    }
    ancestors.push_back(&node);
    for (const auto& child : node.children()) walk_with_ancestors(child, ancestors, leaf_index, visit);
    ancestors.pop_back();
}

// Copy of `tree` without `target`; nodes left childless are dropped. Returns nullopt
// when the whole tree disappears.
inline std::optional<ParseTree> excise(const ParseTree& tree, const ParseTree* target) {
    if (&tree == target) return std::nullopt;
    if (tree.is_leaf()) return tree;
    std::vector<ParseTree> kept;
    for (const auto& child : tree.children()) {
        if (auto copy = excise(child, target)) kept.push_back(std::move(*copy));
    }
    if (kept.empty()) return std::nullopt;
    return ParseTree::node(tree.label(), std::move(kept));
}

// Index of the first leaf of `tree` that is not inside `skip`.
inline std::optional<std::size_t> first_leaf_outside(const ParseTree& tree, const ParseTree* skip, std::size_t& index) {
    if (&tree == skip) {
        index += tree.leaf_count();
        return std::nullopt;
    }
    if (tree.is_leaf()) return index++;
    for (const auto& child : tree.children()) {
        if (auto found = first_leaf_outside(child, skip, index)) return found;
    }
    return std::nullopt;
}

}  // namespace detail

/// Clause pairs for every temporal SBAR in `tree`, in pre-order of the SBARs.
///
/// An SBAR qualifies when it carries -TMP (or, leniently, starts with a marker),
/// contains a marker token before its S complement, and its nearest clausal
/// ancestor is an S reached without passing through an NP. The main clause is
/// that lowest S ancestor with the SBAR removed.
inline std::vector<ClausePair> extract_pairs(const ParseTree& tree, const MarkerSet& markers,
                                             const ExtractOptions& options = {}, std::string_view source_id = "") {
    std::vector<ClausePair> pairs;
    std::vector<const ParseTree*> ancestors;
    std::size_t leaf_index = 0;

    // first-leaf offsets of every node in the original sentence
    std::map<const ParseTree*, std::size_t> offsets;
    detail::walk_with_ancestors(tree, ancestors, leaf_index,
                                [&](const ParseTree& node, const std::vector<const ParseTree*>&, std::size_t at) {
                                    offsets[&node] = at;
                                });

    ancestors.clear();
    leaf_index = 0;
    detail::walk_with_ancestors(tree, ancestors, leaf_index, [&](const ParseTree& node,
                                                                 const std::vector<const ParseTree*>& up,
                                                                 std::size_t) {
        if (node.category() != "SBAR" || node.is_leaf()) return;

        const auto& kids = node.children();
        auto clause_it = std::find_if(kids.begin(), kids.end(), [](const ParseTree& c) { return c.category() == "S"; });
        if (clause_it == kids.end()) return;

        std::optional<std::string> marker;
        bool first_leaf_is_marker = false;
        bool first = true;
        for (auto it = kids.begin(); it != clause_it && !marker; ++it) {
            for (const ParseTree* leaf : it->leaves()) {
                std::string word = to_lower(*leaf->token());
                if (markers.contains(word)) {
                    marker = word;
                    first_leaf_is_marker = first;
                    break;
                }
                first = false;
            }
        }
        if (!marker) return;
        bool tagged = node.has_function_tag("TMP");
        if (!tagged && !(options.lenient && first_leaf_is_marker)) return;

        const ParseTree* main_node = nullptr;
        for (auto it = up.rbegin(); it != up.rend(); ++it) {
            auto cat = (*it)->category();
            if (cat == "NP") return;  // noun-attached
            if (cat == "S") {
                main_node = *it;
                break;
            }
        }
        if (!main_node) return;

        auto main_copy = detail::excise(*main_node, &node);
        if (!main_copy) return;

        std::size_t index = offsets.at(main_node);
        auto main_first = detail::first_leaf_outside(*main_node, &node, index);
        std::size_t sub_first = offsets.at(&*clause_it);
        Position position = (main_first && sub_first < *main_first) ? Position::SubFirst : Position::SubSecond;

        std::string id(source_id);
        id += '#';
        id += std::to_string(pairs.size());
        pairs.push_back(ClausePair{std::move(*main_copy), *clause_it, *marker, position, std::move(id)});
    });
    return pairs;
}

enum class Task { Interpretation, Fusion };

inline std::string_view to_string(Task t) { return t == Task::Interpretation ? "interpretation" : "fusion"; }

inline Task parse_task(std::string_view text) {
    if (text == "interpretation") return Task::Interpretation;
    if (text == "fusion") return Task::Fusion;
    throw ConfigError("unknown task '" + std::string(text) + "' (expected interpretation|fusion)");
}

/// Marker hidden; position available.
struct InterpretationInstance {
    std::string id;
    ParseTree main;
    ParseTree sub;
    Position position;
    std::string gold_marker;
};

enum class Role { AIsMain, BIsMain };

inline std::string_view to_string(Role r) { return r == Role::AIsMain ? "a_is_main" : "b_is_main"; }

inline Role parse_role(std::string_view text) {
    if (text == "a_is_main") return Role::AIsMain;
    if (text == "b_is_main") return Role::BIsMain;
    throw ConfigError("unknown role '" + std::string(text) + "'");
}

/// Two fragments in randomized order with the marker known; position is withheld.
struct FusionInstance {
    std::string id;
    ParseTree fragment_a;
    ParseTree fragment_b;
    std::string marker;
    Role gold;
};

using TestInstance = std::variant<InterpretationInstance, FusionInstance>;

/// Order of the fusion fragments depends only on (seed, pair id).
inline Role fusion_order(std::uint64_t seed, std::string_view id) {
    Rng rng(derive_seed(seed, id));
    return rng.below(2) == 0 ? Role::AIsMain : Role::BIsMain;
}

inline TestInstance make_test_instance(const ClausePair& pair, Task task, std::uint64_t seed = 0) {
    if (task == Task::Interpretation) {
        return InterpretationInstance{pair.source_id, pair.main, pair.sub, pair.position, pair.marker};
    }
    Role gold = fusion_order(seed, pair.source_id);
    if (gold == Role::AIsMain) return FusionInstance{pair.source_id, pair.main, pair.sub, pair.marker, gold};
    return FusionInstance{pair.source_id, pair.sub, pair.main, pair.marker, gold};
}

// Instance file: JSON lines {id, marker, position, main_tree, sub_tree}.

inline nlohmann::json to_json(const ClausePair& pair) {
    return nlohmann::json{{"id", pair.source_id},
                          {"marker", pair.marker},
                          {"position", std::string(to_string(pair.position))},
                          {"main_tree", serialize(pair.main)},
                          {"sub_tree", serialize(pair.sub)}};
}

inline ClausePair clause_pair_from_json(const nlohmann::json& j) {
    try {
        return ClausePair{parse_tree(j.at("main_tree").get<std::string>()), parse_tree(j.at("sub_tree").get<std::string>()),
                          j.at("marker").get<std::string>(), parse_position(j.at("position").get<std::string>()),
                          j.at("id").get<std::string>()};
    } catch (const nlohmann::json::exception& err) {
        throw ConfigError(std::string("malformed instance record: ") + err.what());
    } catch (const ParseError& err) {
        throw ConfigError(std::string("malformed tree in instance record: ") + err.what());
    }
}

inline void write_instances(std::ostream& out, const std::vector<ClausePair>& pairs) {
    for (const auto& pair : pairs) out << to_json(pair).dump() << '\n';
}

inline std::vector<ClausePair> read_instances(std::istream& in) {
    std::vector<ClausePair> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& err) {
            throw ConfigError("instance line " + std::to_string(line_no) + ": " + err.what());
        }
        out.push_back(clause_pair_from_json(j));
    }
    return out;
}

}  // namespace tmark

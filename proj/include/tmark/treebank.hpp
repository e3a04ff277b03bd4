#pragma once

// Penn-Treebank style bracketed parse trees.

#include <cctype>
#include <cstddef>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tmark/error.hpp"

namespace tmark {

/// Immutable labelled ordered tree. Preterminals carry the token; a node has a
/// token iff it has no children.
class ParseTree {
public:
    static ParseTree leaf(std::string label, std::string token) {
        if (label.empty()) throw ConfigError("parse tree label must be non-empty");
        ParseTree tree;
        tree.label_ = std::move(label);
        tree.token_ = std::move(token);
        return tree;
    }

    static ParseTree node(std::string label, std::vector<ParseTree> children) {
        if (label.empty()) throw ConfigError("parse tree label must be non-empty");
        if (children.empty()) throw ConfigError("interior node '" + label + "' needs children");
        ParseTree tree;
        tree.label_ = std::move(label);
        tree.children_ = std::move(children);
        return tree;
    }

    const std::string& label() const noexcept { return label_; }
    const std::vector<ParseTree>& children() const noexcept { return children_; }
    const std::optional<std::string>& token() const noexcept { return token_; }
    bool is_leaf() const noexcept { return token_.has_value(); }

    /// Syntactic category: the label up to the first '-' ("SBAR-TMP" -> "SBAR").
    /// Labels beginning with '-' ("-NONE-", "-LRB-") are their own category.
    std::string_view category() const noexcept {
        std::string_view label = label_;
        if (label.empty() || label.front() == '-') return label;
        auto cut = label.find_first_of("-=");
        return cut == std::string_view::npos ? label : label.substr(0, cut);
    }

    /// Function tag(s) after the category ("SBAR-TMP" -> "TMP"), empty if none.
    std::string_view function_tag() const noexcept {
        std::string_view label = label_;
        std::string_view cat = category();
        if (cat.size() >= label.size()) return {};
        return label.substr(cat.size() + 1);
    }

    bool has_function_tag(std::string_view tag) const noexcept {
        std::string_view rest = function_tag();
        while (!rest.empty()) {
            auto cut = rest.find_first_of("-=");
            if (rest.substr(0, cut) == tag) return true;
            if (cut == std::string_view::npos) break;
            rest.remove_prefix(cut + 1);
        }
        return false;
    }

    std::vector<std::string> yield() const {
        std::vector<std::string> tokens;
        collect_yield(tokens);
        return tokens;
    }

    /// Preterminal nodes in left-to-right order.
    std::vector<const ParseTree*> leaves() const {
        std::vector<const ParseTree*> out;
        collect_leaves(out);
        return out;
    }

    std::size_t leaf_count() const {
        if (is_leaf()) return 1;
        std::size_t n = 0;
        for (const auto& child : children_) n += child.leaf_count();
        return n;
    }

    bool operator==(const ParseTree&) const = default;

private:
    ParseTree() = default;

    void collect_yield(std::vector<std::string>& out) const {
        if (token_) {
            out.push_back(*token_);
            return;
        }
        for (const auto& child : children_) child.collect_yield(out);
    }

    void collect_leaves(std::vector<const ParseTree*>& out) const {
        if (token_) {
            out.push_back(this);
            return;
        }
        for (const auto& child : children_) child.collect_leaves(out);
    }

    std::string label_;
    std::vector<ParseTree> children_;
    std::optional<std::string> token_;
};

namespace detail {

class BracketParser {
public:
    explicit BracketParser(std::string_view text) : text_(text) {}

    ParseTree parse_root() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("empty input", pos_);
        ParseTree root = parse_node();
        skip_space();
        if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
        return root;
    }

private:
    static bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

    void skip_space() {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    }

    std::string read_atom() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '(' && text_[pos_] != ')') ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    void expect_close() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unbalanced brackets: missing ')'", pos_);
        if (text_[pos_] != ')') throw ParseError("expected ')'", pos_);
        ++pos_;
    }

    ParseTree parse_node() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unbalanced brackets: missing ')'", pos_);
        if (text_[pos_] != '(') throw ParseError("expected '('", pos_);
        ++pos_;
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unbalanced brackets: missing ')'", pos_);
        std::string label = read_atom();
        if (label.empty()) throw ParseError("expected a label after '('", pos_);
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unbalanced brackets: missing ')'", pos_);
        if (text_[pos_] == ')') throw ParseError("node '" + label + "' has neither token nor children", pos_);

        if (text_[pos_] != '(') {
            std::string token = read_atom();
            expect_close();
            return ParseTree::leaf(std::move(label), std::move(token));
        }

        std::vector<ParseTree> children;
        while (true) {
            skip_space();
            if (pos_ >= text_.size()) throw ParseError("unbalanced brackets: missing ')'", pos_);
            if (text_[pos_] == ')') {
                ++pos_;
                break;
            }
            if (text_[pos_] != '(') throw ParseError("bare token mixed with subtrees", pos_);
            children.push_back(parse_node());
        }
        return ParseTree::node(std::move(label), std::move(children));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

inline void serialize_into(const ParseTree& tree, std::string& out) {
    out += '(';
    out += tree.label();
    if (tree.is_leaf()) {
        out += ' ';
        out += *tree.token();
    } else {
        for (const auto& child : tree.children()) {
            out += ' ';
            serialize_into(child, out);
        }
    }
    out += ')';
}

inline void find_into(const ParseTree& tree, const std::function<bool(const ParseTree&)>& pred,
                      std::vector<const ParseTree*>& out) {
    if (pred(tree)) out.push_back(&tree);
    for (const auto& child : tree.children()) find_into(child, pred, out);
}

}  // namespace detail

/// Parses one bracketed tree. Whitespace-insensitive; throws ParseError with the byte offset.
inline ParseTree parse_tree(std::string_view text) { return detail::BracketParser(text).parse_root(); }

/// Canonical single-space bracketing.
inline std::string serialize(const ParseTree& tree) {
    std::string out;
    detail::serialize_into(tree, out);
    return out;
}

/// Pre-order list of nodes satisfying `pred`. Pointers stay valid while `tree` lives.
inline std::vector<const ParseTree*> find_nodes(const ParseTree& tree,
                                                const std::function<bool(const ParseTree&)>& pred) {
    std::vector<const ParseTree*> out;
    detail::find_into(tree, pred, out);
    return out;
}

inline std::function<bool(const ParseTree&)> label_is(std::string label) {
    return [label = std::move(label)](const ParseTree& node) { return node.label() == label; };
}

inline std::function<bool(const ParseTree&)> category_is(std::string category) {
    return [category = std::move(category)](const ParseTree& node) { return node.category() == category; };
}

/// One parsed corpus sentence together with its 1-based starting line.
struct CorpusEntry {
    std::size_t line;
    ParseTree tree;
};

/// Reads a corpus: one tree per line, blank lines ignored. With `multiline`,
/// consecutive lines are joined until the brackets balance.
inline std::vector<CorpusEntry> read_corpus(std::istream& in, bool multiline = false) {
    std::vector<CorpusEntry> out;
    std::string line;
    std::string pending;
    std::size_t line_no = 0;
    std::size_t start_line = 0;
    long depth = 0;

    auto flush = [&]() {
        try {
            out.push_back({start_line, parse_tree(pending)});
        } catch (const ParseError& err) {
            throw ParseError("line " + std::to_string(start_line) + ": " + err.what(), err.offset());
        }
        pending.clear();
        depth = 0;
    };

    while (std::getline(in, line)) {
        ++line_no;
        bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
        if (!multiline) {
            if (blank) continue;
            pending = line;
            start_line = line_no;
            flush();
            continue;
        }
        if (blank && pending.empty()) continue;
        if (pending.empty()) start_line = line_no;
        for (char c : line) depth += c == '(' ? 1 : c == ')' ? -1 : 0;
        pending += line;
        pending += ' ';
        if (depth <= 0) flush();
    }
    if (!pending.empty() && pending.find_first_not_of(" \t\r") != std::string::npos) flush();
    return out;
}

}  // namespace tmark

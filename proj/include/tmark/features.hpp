#pragma once

// Feature classes computed over a single clause tree.

#include <array>
#include <bitset>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tmark/error.hpp"
#include "tmark/extraction.hpp"
#include "tmark/lemmatizer.hpp"
#include "tmark/treebank.hpp"

namespace tmark {

// ---------------------------------------------------------------------------
// Feature classes and configurations

/// Canonical (alphabetical by symbol) order. `W` is the word-token pseudo-class
/// used by the word-based model; it is never part of a feature search.
enum class FeatureClass : std::uint8_t { A, N, NW, P, R, S, T, V, VL, VW, W };

inline constexpr std::size_t kFeatureClassCount = 11;

/// The ten linguistic classes, in canonical order.
inline constexpr std::array<FeatureClass, 10> kLinguisticClasses = {
    FeatureClass::A, FeatureClass::N, FeatureClass::NW, FeatureClass::P, FeatureClass::R,
    FeatureClass::S, FeatureClass::T, FeatureClass::V, FeatureClass::VL, FeatureClass::VW};

inline std::string_view symbol(FeatureClass c) {
    static constexpr std::array<std::string_view, kFeatureClassCount> names = {"A", "N",  "NW", "P",  "R", "S",
                                                                               "T", "V", "VL", "VW", "W"};
    return names[static_cast<std::size_t>(c)];
}

inline FeatureClass feature_class_from_symbol(std::string_view sym) {
    for (std::size_t i = 0; i < kFeatureClassCount; ++i) {
        auto c = static_cast<FeatureClass>(i);
        if (symbol(c) == sym) return c;
    }
    throw ConfigError("unknown feature class '" + std::string(sym) + "'");
}

/// A non-empty set of feature classes, written compactly ("SV", "NPRSTV", "PSVVLVW").
class FeatureConfig {
public:
    FeatureConfig() = default;

    FeatureConfig(std::initializer_list<FeatureClass> classes) {
        for (auto c : classes) add(c);
    }

    static FeatureConfig all_linguistic() {
        FeatureConfig config;
        for (auto c : kLinguisticClasses) config.add(c);
        return config;
    }

    static FeatureConfig words() { return FeatureConfig{FeatureClass::W}; }

    /// Parses e.g. "SV", "NPRSTV", "V_WPS". Throws ConfigError on unknown symbols or an empty set.
    static FeatureConfig parse(std::string_view text) {
        FeatureConfig config;
        std::size_t i = 0;
        while (i < text.size()) {
            char c = static_cast<char>(std::toupper(static_cast<unsigned char>(text[i])));
            if (c == '_' || c == ' ' || c == ',') {
                ++i;
                continue;
            }
            std::string sym(1, c);
            std::size_t next = i + 1;
            if (next < text.size() && text[next] == '_') ++next;
            if ((c == 'V' || c == 'N') && next < text.size()) {
                char d = static_cast<char>(std::toupper(static_cast<unsigned char>(text[next])));
                if (d == 'W' || (c == 'V' && d == 'L')) {
                    sym += d;
                    i = next + 1;
                    config.add(feature_class_from_symbol(sym));
                    continue;
                }
            }
            config.add(feature_class_from_symbol(sym));
            i += 1;
        }
        if (config.empty()) throw ConfigError("feature configuration must select at least one class");
        return config;
    }

    void add(FeatureClass c) { bits_.set(static_cast<std::size_t>(c)); }
    void remove(FeatureClass c) { bits_.reset(static_cast<std::size_t>(c)); }
    bool contains(FeatureClass c) const { return bits_.test(static_cast<std::size_t>(c)); }
    bool empty() const { return bits_.none(); }
    std::size_t size() const { return bits_.count(); }

    bool subset_of(const FeatureConfig& other) const { return (bits_ & ~other.bits_).none(); }

    std::vector<FeatureClass> classes() const {
        std::vector<FeatureClass> out;
        for (std::size_t i = 0; i < kFeatureClassCount; ++i) {
            if (bits_.test(i)) out.push_back(static_cast<FeatureClass>(i));
        }
        return out;
    }

    std::string to_string() const {
        std::string out;
        for (auto c : classes()) out += symbol(c);
        return out;
    }

    bool operator==(const FeatureConfig&) const = default;

private:
    std::bitset<kFeatureClassCount> bits_;
};

// ---------------------------------------------------------------------------
// Lexicons and name rules

/// lemma -> ordered class list; the first class is the prime sense.
class Lexicon {
public:
    Lexicon() = default;
    explicit Lexicon(std::string name) : name_(std::move(name)) {}

    /// TSV: `lemma<TAB>class[,class...]`; '#' comments and blank lines ignored.
    static Lexicon load(std::istream& in, std::string name) {
        Lexicon lex(std::move(name));
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            auto tab = line.find('\t');
            if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
                throw ConfigError(lex.name_ + " line " + std::to_string(line_no) + ": expected lemma<TAB>class[,class...]");
            }
            std::vector<std::string> classes;
            std::stringstream rest(line.substr(tab + 1));
            std::string cls;
            while (std::getline(rest, cls, ',')) {
                if (!cls.empty()) classes.push_back(cls);
            }
            if (classes.empty()) throw ConfigError(lex.name_ + " line " + std::to_string(line_no) + ": empty class list");
            lex.entries_[to_lower(line.substr(0, tab))] = std::move(classes);
        }
        return lex;
    }

    static Lexicon load_file(const std::filesystem::path& path, std::string name) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read lexicon " + path.string());
        return load(in, std::move(name));
    }

    const std::vector<std::string>* lookup(std::string_view lemma) const {
        auto it = entries_.find(to_lower(lemma));
        return it == entries_.end() ? nullptr : &it->second;
    }

    /// Prime-sense class, or the lemma itself when the lexicon has no entry.
    std::string classify(std::string_view lemma) const {
        if (const auto* classes = lookup(lemma)) return classes->front();
        return std::string(lemma);
    }

    const std::string& name() const noexcept { return name_; }
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::string name_;
    std::map<std::string, std::vector<std::string>> entries_;
};

/// Small rule set mapping proper-name sequences to person / organisation / location.
class NameRules {
public:
    static const NameRules& standard() {
        static const NameRules rules = [] {
            std::istringstream in{std::string(kDefaultRules)};
            return load(in);
        }();
        return rules;
    }

    /// TSV lines `kind<TAB>value`, kind in {org_suffix, person_title, person_first, location, location_word}.
    static NameRules load(std::istream& in) {
        NameRules rules;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            auto tab = line.find('\t');
            if (tab == std::string::npos) throw ConfigError("name rules line " + std::to_string(line_no) + ": expected kind<TAB>value");
            std::string kind = line.substr(0, tab);
            std::string value = normalize(line.substr(tab + 1));
            if (kind == "org_suffix") rules.org_suffixes_.insert(value);
            else if (kind == "person_title") rules.person_titles_.insert(value);
            else if (kind == "person_first") rules.person_first_.insert(value);
            else if (kind == "location") rules.locations_.insert(value);
            else if (kind == "location_word") rules.location_words_.insert(value);
            else throw ConfigError("name rules line " + std::to_string(line_no) + ": unknown kind '" + kind + "'");
        }
        return rules;
    }

    /// Category for a sequence of proper-noun tokens, if any rule fires.
    std::optional<std::string> classify(const std::vector<std::string>& tokens) const {
        if (tokens.empty()) return std::nullopt;
        std::vector<std::string> norm;
        for (const auto& t : tokens) norm.push_back(normalize(t));
        std::string joined;
        for (const auto& t : norm) joined += (joined.empty() ? "" : " ") + t;

        if (tokens.size() > 1 && org_suffixes_.count(norm.back())) return "organisation";
        if (person_titles_.count(norm.front())) return "person";
        if (locations_.count(joined)) return "location";
        for (std::size_t i = 1; i + 1 < tokens.size(); ++i) {
            if (is_initial(tokens[i])) return "person";
        }
        if (tokens.size() > 1 && person_first_.count(norm.front())) return "person";
        for (const auto& t : norm) {
            if (location_words_.count(t)) return "location";
        }
        return std::nullopt;
    }

private:
    static constexpr std::string_view kDefaultRules = R"(org_suffix	inc
org_suffix	corp
org_suffix	co
org_suffix	ltd
org_suffix	plc
org_suffix	llc
org_suffix	group
org_suffix	bank
org_suffix	laboratories
org_suffix	association
org_suffix	industries
person_title	mr
person_title	mrs
person_title	ms
person_title	dr
person_title	sen
person_title	gov
person_first	john
person_first	jose
person_first	mary
person_first	robert
person_first	james
person_first	susan
person_first	david
person_first	linda
location	new england
location	new york
location	west virginia
location	los angeles
location	san francisco
location	hong kong
location	washington
location	london
location	tokyo
location_word	county
location_word	river
location_word	city
)";

    static std::string normalize(std::string_view token) {
        std::string out = to_lower(token);
        while (!out.empty() && out.back() == '.') out.pop_back();
        return out;
    }

    static bool is_initial(std::string_view token) {
        return token.size() == 2 && std::isupper(static_cast<unsigned char>(token[0])) && token[1] == '.';
    }

    std::set<std::string> org_suffixes_, person_titles_, person_first_, locations_, location_words_;
};

/// The lexical resources consulted by the feature extractors. All optional.
struct Lexicons {
    Lexicon wordnet_verbs{"wordnet_verbs"};
    Lexicon levin{"levin"};
    Lexicon wordnet_nouns{"wordnet_nouns"};
    NameRules names = NameRules::standard();

    /// Loads wordnet_verbs.tsv, levin.tsv, wordnet_nouns.tsv and ner_rules.tsv from `dir`
    /// when present; missing files leave the corresponding resource empty/default.
    static Lexicons load_dir(const std::filesystem::path& dir) {
        if (!std::filesystem::is_directory(dir)) throw ConfigError("lexicon directory not found: " + dir.string());
        Lexicons lex;
        auto maybe = [&](const char* file, Lexicon& slot, const char* name) {
            auto path = dir / file;
            if (std::filesystem::exists(path)) slot = Lexicon::load_file(path, name);
        };
        maybe("wordnet_verbs.tsv", lex.wordnet_verbs, "wordnet_verbs");
        maybe("levin.tsv", lex.levin, "levin");
        maybe("wordnet_nouns.tsv", lex.wordnet_nouns, "wordnet_nouns");
        if (auto path = dir / "ner_rules.tsv"; std::filesystem::exists(path)) {
            std::ifstream in(path);
            lex.names = NameRules::load(in);
        }
        return lex;
    }
};

// ---------------------------------------------------------------------------
// Temporal signature (T)

enum class Finiteness { Past, Present, Infinitive, IngForm, EnForm };
enum class Modality { None, Future, Ability, Possibility, Obligation };
enum class Aspect { Imperfective, Perfective, Progressive };
enum class Voice { Active, Passive };
enum class Polarity { Affirmative, Negative };

struct TemporalSignature {
    Finiteness finiteness = Finiteness::Present;
    Modality modality = Modality::None;
    Aspect aspect = Aspect::Imperfective;
    Voice voice = Voice::Active;
    Polarity polarity = Polarity::Affirmative;

    bool operator==(const TemporalSignature&) const = default;

    /// "present,future,imperfective,active,affirmative"; an absent modal is written "none".
    std::string to_string() const {
        return std::string(kFiniteness[static_cast<int>(finiteness)]) + ',' +
               std::string(kModality[static_cast<int>(modality)]) + ',' + std::string(kAspect[static_cast<int>(aspect)]) +
               ',' + std::string(kVoice[static_cast<int>(voice)]) + ',' + std::string(kPolarity[static_cast<int>(polarity)]);
    }

    static TemporalSignature parse(std::string_view text) {
        std::vector<std::string> parts;
        std::stringstream in{std::string(text)};
        std::string part;
        while (std::getline(in, part, ',')) parts.push_back(part);
        if (parts.size() != 5) throw ConfigError("temporal signature needs five fields: '" + std::string(text) + "'");
        TemporalSignature sig;
        sig.finiteness = static_cast<Finiteness>(index_of(kFiniteness, parts[0]));
        sig.modality = static_cast<Modality>(index_of(kModality, parts[1]));
        sig.aspect = static_cast<Aspect>(index_of(kAspect, parts[2]));
        sig.voice = static_cast<Voice>(index_of(kVoice, parts[3]));
        sig.polarity = static_cast<Polarity>(index_of(kPolarity, parts[4]));
        return sig;
    }

    static constexpr std::array<std::string_view, 5> kFiniteness = {"past", "present", "infinitive", "ing_form", "en_form"};
    static constexpr std::array<std::string_view, 5> kModality = {"none", "future", "ability", "possibility", "obligation"};
    static constexpr std::array<std::string_view, 3> kAspect = {"imperfective", "perfective", "progressive"};
    static constexpr std::array<std::string_view, 2> kVoice = {"active", "passive"};
    static constexpr std::array<std::string_view, 2> kPolarity = {"affirmative", "negative"};

private:
    template <std::size_t N>
    static int index_of(const std::array<std::string_view, N>& names, std::string_view value) {
        for (std::size_t i = 0; i < N; ++i) {
            if (names[i] == value) return static_cast<int>(i);
        }
        throw ConfigError("unknown temporal signature value '" + std::string(value) + "'");
    }
};

/// One verb group: auxiliaries and modals followed by the head verb.
struct VerbalComplex {
    std::vector<const ParseTree*> verbs;  ///< preterminals, head last
    bool negated = false;
    TemporalSignature signature;

    const ParseTree& head() const { return *verbs.back(); }
};

namespace detail {

inline bool is_verb_tag(std::string_view tag) { return tag.starts_with("VB") || tag == "MD" || tag == "AUX" || tag == "AUXG"; }

inline bool is_adverb_tag(std::string_view tag) { return tag == "RB" || tag == "RBR" || tag == "RBS"; }

inline bool is_negation(std::string_view word) {
    std::string w = to_lower(word);
    return w == "not" || w == "n't" || w == "never";
}

inline std::string verb_lemma(const ParseTree& leaf) { return lemmatize(*leaf.token(), leaf.category()); }

// be/have/do/get may head a verb group or act as auxiliaries before another verb.
inline bool auxiliary_capable(const ParseTree& leaf) {
    auto tag = leaf.category();
    if (tag == "MD" || tag == "AUX" || tag == "AUXG" || tag == "TO") return true;
    auto lemma = verb_lemma(leaf);
    return lemma == "be" || lemma == "have" || lemma == "do" || lemma == "get";
}

inline Finiteness finiteness_of(const ParseTree& first) {
    auto tag = first.category();
    std::string word = to_lower(*first.token());
    if (tag == "TO") return Finiteness::Infinitive;
    if (tag == "MD") {
        return (word == "could" || word == "would" || word == "might" || word == "'d") ? Finiteness::Past
                                                                                       : Finiteness::Present;
    }
    if (tag == "AUX" || tag == "AUXG") {
        if (word == "was" || word == "were" || word == "had" || word == "did" || word == "'d") return Finiteness::Past;
        if (word == "be") return Finiteness::Infinitive;
        if (word == "being" || word == "having" || word == "doing") return Finiteness::IngForm;
        if (word == "been") return Finiteness::EnForm;
        return Finiteness::Present;
    }
    if (tag == "VBD") return Finiteness::Past;
    if (tag == "VBZ" || tag == "VBP") return Finiteness::Present;
    if (tag == "VBG") return Finiteness::IngForm;
    if (tag == "VBN") return Finiteness::EnForm;
    return Finiteness::Infinitive;  // VB
}

inline Modality modality_of(std::string_view modal) {
    std::string m = lemmatize(modal, "MD");
    if (m == "will" || m == "shall" || m == "would" || m == "'ll") return Modality::Future;
    if (m == "can" || m == "could") return Modality::Ability;
    if (m == "may" || m == "might") return Modality::Possibility;
    if (m == "must" || m == "should" || m == "ought" || m == "need") return Modality::Obligation;
    return Modality::None;
}

inline bool is_past_participle(const ParseTree& leaf) {
    return leaf.category() == "VBN" || to_lower(*leaf.token()) == "been";
}

inline TemporalSignature classify_complex(const std::vector<const ParseTree*>& verbs, bool negated) {
    TemporalSignature sig;
    sig.finiteness = finiteness_of(*verbs.front());
    for (const auto* v : verbs) {
        if (v->category() == "MD") {
            sig.modality = modality_of(*v->token());
            break;
        }
    }
    const ParseTree& head = *verbs.back();
    const ParseTree* before_head = verbs.size() > 1 ? verbs[verbs.size() - 2] : nullptr;

    if (before_head && head.category() == "VBG" && verb_lemma(*before_head) == "be") {
        sig.aspect = Aspect::Progressive;
    } else {
        for (std::size_t i = 0; i + 1 < verbs.size(); ++i) {
            if (verb_lemma(*verbs[i]) == "have" && is_past_participle(*verbs[i + 1])) {
                sig.aspect = Aspect::Perfective;
                break;
            }
        }
    }
    if (before_head && head.category() == "VBN") {
        auto aux = verb_lemma(*before_head);
        if (aux == "be" || aux == "get") sig.voice = Voice::Passive;
    }
    sig.polarity = negated ? Polarity::Negative : Polarity::Affirmative;
    return sig;
}

}  // namespace detail

/// Verb groups in `clause`, left to right.
///
/// Pattern: [TO] (MD)? (have)? (be|get)? (do)? head, with adverbs allowed between
/// members. A be/have/do/get/modal form continues the group only when another verb
/// follows it; any other verb closes it as the head.
inline std::vector<VerbalComplex> verbal_complexes(const ParseTree& clause) {
    std::vector<const ParseTree*> leaves = clause.leaves();
    std::vector<VerbalComplex> out;
    std::size_t i = 0;
    const std::size_t n = leaves.size();

    auto next_non_adverb = [&](std::size_t from) {
        while (from < n && detail::is_adverb_tag(leaves[from]->category())) ++from;
        return from;
    };

    while (i < n) {
        auto tag = leaves[i]->category();
        bool starts = detail::is_verb_tag(tag);
        if (tag == "TO") {
            std::size_t k = next_non_adverb(i + 1);
            starts = k < n && detail::is_verb_tag(leaves[k]->category());
        }
        if (!starts) {
            ++i;
            continue;
        }

        VerbalComplex group;
        for (std::size_t back = i; back > 0 && detail::is_adverb_tag(leaves[back - 1]->category()); --back) {
            if (detail::is_negation(*leaves[back - 1]->token())) group.negated = true;
        }

        std::size_t j = i;
        while (j < n) {
            const ParseTree& leaf = *leaves[j];
            auto t = leaf.category();
            if (detail::is_adverb_tag(t)) {
                std::size_t k = next_non_adverb(j);
                if (k >= n || !detail::is_verb_tag(leaves[k]->category())) break;
                for (std::size_t r = j; r < k; ++r) {
                    if (detail::is_negation(*leaves[r]->token())) group.negated = true;
                }
                j = k;
                continue;
            }
            if (!(detail::is_verb_tag(t) || (t == "TO" && group.verbs.empty()))) break;
            if (!group.verbs.empty() && !detail::auxiliary_capable(*group.verbs.back())) break;
            group.verbs.push_back(&leaf);
            ++j;
        }
        if (group.verbs.size() == 1 && group.verbs.front()->category() == "TO") {
            ++i;
            continue;
        }
        // A trailing adverb run that didn't lead to a verb may still negate: "did not".
        for (std::size_t r = j; r < n && detail::is_adverb_tag(leaves[r]->category()); ++r) {
            if (detail::is_negation(*leaves[r]->token())) group.negated = true;
        }
        // TO only introduces the group; it never heads or classifies it beyond finiteness.
        group.signature = detail::classify_complex(group.verbs, group.negated);
        out.push_back(std::move(group));
        i = j;
    }
    return out;
}

/// One signature per verb group.
inline std::vector<TemporalSignature> temporal_signature(const ParseTree& clause) {
    std::vector<TemporalSignature> out;
    for (const auto& group : verbal_complexes(clause)) out.push_back(group.signature);
    return out;
}

// ---------------------------------------------------------------------------
// Verbs (V, V_W, V_L)

struct VerbFeatures {
    std::vector<std::string> verbs;
    std::vector<std::string> wordnet_classes;
    std::vector<std::string> levin_classes;
};

/// Lemmatized head verbs (auxiliaries and bare modals excluded) and their prime-sense classes.
inline VerbFeatures verb_features(const ParseTree& clause, const Lexicon& wordnet, const Lexicon& levin) {
    VerbFeatures out;
    for (const auto& group : verbal_complexes(clause)) {
        const ParseTree& head = group.head();
        if (head.category() == "MD" || head.category() == "TO") continue;
        std::string lemma = detail::verb_lemma(head);
        out.wordnet_classes.push_back(wordnet.classify(lemma));
        out.levin_classes.push_back(levin.classify(lemma));
        out.verbs.push_back(std::move(lemma));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Nouns (N, N_W) and adjectives (A)

struct NounFeatures {
    std::vector<std::string> nouns;
    std::vector<std::string> wordnet_classes;
};

namespace detail {

inline bool is_noun_tag(std::string_view tag) { return tag.starts_with("NN"); }
inline bool is_proper_tag(std::string_view tag) { return tag == "NNP" || tag == "NNPS"; }

}  // namespace detail

/// Compound heads (rightmost noun among an NP's own preterminals), with proper-name
/// sequences replaced by person/organisation/location when a name rule fires.
inline NounFeatures noun_features(const ParseTree& clause, const Lexicon& wordnet_nouns, const NameRules& names) {
    NounFeatures out;
    for (const ParseTree* np : find_nodes(clause, category_is("NP"))) {
        const auto& kids = np->children();
        std::optional<std::size_t> head;
        for (std::size_t k = kids.size(); k-- > 0;) {
            if (kids[k].is_leaf() && detail::is_noun_tag(kids[k].category())) {
                head = k;
                break;
            }
        }
        if (np->is_leaf() || !head) continue;

        const ParseTree& noun = kids[*head];
        std::string value;
        if (detail::is_proper_tag(noun.category())) {
            std::size_t first = *head;
            while (first > 0 && kids[first - 1].is_leaf() && detail::is_proper_tag(kids[first - 1].category())) --first;
            std::vector<std::string> run;
            for (std::size_t k = first; k <= *head; ++k) run.push_back(*kids[k].token());
            if (auto category = names.classify(run)) value = *category;
        }
        if (value.empty()) value = lemmatize(*noun.token(), noun.category());
        out.wordnet_classes.push_back(wordnet_nouns.classify(value));
        out.nouns.push_back(std::move(value));
    }
    return out;
}

inline std::vector<std::string> adjective_features(const ParseTree& clause) {
    std::vector<std::string> out;
    for (const ParseTree* leaf : clause.leaves()) {
        auto tag = leaf->category();
        if (tag == "JJ" || tag == "JJR" || tag == "JJS") out.push_back(lemmatize(*leaf->token(), tag));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Syntactic signature (S)

struct SyntacticSignature {
    std::size_t np = 0, vp = 0, adjp = 0, advp = 0, pp = 0;

    bool operator==(const SyntacticSignature&) const = default;

    std::string to_string() const {
        return "NP:" + std::to_string(np) + " VP:" + std::to_string(vp) + " ADJP:" + std::to_string(adjp) +
               " ADVP:" + std::to_string(advp) + " PP:" + std::to_string(pp);
    }

    static SyntacticSignature parse(std::string_view text) {
        SyntacticSignature sig;
        std::stringstream in{std::string(text)};
        std::string field;
        const std::array<std::pair<std::string_view, std::size_t SyntacticSignature::*>, 5> order = {
            {{"NP", &SyntacticSignature::np},
             {"VP", &SyntacticSignature::vp},
             {"ADJP", &SyntacticSignature::adjp},
             {"ADVP", &SyntacticSignature::advp},
             {"PP", &SyntacticSignature::pp}}};
        for (const auto& [name, member] : order) {
            if (!(in >> field)) throw ConfigError("syntactic signature too short: '" + std::string(text) + "'");
            auto colon = field.find(':');
            if (colon == std::string::npos || field.substr(0, colon) != name) {
                throw ConfigError("malformed syntactic signature field '" + field + "'");
            }
            try {
                sig.*member = std::stoul(field.substr(colon + 1));
            } catch (const std::exception&) {
                throw ConfigError("malformed syntactic signature count '" + field + "'");
            }
        }
        if (in >> field) throw ConfigError("trailing syntactic signature field '" + field + "'");
        return sig;
    }
};

/// A VP headed by an auxiliary (AUX, or a be/have/do form) that takes a VP
/// complement only carries tense/voice; it is not counted as a phrase of its own.
inline bool is_auxiliary_shell(const ParseTree& vp) {
    if (vp.category() != "VP" || vp.is_leaf()) return false;
    const ParseTree* first_verb = nullptr;
    bool has_vp_child = false;
    for (const auto& child : vp.children()) {
        if (!first_verb && child.is_leaf() && detail::is_verb_tag(child.category())) first_verb = &child;
        if (child.category() == "VP") has_vp_child = true;
    }
    if (!first_verb || !has_vp_child || first_verb->category() == "MD") return false;
    if (first_verb->category() == "AUX" || first_verb->category() == "AUXG") return true;
    auto lemma = detail::verb_lemma(*first_verb);
    return lemma == "be" || lemma == "have" || lemma == "do";
}

/// Counts of NP/VP/ADJP/ADVP/PP nodes below the clause root (function tags ignored).
inline SyntacticSignature syntactic_signature(const ParseTree& clause) {
    SyntacticSignature sig;
    std::function<void(const ParseTree&)> visit = [&](const ParseTree& node) {
        auto cat = node.category();
        if (cat == "NP") ++sig.np;
        else if (cat == "VP" && !is_auxiliary_shell(node)) ++sig.vp;
        else if (cat == "ADJP") ++sig.adjp;
        else if (cat == "ADVP") ++sig.advp;
        else if (cat == "PP") ++sig.pp;
        for (const auto& child : node.children()) visit(child);
    };
    for (const auto& child : clause.children()) visit(child);
    return sig;
}

// ---------------------------------------------------------------------------
// Argument signature (R)

struct ArgumentSignature {
    bool subj = false, obj = false, pp = false, advp = false;

    bool operator==(const ArgumentSignature&) const = default;

    /// "[SUBJ,OBJ]"; "[]" when nothing is present.
    std::string to_string() const {
        std::string out = "[";
        auto add = [&](bool on, const char* name) {
            if (!on) return;
            if (out.size() > 1) out += ',';
            out += name;
        };
        add(subj, "SUBJ");
        add(obj, "OBJ");
        add(pp, "PP");
        add(advp, "ADVP");
        return out + "]";
    }

    static ArgumentSignature parse(std::string_view text) {
        if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
            throw ConfigError("malformed argument signature '" + std::string(text) + "'");
        }
        ArgumentSignature sig;
        std::stringstream in{std::string(text.substr(1, text.size() - 2))};
        std::string item;
        while (std::getline(in, item, ',')) {
            if (item == "SUBJ") sig.subj = true;
            else if (item == "OBJ") sig.obj = true;
            else if (item == "PP") sig.pp = true;
            else if (item == "ADVP") sig.advp = true;
            else throw ConfigError("unknown argument '" + item + "'");
        }
        return sig;
    }
};

/// SUBJ: NP child of the clause S (or an -SBJ NP). OBJ: NP whose nearest non-NP
/// ancestor is a VP. PP/ADVP: such a phrase directly under a VP. In a passive clause
/// the surface subject is the logical object and is reported as OBJ.
inline ArgumentSignature argument_signature(const ParseTree& clause) {
    ArgumentSignature sig;
    bool subject = false;
    if (clause.category() == "S") {
        for (const auto& child : clause.children()) {
            if (child.category() == "NP") subject = true;
        }
    }

    std::function<void(const ParseTree&, std::string_view, std::string_view)> visit =
        [&](const ParseTree& node, std::string_view non_np_ancestor, std::string_view parent) {
            auto cat = node.category();
            if (cat == "NP") {
                if (node.has_function_tag("SBJ")) subject = true;
                else if (non_np_ancestor == "VP") sig.obj = true;
            }
            if (parent == "VP" && cat == "PP") sig.pp = true;
            if (parent == "VP" && cat == "ADVP") sig.advp = true;
            std::string_view below = cat == "NP" ? non_np_ancestor : cat;
            for (const auto& child : node.children()) visit(child, below, cat);
        };
    for (const auto& child : clause.children()) visit(child, clause.category(), clause.category());

    auto groups = verbal_complexes(clause);
    bool passive = !groups.empty() && groups.front().signature.voice == Voice::Passive;
    if (subject && passive) sig.obj = true;
    else sig.subj = subject;
    return sig;
}

// ---------------------------------------------------------------------------
// Bundles

enum class Side { Main, Sub };

inline std::string_view to_string(Side s) { return s == Side::Main ? "M" : "S"; }

/// Feature class -> bag of categorical values for one clause.
struct FeatureBundle {
    std::map<FeatureClass, std::vector<std::string>> values;
    std::optional<Side> side;
    FeatureConfig computed;  ///< classes that were extracted (a class may still have an empty bag)

    const std::vector<std::string>& bag(FeatureClass c) const {
        static const std::vector<std::string> empty;
        auto it = values.find(c);
        return it == values.end() ? empty : it->second;
    }

    bool operator==(const FeatureBundle&) const = default;
};

struct BundlePair {
    FeatureBundle main;
    FeatureBundle sub;
};

inline std::vector<std::string> word_tokens(const ParseTree& clause) {
    static const std::set<std::string, std::less<>> punctuation = {",", ".", ":", "``", "''", "-LRB-", "-RRB-", "#", "$", "-NONE-"};
    std::vector<std::string> out;
    for (const ParseTree* leaf : clause.leaves()) {
        if (punctuation.count(leaf->label())) continue;
        out.push_back(to_lower(*leaf->token()));
    }
    return out;
}

/// Features of one clause for every class in `config` except P (position is a
/// property of the pair, not the clause).
inline FeatureBundle clause_bundle(const ParseTree& clause, const FeatureConfig& config, const Lexicons& lex) {
    FeatureBundle bundle;
    bundle.computed = config;
    auto set = [&](FeatureClass c, std::vector<std::string> bag) {
        if (config.contains(c)) bundle.values[c] = std::move(bag);
    };

    if (config.contains(FeatureClass::T)) {
        std::vector<std::string> sigs;
        for (const auto& s : temporal_signature(clause)) sigs.push_back(s.to_string());
        set(FeatureClass::T, std::move(sigs));
    }
    if (config.contains(FeatureClass::V) || config.contains(FeatureClass::VW) || config.contains(FeatureClass::VL)) {
        auto verbs = verb_features(clause, lex.wordnet_verbs, lex.levin);
        set(FeatureClass::V, std::move(verbs.verbs));
        set(FeatureClass::VW, std::move(verbs.wordnet_classes));
        set(FeatureClass::VL, std::move(verbs.levin_classes));
    }
    if (config.contains(FeatureClass::N) || config.contains(FeatureClass::NW)) {
        auto nouns = noun_features(clause, lex.wordnet_nouns, lex.names);
        set(FeatureClass::N, std::move(nouns.nouns));
        set(FeatureClass::NW, std::move(nouns.wordnet_classes));
    }
    if (config.contains(FeatureClass::A)) set(FeatureClass::A, adjective_features(clause));
    if (config.contains(FeatureClass::S)) set(FeatureClass::S, {syntactic_signature(clause).to_string()});
    if (config.contains(FeatureClass::R)) set(FeatureClass::R, {argument_signature(clause).to_string()});
    if (config.contains(FeatureClass::W)) set(FeatureClass::W, word_tokens(clause));
    return bundle;
}

/// Main- and subordinate-clause bundles for the classes in `config`. P, when
/// selected, carries the pair's position on both sides.
inline BundlePair extract_bundle(const ClausePair& pair, const FeatureConfig& config, const Lexicons& lex) {
    if (config.empty()) throw ConfigError("feature configuration must select at least one class");
    BundlePair out{clause_bundle(pair.main, config, lex), clause_bundle(pair.sub, config, lex)};
    out.main.side = Side::Main;
    out.sub.side = Side::Sub;
    if (config.contains(FeatureClass::P)) {
        std::string pos(to_string(pair.position));
        out.main.values[FeatureClass::P] = {pos};
        out.sub.values[FeatureClass::P] = {pos};
    }
    return out;
}

/// Bundle for a fusion fragment: no side, and the position class is not available.
inline FeatureBundle fragment_bundle(const ParseTree& fragment, const FeatureConfig& config, const Lexicons& lex) {
    if (config.empty()) throw ConfigError("feature configuration must select at least one class");
    if (config.contains(FeatureClass::P)) throw ConfigError("position feature is unavailable for fusion fragments");
    return clause_bundle(fragment, config, lex);
}

}  // namespace tmark

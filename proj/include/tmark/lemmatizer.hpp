#pragma once

// Table-driven lemmatizer: an exceptions table consulted first, then a small
// set of suffix rules keyed by the Treebank POS tag.

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include "tmark/error.hpp"

namespace tmark {

/// Word class used to key exceptions: 'V' verbs (incl. MD/AUX), 'N' nouns, 'J' adjectives.
inline char pos_class(std::string_view pos) {
    if (pos.starts_with("VB") || pos == "MD" || pos == "AUX") return 'V';
    if (pos.starts_with("NN")) return 'N';
    if (pos.starts_with("JJ")) return 'J';
    return '*';
}

inline std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

namespace detail {

// word <TAB> class <TAB> lemma
inline constexpr std::string_view kLemmaExceptions = R"(am	V	be
are	V	be
is	V	be
was	V	be
were	V	be
been	V	be
being	V	be
's	V	be
're	V	be
'm	V	be
has	V	have
had	V	have
having	V	have
've	V	have
'd	V	would
does	V	do
did	V	do
done	V	do
doing	V	do
'll	V	will
wo	V	will
ca	V	can
n't	*	not
said	V	say
says	V	say
lost	V	lose
losing	V	lose
went	V	go
gone	V	go
goes	V	go
made	V	make
making	V	make
sold	V	sell
came	V	come
coming	V	come
took	V	take
taken	V	take
taking	V	take
got	V	get
gotten	V	get
getting	V	get
gave	V	give
given	V	give
giving	V	give
saw	V	see
seen	V	see
left	V	leave
leaving	V	leave
paid	V	pay
rose	V	rise
risen	V	rise
rising	V	rise
fell	V	fall
fallen	V	fall
began	V	begin
begun	V	begin
became	V	become
becoming	V	become
brought	V	bring
bought	V	buy
thought	V	think
told	V	tell
found	V	find
held	V	hold
kept	V	keep
met	V	meet
ran	V	run
running	V	run
spent	V	spend
stood	V	stand
won	V	win
wrote	V	write
written	V	write
writing	V	write
knew	V	know
known	V	know
shown	V	show
grew	V	grow
grown	V	grow
led	V	lead
meant	V	mean
sent	V	send
built	V	build
felt	V	feel
heard	V	hear
set	V	set
put	V	put
cut	V	cut
hit	V	hit
let	V	let
quit	V	quit
closed	V	close
closing	V	close
used	V	use
using	V	use
caused	V	cause
increased	V	increase
decreased	V	decrease
agreed	V	agree
continued	V	continue
continuing	V	continue
issued	V	issue
released	V	release
received	V	receive
believed	V	believe
proposed	V	propose
visited	V	visit
changed	V	change
changing	V	change
arranged	V	arrange
targeted	V	target
reported	V	report
expected	V	expect
started	V	start
waited	V	wait
children	N	child
men	N	man
women	N	woman
people	N	people
feet	N	foot
teeth	N	tooth
mice	N	mouse
data	N	data
news	N	news
series	N	series
species	N	species
analyses	N	analysis
crises	N	crisis
better	J	good
best	J	good
worse	J	bad
worst	J	bad
further	J	far
farther	J	far
less	J	little
least	J	little
more	J	more
most	J	most
)";

// Stems ending in one of these take back a final 'e' once "-ed"/"-ing" is stripped.
inline bool needs_final_e(std::string_view stem) {
    static constexpr std::string_view endings[] = {"at", "et", "ut", "iz", "ys", "us", "v", "c", "g", "uir", "ur", "bl", "pl", "dl", "tl", "kl"};
    if (stem.size() < 2) return false;
    for (auto ending : endings) {
        if (stem.ends_with(ending)) {
            // "-ng" (ringing, singing) and "-gg" stems never end in a silent e
            if (ending == "g" && (stem.ends_with("ng") || stem.ends_with("gg"))) return false;
            return true;
        }
    }
    return false;
}

inline bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

inline bool doubled_consonant(std::string_view stem) {
    if (stem.size() < 3) return false;
    char last = stem.back();
    char prev = stem[stem.size() - 2];
    if (last != prev || is_vowel(last)) return false;
    // "-ll", "-ss", "-zz", "-ff" are usually part of the base (call, pass, buzz, staff)
    return last != 'l' && last != 's' && last != 'z' && last != 'f';
}

inline std::string strip_inflection(std::string_view word, std::string_view suffix) {
    std::string stem(word.substr(0, word.size() - suffix.size()));
    if (doubled_consonant(stem)) {
        stem.pop_back();
    } else if (needs_final_e(stem)) {
        stem += 'e';
    }
    return stem;
}

inline std::string plural_to_singular(std::string_view word) {
    if (word.size() > 4 && word.ends_with("ies")) return std::string(word.substr(0, word.size() - 3)) + "y";
    for (std::string_view sib : {"sses", "shes", "ches", "xes", "zes"}) {
        if (word.size() > sib.size() && word.ends_with(sib)) return std::string(word.substr(0, word.size() - 2));
    }
    if (word.size() > 3 && word.ends_with("s") && !word.ends_with("ss") && !word.ends_with("us") &&
        !word.ends_with("is")) {
        return std::string(word.substr(0, word.size() - 1));
    }
    return std::string(word);
}

}  // namespace detail

class Lemmatizer {
public:
    /// The bundled exceptions table plus suffix rules.
    static const Lemmatizer& standard() {
        static const Lemmatizer instance = [] {
            Lemmatizer lem;
            std::istringstream in{std::string(detail::kLemmaExceptions)};
            lem.load_exceptions(in);
            return lem;
        }();
        return instance;
    }

    /// Adds exceptions from TSV lines `word<TAB>class<TAB>lemma`; later entries win.
    void load_exceptions(std::istream& in) {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#') continue;
            auto t1 = line.find('\t');
            auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
            if (t2 == std::string::npos || t2 - t1 != 2) {
                throw ConfigError("lemma exceptions line " + std::to_string(line_no) + ": expected word<TAB>class<TAB>lemma");
            }
            exceptions_[{to_lower(line.substr(0, t1)), line[t1 + 1]}] = line.substr(t2 + 1);
        }
    }

    std::string lemmatize(std::string_view token, std::string_view pos) const {
        std::string word = to_lower(token);
        char cls = pos_class(pos);
        if (auto it = exceptions_.find({word, cls}); it != exceptions_.end()) return it->second;
        if (auto it = exceptions_.find({word, '*'}); it != exceptions_.end()) return it->second;

        if (pos == "NNS" || pos == "NNPS" || pos == "VBZ") return detail::plural_to_singular(word);
        if (pos == "VBD" || pos == "VBN") {
            if (word.size() > 4 && word.ends_with("ied")) return word.substr(0, word.size() - 3) + "y";
            if (word.size() > 3 && word.ends_with("ed")) {
                if (word.ends_with("eed")) return word.substr(0, word.size() - 1);
                return detail::strip_inflection(word, "ed");
            }
            return word;
        }
        if (pos == "VBG") {
            if (word.size() > 4 && word.ends_with("ing")) return detail::strip_inflection(word, "ing");
            return word;
        }
        if (pos == "JJR" || pos == "RBR") {
            if (word.size() > 4 && word.ends_with("ier")) return word.substr(0, word.size() - 3) + "y";
            if (word.size() > 3 && word.ends_with("er")) return detail::strip_inflection(word, "er");
            return word;
        }
        if (pos == "JJS" || pos == "RBS") {
            if (word.size() > 5 && word.ends_with("iest")) return word.substr(0, word.size() - 4) + "y";
            if (word.size() > 4 && word.ends_with("est")) return detail::strip_inflection(word, "est");
            return word;
        }
        return word;
    }

private:
    std::map<std::pair<std::string, char>, std::string> exceptions_;
};

/// Lowercased lemma using the bundled tables.
inline std::string lemmatize(std::string_view token, std::string_view pos) {
    return Lemmatizer::standard().lemmatize(token, pos);
}

}  // namespace tmark

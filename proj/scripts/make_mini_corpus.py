#!/usr/bin/env python3
"""Generate the bundled synthetic treebank (data/mini_corpus.mrg).

One bracketed tree per line. Temporal subordinate clauses are tagged SBAR-TMP;
each marker prefers its own small set of subordinate-clause verbs, so the corpus
carries a learnable signal. Also included: untagged temporal SBARs (found only in
lenient mode), noun-attached clauses (never extracted), sentences without any
subordinate clause, and one sentence with two temporal clauses.
"""

import argparse
import random

# marker -> number of tagged pairs
MARKER_COUNTS = {
    "when": 200, "as": 90, "after": 75, "before": 40,
    "until": 35, "while": 25, "since": 20, "once": 15,
}
UNTAGGED = 12
NOUN_ATTACHED = 10
NO_SBAR = 30

# base, past, past participle, 3rd singular, -ing
VERBS = {
    "complete": ("complete", "completed", "completed", "completes", "completing"),
    "finish": ("finish", "finished", "finished", "finishes", "finishing"),
    "end": ("end", "ended", "ended", "ends", "ending"),
    "announce": ("announce", "announced", "announced", "announces", "announcing"),
    "open": ("open", "opened", "opened", "opens", "opening"),
    "arrive": ("arrive", "arrived", "arrived", "arrives", "arriving"),
    "rise": ("rise", "rose", "risen", "rises", "rising"),
    "fall": ("fall", "fell", "fallen", "falls", "falling"),
    "lose": ("lose", "lost", "lost", "loses", "losing"),
    "sell": ("sell", "sold", "sold", "sells", "selling"),
    "buy": ("buy", "bought", "bought", "buys", "buying"),
    "wait": ("wait", "waited", "waited", "waits", "waiting"),
    "work": ("work", "worked", "worked", "works", "working"),
    "stay": ("stay", "stayed", "stayed", "stays", "staying"),
    "agree": ("agree", "agreed", "agreed", "agrees", "agreeing"),
    "approve": ("approve", "approved", "approved", "approves", "approving"),
    "leave": ("leave", "left", "left", "leaves", "leaving"),
    "change": ("change", "changed", "changed", "changes", "changing"),
    "grow": ("grow", "grew", "grown", "grows", "growing"),
    "talk": ("talk", "talked", "talked", "talks", "talking"),
    "report": ("report", "reported", "reported", "reports", "reporting"),
    "close": ("close", "closed", "closed", "closes", "closing"),
    "start": ("start", "started", "started", "starts", "starting"),
    "hire": ("hire", "hired", "hired", "hires", "hiring"),
    "expand": ("expand", "expanded", "expanded", "expands", "expanding"),
    "drop": ("drop", "dropped", "dropped", "drops", "dropping"),
}
TRANSITIVE = {"complete", "finish", "announce", "open", "lose", "sell", "buy",
              "approve", "leave", "change", "report", "close", "start", "hire", "expand", "drop"}

# marker -> preferred subordinate verbs
SUB_VERBS = {
    "after": ["complete", "finish", "announce"],
    "before": ["open", "approve", "start"],
    "while": ["work", "talk", "grow"],
    "when": ["arrive", "fall", "drop", "change"],
    "as": ["rise", "grow", "expand"],
    "once": ["agree", "approve", "close"],
    "until": ["end", "close", "arrive"],
    "since": ["leave", "start", "report"],
}
# marker -> preferred tense template for the subordinate clause
SUB_TENSES = {
    "after": ["passive", "past", "perfect"],
    "before": ["past", "present"],
    "while": ["progressive", "past"],
    "when": ["past", "present", "passive"],
    "as": ["progressive", "present", "past"],
    "once": ["passive", "present", "perfect"],
    "until": ["present", "past", "negative"],
    "since": ["past", "perfect"],
}
MAIN_VERBS = ["sell", "buy", "lose", "hire", "wait", "stay", "work", "report", "expand", "drop", "talk", "leave"]
NOUNS = [("NN", "company"), ("NNS", "investors"), ("NNS", "employees"), ("NN", "market"), ("NNS", "prices"),
         ("NN", "board"), ("NN", "bank"), ("NNS", "analysts"), ("NN", "plant"), ("NNS", "workers"),
         ("NN", "sale"), ("NN", "deal"), ("NN", "strike"), ("NNS", "talks"), ("NN", "factory")]
OBJECTS = [("NNS", "jobs"), ("NNS", "shares"), ("NN", "stock"), ("NNS", "plans"), ("NN", "office"),
           ("NNS", "bonds"), ("NN", "contract"), ("NNS", "results"), ("NN", "division"), ("NNS", "assets")]
PROPER = [["John", "Smith"], ["Acme", "Corp."], ["United", "Laboratories", "Inc."], ["New", "England"],
          ["Mary", "Jones"], ["Dr.", "Chen"]]
ADJECTIVES = ["new", "last", "large", "early", "final", "older"]
SUB_FIRST_PROB = {"after": 0.3, "before": 0.2, "while": 0.3, "when": 0.45, "as": 0.25,
                  "once": 0.5, "until": 0.05, "since": 0.4}


def np_tree(rng, pool, allow_proper=True):
    if allow_proper and rng.random() < 0.12:
        name = rng.choice(PROPER)
        return "(NP " + " ".join(f"(NNP {w})" for w in name) + ")"
    tag, word = rng.choice(pool)
    det = rng.choice(["(DT the)", "(PRP$ their)", "(DT the)", ""])
    adj = f"(JJ {rng.choice(ADJECTIVES)}) " if rng.random() < 0.2 else ""
    if tag == "NNS" and det == "" and rng.random() < 0.5:
        return f"(NP {adj}({tag} {word}))"
    det = det or "(DT the)"
    return f"(NP {det} {adj}({tag} {word}))"


def verb_group(rng, verb, template, obj):
    base, past, pp, third, ing = VERBS[verb]
    tail = f" {obj}" if obj else ""
    if template == "past":
        return f"(VP (VBD {past}){tail})"
    if template == "present":
        return f"(VP (VBZ {third}){tail})"
    if template == "future":
        return f"(VP (MD will) (VP (VB {base}){tail}))"
    if template == "modal":
        modal = rng.choice(["could", "may", "must", "should"])
        return f"(VP (MD {modal}) (VP (VB {base}){tail}))"
    if template == "perfect":
        return f"(VP (VBZ has) (VP (VBN {pp}){tail}))"
    if template == "progressive":
        return f"(VP (AUX was) (VP (VBG {ing}){tail}))"
    if template == "passive":
        return f"(VP (AUX was) (VP (VBN {pp})))"
    if template == "negative":
        return f"(VP (VBD did) (RB not) (VP (VB {base}){tail}))"
    raise ValueError(template)


def clause(rng, verb, template):
    obj = np_tree(rng, OBJECTS, allow_proper=False) if verb in TRANSITIVE and template != "passive" else ""
    subj = np_tree(rng, NOUNS)
    return f"(S {subj} {verb_group(rng, verb, template, obj)})"


def sub_clause(rng, marker):
    verb = rng.choice(SUB_VERBS[marker]) if rng.random() < 0.85 else rng.choice(list(VERBS))
    template = rng.choice(SUB_TENSES[marker]) if rng.random() < 0.8 else rng.choice(
        ["past", "present", "perfect", "progressive", "passive", "negative"])
    return clause(rng, verb, template)


def main_parts(rng):
    verb = rng.choice(MAIN_VERBS)
    template = rng.choice(["past", "past", "present", "future", "modal", "perfect", "negative"])
    obj = np_tree(rng, OBJECTS, allow_proper=False) if verb in TRANSITIVE else ""
    return np_tree(rng, NOUNS), verb, template, obj


def tagged_sentence(rng, marker, tag="SBAR-TMP"):
    sbar = f"({tag} (IN {marker}) {sub_clause(rng, marker)})"
    subj, verb, template, obj = main_parts(rng)
    if rng.random() < SUB_FIRST_PROB[marker]:
        sbar = sbar.replace(f"(IN {marker})", f"(IN {marker.capitalize()})", 1)
        vp = verb_group(rng, verb, template, obj)
        return f"(S1 (S {sbar} (, ,) {subj} {vp} (. .)))"
    vp = verb_group(rng, verb, template, f"{obj} {sbar}".strip())
    return f"(S1 (S {subj} {vp} (. .)))"


def noun_attached(rng):
    marker = rng.choice(["when", "after", "before"])
    head = "(NP (DT the) (NN day))" if marker == "when" else "(NP (DT the) (NN week))"
    inner = sub_clause(rng, marker)
    if marker == "when":
        sbar = f"(SBAR-TMP (WHADVP (WRB when)) {inner})"
    else:
        sbar = f"(SBAR (IN {marker}) {inner})"
    subj, verb, template, obj = main_parts(rng)
    vp = verb_group(rng, verb, template, obj)
    return f"(S1 (S (NP {head} {sbar}) {vp} (. .)))"


def plain(rng):
    subj, verb, template, obj = main_parts(rng)
    return f"(S1 (S {subj} {verb_group(rng, verb, template, obj)} (. .)))"


def two_clauses(rng):
    first = f"(SBAR-TMP (IN After) {sub_clause(rng, 'after')})"
    second = f"(SBAR-TMP (IN until) {sub_clause(rng, 'until')})"
    subj, _, _, _ = main_parts(rng)
    return f"(S1 (S {first} (, ,) {subj} (VP (VBD waited) {second}) (. .)))"


def generate(seed):
    rng = random.Random(seed)
    lines = []
    counts = dict(MARKER_COUNTS)
    counts["after"] -= 1
    counts["until"] -= 1
    for marker, n in counts.items():
        lines.extend(tagged_sentence(rng, marker) for _ in range(n))
    for _ in range(UNTAGGED):
        lines.append(tagged_sentence(rng, rng.choice(list(MARKER_COUNTS)), tag="SBAR"))
    lines.extend(noun_attached(rng) for _ in range(NOUN_ATTACHED))
    lines.extend(plain(rng) for _ in range(NO_SBAR))
    lines.append(two_clauses(rng))
    rng.shuffle(lines)
    return lines


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", default="data/mini_corpus.mrg")
    args = parser.parse_args()
    lines = generate(args.seed)
    with open(args.out, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {len(lines)} trees to {args.out}")


if __name__ == "__main__":
    main()

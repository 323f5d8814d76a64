"""Lexicon: the closed word classes the sentence grammar draws from.

Every entry stores its surface forms explicitly (singular/plural for nouns,
past/base for verbs); there is no morphology engine.  The default lexicon can
be replaced wholesale from a JSON config file, except for the six quantifiers,
which are fixed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class Quantifier:
    lemma: str
    number: str  # "sg" or "pl" agreement on the noun
    klass: str  # "existential" | "numeral" | "universal"


@dataclass(frozen=True)
class Noun:
    lemma: str
    sg: str
    pl: str


@dataclass(frozen=True)
class Verb:
    lemma: str
    past: str
    base: str


@dataclass(frozen=True)
class Word:
    """Invariable entry (proper noun, adjective or adverb)."""

    lemma: str

    @property
    def surface(self) -> str:
        return self.lemma


# The six quantifiers are part of the grammar, not of the configurable lexicon.
QUANTIFIERS = (
    Quantifier("every", "sg", "universal"),
    Quantifier("all", "pl", "universal"),
    Quantifier("a", "sg", "existential"),
    Quantifier("one", "sg", "existential"),
    Quantifier("two", "pl", "numeral"),
    Quantifier("three", "pl", "numeral"),
)

# Lemmas of numeral quantifiers double as cardinality-marker predicates in the
# logical forms; content words must not collide with them.
NUMERAL_MARKERS = frozenset(q.lemma for q in QUANTIFIERS if q.klass == "numeral")

DEFAULT_CONFIG = {
    "N": [
        ["dog", "dog", "dogs"],
        ["rabbit", "rabbit", "rabbits"],
        ["cat", "cat", "cats"],
        ["bear", "bear", "bears"],
        ["tiger", "tiger", "tigers"],
        ["lion", "lion", "lions"],
        ["monkey", "monkey", "monkeys"],
        ["rat", "rat", "rats"],
        ["pig", "pig", "pigs"],
        ["fox", "fox", "foxes"],
        ["elephant", "elephant", "elephants"],
    ],
    "PN": ["ann", "bob", "fred", "chris", "eliott", "john"],
    "IV": [
        ["run", "ran", "run"],
        ["walk", "walked", "walk"],
        ["swim", "swam", "swim"],
        ["dance", "danced", "dance"],
        ["dawdle", "dawdled", "dawdle"],
        ["escape", "escaped", "escape"],
        ["cry", "cried", "cry"],
    ],
    # Second-conjunct verbs: five entries times {and, or} gives the ten
    # connective patterns.  "swim" doubles as a plain intransitive; the two
    # occurrences denote the same predicate.
    "IV2": [
        ["laugh", "laughed", "laugh"],
        ["groan", "groaned", "groan"],
        ["roar", "roared", "roar"],
        ["come", "came", "come"],
        ["swim", "swam", "swim"],
    ],
    "TV": [
        ["kiss", "kissed", "kiss"],
        ["kick", "kicked", "kick"],
        ["clean", "cleaned", "clean"],
        ["touch", "touched", "touch"],
        ["chase", "chased", "chase"],
        ["love", "loved", "love"],
        ["like", "liked", "like"],
        ["follow", "followed", "follow"],
        ["know", "knew", "know"],
    ],
    "Adj": ["small", "large", "crazy", "polite", "wild", "white", "black", "brown", "young", "old"],
    "Adv": [
        "slowly",
        "quickly",
        "seriously",
        "suddenly",
        "lazily",
        "loudly",
        "quietly",
        "carefully",
        "gracefully",
        "happily",
    ],
}


@dataclass(frozen=True)
class Lexicon:
    quantifiers: tuple[Quantifier, ...]
    nouns: tuple[Noun, ...]
    proper_nouns: tuple[Word, ...]
    intransitives: tuple[Verb, ...]
    second_intransitives: tuple[Verb, ...]
    transitives: tuple[Verb, ...]
    adjectives: tuple[Word, ...]
    adverbs: tuple[Word, ...]

    def entries(self, category: str):
        return {
            "Q": self.quantifiers,
            "N": self.nouns,
            "PN": self.proper_nouns,
            "IV": self.intransitives,
            "IV2": self.second_intransitives,
            "TV": self.transitives,
            "ADJ": self.adjectives,
            "ADV": self.adverbs,
        }[category]

    @property
    def proper_noun_lemmas(self) -> frozenset[str]:
        return frozenset(w.lemma for w in self.proper_nouns)

    @property
    def transitive_lemmas(self) -> frozenset[str]:
        return frozenset(v.lemma for v in self.transitives)

    def restrict_quantifiers(self, lemmas) -> "Lexicon":
        keep = tuple(q for q in self.quantifiers if q.lemma in set(lemmas))
        if not keep:
            raise LexiconError("quantifier restriction %r matches nothing" % sorted(lemmas))
        return Lexicon(
            keep,
            self.nouns,
            self.proper_nouns,
            self.intransitives,
            self.second_intransitives,
            self.transitives,
            self.adjectives,
            self.adverbs,
        )

    def validate(self) -> None:
        if tuple(q.lemma for q in self.quantifiers) and not set(
            q.lemma for q in self.quantifiers
        ) <= {q.lemma for q in QUANTIFIERS}:
            raise LexiconError("unknown quantifier lemma")
        for cat in ("N", "PN", "IV", "IV2", "TV", "ADJ", "ADV"):
            entries = self.entries(cat)
            if not entries:
                raise LexiconError("category %s is empty" % cat)
            lemmas = [e.lemma for e in entries]
            if len(set(lemmas)) != len(lemmas):
                raise LexiconError("duplicate lemma in category %s" % cat)
        for n in self.nouns:
            if n.sg == n.pl:
                raise LexiconError("noun %r: singular and plural forms must differ" % n.lemma)
        for v in self.intransitives + self.second_intransitives + self.transitives:
            if v.past == v.base:
                raise LexiconError("verb %r: past and base forms must differ" % v.lemma)
        # IV and IV2 may share lemmas (same one-place predicate); all other
        # category pairs must stay disjoint so lemmas denote unambiguously.
        all_content = []
        for cat in ("N", "PN", "IV", "TV", "ADJ", "ADV"):
            all_content.extend(e.lemma for e in self.entries(cat))
        iv_lemmas = {e.lemma for e in self.intransitives}
        all_content.extend(e.lemma for e in self.second_intransitives if e.lemma not in iv_lemmas)
        if len(set(all_content)) != len(all_content):
            raise LexiconError("content lemmas must be unique across categories")
        clash = set(all_content) & NUMERAL_MARKERS
        if clash:
            raise LexiconError("content lemmas collide with numeral markers: %r" % sorted(clash))


def _verb(row) -> Verb:
    lemma, past, base = row
    return Verb(lemma, past, base)


def _from_config(cfg: dict) -> Lexicon:
    if "Q" in cfg:
        given = list(cfg["Q"])
        expected = [q.lemma for q in QUANTIFIERS]
        if sorted(given) != sorted(expected):
            raise LexiconError("Q must be exactly %r" % expected)
    lex = Lexicon(
        quantifiers=QUANTIFIERS,
        nouns=tuple(Noun(*row) for row in cfg["N"]),
        proper_nouns=tuple(Word(w) for w in cfg["PN"]),
        intransitives=tuple(_verb(row) for row in cfg["IV"]),
        second_intransitives=tuple(_verb(row) for row in cfg["IV2"]),
        transitives=tuple(_verb(row) for row in cfg["TV"]),
        adjectives=tuple(Word(w) for w in cfg["Adj"]),
        adverbs=tuple(Word(w) for w in cfg["Adv"]),
    )
    lex.validate()
    return lex


def default_lexicon() -> Lexicon:
    return _from_config(DEFAULT_CONFIG)


def load_lexicon(path: str | None = None) -> Lexicon:
    """Load a lexicon from a JSON config file, or the built-in default."""
    if path is None:
        return default_lexicon()
    with open(path, encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise LexiconError("lexicon config %s: %s" % (path, exc)) from exc
    missing = {"N", "PN", "IV", "IV2", "TV", "Adj", "Adv"} - set(cfg)
    if missing:
        raise LexiconError("lexicon config %s: missing categories %r" % (path, sorted(missing)))
    return _from_config(cfg)

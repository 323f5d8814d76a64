"""Sentence grammar: derivation trees, enumeration, seeded sampling, surface
realization and phenomenon tagging.

The grammar is a small CFG over quantified noun phrases, transitive/
intransitive verb phrases, sentential negation and relative clauses.  Relative
clauses nest, and the nesting depth (number of chained embedded clauses) is the
complexity axis the productivity splits control.

Trees are enumerable in a fixed canonical order: rules in declaration order,
then lexicon order, children left to right with the rightmost varying fastest.
Populations are far too large to materialize at higher depths, so sampling
works by counting trees with a memoized DP over (symbol, depth budget) and
unranking sampled indices directly into trees.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from .lexicon import Lexicon, Noun, Quantifier, Verb, Word

NONTERMINALS = ("S", "NP", "VP", "SBAR")
PRETERMINALS = ("Q", "N", "PN", "IV", "IV2", "TV", "ADJ", "ADV")

PERIPHERAL = "peripheral"
CENTER = "center"


@dataclass(frozen=True)
class Rule:
    rid: str
    lhs: str
    rhs: tuple[str, ...]


# Declaration order is the canonical rule order.
RULES = (
    Rule("s", "S", ("NP", "VP")),
    Rule("s_neg", "S", ("NP", "VP")),
    Rule("np_pn", "NP", ("PN",)),
    Rule("np_qn", "NP", ("Q", "N")),
    Rule("np_q_adj_n", "NP", ("Q", "ADJ", "N")),
    Rule("np_qn_rel", "NP", ("Q", "N", "SBAR")),
    Rule("np_pn_rel", "NP", ("PN", "SBAR")),
    Rule("vp_iv", "VP", ("IV",)),
    Rule("vp_iv_adv", "VP", ("IV", "ADV")),
    Rule("vp_or", "VP", ("IV", "IV2")),
    Rule("vp_and", "VP", ("IV", "IV2")),
    Rule("vp_tv", "VP", ("TV", "NP")),
    Rule("rel_subj", "SBAR", ("VP",)),
    Rule("rel_subj_neg", "SBAR", ("VP",)),
    Rule("rel_obj", "SBAR", ("NP", "TV")),
    Rule("rel_obj_neg", "SBAR", ("NP", "TV")),
)

NEGATION_RULES = frozenset({"s_neg", "rel_subj_neg", "rel_obj_neg"})
MODIFIER_RULES = frozenset({"np_q_adj_n", "vp_iv_adv", "vp_or", "vp_and"})
# Subject-gap relatives extend to the right edge of their clause; object-gap
# relatives interrupt it.
SUBJECT_GAP_RELS = frozenset({"rel_subj", "rel_subj_neg"})
OBJECT_GAP_RELS = frozenset({"rel_obj", "rel_obj_neg"})


@dataclass(frozen=True)
class Tree:
    """Derivation tree node.

    Internal nodes carry the applied rule id; leaves carry the preterminal
    category and the lexicon entry.
    """

    label: str
    rule: str
    children: tuple["Tree", ...] = ()
    lex: object = None

    def iter_nodes(self):
        yield self
        for c in self.children:
            yield from c.iter_nodes()

    def encode(self):
        """Nested-list form, stable across runs: [rule, child...] / [cat, lemma]."""
        if self.lex is not None:
            return [self.label, self.lex.lemma]
        return [self.rule] + [c.encode() for c in self.children]


class PopulationTooSmall(ValueError):
    def __init__(self, requested: int, population: int):
        super().__init__(
            "requested %d trees but the population has only %d" % (requested, population)
        )
        self.requested = requested
        self.population = population


def _sample_indices(rng: random.Random, population: int, n: int) -> list[int]:
    """n distinct indices below `population`; handles populations beyond the
    C-ssize_t range that random.sample(range(...)) cannot take."""
    if population < 2**62:
        return rng.sample(range(population), n)
    chosen: set[int] = set()
    while len(chosen) < n:
        chosen.add(rng.randrange(population))
    return list(chosen)


class Grammar:
    """A rule set plus a lexicon, with counting, unranking and sampling.

    ``restrict`` produces sub-grammars (dropped rules and/or a quantifier
    subset); each sub-grammar has its own canonical enumeration order.
    """

    def __init__(self, lexicon: Lexicon, rules: tuple[Rule, ...] = RULES):
        self.lexicon = lexicon
        self.rules = rules
        self._by_lhs: dict[str, tuple[Rule, ...]] = {}
        for nt in NONTERMINALS:
            self._by_lhs[nt] = tuple(r for r in rules if r.lhs == nt)
        self._count_le_memo: dict[tuple[str, int], int] = {}

    def restrict(self, drop_rules=(), quantifiers=None) -> "Grammar":
        rules = tuple(r for r in self.rules if r.rid not in set(drop_rules))
        lex = self.lexicon
        if quantifiers is not None:
            lex = lex.restrict_quantifiers(quantifiers)
        return Grammar(lex, rules)

    # -- counting -----------------------------------------------------------

    def count_le(self, symbol: str, depth: int) -> int:
        """Number of trees rooted at `symbol` whose embedded-clause chains are
        at most `depth` long (an SBAR node consumes one unit)."""
        if depth < 0:
            return 0
        if symbol in PRETERMINALS:
            return len(self.lexicon.entries(symbol))
        key = (symbol, depth)
        got = self._count_le_memo.get(key)
        if got is not None:
            return got
        total = 0
        child_depth = depth - 1 if symbol == "SBAR" else depth
        if not (symbol == "SBAR" and depth == 0):
            for rule in self._by_lhs[symbol]:
                n = 1
                for c in rule.rhs:
                    n *= self.count_le(c, child_depth)
                    if n == 0:
                        break
                total += n
        self._count_le_memo[key] = total
        return total

    def count_exact(self, symbol: str, depth: int) -> int:
        if depth == 0:
            return self.count_le(symbol, 0)
        return self.count_le(symbol, depth) - self.count_le(symbol, depth - 1)

    # -- unranking ----------------------------------------------------------

    def unrank_le(self, symbol: str, depth: int, index: int) -> Tree:
        if symbol in PRETERMINALS:
            return Tree(symbol, "lex:" + symbol, (), self.lexicon.entries(symbol)[index])
        child_depth = depth - 1 if symbol == "SBAR" else depth
        for rule in self._by_lhs[symbol]:
            sizes = [self.count_le(c, child_depth) for c in rule.rhs]
            block = 1
            for s in sizes:
                block *= s
            if index < block:
                children = []
                for pos, c in enumerate(rule.rhs):
                    rest = 1
                    for s in sizes[pos + 1 :]:
                        rest *= s
                    child_index, index = divmod(index, rest) if rest else (index, 0)
                    children.append(self.unrank_le(c, child_depth, child_index))
                return Tree(symbol, rule.rid, tuple(children))
            index -= block
        raise IndexError("index out of range for %s at depth %d" % (symbol, depth))

    def unrank_exact(self, symbol: str, depth: int, index: int) -> Tree:
        """Unrank within the set of trees whose longest chain is exactly `depth`."""
        if depth == 0:
            return self.unrank_le(symbol, 0, index)
        if symbol in PRETERMINALS:
            raise IndexError("preterminal %s has no depth-%d trees" % (symbol, depth))
        target = depth - 1 if symbol == "SBAR" else depth
        for rule in self._by_lhs[symbol]:
            block = self._tuple_exact_count(rule.rhs, target)
            if index < block:
                children = self._unrank_tuple_exact(rule.rhs, target, index)
                return Tree(symbol, rule.rid, tuple(children))
            index -= block
        raise IndexError("index out of range for %s at exact depth %d" % (symbol, depth))

    def _child_exact(self, symbol: str, depth: int) -> int:
        if symbol in PRETERMINALS:
            return self.count_le(symbol, 0) if depth == 0 else 0
        return self.count_exact(symbol, depth)

    def _tuple_exact_count(self, symbols, target: int) -> int:
        le = 1
        lt = 1
        for c in symbols:
            le *= self.count_le(c, target)
            lt *= self.count_le(c, target - 1)
        return le - lt

    def _unrank_tuple_exact(self, symbols, target: int, index: int) -> list:
        # Walk the children left to right; the first child that reaches the
        # target depth releases the "must hit target" obligation.
        def tail_need(pos: int) -> int:
            if pos == len(symbols):
                return 0
            first = self._child_exact(symbols[pos], target)
            rest_le = 1
            for c in symbols[pos + 1 :]:
                rest_le *= self.count_le(c, target)
            return first * rest_le + self.count_le(symbols[pos], target - 1) * tail_need(pos + 1)

        out = []
        need = True
        pos = 0
        while pos < len(symbols):
            c = symbols[pos]
            if not need:
                rest = 1
                for c2 in symbols[pos + 1 :]:
                    rest *= self.count_le(c2, target)
                child_index, index = divmod(index, rest) if rest else (index, 0)
                out.append(self._unrank_any(c, target, child_index, exact=False))
                pos += 1
                continue
            rest = 1
            for c2 in symbols[pos + 1 :]:
                rest *= self.count_le(c2, target)
            first_block = self._child_exact(c, target) * rest
            if index < first_block:
                child_index, index = divmod(index, rest) if rest else (index, 0)
                out.append(self._unrank_any(c, target, child_index, exact=True))
                need = False
            else:
                index -= first_block
                tail = tail_need(pos + 1)
                child_index, index = divmod(index, tail) if tail else (index, 0)
                out.append(self._unrank_any(c, target - 1, child_index, exact=False))
            pos += 1
        return out

    def _unrank_any(self, symbol: str, depth: int, index: int, exact: bool) -> Tree:
        if exact and depth > 0:
            return self.unrank_exact(symbol, depth, index)
        if exact:
            return self.unrank_le(symbol, 0, index)
        return self.unrank_le(symbol, depth, index)

    # -- enumeration and sampling -------------------------------------------

    def population(self, max_depth: int, exact_depth: int | None = None) -> int:
        if exact_depth is not None:
            return self.count_exact("S", exact_depth)
        return self.count_le("S", max_depth)

    def enumerate_trees(self, max_depth: int, shape_filter=None):
        """Yield every sentence tree with chain depth <= max_depth in canonical
        order.  Only usable when the population is small enough to stream."""
        for tree in self._enumerate("S", max_depth):
            if shape_filter is None or shape_filter(tree):
                yield tree

    def _enumerate(self, symbol: str, depth: int):
        if symbol in PRETERMINALS:
            for entry in self.lexicon.entries(symbol):
                yield Tree(symbol, "lex:" + symbol, (), entry)
            return
        if symbol == "SBAR" and depth == 0:
            return
        child_depth = depth - 1 if symbol == "SBAR" else depth
        for rule in self._by_lhs[symbol]:
            yield from self._expand(rule, rule.rhs, child_depth, ())
    def _expand(self, rule, rest, depth, acc):
        if not rest:
            yield Tree(rule.lhs, rule.rid, acc)
            return
        for child in self._enumerate(rest[0], depth):
            yield from self._expand(rule, rest[1:], depth, acc + (child,))

    def sample_trees(
        self,
        n: int,
        seed: int,
        max_depth: int = 0,
        exact_depth: int | None = None,
        shape_filter=None,
    ) -> list[Tree]:
        """Uniform sampling without replacement, deterministic in the seed.

        With a shape_filter, sampling rejects non-matching trees, which keeps
        the draw uniform over the accepted sub-population.
        """
        population = self.population(max_depth, exact_depth)
        rng = random.Random(seed)

        def unrank(i: int) -> Tree:
            if exact_depth is not None:
                return self.unrank_exact("S", exact_depth, i)
            return self.unrank_le("S", max_depth, i)

        if shape_filter is None:
            if n > population:
                raise PopulationTooSmall(n, population)
            indices = sorted(_sample_indices(rng, population, n))
            return [unrank(i) for i in indices]

        chosen: dict[int, Tree] = {}
        seen: set[int] = set()
        while len(chosen) < n:
            if len(seen) >= population:
                raise PopulationTooSmall(n, len(chosen))
            i = rng.randrange(population)
            if i in seen:
                continue
            seen.add(i)
            tree = unrank(i)
            if shape_filter(tree):
                chosen[i] = tree
        return [chosen[i] for i in sorted(chosen)]

    # -- decoding -----------------------------------------------------------

    def decode(self, encoded) -> Tree:
        head = encoded[0]
        if head in PRETERMINALS:
            lemma = encoded[1]
            for entry in self.lexicon.entries(head):
                if entry.lemma == lemma:
                    return Tree(head, "lex:" + head, (), entry)
            raise KeyError("lemma %r not in lexicon category %s" % (lemma, head))
        rule = next(r for r in self.rules if r.rid == head)
        children = tuple(self.decode(e) for e in encoded[1:])
        return Tree(rule.lhs, rule.rid, children)


# -- surface realization -----------------------------------------------------


def realize_tokens(tree: Tree) -> list[str]:
    return _tokens(tree, past=True)


def realize(tree: Tree) -> str:
    return " ".join(realize_tokens(tree))


def _noun_form(noun: Noun, quant: Quantifier) -> str:
    return noun.sg if quant.number == "sg" else noun.pl


def _verb_form(verb: Verb, past: bool) -> str:
    return verb.past if past else verb.base


def _tokens(tree: Tree, past: bool) -> list[str]:
    r = tree.rule
    ch = tree.children
    if r == "s":
        return _tokens(ch[0], True) + _tokens(ch[1], True)
    if r == "s_neg":
        return _tokens(ch[0], True) + ["did", "not"] + _tokens(ch[1], False)
    if r == "np_pn":
        return [ch[0].lex.surface]
    if r == "np_qn":
        q = ch[0].lex
        return [q.lemma, _noun_form(ch[1].lex, q)]
    if r == "np_q_adj_n":
        q = ch[0].lex
        return [q.lemma, ch[1].lex.surface, _noun_form(ch[2].lex, q)]
    if r == "np_qn_rel":
        q = ch[0].lex
        return [q.lemma, _noun_form(ch[1].lex, q)] + _tokens(ch[2], True)
    if r == "np_pn_rel":
        return [ch[0].lex.surface] + _tokens(ch[1], True)
    if r == "vp_iv":
        return [_verb_form(ch[0].lex, past)]
    if r == "vp_iv_adv":
        return [_verb_form(ch[0].lex, past), ch[1].lex.surface]
    if r == "vp_or":
        return [_verb_form(ch[0].lex, past), "or", _verb_form(ch[1].lex, past)]
    if r == "vp_and":
        return [_verb_form(ch[0].lex, past), "and", _verb_form(ch[1].lex, past)]
    if r == "vp_tv":
        return [_verb_form(ch[0].lex, past)] + _tokens(ch[1], True)
    if r == "rel_subj":
        return ["that"] + _tokens(ch[0], True)
    if r == "rel_subj_neg":
        return ["that", "did", "not"] + _tokens(ch[0], False)
    if r == "rel_obj":
        return ["that"] + _tokens(ch[0], True) + [ch[1].lex.past]
    if r == "rel_obj_neg":
        return ["that"] + _tokens(ch[0], True) + ["did", "not", ch[1].lex.base]
    raise ValueError("cannot realize node %r" % r)


# -- phenomenon tags ----------------------------------------------------------


@dataclass(frozen=True)
class PhenomenonTags:
    subject_quantifier: str | None
    object_quantifier: str | None
    has_negation: bool
    has_adjective: bool
    has_adverb: bool
    has_conjunction: bool
    has_disjunction: bool
    embedding_types: tuple[str, ...]
    depth: int

    def to_json(self) -> dict:
        return {
            "subject_quantifier": self.subject_quantifier,
            "object_quantifier": self.object_quantifier,
            "has_negation": self.has_negation,
            "has_adjective": self.has_adjective,
            "has_adverb": self.has_adverb,
            "has_conjunction": self.has_conjunction,
            "has_disjunction": self.has_disjunction,
            "embedding_types": list(self.embedding_types),
            "depth": self.depth,
        }

    @staticmethod
    def from_json(d: dict) -> "PhenomenonTags":
        return PhenomenonTags(
            d["subject_quantifier"],
            d["object_quantifier"],
            d["has_negation"],
            d["has_adjective"],
            d["has_adverb"],
            d["has_conjunction"],
            d["has_disjunction"],
            tuple(d["embedding_types"]),
            d["depth"],
        )


def _np_quantifier(np: Tree) -> str | None:
    if np.rule in ("np_qn", "np_q_adj_n", "np_qn_rel"):
        return np.children[0].lex.lemma
    return None


def _embedding_type(sbar: Tree) -> str:
    return PERIPHERAL if sbar.rule in SUBJECT_GAP_RELS else CENTER


def _longest_chain(tree: Tree) -> tuple[str, ...]:
    best: tuple[str, ...] = ()
    for child in tree.children:
        chain = _longest_chain(child)
        if len(chain) > len(best):
            best = chain
    if tree.label == "SBAR":
        return (_embedding_type(tree),) + best
    return best


def quantifier_lemmas(tree: Tree) -> tuple[str, ...]:
    """All quantifier lemmas in the tree, left to right."""
    return tuple(node.lex.lemma for node in tree.iter_nodes() if node.label == "Q")


def tag(tree: Tree) -> PhenomenonTags:
    rules_used = {node.rule for node in tree.iter_nodes()}
    subject_np = tree.children[0]
    main_vp = tree.children[1]
    object_q = _np_quantifier(main_vp.children[1]) if main_vp.rule == "vp_tv" else None
    chain = _longest_chain(tree)
    return PhenomenonTags(
        subject_quantifier=_np_quantifier(subject_np),
        object_quantifier=object_q,
        has_negation=bool(rules_used & NEGATION_RULES),
        has_adjective="np_q_adj_n" in rules_used,
        has_adverb="vp_iv_adv" in rules_used,
        has_conjunction="vp_and" in rules_used,
        has_disjunction="vp_or" in rules_used,
        embedding_types=chain,
        depth=len(chain),
    )


def has_modifier(tags: PhenomenonTags) -> bool:
    return tags.has_adjective or tags.has_adverb or tags.has_conjunction or tags.has_disjunction

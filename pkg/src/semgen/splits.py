"""Controlled train/test splits over generated sentence pools.

Four strategies:

  * systematicity_modifier: training shows every quantifier without modifiers
    (Basic 1) and one primitive quantifier with every modifier pattern
    (Basic 2); test is non-primitive quantifiers combined with modifiers.
  * systematicity_negation: Basic 1 is the primitive quantifier under
    negation, Basic 2 is every quantifier in affirmative sentences; test is
    non-primitive quantifiers under negation.
  * productivity: train on embedding depths 0 and 1, test on depths 2-4,
    with a fixed record count per depth.
  * depth_exposure: all quantifiers at depth 0, a fixed primitive quantifier
    set at every depth 1-4 in training; the remaining quantifiers at depths
    1-4 in test.

Split membership is a pure function of a record's tags (plus its quantifier
inventory), so a pool can be re-partitioned deterministically.  Pool builders
sample each eligibility stratum directly: strata expressible as sub-grammars
(rule or quantifier restrictions) are sampled by unranking, the rest by
seeded rejection, which keeps every stratum draw uniform.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .grammar import Grammar, PhenomenonTags, has_modifier
from .records import DatasetRecord, record_from_tree

MODIFIER_RULES = ("np_q_adj_n", "vp_iv_adv", "vp_or", "vp_and")
NEGATION_RULES = ("s_neg", "rel_subj_neg", "rel_obj_neg")

ALL_QUANTIFIERS = ("every", "all", "a", "one", "two", "three")
DEPTH_TRAIN_QUANTIFIERS = ("one", "two", "every")
DEPTH_TEST_QUANTIFIERS = ("a", "three", "all")

TRAIN, VALID, TEST = "train", "valid", "test"


class SplitError(ValueError):
    pass


class InfeasibleSplit(SplitError):
    def __init__(self, requested: int, available: int, what: str):
        super().__init__(
            "requested %d %s records but only %d are available" % (requested, what, available)
        )
        self.requested = requested
        self.available = available


@dataclass(frozen=True)
class SplitSpec:
    strategy: str
    primitive: tuple[str, ...] = ("one",)
    pool_size: int = 50_000
    train_size: int = 12_000
    test_size: int = 38_000
    per_depth: int = 20_000
    train_per_depth: int = 2_000
    test_per_depth: int = 2_000
    max_depth: int = 4
    valid_fraction: float = 0.1
    seed: int = 0


# -- eligibility (pure functions of tags + quantifier inventory) -----------------


def _all_primitive(quantifiers, primitive) -> bool:
    return all(q in primitive for q in quantifiers)


def _any_non_primitive(quantifiers, primitive) -> bool:
    return any(q not in primitive for q in quantifiers)


def systematicity_class(tags: PhenomenonTags, quantifiers, primitive) -> str:
    """basic1 (no modifiers), basic2 (all quantifiers primitive, modified),
    or test (a non-primitive quantifier combined with a modifier)."""
    if not has_modifier(tags):
        return "basic1"
    if _all_primitive(quantifiers, primitive):
        return "basic2"
    return "test"


def negation_class(tags: PhenomenonTags, quantifiers, primitive) -> str:
    if not tags.has_negation:
        return "basic2"
    if _all_primitive(quantifiers, primitive):
        return "basic1"
    return "test"


def depth_exposure_class(tags: PhenomenonTags, quantifiers) -> str:
    if tags.depth == 0:
        return "train"
    if _all_primitive(quantifiers, DEPTH_TRAIN_QUANTIFIERS):
        return "train"
    if _all_primitive(quantifiers, DEPTH_TEST_QUANTIFIERS):
        return "test"
    return "excluded"


# -- pool builders ----------------------------------------------------------------


def _take(grammar: Grammar, n: int, seed: int, exact_depth: int, shape_filter=None):
    return grammar.sample_trees(
        n, seed=seed, exact_depth=exact_depth, shape_filter=shape_filter
    )


def _records(trees, prefix: str, start: int = 0) -> list[DatasetRecord]:
    return [record_from_tree(t, "%s%06d" % (prefix, start + i)) for i, t in enumerate(trees)]


def build_systematicity_pool(grammar: Grammar, spec: SplitSpec) -> list[DatasetRecord]:
    """Depth-0 pool sized so the split is feasible: train_size records from
    the Basic 1 / Basic 2 strata (proportional to their population sizes) and
    the rest from the test stratum."""
    if spec.train_size + spec.test_size != spec.pool_size:
        raise SplitError("pool_size must equal train_size + test_size")
    primitive = set(spec.primitive)
    g_nomod = grammar.restrict(drop_rules=MODIFIER_RULES)
    g_prim = grammar.restrict(quantifiers=primitive)
    g_prim_nomod = grammar.restrict(drop_rules=MODIFIER_RULES, quantifiers=primitive)

    n_basic1 = g_nomod.count_exact("S", 0)
    n_basic2 = g_prim.count_exact("S", 0) - g_prim_nomod.count_exact("S", 0)
    share1 = round(spec.train_size * n_basic1 / (n_basic1 + n_basic2))
    share2 = spec.train_size - share1

    basic1 = _take(g_nomod, share1, spec.seed, 0)
    basic2 = _take(
        g_prim,
        share2,
        spec.seed + 1,
        0,
        shape_filter=lambda t: any(n.rule in MODIFIER_RULES for n in t.iter_nodes()),
    )

    def test_eligible(tree) -> bool:
        mods = any(n.rule in MODIFIER_RULES for n in tree.iter_nodes())
        if not mods:
            return False
        quants = [n.lex.lemma for n in tree.iter_nodes() if n.label == "Q"]
        return any(q not in primitive for q in quants)

    test = _take(grammar, spec.test_size, spec.seed + 2, 0, shape_filter=test_eligible)
    return _records(basic1 + basic2 + test, "r")


def build_negation_pool(grammar: Grammar, spec: SplitSpec) -> list[DatasetRecord]:
    """Depth-0 pool for quantifier-negation systematicity."""
    if spec.train_size + spec.test_size != spec.pool_size:
        raise SplitError("pool_size must equal train_size + test_size")
    primitive = set(spec.primitive)
    g_affirm = grammar.restrict(drop_rules=NEGATION_RULES)
    g_prim = grammar.restrict(quantifiers=primitive)
    g_prim_affirm = grammar.restrict(drop_rules=NEGATION_RULES, quantifiers=primitive)

    n_basic1 = g_prim.count_exact("S", 0) - g_prim_affirm.count_exact("S", 0)
    n_basic2 = g_affirm.count_exact("S", 0)
    share1 = round(spec.train_size * n_basic1 / (n_basic1 + n_basic2))
    share2 = spec.train_size - share1

    def negated(tree) -> bool:
        return any(n.rule in NEGATION_RULES for n in tree.iter_nodes())

    basic1 = _take(g_prim, share1, spec.seed, 0, shape_filter=negated)
    basic2 = _take(g_affirm, share2, spec.seed + 1, 0)

    def test_eligible(tree) -> bool:
        if not negated(tree):
            return False
        quants = [n.lex.lemma for n in tree.iter_nodes() if n.label == "Q"]
        return any(q not in primitive for q in quants)

    test = _take(grammar, spec.test_size, spec.seed + 2, 0, shape_filter=test_eligible)
    return _records(basic1 + basic2 + test, "r")


def build_productivity_pool(grammar: Grammar, spec: SplitSpec) -> list[DatasetRecord]:
    """per_depth records at every exact depth 0..max_depth."""
    out: list[DatasetRecord] = []
    for depth in range(spec.max_depth + 1):
        trees = _take(grammar, spec.per_depth, spec.seed + depth, depth)
        out.extend(_records(trees, "d%d_" % depth))
    return out


def build_depth_exposure_pool(grammar: Grammar, spec: SplitSpec) -> list[DatasetRecord]:
    """Train strata: all quantifiers at depth 0, the fixed primitive trio at
    depths 1..max_depth; test strata: the complementary trio at depths 1+."""
    g_train = grammar.restrict(quantifiers=DEPTH_TRAIN_QUANTIFIERS)
    g_test = grammar.restrict(quantifiers=DEPTH_TEST_QUANTIFIERS)
    out: list[DatasetRecord] = []
    out.extend(
        _records(_take(grammar, spec.train_per_depth, spec.seed, 0), "d0_")
    )
    for depth in range(1, spec.max_depth + 1):
        out.extend(
            _records(
                _take(g_train, spec.train_per_depth, spec.seed + depth, depth),
                "d%d_tr" % depth,
            )
        )
        out.extend(
            _records(
                _take(g_test, spec.test_per_depth, spec.seed + 100 + depth, depth),
                "d%d_te" % depth,
            )
        )
    return out


def build_pool(grammar: Grammar, spec: SplitSpec) -> list[DatasetRecord]:
    builder = {
        "systematicity_modifier": build_systematicity_pool,
        "systematicity_negation": build_negation_pool,
        "productivity": build_productivity_pool,
        "depth_exposure": build_depth_exposure_pool,
    }.get(spec.strategy)
    if builder is None:
        raise SplitError("unknown strategy %r" % spec.strategy)
    return builder(grammar, spec)


# -- partitioning -----------------------------------------------------------------


def _sample_down(records, n, rng, what) -> list:
    if len(records) < n:
        raise InfeasibleSplit(n, len(records), what)
    if len(records) == n:
        return list(records)
    picked = sorted(rng.sample(range(len(records)), n))
    return [records[i] for i in picked]


def _carve_validation(train, fraction: float, rng) -> None:
    """Mark a stratified validation share inside the training records."""
    if not 0 <= fraction < 1:
        raise SplitError("valid_fraction must be in [0, 1)")
    strata: dict[tuple, list] = {}
    for r in train:
        key = (
            r.tags.subject_quantifier,
            r.tags.object_quantifier,
            r.tags.has_negation,
            has_modifier(r.tags),
            r.tags.depth,
        )
        strata.setdefault(key, []).append(r)
    quota = round(len(train) * fraction)
    taken = 0
    for key in sorted(strata, key=repr):
        group = strata[key]
        want = round(len(group) * fraction)
        for i in sorted(rng.sample(range(len(group)), min(want, len(group)))):
            group[i].split = VALID
            taken += 1
    # round the total toward the quota with arbitrary-but-seeded extras
    if taken < quota:
        rest = [r for r in train if r.split != VALID]
        for i in sorted(rng.sample(range(len(rest)), quota - taken)):
            rest[i].split = VALID


def _finalize(train, test, spec: SplitSpec, strategy: str, rng) -> list[DatasetRecord]:
    for r in train:
        r.split = TRAIN
    for r in test:
        r.split = TEST
    _carve_validation(train, spec.valid_fraction, rng)
    out = train + test
    for r in out:
        r.strategy = strategy
        r.primitive = list(spec.primitive)
    return out


def build_systematicity(records, spec: SplitSpec) -> list[DatasetRecord]:
    rng = random.Random(spec.seed + 1000)
    groups: dict[str, list] = {"basic1": [], "basic2": [], "test": []}
    for r in records:
        groups[systematicity_class(r.tags, r.quantifiers, set(spec.primitive))].append(r)
    n1, n2 = len(groups["basic1"]), len(groups["basic2"])
    if n1 + n2 < spec.train_size:
        raise InfeasibleSplit(spec.train_size, n1 + n2, "train-eligible")
    share1 = min(n1, round(spec.train_size * n1 / (n1 + n2)))
    share2 = spec.train_size - share1
    train = _sample_down(groups["basic1"], share1, rng, "basic1") + _sample_down(
        groups["basic2"], share2, rng, "basic2"
    )
    test = _sample_down(groups["test"], spec.test_size, rng, "test-eligible")
    return _finalize(train, test, spec, "systematicity_modifier", rng)


def build_negation_systematicity(records, spec: SplitSpec) -> list[DatasetRecord]:
    rng = random.Random(spec.seed + 2000)
    groups: dict[str, list] = {"basic1": [], "basic2": [], "test": []}
    for r in records:
        groups[negation_class(r.tags, r.quantifiers, set(spec.primitive))].append(r)
    n1, n2 = len(groups["basic1"]), len(groups["basic2"])
    if n1 + n2 < spec.train_size:
        raise InfeasibleSplit(spec.train_size, n1 + n2, "train-eligible")
    share1 = min(n1, round(spec.train_size * n1 / (n1 + n2)))
    share2 = spec.train_size - share1
    train = _sample_down(groups["basic1"], share1, rng, "basic1") + _sample_down(
        groups["basic2"], share2, rng, "basic2"
    )
    test = _sample_down(groups["test"], spec.test_size, rng, "test-eligible")
    return _finalize(train, test, spec, "systematicity_negation", rng)


def build_productivity(records, spec: SplitSpec) -> list[DatasetRecord]:
    rng = random.Random(spec.seed + 3000)
    by_depth: dict[int, list] = {}
    for r in records:
        by_depth.setdefault(r.tags.depth, []).append(r)
    train: list = []
    test: list = []
    for depth in range(spec.max_depth + 1):
        group = _sample_down(
            by_depth.get(depth, []), spec.per_depth, rng, "depth-%d" % depth
        )
        (train if depth <= 1 else test).extend(group)
    return _finalize(train, test, spec, "productivity", rng)


def build_depth_exposure(records, spec: SplitSpec) -> list[DatasetRecord]:
    rng = random.Random(spec.seed + 4000)
    train: list = []
    test: list = []
    for r in records:
        klass = depth_exposure_class(r.tags, r.quantifiers)
        if klass == "train":
            train.append(r)
        elif klass == "test":
            test.append(r)
    if not train or not test:
        raise InfeasibleSplit(1, 0, "depth-exposure")
    out_spec = SplitSpec(
        strategy="depth_exposure",
        primitive=DEPTH_TRAIN_QUANTIFIERS,
        valid_fraction=spec.valid_fraction,
        seed=spec.seed,
    )
    return _finalize(train, test, out_spec, "depth_exposure", rng)


def build_split(records, spec: SplitSpec) -> list[DatasetRecord]:
    builder = {
        "systematicity_modifier": build_systematicity,
        "systematicity_negation": build_negation_systematicity,
        "productivity": build_productivity,
        "depth_exposure": build_depth_exposure,
    }.get(spec.strategy)
    if builder is None:
        raise SplitError("unknown strategy %r" % spec.strategy)
    return builder(records, spec)


# -- integrity checks ---------------------------------------------------------------


def leakage_report(records, primitive) -> dict:
    """Sentence-level train/test overlap and test-only (non-primitive
    quantifier, modifier kind) pairs that also occur in training sentences."""
    primitive = set(primitive)
    train_sentences = {r.sentence for r in records if r.split in (TRAIN, VALID)}
    test_sentences = {r.sentence for r in records if r.split == TEST}

    def pairs(r):
        kinds = []
        if r.tags.has_adjective:
            kinds.append("Adj")
        if r.tags.has_adverb:
            kinds.append("Adv")
        if r.tags.has_conjunction or r.tags.has_disjunction:
            kinds.append("Con")
        return {
            (q, kind)
            for q in r.quantifiers
            if q not in primitive
            for kind in kinds
        }

    train_pairs = set()
    test_pairs = set()
    for r in records:
        if r.split in (TRAIN, VALID):
            train_pairs |= pairs(r)
        elif r.split == TEST:
            test_pairs |= pairs(r)
    return {
        "sentence_overlap": sorted(train_sentences & test_sentences),
        "leaked_pairs": sorted(test_pairs & train_pairs),
    }

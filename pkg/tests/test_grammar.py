import itertools

import pytest

from semgen.grammar import (
    CENTER,
    PERIPHERAL,
    Grammar,
    PopulationTooSmall,
    RULES,
    realize,
    tag,
)
from semgen.lexicon import DEFAULT_CONFIG, Lexicon, Noun, Quantifier, Verb, Word, _from_config

# A one-word-per-category lexicon keeps exhaustive enumeration tractable.
TINY = _from_config(
    {
        "N": [["tiger", "tiger", "tigers"]],
        "PN": ["ann"],
        "IV": [["run", "ran", "run"]],
        "IV2": [["come", "came", "come"]],
        "TV": [["kick", "kicked", "kick"]],
        "Adj": ["small"],
        "Adv": ["slowly"],
    }
)


def intransitive_view(grammar):
    return grammar.restrict(
        drop_rules=(
            "np_pn",
            "np_q_adj_n",
            "np_qn_rel",
            "np_pn_rel",
            "vp_iv_adv",
            "vp_or",
            "vp_and",
            "vp_tv",
        )
    )


def test_single_expansion_fragment(grammar):
    g = intransitive_view(grammar).restrict(drop_rules=("s_neg",), quantifiers={"one"})
    g = Grammar(
        _from_config(
            {
                "N": [["tiger", "tiger", "tigers"]],
                "PN": ["ann"],
                "IV": [["run", "ran", "run"]],
                "IV2": [["come", "came", "come"]],
                "TV": [["kick", "kicked", "kick"]],
                "Adj": ["small"],
                "Adv": ["slowly"],
            }
        ).restrict_quantifiers({"one"}),
        tuple(r for r in RULES if r.rid in ("s", "np_qn", "vp_iv")),
    )
    trees = list(g.enumerate_trees(0))
    assert len(trees) == 1
    assert realize(trees[0]) == "one tiger ran"


def test_plain_intransitive_count_regression(grammar, lexicon):
    # independent oracle: explicit product over the closed word classes
    expected = len(lexicon.quantifiers) * len(lexicon.nouns) * len(lexicon.intransitives) * 2
    assert expected == 924  # frozen for the default lexicon
    g = intransitive_view(grammar)
    assert g.count_le("S", 0) == expected
    assert sum(1 for _ in g.enumerate_trees(0)) == expected


def test_depth_bound(grammar):
    assert grammar.count_exact("S", 4) > 0
    # the bound is sharp: a depth-4 enumeration licenses no 5-chain
    tree = grammar.unrank_exact("S", 4, 12345)
    assert tag(tree).depth == 4
    tree5 = grammar.unrank_exact("S", 5, 999)
    assert tag(tree5).depth == 5  # only when explicitly asked for depth 5


def test_enumeration_matches_unranking():
    g = Grammar(TINY)
    enumerated = list(g.enumerate_trees(0))
    assert len(enumerated) == g.count_le("S", 0)
    for i in (0, 1, len(enumerated) // 2, len(enumerated) - 1):
        assert g.unrank_le("S", 0, i) == enumerated[i]
    # depth 1 is large; check the canonical order on a prefix
    prefix = list(itertools.islice(g.enumerate_trees(1), 3000))
    for i in (0, 1, 500, 2999):
        assert g.unrank_le("S", 1, i) == prefix[i]


def test_exact_depth_partition():
    # unrank_exact is a bijection onto the exact-depth stratum (its internal
    # order may differ from the filtered stream order)
    import random

    g = Grammar(TINY.restrict_quantifiers({"one", "all"}))
    le1 = list(g.enumerate_trees(1))
    exact1 = {str(t.encode()) for t in le1 if tag(t).depth == 1}
    n = g.count_exact("S", 1)
    assert n == len(exact1)
    assert g.count_exact("S", 0) + n == g.count_le("S", 1)
    indices = random.Random(0).sample(range(n), 1500) + [0, n - 1]
    unranked = [str(g.unrank_exact("S", 1, i).encode()) for i in indices]
    assert len(set(unranked)) == len(set(indices))  # injective on the sample
    assert set(unranked) <= exact1


def test_enumeration_determinism():
    a = [t.encode() for t in itertools.islice(Grammar(TINY).enumerate_trees(1), 4000)]
    b = [t.encode() for t in itertools.islice(Grammar(TINY).enumerate_trees(1), 4000)]
    assert a == b


def test_rule_coverage_at_depth_one():
    g = Grammar(TINY)
    wanted = {r.rid for r in RULES}
    used = set()
    for tree in g.enumerate_trees(1):
        used |= {n.rule for n in tree.iter_nodes() if not n.rule.startswith("lex:")}
        if used == wanted:
            break
    assert used == wanted


def test_sampling_determinism(grammar):
    a = grammar.sample_trees(50, seed=9, max_depth=0)
    b = grammar.sample_trees(50, seed=9, max_depth=0)
    assert [t.encode() for t in a] == [t.encode() for t in b]
    c = grammar.sample_trees(50, seed=10, max_depth=0)
    assert [t.encode() for t in a] != [t.encode() for t in c]


def test_sample_empty(grammar):
    assert grammar.sample_trees(0, seed=1, max_depth=0) == []


def test_population_too_small():
    g = Grammar(TINY)
    population = g.count_le("S", 0)
    with pytest.raises(PopulationTooSmall) as err:
        g.sample_trees(population + 1, seed=0, max_depth=0)
    assert err.value.population == population


def test_samples_distinct(grammar):
    trees = grammar.sample_trees(2000, seed=4, max_depth=0)
    encoded = [tuple(map(str, t.encode())) for t in trees]
    assert len(set(encoded)) == len(encoded)


# -- realization ------------------------------------------------------------------


def test_realize_examples(build):
    assert realize(build.s(build.np("two", "tiger"), build.vp_iv("run"))) == "two tigers ran"
    assert (
        realize(build.s(build.np("one", "tiger"), build.vp_iv("run"), neg=True))
        == "one tiger did not run"
    )
    center = build.s(
        build.np("two", "dog", rel=build.rel_obj(build.np("all", "cat"), "kick")),
        build.vp_tv("love", build.pn("ann")),
    )
    assert realize(center) == "two dogs that all cats kicked loved ann"


def test_realize_negated_coordination(build):
    t = build.s(build.np("one", "tiger"), build.vp_conj("run", "come", "or"), neg=True)
    assert realize(t) == "one tiger did not run or come"


def test_agreement_surface_scan(grammar, lexicon):
    # plural determiners never pair with singular noun forms and vice versa
    sg_forms = {n.sg for n in lexicon.nouns}
    pl_forms = {n.pl for n in lexicon.nouns}
    number = {q.lemma: q.number for q in lexicon.quantifiers}
    for tree in grammar.sample_trees(300, seed=12, max_depth=1):
        tokens = realize(tree).split()
        for i, tok in enumerate(tokens[:-1]):
            if tok in number:
                nxt = tokens[i + 1]
                follow = tokens[i + 2] if i + 2 < len(tokens) else None
                noun = nxt if nxt in sg_forms | pl_forms else follow
                assert noun is not None
                if number[tok] == "sg":
                    assert noun in sg_forms
                else:
                    assert noun in pl_forms


# -- tags --------------------------------------------------------------------------


def test_tag_disjunction_example(build):
    t = build.s(build.np("every", "tiger"), build.vp_conj("run", "come", "or"))
    tags = tag(t)
    assert tags.subject_quantifier == "every"
    assert tags.has_disjunction and not tags.has_conjunction
    assert tags.depth == 0 and not tags.has_negation


def test_tag_peripheral_embedding(build):
    rel = build.rel_subj(build.vp_tv("chase", build.np("all", "cat", adj="polite")))
    t = build.s(build.pn("bob"), build.vp_tv("like", build.np("a", "bear", rel=rel)))
    tags = tag(t)
    assert realize(t) == "bob liked a bear that chased all polite cats"
    assert tags.object_quantifier == "a"
    assert tags.has_adjective
    assert tags.embedding_types == (PERIPHERAL,)
    assert tags.depth == 1


def test_tag_plain(build):
    tags = tag(build.s(build.np("one", "tiger"), build.vp_iv("run")))
    assert tags.subject_quantifier == "one"
    assert tags.object_quantifier is None
    assert not (tags.has_negation or tags.has_adjective or tags.has_adverb)
    assert not (tags.has_conjunction or tags.has_disjunction)
    assert tags.depth == 0


def test_tag_center_embedding(build):
    t = build.s(
        build.np("two", "dog", rel=build.rel_obj(build.np("all", "cat"), "kick")),
        build.vp_tv("love", build.pn("ann")),
    )
    assert tag(t).embedding_types == (CENTER,)


def test_tag_mixed_chain_outermost_first(build):
    # object-gap outer relative whose embedded subject hosts a subject-gap relative
    inner = build.np(
        "a", "bear", rel=build.rel_subj(build.vp_tv("chase", build.np("all", "cat", adj="polite")))
    )
    t = build.s(
        build.np("two", "dog", rel=build.rel_obj(inner, "kick")),
        build.vp_tv("love", build.pn("ann")),
    )
    tags = tag(t)
    assert realize(t) == "two dogs that a bear that chased all polite cats kicked loved ann"
    assert tags.embedding_types == (CENTER, PERIPHERAL)
    assert tags.depth == 2


def test_depth_equals_chain_length(grammar):
    for tree in grammar.sample_trees(40, seed=3, exact_depth=2):
        tags = tag(tree)
        assert tags.depth == len(tags.embedding_types) == 2

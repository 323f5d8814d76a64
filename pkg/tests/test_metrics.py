import random

import pytest

from semgen.drs import parse_clauses
from semgen.grammar import PhenomenonTags
from semgen.metrics import (
    ClauseMatchResult,
    MappingSearchConfig,
    aggregate,
    clause_match_f,
    exact_match,
    modifier_cell,
    polarity_prf,
    quantifier_type_cell,
)
from semgen.polarity import PolarizedToken
from tests.conftest import TABLE16_GOLD, TABLE16_GRU, TABLE16_TRANSFORMER


def clauses(lines):
    return parse_clauses("\n".join(lines))


def test_exact_match():
    assert exact_match("a b c", "a  b   c") == 1
    assert exact_match("exists x1 . run ( x1 )", "exists x2 . run ( x2 )") == 0
    assert exact_match("a b", "") == 0


def test_identical_clause_sets():
    gold = clauses(TABLE16_GOLD)
    assert clause_match_f(gold, gold).f == 1.0


def test_tiny_mapping_example():
    gold = clauses(["b1 REF x1", "b1 dog x1"])
    pred = clauses(["b9 REF x7", "b9 cat x7"])
    got = clause_match_f(gold, pred, MappingSearchConfig(include_ref=True))
    assert got.matched == 1
    assert got.f == pytest.approx(0.5)


def test_empty_prediction():
    gold = clauses(["b1 dog x1"])
    assert clause_match_f(gold, []) == ClauseMatchResult(0.0, 0.0, 0.0, 0)


def test_deep_nesting_calibration():
    gold = clauses(TABLE16_GOLD)
    for pred_lines, target in ((TABLE16_GRU, 0.45), (TABLE16_TRANSFORMER, 0.42)):
        pred = clauses(pred_lines)
        exhaustive = clause_match_f(gold, pred)
        climbing = clause_match_f(gold, pred, force_hill_climbing=True)
        assert abs(exhaustive.f - target) <= 0.05
        assert exhaustive.f == pytest.approx(climbing.f)


def random_clause_set(rng, n_boxes, n_refs, n_clauses):
    boxes = ["b%d" % i for i in range(1, n_boxes + 1)]
    refs = ["x%d" % i for i in range(1, n_refs + 1)]
    lemmas = ["dog", "cat", "run", "chase", "NOT", "REF"]
    out = []
    for _ in range(n_clauses):
        head = rng.choice(lemmas)
        if head == "REF":
            out.append((rng.choice(boxes), "REF", rng.choice(refs)))
        elif head == "NOT":
            out.append((rng.choice(boxes), "NOT", rng.choice(boxes)))
        elif head == "chase":
            out.append((rng.choice(boxes), head, rng.choice(refs), rng.choice(refs)))
        else:
            out.append((rng.choice(boxes), head, rng.choice(refs)))
    return out


def test_hill_climbing_matches_exhaustive_on_small_instances():
    rng = random.Random(123)
    for trial in range(200):
        gold = random_clause_set(rng, rng.randint(1, 3), rng.randint(1, 3), rng.randint(2, 8))
        pred = random_clause_set(rng, rng.randint(1, 3), rng.randint(1, 3), rng.randint(2, 8))
        cfg = MappingSearchConfig(seed=trial)
        exhaustive = clause_match_f(gold, pred, cfg)
        climbing = clause_match_f(gold, pred, cfg, force_hill_climbing=True)
        assert climbing.f == pytest.approx(exhaustive.f), (gold, pred)


def rename_vars(clause):
    import re

    out = []
    for tok in clause:
        if re.match(r"^b\d+$", tok):
            out.append("b%d" % (int(tok[1:]) + 10))
        elif re.match(r"^x\d+$", tok):
            out.append("x%d" % (int(tok[1:]) + 10))
        else:
            out.append(tok)
    return tuple(out)


def test_renaming_invariance():
    gold = clauses(TABLE16_GOLD)
    renamed = [rename_vars(c) for c in gold]
    assert clause_match_f(gold, renamed).f == 1.0
    base = clause_match_f(gold, clauses(TABLE16_GRU))
    shifted = clause_match_f(gold, [rename_vars(c) for c in clauses(TABLE16_GRU)])
    assert shifted.f == pytest.approx(base.f)


def test_deleting_matched_clause_never_raises_f():
    from semgen.metrics import _apply_mapping

    gold = clauses(TABLE16_GOLD)
    pred = [c for c in clauses(TABLE16_GRU) if c[1] != "REF"]
    base = clause_match_f(gold, pred)
    gold_scored = set(c for c in gold if c[1] != "REF")
    matched = [
        i for i, c in enumerate(pred) if _apply_mapping(c, base.mapping) in gold_scored
    ]
    assert matched
    for i in matched:
        smaller = pred[:i] + pred[i + 1 :]
        assert clause_match_f(gold, smaller).f <= base.f + 1e-12


def test_unmapped_variables_never_match():
    gold = clauses(["b1 dog x1"])
    pred = clauses(["b1 dog x1", "b2 cat x2"])
    got = clause_match_f(gold, pred)
    assert got.matched == 1


# -- polarity scoring ---------------------------------------------------------


def P(lemma, direction, index=0):
    return PolarizedToken(lemma, direction, index)


def test_polarity_prf_missing_modifier():
    gold = [P("cat", "down"), P("wild", "down"), P("escape", "up"), P("run", "up")]
    pred = [P("cat", "down"), P("escape", "up"), P("run", "up")]
    got = polarity_prf(gold, pred)
    assert got["up"] == {"precision": 1.0, "recall": 1.0, "f": 1.0}
    assert got["down"]["precision"] == 1.0
    assert got["down"]["recall"] == pytest.approx(0.5)


def test_polarity_prf_identical():
    gold = [P("dog", "up"), P("run", "down")]
    got = polarity_prf(gold, list(gold))
    for direction in ("up", "down"):
        assert got[direction] == {"precision": 1.0, "recall": 1.0, "f": 1.0}


def test_polarity_prf_flipped_direction_unmatched():
    gold = [P("run", "up")]
    pred = [P("run", "down")]
    got = polarity_prf(gold, pred)
    assert got["up"]["recall"] == 0.0
    assert got["down"]["precision"] == 0.0


# -- aggregation ----------------------------------------------------------------


def tags_for(sq=None, oq=None, neg=False, adj=False, adv=False, con=False, depth=0):
    return PhenomenonTags(
        subject_quantifier=sq,
        object_quantifier=oq,
        has_negation=neg,
        has_adjective=adj,
        has_adverb=adv,
        has_conjunction=con,
        has_disjunction=False,
        embedding_types=("peripheral",) * depth,
        depth=depth,
    )


def test_aggregate_all_perfect():
    rows = [
        {"id": str(i), "tags": tags_for(sq="one"), "scores": {"exact": 1.0}} for i in range(4)
    ]
    report = aggregate(rows)
    assert report.overall == {"exact": 1.0}
    assert report.by_quantifier_type == {"Exi": {"exact": 1.0}}


def test_aggregate_mixed_cell():
    rows = [
        {"id": "1", "tags": tags_for(sq="two"), "scores": {"exact": 1.0}},
        {"id": "2", "tags": tags_for(sq="three"), "scores": {"exact": 0.0}},
    ]
    report = aggregate(rows)
    assert report.by_quantifier_type["Num"]["exact"] == pytest.approx(0.5)


def test_aggregate_depth_rows():
    rows = [
        {"id": str(d), "tags": tags_for(sq="a", depth=d), "scores": {"exact": 1.0}}
        for d in (2, 3, 4)
    ]
    report = aggregate(rows)
    assert set(report.by_depth) == {"Dep2", "Dep3", "Dep4"}


def test_aggregate_empty_cells_absent():
    rows = [{"id": "1", "tags": tags_for(sq="one"), "scores": {"exact": 1.0}}]
    report = aggregate(rows)
    assert "Uni" not in report.by_quantifier_type


def test_cells():
    assert quantifier_type_cell(tags_for(sq="every")) == "Uni"
    assert quantifier_type_cell(tags_for(oq="a")) == "Exi"
    assert quantifier_type_cell(tags_for()) is None
    assert modifier_cell(tags_for(adj=True)) == "Adj"
    assert modifier_cell(tags_for(adv=True, neg=True)) == "Adv+Neg"
    assert modifier_cell(tags_for(con=True, adj=True)) == "Multi"
    assert modifier_cell(tags_for()) == "None"

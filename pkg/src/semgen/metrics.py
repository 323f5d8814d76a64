"""Scoring: exact match, clause F-score under the best variable mapping,
per-direction polarity precision/recall/F, and per-tag aggregation.

Clause matching maps prediction variables onto gold variables one-to-one,
box labels and referents forming separate namespaces, and maximizes the
number of clauses that become identical under the mapping.  Small instances
are solved exactly by enumerating injections; larger ones run greedy
hill-climbing from a smart start plus random restarts.  REF clauses are
treated as structural bookkeeping and excluded from scoring unless
`include_ref` is set.
"""

from __future__ import annotations

import itertools
import random
import re
from collections import Counter
from dataclasses import dataclass, field

from .drs import Clause
from .polarity import DOWN, UP, polarity_multiset

_BOX_RE = re.compile(r"^b\d+$")
_REF_RE = re.compile(r"^x\d+$")


@dataclass(frozen=True)
class MappingSearchConfig:
    restarts: int = 10
    exhaustive_threshold: int = 8  # max variables per side (boxes + referents)
    seed: int = 0
    include_ref: bool = False


@dataclass
class ClauseMatchResult:
    precision: float
    recall: float
    f: float
    matched: int
    mapping: dict[str, str] = field(default_factory=dict)


def exact_match(gold_tokens, pred_tokens) -> int:
    """1 iff the two token sequences are identical after whitespace
    normalization."""
    if isinstance(gold_tokens, str):
        gold_tokens = gold_tokens.split()
    if isinstance(pred_tokens, str):
        pred_tokens = pred_tokens.split()
    return int(list(gold_tokens) == list(pred_tokens))


def _variables(clauses) -> tuple[list[str], list[str]]:
    boxes: list[str] = []
    refs: list[str] = []
    for c in clauses:
        for tok in c:
            if _BOX_RE.match(tok):
                if tok not in boxes:
                    boxes.append(tok)
            elif _REF_RE.match(tok):
                if tok not in refs:
                    refs.append(tok)
    return boxes, refs


def _apply_mapping(clause: Clause, mapping: dict[str, str]) -> Clause:
    # An unmapped prediction variable matches nothing: replace it with a
    # sentinel outside the gold namespace rather than passing its name through.
    out = []
    for tok in clause:
        if _BOX_RE.match(tok) or _REF_RE.match(tok):
            out.append(mapping.get(tok, "?" + tok))
        else:
            out.append(tok)
    return tuple(out)


def _matched_count(pred, gold_counter, mapping) -> int:
    pool = Counter(gold_counter)
    m = 0
    for c in pred:
        mc = _apply_mapping(c, mapping)
        if pool[mc] > 0:
            pool[mc] -= 1
            m += 1
    return m


def _injections(sources: list[str], targets: list[str]):
    """Every injective partial map source->target, unmapped sources omitted."""
    n = len(sources)
    for k in range(min(n, len(targets)), -1, -1):
        for chosen in itertools.combinations(range(n), k):
            for perm in itertools.permutations(targets, k):
                yield {sources[i]: t for i, t in zip(chosen, perm)}


def _score(m: int, n_pred: int, n_gold: int) -> tuple[float, float, float]:
    p = m / n_pred if n_pred else 0.0
    r = m / n_gold if n_gold else 0.0
    f = 2 * m / (n_pred + n_gold) if (n_pred + n_gold) else 0.0
    return p, r, f


def clause_match_f(
    gold: list[Clause],
    pred: list[Clause],
    cfg: MappingSearchConfig | None = None,
    force_hill_climbing: bool = False,
) -> ClauseMatchResult:
    cfg = cfg or MappingSearchConfig()
    if not cfg.include_ref:
        gold = [c for c in gold if len(c) < 2 or c[1] != "REF"]
        pred = [c for c in pred if len(c) < 2 or c[1] != "REF"]
    if not pred or not gold:
        return ClauseMatchResult(0.0, 0.0, 0.0, 0)

    gold_counter = Counter(gold)
    p_boxes, p_refs = _variables(pred)
    g_boxes, g_refs = _variables(gold)

    if Counter(pred) == gold_counter:  # identical multisets match under identity
        identity = {v: v for v in p_boxes + p_refs}
        return ClauseMatchResult(1.0, 1.0, 1.0, len(pred), identity)

    small = (
        len(p_boxes) + len(p_refs) <= cfg.exhaustive_threshold
        and len(g_boxes) + len(g_refs) <= cfg.exhaustive_threshold
    )
    if small and not force_hill_climbing:
        best_m, best_map = _exhaustive_search(pred, gold_counter, p_boxes, p_refs, g_boxes, g_refs)
    else:
        best_m, best_map = _hill_climb(
            pred, gold_counter, p_boxes, p_refs, g_boxes, g_refs, cfg
        )
    p, r, f = _score(best_m, len(pred), len(gold))
    return ClauseMatchResult(p, r, f, best_m, best_map)


def _exhaustive_search(pred, gold_counter, p_boxes, p_refs, g_boxes, g_refs):
    best_m = -1
    best_map: dict[str, str] = {}
    for bmap in _injections(p_boxes, g_boxes):
        for rmap in _injections(p_refs, g_refs):
            mapping = {**bmap, **rmap}
            m = _matched_count(pred, gold_counter, mapping)
            if m > best_m:
                best_m, best_map = m, mapping
    return best_m, best_map


def _hill_climb(pred, gold_counter, p_boxes, p_refs, g_boxes, g_refs, cfg):
    rng = random.Random(cfg.seed)
    gold_clauses = list(gold_counter.elements())

    def evaluate(bmap, rmap):
        return _matched_count(pred, gold_counter, {**bmap, **rmap})

    def smart_init():
        # models tend to copy the gold naming scheme, so identity is a strong
        # starting point
        bmap = {v: v for v in p_boxes if v in g_boxes}
        rmap = {v: v for v in p_refs if v in g_refs}
        return bmap, rmap

    def random_init():
        sources_b = rng.sample(p_boxes, len(p_boxes))
        sources_r = rng.sample(p_refs, len(p_refs))
        bmap = dict(zip(sources_b, rng.sample(g_boxes, min(len(p_boxes), len(g_boxes)))))
        rmap = dict(zip(sources_r, rng.sample(g_refs, min(len(p_refs), len(g_refs)))))
        # anchor the mapping on one head-compatible clause pair so at least
        # one match survives the shuffle
        compatible = [
            (pc, gc)
            for pc in pred
            for gc in gold_clauses
            if len(pc) == len(gc) and pc[1] == gc[1]
        ]
        if compatible:
            pc, gc = compatible[rng.randrange(len(compatible))]
            for ptok, gtok in zip(pc, gc):
                if _BOX_RE.match(ptok) and _BOX_RE.match(gtok):
                    _force(bmap, ptok, gtok)
                elif _REF_RE.match(ptok) and _REF_RE.match(gtok):
                    _force(rmap, ptok, gtok)
        return bmap, rmap

    def climb(bmap, rmap):
        score = evaluate(bmap, rmap)
        improved = True
        while improved:
            improved = False
            for namespace, sources, targets in (
                (bmap, p_boxes, g_boxes),
                (rmap, p_refs, g_refs),
            ):
                for v in sources:
                    current = namespace.get(v)
                    used = set(namespace.values())
                    options = [t for t in targets if t not in used or t == current]
                    options.append(None)
                    for t in options:
                        if t == current:
                            continue
                        if t is None:
                            namespace.pop(v, None)
                        else:
                            namespace[v] = t
                        s = evaluate(bmap, rmap)
                        if s > score:
                            score = s
                            current = t
                            improved = True
                        else:
                            if current is None:
                                namespace.pop(v, None)
                            else:
                                namespace[v] = current
                    # try swapping v's image with another variable's image
                    for other in sources:
                        if other == v or namespace.get(other) == namespace.get(v):
                            continue
                        a, b = namespace.get(v), namespace.get(other)
                        _swap(namespace, v, other)
                        s = evaluate(bmap, rmap)
                        if s > score:
                            score = s
                            improved = True
                        else:
                            _restore(namespace, v, other, a, b)
        return score

    best_m = -1
    best_map: dict[str, str] = {}
    for attempt in range(max(1, cfg.restarts)):
        bmap, rmap = smart_init() if attempt == 0 else random_init()
        m = climb(bmap, rmap)
        if m > best_m:
            best_m = m
            best_map = {**bmap, **rmap}
    return best_m, best_map


def _force(namespace: dict, source: str, target: str) -> None:
    """source -> target, evicting whichever variable held the target."""
    for holder, t in list(namespace.items()):
        if t == target and holder != source:
            del namespace[holder]
    namespace[source] = target


def _swap(namespace, v, other):
    a, b = namespace.get(v), namespace.get(other)
    if b is None:
        namespace.pop(v, None)
    else:
        namespace[v] = b
    if a is None:
        namespace.pop(other, None)
    else:
        namespace[other] = a


def _restore(namespace, v, other, a, b):
    if a is None:
        namespace.pop(v, None)
    else:
        namespace[v] = a
    if b is None:
        namespace.pop(other, None)
    else:
        namespace[other] = b


# -- polarity scoring ----------------------------------------------------------


def polarity_prf(gold_tokens, pred_tokens) -> dict[str, dict[str, float]]:
    """Per-direction precision/recall/F over (lemma, direction) multisets."""
    gold_ms = polarity_multiset(gold_tokens)
    pred_ms = polarity_multiset(pred_tokens)
    out: dict[str, dict[str, float]] = {}
    for direction in (UP, DOWN):
        g = {k: v for k, v in gold_ms.items() if k[1] == direction}
        p = {k: v for k, v in pred_ms.items() if k[1] == direction}
        matched = sum(min(v, p.get(k, 0)) for k, v in g.items())
        n_gold = sum(g.values())
        n_pred = sum(p.values())
        prec = matched / n_pred if n_pred else (1.0 if not n_gold else 0.0)
        rec = matched / n_gold if n_gold else 1.0
        f = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        out[direction] = {"precision": prec, "recall": rec, "f": f}
    return out


# -- aggregation ----------------------------------------------------------------

QUANTIFIER_TYPE = {
    "a": "Exi",
    "one": "Exi",
    "two": "Num",
    "three": "Num",
    "every": "Uni",
    "all": "Uni",
}


def quantifier_type_cell(tags) -> str | None:
    q = tags.subject_quantifier or tags.object_quantifier
    return QUANTIFIER_TYPE.get(q) if q else None


def modifier_cell(tags) -> str:
    kinds = []
    if tags.has_adjective:
        kinds.append("Adj")
    if tags.has_adverb:
        kinds.append("Adv")
    if tags.has_conjunction or tags.has_disjunction:
        kinds.append("Con")
    base = kinds[0] if len(kinds) == 1 else ("None" if not kinds else "Multi")
    return base + "+Neg" if tags.has_negation else base


@dataclass
class EvalReport:
    n: int
    overall: dict[str, float]
    by_quantifier_type: dict[str, dict[str, float]]
    by_modifier: dict[str, dict[str, float]]
    by_depth: dict[str, dict[str, float]]
    unparseable: dict[str, int]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "overall": self.overall,
            "by_quantifier_type": self.by_quantifier_type,
            "by_modifier": self.by_modifier,
            "by_depth": self.by_depth,
            "unparseable": self.unparseable,
        }


def aggregate(rows: list[dict]) -> EvalReport:
    """rows: [{"tags": PhenomenonTags, "scores": {metric: float},
    "unparseable": bool}]; cells average per-record scores, empty cells are
    simply absent."""

    def mean_cells(key_fn) -> dict[str, dict[str, float]]:
        groups: dict[str, list[dict]] = {}
        for row in rows:
            key = key_fn(row["tags"])
            if key is None:
                continue
            groups.setdefault(key, []).append(row["scores"])
        out: dict[str, dict[str, float]] = {}
        for key, scores in sorted(groups.items()):
            metrics: dict[str, list[float]] = {}
            for s in scores:
                for metric, value in s.items():
                    metrics.setdefault(metric, []).append(value)
            out[key] = {m: sum(v) / len(v) for m, v in sorted(metrics.items())}
        return out

    overall: dict[str, list[float]] = {}
    for row in rows:
        for metric, value in row["scores"].items():
            overall.setdefault(metric, []).append(value)
    unparseable = sum(1 for r in rows if r.get("unparseable"))
    return EvalReport(
        n=len(rows),
        overall={m: sum(v) / len(v) for m, v in sorted(overall.items())},
        by_quantifier_type=mean_cells(quantifier_type_cell),
        by_modifier=mean_cells(modifier_cell),
        by_depth=mean_cells(lambda t: "Dep%d" % t.depth),
        unparseable={"count": unparseable},
    )

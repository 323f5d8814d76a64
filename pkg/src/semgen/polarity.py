"""Monotonicity polarity marking over both formula languages.

Every content-word occurrence gets an upward or downward direction.  The
traversal starts upward; negation flips the direction, the antecedent of an
implication flips it (so does the first operand of the variable-free ALL), and
everything else preserves it.  Proper nouns and the numeral markers two/three
are not polarized.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import fol, vf
from .lexicon import NUMERAL_MARKERS

UP = "up"
DOWN = "down"


@dataclass(frozen=True)
class PolarizedToken:
    lemma: str
    polarity: str
    index: int  # occurrence position, to keep multiset semantics

    def to_json(self) -> dict:
        return {"lemma": self.lemma, "direction": self.polarity}


def _flip(direction: str) -> str:
    return DOWN if direction == UP else UP


def polarize_fol(formula: fol.Fol, exclude: frozenset[str] = frozenset()) -> list[PolarizedToken]:
    """Polarities of content lemmas in a first-order formula.

    `exclude` holds lemmas that must not be polarized (proper nouns); the
    numeral markers are always excluded.
    """
    skip = frozenset(exclude) | NUMERAL_MARKERS
    out: list[PolarizedToken] = []

    def walk(f: fol.Fol, direction: str) -> None:
        match f:
            case fol.Pred(lemma, _):
                if lemma not in skip:
                    out.append(PolarizedToken(lemma, direction, len(out)))
            case fol.Not(body):
                walk(body, _flip(direction))
            case fol.And(parts) | fol.Or(parts):
                for p in parts:
                    walk(p, direction)
            case fol.Imp(left, right):
                walk(left, _flip(direction))
                walk(right, direction)
            case fol.Exists(_, body) | fol.Forall(_, body):
                walk(body, direction)
            case _:
                raise fol.FolError("not a formula: %r" % (f,))

    walk(formula, UP)
    return out


def polarize_vf(formula: vf.Vf, exclude: frozenset[str] = frozenset()) -> list[PolarizedToken]:
    """Polarities of content lemmas in a variable-free formula.

    `exclude` is matched case-insensitively so the same proper-noun set works
    for both formula languages.  Output lemmas are lowercased to align with
    the first-order marking.
    """
    skip = {e.lower() for e in exclude} | set(NUMERAL_MARKERS)
    out: list[PolarizedToken] = []

    def walk(f: vf.Vf, direction: str) -> None:
        match f:
            case vf.Leaf(lemma):
                if lemma.lower() not in skip:
                    out.append(PolarizedToken(lemma.lower(), direction, len(out)))
            case vf.Node("ALL", (restr, body)):
                walk(restr, _flip(direction))
                walk(body, direction)
            case vf.Node(op, (left, right)) if op in ("EXIST", "TWO", "THREE", "AND", "OR"):
                walk(left, direction)
                walk(right, direction)
            case vf.Node("NOT", (body,)):
                walk(body, _flip(direction))
            case vf.Node("INV", (body,)):
                walk(body, direction)
            case _:
                raise vf.VfError("not a variable-free formula: %r" % (f,))

    walk(formula, UP)
    return out


def polarity_multiset(tokens) -> dict[tuple[str, str], int]:
    out: dict[tuple[str, str], int] = {}
    for t in tokens:
        key = (t.lemma, t.polarity)
        out[key] = out.get(key, 0) + 1
    return out

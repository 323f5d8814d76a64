"""Discourse representation structures: box construction from first-order
formulas and the clausal linearization used for training targets and scoring.

Conversion rules: an existential introduces a referent into the current box,
conjunction appends conditions in order, negation opens a sub-box, and a
universal produces an implication between an antecedent box (holding the
variable and restrictor conditions) and a consequent box.  Disjunction becomes
an OR condition over two sub-boxes.

Linearization conventions, locked by golden files:
  * boxes are labeled b1, b2, ... in pre-order over the box tree
    (for implications: antecedent subtree before consequent subtree);
  * within a box, REF clauses come first, then one clause per condition in
    order, then the clauses of sub-boxes;
  * two-place predicate clauses list their arguments object-first
    ("chase x3 x2" for chase(x2, x3));
  * in an implication antecedent whose conditions are all one-place atoms,
    the condition list is reversed (modifier before noun).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import fol

Clause = tuple[str, ...]


class DrsError(ValueError):
    pass


class ClauseParseError(DrsError):
    def __init__(self, message: str, line: int):
        super().__init__("%s (line %d)" % (message, line))
        self.line = line


@dataclass
class PredCond:
    lemma: str
    args: tuple[str, ...]


@dataclass
class NotCond:
    box: "DrsBox"


@dataclass
class ImpCond:
    antecedent: "DrsBox"
    consequent: "DrsBox"


@dataclass
class OrCond:
    left: "DrsBox"
    right: "DrsBox"


@dataclass
class DrsBox:
    label: str | None = None
    refs: list[str] = field(default_factory=list)
    conds: list = field(default_factory=list)

    def subboxes(self):
        for cond in self.conds:
            if isinstance(cond, NotCond):
                yield cond.box
            elif isinstance(cond, ImpCond):
                yield cond.antecedent
                yield cond.consequent
            elif isinstance(cond, OrCond):
                yield cond.left
                yield cond.right


def fol_to_drs(formula: fol.Fol) -> DrsBox:
    root = DrsBox()
    _fill(root, formula)
    _label(root)
    return root


def _fill(box: DrsBox, f: fol.Fol) -> None:
    match f:
        case fol.Exists(var, body):
            box.refs.append(var)
            _fill(box, body)
        case fol.And(parts):
            for p in parts:
                _fill(box, p)
        case fol.Pred(lemma, args):
            box.conds.append(PredCond(lemma, args))
        case fol.Not(body):
            sub = DrsBox()
            _fill(sub, body)
            box.conds.append(NotCond(sub))
        case fol.Forall(var, fol.Imp(left, right)):
            ant = DrsBox(refs=[var])
            _fill(ant, left)
            if ant.conds and all(
                isinstance(c, PredCond) and len(c.args) == 1 for c in ant.conds
            ):
                ant.conds.reverse()
            cons = DrsBox()
            _fill(cons, right)
            box.conds.append(ImpCond(ant, cons))
        case fol.Or(parts):
            if len(parts) != 2:
                raise DrsError("only binary disjunction is supported")
            left = DrsBox()
            _fill(left, parts[0])
            right = DrsBox()
            _fill(right, parts[1])
            box.conds.append(OrCond(left, right))
        case _:
            raise DrsError("formula shape not supported by the box conversion: %r" % (f,))


def _label(root: DrsBox) -> None:
    counter = [0]

    def visit(box: DrsBox) -> None:
        counter[0] += 1
        box.label = "b%d" % counter[0]
        for sub in box.subboxes():
            visit(sub)

    visit(root)


def drs_to_clauses(box: DrsBox) -> list[Clause]:
    if box.label is None:
        _label(box)
    out: list[Clause] = []

    def emit(b: DrsBox) -> None:
        for ref in b.refs:
            out.append((b.label, "REF", ref))
        for cond in b.conds:
            if isinstance(cond, PredCond):
                args = cond.args
                if len(args) == 2:
                    args = (args[1], args[0])
                out.append((b.label, cond.lemma) + args)
            elif isinstance(cond, NotCond):
                out.append((b.label, "NOT", cond.box.label))
            elif isinstance(cond, ImpCond):
                out.append((b.label, "IMP", cond.antecedent.label, cond.consequent.label))
            elif isinstance(cond, OrCond):
                out.append((b.label, "OR", cond.left.label, cond.right.label))
            else:
                raise DrsError("unknown condition %r" % (cond,))
        for sub in b.subboxes():
            emit(sub)

    emit(box)
    return out


def serialize_clauses(clauses: list[Clause]) -> str:
    return "\n".join(" ".join(c) for c in clauses)


def parse_clauses(text: str) -> list[Clause]:
    """Parse one record's clause lines.  Lenient: any head that is not a
    structural operator is taken as a predicate lemma, and arities are not
    enforced (predictions may be ill-formed); but every line needs at least a
    box label and a head."""
    clauses: list[Clause] = []
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) < 2:
            raise ClauseParseError("clause needs a box label and an operator", i)
        clauses.append(tuple(fields))
    return clauses


def parse_clause_records(text: str) -> list[list[Clause]]:
    """Split a clause file into records on blank lines."""
    records: list[list[Clause]] = []
    current: list[str] = []
    for line in text.splitlines():
        if line.strip():
            current.append(line)
        elif current:
            records.append(parse_clauses("\n".join(current)))
            current = []
    if current:
        records.append(parse_clauses("\n".join(current)))
    return records

"""Logical entailment between closed first-order formulas.

`check` decides both directions of G vs P with two cooperating engines:

  * a finite countermodel search (ground the formula over domains of size
    1..max_domain and look for a satisfying assignment with a DPLL-style
    backtracking search) refutes entailment soundly — every countermodel is
    re-verified by a direct truth evaluator before it is reported;
  * a negation-normal-form tableau with iterative deepening on universal
    instantiations proves entailment — every closed tableau is replayed by an
    independent certificate checker.

A saturated open tableau branch over a function-free signature also yields a
(verified) countermodel, so `unknown` only remains when every budget runs out.
"""

from __future__ import annotations

import itertools as it
import time
from dataclasses import dataclass

from . import fol

ENTAILS = "entails"
NOT_ENTAILS = "not_entails"
UNKNOWN = "unknown"

GP = "G=>P"
PG = "G<=P"


@dataclass(frozen=True)
class Budget:
    max_domain: int = 4
    max_gamma: int = 192  # universal instantiations per branch, final round
    quick_gamma: int = 12  # cheap first tableau round before model search
    wall_clock: float = 10.0  # seconds per direction


@dataclass
class FiniteModel:
    size: int
    unary: dict[str, frozenset[int]]
    binary: dict[str, frozenset[tuple[int, int]]]
    constants: dict[str, int]

    def describe(self) -> dict:
        return {
            "size": self.size,
            "unary": {k: sorted(v) for k, v in sorted(self.unary.items())},
            "binary": {k: sorted(map(list, v)) for k, v in sorted(self.binary.items())},
            "constants": dict(sorted(self.constants.items())),
        }


@dataclass
class EntailmentVerdict:
    direction: str
    verdict: str
    witness: object = None  # FiniteModel for refutations, certificate for proofs
    reason: str = ""
    seconds: float = 0.0

    def to_json(self) -> dict:
        witness = None
        if isinstance(self.witness, FiniteModel):
            witness = self.witness.describe()
        elif self.witness is not None:
            witness = "closed-tableau"
        return {
            "direction": self.direction,
            "verdict": self.verdict,
            "witness": witness,
            "reason": self.reason,
            "seconds": round(self.seconds, 4),
        }


class EngineError(RuntimeError):
    """An engine produced a witness that failed its independent check."""


class _OutOfTime(Exception):
    pass


# -- negation normal form -------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    lemma: str
    args: tuple[str, ...]
    positive: bool

    def complement(self) -> "Lit":
        return Lit(self.lemma, self.args, not self.positive)


@dataclass(frozen=True)
class NAnd:
    parts: tuple


@dataclass(frozen=True)
class NOr:
    parts: tuple


@dataclass(frozen=True)
class NExists:
    var: str
    body: object


@dataclass(frozen=True)
class NForall:
    var: str
    body: object


def _nand(parts) -> NAnd:
    flat = []
    for p in parts:
        flat.extend(p.parts) if isinstance(p, NAnd) else flat.append(p)
    return NAnd(tuple(flat))


def _nor(parts) -> NOr:
    flat = []
    for p in parts:
        flat.extend(p.parts) if isinstance(p, NOr) else flat.append(p)
    return NOr(tuple(flat))


def nnf(f: fol.Fol, positive: bool = True):
    """Negation normal form with flattened conjunctions/disjunctions (the
    tableau's instantiation heuristic scores top-level disjuncts)."""
    match f:
        case fol.Pred(lemma, args):
            return Lit(lemma, args, positive)
        case fol.Not(body):
            return nnf(body, not positive)
        case fol.And(parts):
            sub = tuple(nnf(p, positive) for p in parts)
            return _nand(sub) if positive else _nor(sub)
        case fol.Or(parts):
            sub = tuple(nnf(p, positive) for p in parts)
            return _nor(sub) if positive else _nand(sub)
        case fol.Imp(left, right):
            if positive:
                return _nor((nnf(left, False), nnf(right, True)))
            return _nand((nnf(left, True), nnf(right, False)))
        case fol.Exists(var, body):
            sub = nnf(body, positive)
            return NExists(var, sub) if positive else NForall(var, sub)
        case fol.Forall(var, body):
            sub = nnf(body, positive)
            return NForall(var, sub) if positive else NExists(var, sub)
    raise fol.FolError("not a formula: %r" % (f,))


def _subst(n, var: str, value: str):
    match n:
        case Lit(lemma, args, pos):
            return Lit(lemma, tuple(value if a == var else a for a in args), pos)
        case NAnd(parts):
            return NAnd(tuple(_subst(p, var, value) for p in parts))
        case NOr(parts):
            return NOr(tuple(_subst(p, var, value) for p in parts))
        case NExists(v, body):
            return n if v == var else NExists(v, _subst(body, var, value))
        case NForall(v, body):
            return n if v == var else NForall(v, _subst(body, var, value))
    raise TypeError(repr(n))


def _gamma_score(body, literals) -> tuple[int, int] | None:
    """Cost of instantiating a universal with this body under the branch
    literals: (open literal disjuncts, open disjuncts overall); lower is
    better, None when the body is already satisfied on the branch.

    Case-splitting on a literal nothing on the branch constrains is pure
    guessing and multiplies the search, so it is ranked after every
    structurally productive alternative (closing, unit-forcing, or walking
    into quantified subformulas)."""

    def lit_state(lit: Lit):
        known = literals.get((lit.lemma, lit.args))
        if known is None:
            return "open"
        return "satisfied" if known == lit.positive else "dead"

    if isinstance(body, Lit):
        state = lit_state(body)
        if state == "satisfied":
            return None
        return (0, 0) if state == "dead" else (0, 1)
    if isinstance(body, NOr):
        open_lits = 0
        opens = 0
        for part in body.parts:
            if isinstance(part, Lit):
                state = lit_state(part)
                if state == "satisfied":
                    return None
                if state == "dead":
                    continue
                open_lits += 1
                opens += 1
            else:
                opens += 1
        return (open_lits, opens)
    return (0, 1)  # NAnd / NExists / NForall: facts without case splits


def _nnf_constants(n) -> list[str]:
    match n:
        case Lit(_, args, _):
            return [a for a in args if not fol.is_var(a)]
        case NAnd(parts) | NOr(parts):
            out = []
            for p in parts:
                out.extend(_nnf_constants(p))
            return out
        case NExists(_, body) | NForall(_, body):
            return _nnf_constants(body)
    raise TypeError(repr(n))


# -- finite models ---------------------------------------------------------------


def eval_fol(f: fol.Fol, model: FiniteModel, env: dict[str, int] | None = None) -> bool:
    """Direct truth evaluation; the independent check for every countermodel."""
    env = env or {}

    def term(a: str) -> int:
        return env[a] if fol.is_var(a) else model.constants[a]

    match f:
        case fol.Pred(lemma, args):
            vals = tuple(term(a) for a in args)
            if len(vals) == 1:
                return vals[0] in model.unary.get(lemma, frozenset())
            return vals in model.binary.get(lemma, frozenset())
        case fol.Not(body):
            return not eval_fol(body, model, env)
        case fol.And(parts):
            return all(eval_fol(p, model, env) for p in parts)
        case fol.Or(parts):
            return any(eval_fol(p, model, env) for p in parts)
        case fol.Imp(left, right):
            return (not eval_fol(left, model, env)) or eval_fol(right, model, env)
        case fol.Exists(var, body):
            return any(eval_fol(body, model, {**env, var: d}) for d in range(model.size))
        case fol.Forall(var, body):
            return all(eval_fol(body, model, {**env, var: d}) for d in range(model.size))
    raise fol.FolError("not a formula: %r" % (f,))


def _ground(n, size: int, env: dict[str, int], consts: dict[str, int]):
    match n:
        case Lit(lemma, args, pos):
            vals = tuple(env[a] if fol.is_var(a) else consts[a] for a in args)
            return ("lit", (lemma, vals), pos)
        case NAnd(parts):
            return ("and", tuple(_ground(p, size, env, consts) for p in parts))
        case NOr(parts):
            return ("or", tuple(_ground(p, size, env, consts) for p in parts))
        case NForall(var, body):
            return ("and", tuple(_ground(body, size, {**env, var: d}, consts) for d in range(size)))
        case NExists(var, body):
            return ("or", tuple(_ground(body, size, {**env, var: d}, consts) for d in range(size)))
    raise TypeError(repr(n))


def _simplify(node, assign):
    kind = node[0]
    if kind == "lit":
        val = assign.get(node[1])
        if val is None:
            return node
        return val is node[2]
    parts = []
    for p in node[1]:
        s = _simplify(p, assign)
        if s is True:
            if kind == "or":
                return True
            continue
        if s is False:
            if kind == "and":
                return False
            continue
        parts.append(s)
    if not parts:
        return kind == "and"
    if len(parts) == 1:
        return parts[0]
    return (kind, tuple(parts))


def _first_atom(node):
    while node[0] != "lit":
        node = node[1][0]
    return node[1], node[2]


def _sat(node, deadline):
    """Backtracking satisfiability over the ground tree; returns an atom
    assignment or None."""

    def go(n, assign):
        if time.monotonic() > deadline:
            raise _OutOfTime()
        n = _simplify(n, assign)
        if n is True:
            return assign
        if n is False:
            return None
        atom, preferred = _first_atom(n)
        for value in (preferred, not preferred):
            got = go(n, {**assign, atom: value})
            if got is not None:
                return got
        return None

    return go(node, {})


def _model_from_assignment(assign, size: int, consts: dict[str, int]) -> FiniteModel:
    unary: dict[str, set[int]] = {}
    binary: dict[str, set[tuple[int, int]]] = {}
    for (lemma, vals), value in assign.items():
        if not value:
            continue
        if len(vals) == 1:
            unary.setdefault(lemma, set()).add(vals[0])
        else:
            binary.setdefault(lemma, set()).add(vals)
    return FiniteModel(
        size,
        {k: frozenset(v) for k, v in unary.items()},
        {k: frozenset(v) for k, v in binary.items()},
        dict(consts),
    )


def find_model(formula: fol.Fol, max_domain: int, deadline: float) -> FiniteModel | None:
    """Search domains 1..max_domain for a model of `formula`."""
    n = nnf(formula)
    names = sorted(fol.constants(formula))
    for size in range(1, max_domain + 1):
        for values in it.product(range(size), repeat=len(names)):
            consts = dict(zip(names, values))
            assignment = _sat(_ground(n, size, {}, consts), deadline)
            if assignment is not None:
                return _model_from_assignment(assignment, size, consts)
    return None


def enumerate_models(signature: dict[str, int], consts: list[str], size: int):
    """Brute-force stream of every model over the signature; test oracle only."""
    domain = list(range(size))
    unary_lemmas = sorted(l for l, a in signature.items() if a == 1)
    binary_lemmas = sorted(l for l, a in signature.items() if a == 2)
    pairs = [(a, b) for a in domain for b in domain]
    unary_space = [_powerset(domain)] * len(unary_lemmas)
    binary_space = [_powerset(pairs)] * len(binary_lemmas)
    for u in it.product(*unary_space):
        for b in it.product(*binary_space):
            for cv in it.product(domain, repeat=len(consts)):
                yield FiniteModel(
                    size,
                    dict(zip(unary_lemmas, u)),
                    dict(zip(binary_lemmas, b)),
                    dict(zip(consts, cv)),
                )


def _powerset(items):
    out = []
    for r in range(len(items) + 1):
        out.extend(frozenset(c) for c in it.combinations(items, r))
    return out


# -- tableau ----------------------------------------------------------------------


class _Saturated(Exception):
    """An open branch with nothing left to expand: the branch is satisfiable."""

    def __init__(self, literals, consts):
        self.literals = literals
        self.consts = consts


class _Tableau:
    def __init__(self, gamma_budget: int, deadline: float):
        self.gamma_budget = gamma_budget
        self.deadline = deadline
        self.fresh_counter = 0
        self.budget_hit = False

    def _fresh(self) -> str:
        self.fresh_counter += 1
        return "_sk%d" % self.fresh_counter

    def prove(self, formulas) -> dict | None:
        """Certificate if the formula set is unsatisfiable; None when the
        instantiation budget ran out; raises _Saturated on an open branch."""
        consts: list[str] = []
        for f in formulas:
            for name in _nnf_constants(f):
                if name not in consts:
                    consts.append(name)
        if not consts:
            consts.append(self._fresh())  # domains are non-empty
        return self._expand(list(formulas), {}, [], frozenset(), consts, self.gamma_budget)

    def _pick(self, todo) -> int:
        """alpha before delta before beta; universals are handled separately."""
        best, best_class = -1, 99
        for i, item in enumerate(todo):
            cls = (
                0
                if isinstance(item, (Lit, NAnd))
                else 1
                if isinstance(item, NExists)
                else 2
                if isinstance(item, NOr)
                else 3
            )
            if cls < best_class:
                best, best_class = i, cls
                if cls == 0:
                    break
        return best

    def _expand(self, todo, literals, universals, insts, consts, gamma_left):
        """Close one branch.  Linear rules loop; only disjunction recurses, so
        the call depth is bounded by the formula's or-nesting."""
        trail: list[tuple] = []  # linear rule applications, innermost last

        def wrap(cert):
            for entry in reversed(trail):
                if entry[0] == "literal":
                    cert = {"rule": "literal", "formula": entry[1], "children": [cert]}
                elif entry[0] == "and":
                    cert = {"rule": "and", "formula": entry[1], "children": [cert]}
                elif entry[0] == "exists":
                    cert = {
                        "rule": "exists",
                        "formula": entry[1],
                        "const": entry[2],
                        "children": [cert],
                    }
                else:
                    cert = {
                        "rule": "forall",
                        "formula": entry[1],
                        "const": entry[2],
                        "children": [cert],
                    }
            return cert

        while True:
            if time.monotonic() > self.deadline:
                raise _OutOfTime()
            if todo:
                item = todo.pop(self._pick(todo))
                if isinstance(item, NForall):
                    universals = universals + [item]
                    continue
                if isinstance(item, Lit):
                    key = (item.lemma, item.args)
                    if literals.get(key) == (not item.positive):
                        return wrap({"rule": "close", "literal": item})
                    if key in literals:
                        continue
                    literals = {**literals, key: item.positive}
                    trail.append(("literal", item))
                    continue
                if isinstance(item, NAnd):
                    todo = list(item.parts) + todo
                    trail.append(("and", item))
                    continue
                if isinstance(item, NExists):
                    c = self._fresh()
                    todo = [_subst(item.body, item.var, c)] + todo
                    consts = consts + [c]
                    trail.append(("exists", item, c))
                    continue
                if isinstance(item, NOr):
                    # a disjunct already true on the branch makes the formula
                    # redundant; closing disjuncts are cheap, try them first
                    ordered = []
                    satisfied = False
                    for part in item.parts:
                        if isinstance(part, Lit):
                            known = literals.get((part.lemma, part.args))
                            if known == part.positive:
                                satisfied = True
                                break
                            ordered.insert(0 if known is not None else len(ordered), part)
                        else:
                            ordered.append(part)
                    if satisfied:
                        continue
                    by_part = {}
                    for part in ordered:
                        child = self._expand(
                            [part] + list(todo), literals, universals, insts, consts, gamma_left
                        )
                        if child is None:
                            return None
                        by_part[id(part)] = child
                    children = [by_part[id(part)] for part in item.parts]
                    return wrap({"rule": "or", "formula": item, "children": children})
                raise TypeError(repr(item))
            # gamma phase: pick the pending (universal, constant) instance
            # whose body is most constrained by the branch literals; instances
            # already satisfied on the branch are skipped for good (literal
            # sets only grow)
            active = {a for (_, args) in literals for a in args}
            best = None
            best_key = None
            for u in universals:
                for c in consts:
                    if (u, c) in insts:
                        continue
                    body = _subst(u.body, u.var, c)
                    score = _gamma_score(body, literals)
                    if score is None:  # already satisfied on this branch
                        insts = insts | {(u, c)}
                        continue
                    key = score + ((0 if c in active else 1),)
                    if best_key is None or key < best_key:
                        best_key = key
                        best = (u, c, body)
            if best is None:
                raise _Saturated(literals, consts)
            if gamma_left <= 0:
                self.budget_hit = True
                return None
            u, c, body = best
            insts = insts | {(u, c)}
            gamma_left -= 1
            todo = [body]
            trail.append(("forall", u, c))


def replay_certificate(formulas, cert) -> bool:
    """Independent pass validating a closing certificate bottom-up from the
    root formula set.  Every rule application must decompose a formula present
    on the branch, delta constants must be fresh, and every leaf must close on
    a genuine complementary pair."""

    def go(node, available: frozenset, literals: frozenset, used: frozenset) -> bool:
        rule = node["rule"]
        if rule == "close":
            lit = node["literal"]
            return lit in available | literals and lit.complement() in literals | available
        f = node["formula"]
        if f not in available:
            return False
        if rule == "literal":
            return go(node["children"][0], available, literals | {f}, used)
        if rule == "and":
            return go(node["children"][0], available | set(f.parts), literals, used)
        if rule == "or":
            if len(node["children"]) != len(f.parts):
                return False
            return all(
                go(child, available | {part}, literals, used)
                for part, child in zip(f.parts, node["children"])
            )
        if rule == "exists":
            c = node["const"]
            if c in used:
                return False
            inst = _subst(f.body, f.var, c)
            return go(node["children"][0], available | {inst}, literals, used | {c})
        if rule == "forall":
            inst = _subst(f.body, f.var, node["const"])
            return go(
                node["children"][0], available | {inst}, literals, used | {node["const"]}
            )
        return False

    start = frozenset(formulas)
    used = frozenset(c for f in formulas for c in _nnf_constants(f))
    return go(cert, start, frozenset(), used)


def _branch_model(literals, consts) -> FiniteModel:
    """Herbrand model read off a saturated open branch."""
    index = {c: i for i, c in enumerate(consts)}
    unary: dict[str, set[int]] = {}
    binary: dict[str, set[tuple[int, int]]] = {}
    for (lemma, args), positive in literals.items():
        if not positive:
            continue
        vals = tuple(index[a] for a in args)
        if len(vals) == 1:
            unary.setdefault(lemma, set()).add(vals[0])
        else:
            binary.setdefault(lemma, set()).add(vals)
    return FiniteModel(
        len(consts),
        {k: frozenset(v) for k, v in unary.items()},
        {k: frozenset(v) for k, v in binary.items()},
        dict(index),
    )


# -- the decision procedure -------------------------------------------------------


def _verify_countermodel(antecedent, consequent, model) -> None:
    target = fol.And((antecedent, fol.Not(consequent)))
    missing = fol.constants(target) - set(model.constants)
    if missing:
        model.constants.update({name: 0 for name in missing})
    if not eval_fol(target, model):
        raise EngineError("countermodel failed re-evaluation")


def entails(antecedent: fol.Fol, consequent: fol.Fol, budget: Budget | None = None,
            direction: str = GP) -> EntailmentVerdict:
    """Decide antecedent |= consequent within the budget."""
    budget = budget or Budget()
    start = time.monotonic()
    deadline = start + budget.wall_clock
    refutation = [nnf(antecedent), nnf(fol.Not(consequent))]

    def done(verdict, witness=None, reason=""):
        return EntailmentVerdict(direction, verdict, witness, reason, time.monotonic() - start)

    gamma_rounds = [budget.quick_gamma]
    g = budget.quick_gamma * 4
    while g < budget.max_gamma:
        gamma_rounds.append(g)
        g *= 2
    gamma_rounds.append(budget.max_gamma)

    try:
        # cheap proof attempt first; most gold/near-gold pairs close instantly
        for round_no, gamma in enumerate(gamma_rounds):
            tab = _Tableau(gamma, deadline)
            try:
                cert = tab.prove(refutation)
            except _Saturated as sat:
                model = _branch_model(sat.literals, sat.consts)
                _verify_countermodel(antecedent, consequent, model)
                return done(NOT_ENTAILS, model, "saturated open branch")
            if cert is not None:
                if not replay_certificate(refutation, cert):
                    raise EngineError("certificate failed replay")
                return done(ENTAILS, cert, "closed tableau")
            if round_no == 0:
                target = fol.And((antecedent, fol.Not(consequent)))
                model = find_model(target, budget.max_domain, deadline)
                if model is not None:
                    _verify_countermodel(antecedent, consequent, model)
                    return done(NOT_ENTAILS, model, "countermodel of size %d" % model.size)
        return done(UNKNOWN, None, "budget exhausted")
    except _OutOfTime:
        return done(UNKNOWN, None, "wall clock budget exhausted")


def check(gold: fol.Fol, pred: fol.Fol, budget: Budget | None = None):
    """Both directions of gold vs prediction."""
    return (
        entails(gold, pred, budget, direction=GP),
        entails(pred, gold, budget, direction=PG),
    )


def malformed_verdicts(reason: str = "malformed") -> tuple[EntailmentVerdict, EntailmentVerdict]:
    return (
        EntailmentVerdict(GP, NOT_ENTAILS, None, reason),
        EntailmentVerdict(PG, NOT_ENTAILS, None, reason),
    )


def atp_report(pairs, budget: Budget | None = None) -> dict:
    """Accuracy for G=>P, G<=P and G<=>P over (gold, pred-or-None) formula
    pairs; unknowns count as failures and are reported separately."""
    n = 0
    wins = {GP: 0, PG: 0, "G<=>P": 0}
    unknowns = {GP: 0, PG: 0}
    for gold, pred in pairs:
        n += 1
        if pred is None:
            continue
        v_gp, v_pg = check(gold, pred, budget)
        if v_gp.verdict == ENTAILS:
            wins[GP] += 1
        elif v_gp.verdict == UNKNOWN:
            unknowns[GP] += 1
        if v_pg.verdict == ENTAILS:
            wins[PG] += 1
        elif v_pg.verdict == UNKNOWN:
            unknowns[PG] += 1
        if v_gp.verdict == ENTAILS and v_pg.verdict == ENTAILS:
            wins["G<=>P"] += 1
    if n == 0:
        raise ValueError("no records to score")
    return {
        "n": n,
        "accuracy": {k: wins[k] / n for k in (GP, PG, "G<=>P")},
        "unknown": unknowns,
    }

"""Canonical first-order formulas and their token serialization.

The canonical form flattens associative conjunction/disjunction into n-ary
nodes and numbers quantified variables x1, x2, ... in the order their binders
appear in a pre-order walk.  Serialization is whitespace-tokenized ASCII:

    exists x1 . ( white ( x1 ) & dog ( x1 ) & - run ( x1 ) )

with `all` for the universal quantifier, `-` for negation, `->` for
implication and `|` for disjunction.  Parsing inverts serialization exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import lam


class FolError(ValueError):
    pass


class ParseError(FolError):
    """position is the 1-based index of the offending token."""

    def __init__(self, message: str, position: int):
        super().__init__("%s (at token %d)" % (message, position))
        self.position = position


@dataclass(frozen=True)
class Pred:
    lemma: str
    args: tuple[str, ...]  # variable names like "x1" or constant names


@dataclass(frozen=True)
class Not:
    body: "Fol"


@dataclass(frozen=True)
class And:
    parts: tuple["Fol", ...]


@dataclass(frozen=True)
class Or:
    parts: tuple["Fol", ...]


@dataclass(frozen=True)
class Imp:
    left: "Fol"
    right: "Fol"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Fol"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Fol"


Fol = Pred | Not | And | Or | Imp | Exists | Forall

VAR_RE = re.compile(r"^x\d+$")


def is_var(token: str) -> bool:
    return bool(VAR_RE.match(token))


# -- construction from normalized lambda terms --------------------------------


def from_lambda(term) -> Fol:
    """Convert a beta-normal logic term into a raw formula tree."""
    match term:
        case lam.Pred(lemma, args):
            names = []
            for a in args:
                match a:
                    case lam.Var(n) | lam.Const(n):
                        names.append(n)
                    case _:
                        raise FolError("predicate argument is not an individual: %r" % (a,))
            return Pred(lemma, tuple(names))
        case lam.Not(body):
            return Not(from_lambda(body))
        case lam.And(l, r):
            return And((from_lambda(l), from_lambda(r)))
        case lam.Or(l, r):
            return Or((from_lambda(l), from_lambda(r)))
        case lam.Imp(l, r):
            return Imp(from_lambda(l), from_lambda(r))
        case lam.Exists(var, body):
            return Exists(var, from_lambda(body))
        case lam.Forall(var, body):
            return Forall(var, from_lambda(body))
    raise FolError("term did not normalize to a formula: %r" % (term,))


# -- canonicalization ----------------------------------------------------------


def flatten(f: Fol) -> Fol:
    match f:
        case Pred(_, _):
            return f
        case Not(body):
            return Not(flatten(body))
        case And(parts):
            out = []
            for p in parts:
                p = flatten(p)
                if isinstance(p, And):
                    out.extend(p.parts)
                else:
                    out.append(p)
            return And(tuple(out))
        case Or(parts):
            out = []
            for p in parts:
                p = flatten(p)
                if isinstance(p, Or):
                    out.extend(p.parts)
                else:
                    out.append(p)
            return Or(tuple(out))
        case Imp(l, r):
            return Imp(flatten(l), flatten(r))
        case Exists(var, body):
            return Exists(var, flatten(body))
        case Forall(var, body):
            return Forall(var, flatten(body))
    raise FolError("not a formula: %r" % (f,))


def rename_canonical(f: Fol) -> Fol:
    """Number bound variables x1..xk in pre-order binder order."""
    counter = [0]

    def walk(g, env):
        match g:
            case Pred(lemma, args):
                return Pred(lemma, tuple(env.get(a, a) for a in args))
            case Not(body):
                return Not(walk(body, env))
            case And(parts):
                return And(tuple(walk(p, env) for p in parts))
            case Or(parts):
                return Or(tuple(walk(p, env) for p in parts))
            case Imp(l, r):
                return Imp(walk(l, env), walk(r, env))
            case Exists(var, body):
                counter[0] += 1
                new = "x%d" % counter[0]
                return Exists(new, walk(body, {**env, var: new}))
            case Forall(var, body):
                counter[0] += 1
                new = "x%d" % counter[0]
                return Forall(new, walk(body, {**env, var: new}))
        raise FolError("not a formula: %r" % (g,))

    return walk(f, {})


def canonicalize(f: Fol) -> Fol:
    return rename_canonical(flatten(f))


def free_variables(f: Fol, bound=frozenset()) -> frozenset[str]:
    match f:
        case Pred(_, args):
            return frozenset(a for a in args if is_var(a) and a not in bound)
        case Not(body):
            return free_variables(body, bound)
        case And(parts) | Or(parts):
            out = frozenset()
            for p in parts:
                out |= free_variables(p, bound)
            return out
        case Imp(l, r):
            return free_variables(l, bound) | free_variables(r, bound)
        case Exists(var, body) | Forall(var, body):
            return free_variables(body, bound | {var})
    raise FolError("not a formula: %r" % (f,))


def constants(f: Fol) -> frozenset[str]:
    match f:
        case Pred(_, args):
            return frozenset(a for a in args if not is_var(a))
        case Not(body):
            return constants(body)
        case And(parts) | Or(parts):
            out = frozenset()
            for p in parts:
                out |= constants(p)
            return out
        case Imp(l, r):
            return constants(l) | constants(r)
        case Exists(_, body) | Forall(_, body):
            return constants(body)
    raise FolError("not a formula: %r" % (f,))


def predicates(f: Fol) -> dict[str, int]:
    """Lemma -> arity map over every atom in the formula."""
    out: dict[str, int] = {}

    def walk(g):
        match g:
            case Pred(lemma, args):
                out.setdefault(lemma, len(args))
            case Not(body):
                walk(body)
            case And(parts) | Or(parts):
                for p in parts:
                    walk(p)
            case Imp(l, r):
                walk(l)
                walk(r)
            case Exists(_, body) | Forall(_, body):
                walk(body)

    walk(f)
    return out


# -- serialization -------------------------------------------------------------


def serialize(f: Fol) -> list[str]:
    out: list[str] = []

    def emit(g):
        match g:
            case Pred(lemma, args):
                out.append(lemma)
                out.append("(")
                for i, a in enumerate(args):
                    if i:
                        out.append(",")
                    out.append(a)
                out.append(")")
            case Not(body):
                out.append("-")
                emit(body)
            case And(parts):
                out.append("(")
                for i, p in enumerate(parts):
                    if i:
                        out.append("&")
                    emit(p)
                out.append(")")
            case Or(parts):
                out.append("(")
                for i, p in enumerate(parts):
                    if i:
                        out.append("|")
                    emit(p)
                out.append(")")
            case Imp(l, r):
                out.append("(")
                emit(l)
                out.append("->")
                emit(r)
                out.append(")")
            case Exists(var, body):
                out.extend(["exists", var, "."])
                emit(body)
            case Forall(var, body):
                out.extend(["all", var, "."])
                emit(body)
            case _:
                raise FolError("not a formula: %r" % (g,))

    emit(f)
    return out


def serialize_str(f: Fol) -> str:
    return " ".join(serialize(f))


_IDENT_RE = re.compile(r"^[a-z][a-z0-9_]*$")


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.pos + 1)
        self.pos += 1
        return tok

    def expect(self, token: str) -> None:
        got = self.take()
        if got != token:
            raise ParseError("expected %r, found %r" % (token, got), self.pos)

    def formula(self) -> Fol:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.pos + 1)
        if tok in ("exists", "all"):
            self.take()
            var = self.take()
            if not is_var(var):
                raise ParseError("expected a variable after %r" % tok, self.pos)
            self.expect(".")
            body = self.formula()
            return Exists(var, body) if tok == "exists" else Forall(var, body)
        if tok == "-":
            self.take()
            return Not(self.formula())
        if tok == "(":
            self.take()
            first = self.formula()
            sep = self.take()
            if sep == ")":
                raise ParseError("redundant parentheses are not part of the grammar", self.pos)
            if sep not in ("&", "|", "->"):
                raise ParseError("expected a connective, found %r" % sep, self.pos)
            parts = [first, self.formula()]
            if sep == "->":
                self.expect(")")
                return Imp(parts[0], parts[1])
            while self.peek() == sep:
                self.take()
                parts.append(self.formula())
            self.expect(")")
            return And(tuple(parts)) if sep == "&" else Or(tuple(parts))
        return self.atom()

    def atom(self) -> Fol:
        lemma = self.take()
        if not _IDENT_RE.match(lemma) or lemma in ("exists", "all"):
            raise ParseError("expected a predicate, found %r" % lemma, self.pos)
        self.expect("(")
        args = [self.take()]
        while self.peek() == ",":
            self.take()
            args.append(self.take())
        self.expect(")")
        for a in args:
            if not _IDENT_RE.match(a) and not is_var(a):
                raise ParseError("bad predicate argument %r" % a, self.pos)
        return Pred(lemma, tuple(args))


def parse(tokens) -> Fol:
    if isinstance(tokens, str):
        tokens = tokens.split()
    p = _Parser(list(tokens))
    f = p.formula()
    if p.peek() is not None:
        raise ParseError("trailing input %r" % p.peek(), p.pos + 1)
    return f

"""Lambda-term engine used by the semantic composition pipelines.

Terms combine plain lambda calculus (variables, abstraction, application) with
logical constructors for the two target formula languages: first-order nodes
(quantifiers, connectives, predicates) and variable-free operator nodes.
Beta reduction is capture-avoiding; bound variables are renamed apart on
demand from a term-local fresh supply.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass


class ArityError(TypeError):
    """Raised when a normal form applies something that is not a function."""


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Lam:
    param: str
    body: object


@dataclass(frozen=True)
class App:
    fn: object
    arg: object


@dataclass(frozen=True)
class Pred:
    lemma: str
    args: tuple


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Imp:
    left: object
    right: object


@dataclass(frozen=True)
class Exists:
    var: str
    body: object


@dataclass(frozen=True)
class Forall:
    var: str
    body: object


@dataclass(frozen=True)
class Op:
    """Variable-free operator node (ALL, EXIST, TWO, THREE, AND, OR, NOT, INV)."""

    name: str
    args: tuple


@dataclass(frozen=True)
class Sym:
    """Variable-free content symbol."""

    name: str


class Gensym:
    """Record-local fresh-name supply; never shared across records."""

    def __init__(self, prefix: str = "v"):
        self._counter = itertools.count(1)
        self._prefix = prefix

    def __call__(self) -> str:
        return "%s%d" % (self._prefix, next(self._counter))


def free_vars(term) -> frozenset[str]:
    match term:
        case Var(name):
            return frozenset((name,))
        case Const(_) | Sym(_):
            return frozenset()
        case Lam(param, body):
            return free_vars(body) - {param}
        case App(fn, arg):
            return free_vars(fn) | free_vars(arg)
        case Pred(_, args):
            out = frozenset()
            for a in args:
                out |= free_vars(a)
            return out
        case Not(body):
            return free_vars(body)
        case And(l, r) | Or(l, r) | Imp(l, r):
            return free_vars(l) | free_vars(r)
        case Exists(var, body) | Forall(var, body):
            return free_vars(body) - {var}
        case Op(_, args):
            out = frozenset()
            for a in args:
                out |= free_vars(a)
            return out
    raise TypeError("not a term: %r" % (term,))


def _rename_binder(kind, param, body, avoid, fresh):
    new = fresh()
    while new in avoid:
        new = fresh()
    renamed = substitute(body, param, Var(new), fresh)
    return kind, new, renamed


def substitute(term, name: str, value, fresh) -> object:
    """term[name := value], renaming binders apart when they would capture."""
    match term:
        case Var(n):
            return value if n == name else term
        case Const(_) | Sym(_):
            return term
        case Lam(param, body):
            if param == name:
                return term
            if param in free_vars(value) and name in free_vars(body):
                _, param, body = _rename_binder(Lam, param, body, free_vars(value), fresh)
            return Lam(param, substitute(body, name, value, fresh))
        case App(fn, arg):
            return App(substitute(fn, name, value, fresh), substitute(arg, name, value, fresh))
        case Pred(lemma, args):
            return Pred(lemma, tuple(substitute(a, name, value, fresh) for a in args))
        case Not(body):
            return Not(substitute(body, name, value, fresh))
        case And(l, r):
            return And(substitute(l, name, value, fresh), substitute(r, name, value, fresh))
        case Or(l, r):
            return Or(substitute(l, name, value, fresh), substitute(r, name, value, fresh))
        case Imp(l, r):
            return Imp(substitute(l, name, value, fresh), substitute(r, name, value, fresh))
        case Exists(var, body):
            if var == name:
                return term
            if var in free_vars(value) and name in free_vars(body):
                _, var, body = _rename_binder(Exists, var, body, free_vars(value), fresh)
            return Exists(var, substitute(body, name, value, fresh))
        case Forall(var, body):
            if var == name:
                return term
            if var in free_vars(value) and name in free_vars(body):
                _, var, body = _rename_binder(Forall, var, body, free_vars(value), fresh)
            return Forall(var, substitute(body, name, value, fresh))
        case Op(op, args):
            return Op(op, tuple(substitute(a, name, value, fresh) for a in args))
    raise TypeError("not a term: %r" % (term,))


def _step_normal(term, fresh):
    """One leftmost-outermost beta step, or None if term is in normal form."""
    match term:
        case App(Lam(param, body), arg):
            return substitute(body, param, arg, fresh)
        case App(fn, arg):
            r = _step_normal(fn, fresh)
            if r is not None:
                return App(r, arg)
            if not isinstance(fn, (Lam, Var)):
                raise ArityError("cannot apply non-function %s" % type(fn).__name__)
            r = _step_normal(arg, fresh)
            return None if r is None else App(fn, r)
        case Lam(param, body):
            r = _step_normal(body, fresh)
            return None if r is None else Lam(param, r)
        case Pred(lemma, args):
            return _step_args(args, fresh, lambda new: Pred(lemma, new))
        case Not(body):
            r = _step_normal(body, fresh)
            return None if r is None else Not(r)
        case And(l, r):
            return _step_pair(l, r, fresh, And)
        case Or(l, r):
            return _step_pair(l, r, fresh, Or)
        case Imp(l, r):
            return _step_pair(l, r, fresh, Imp)
        case Exists(var, body):
            r = _step_normal(body, fresh)
            return None if r is None else Exists(var, r)
        case Forall(var, body):
            r = _step_normal(body, fresh)
            return None if r is None else Forall(var, r)
        case Op(op, args):
            return _step_args(args, fresh, lambda new: Op(op, new))
        case _:
            return None


def _step_pair(l, r, fresh, ctor):
    s = _step_normal(l, fresh)
    if s is not None:
        return ctor(s, r)
    s = _step_normal(r, fresh)
    return None if s is None else ctor(l, s)


def _step_args(args, fresh, rebuild):
    for i, a in enumerate(args):
        s = _step_normal(a, fresh)
        if s is not None:
            return rebuild(args[:i] + (s,) + args[i + 1 :])
    return None


def beta_normalize(term, fresh: Gensym | None = None, max_steps: int = 100_000):
    """Reduce to beta-normal form (leftmost-outermost order)."""
    fresh = fresh or Gensym("r")
    for _ in range(max_steps):
        nxt = _step_normal(term, fresh)
        if nxt is None:
            return term
        term = nxt
    raise ArityError("term did not normalize within %d steps" % max_steps)


def beta_normalize_applicative(term, fresh: Gensym | None = None, max_steps: int = 100_000):
    """Innermost-first normalization; used to cross-check reduction order
    independence on composition terms."""
    fresh = fresh or Gensym("a")

    def reduce(t):
        match t:
            case App(fn, arg):
                fn = reduce(fn)
                arg = reduce(arg)
                if isinstance(fn, Lam):
                    return reduce(substitute(fn.body, fn.param, arg, fresh))
                if not isinstance(fn, Var):
                    raise ArityError("cannot apply non-function %s" % type(fn).__name__)
                return App(fn, arg)
            case Lam(param, body):
                return Lam(param, reduce(body))
            case Pred(lemma, args):
                return Pred(lemma, tuple(reduce(a) for a in args))
            case Not(body):
                return Not(reduce(body))
            case And(l, r):
                return And(reduce(l), reduce(r))
            case Or(l, r):
                return Or(reduce(l), reduce(r))
            case Imp(l, r):
                return Imp(reduce(l), reduce(r))
            case Exists(var, body):
                return Exists(var, reduce(body))
            case Forall(var, body):
                return Forall(var, reduce(body))
            case Op(op, args):
                return Op(op, tuple(reduce(a) for a in args))
            case _:
                return t

    return reduce(term)


def alpha_canonical(term, prefix: str = "u"):
    """Rename bound variables to a canonical left-to-right numbering, so that
    alpha-equivalent terms compare equal."""
    counter = itertools.count(1)

    def walk(t, env):
        match t:
            case Var(n):
                return Var(env.get(n, n))
            case Const(_) | Sym(_):
                return t
            case Lam(param, body):
                new = "%s%d" % (prefix, next(counter))
                return Lam(new, walk(body, {**env, param: new}))
            case App(fn, arg):
                return App(walk(fn, env), walk(arg, env))
            case Pred(lemma, args):
                return Pred(lemma, tuple(walk(a, env) for a in args))
            case Not(body):
                return Not(walk(body, env))
            case And(l, r):
                return And(walk(l, env), walk(r, env))
            case Or(l, r):
                return Or(walk(l, env), walk(r, env))
            case Imp(l, r):
                return Imp(walk(l, env), walk(r, env))
            case Exists(var, body):
                new = "%s%d" % (prefix, next(counter))
                return Exists(new, walk(body, {**env, var: new}))
            case Forall(var, body):
                new = "%s%d" % (prefix, next(counter))
                return Forall(new, walk(body, {**env, var: new}))
            case Op(op, args):
                return Op(op, tuple(walk(a, env) for a in args))
        raise TypeError("not a term: %r" % (t,))

    return walk(term, {})

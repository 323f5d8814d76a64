"""Variable-free formulas: fixed-arity operator trees over uppercase lemmas.

The serialized form is the bare pre-order token sequence; because every
operator has a fixed arity the flat sequence parses back to a unique tree,
so the format needs neither brackets nor variables.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import lam

BINARY_OPS = ("ALL", "EXIST", "TWO", "THREE", "AND", "OR")
UNARY_OPS = ("NOT", "INV")
ARITY = {**{o: 2 for o in BINARY_OPS}, **{o: 1 for o in UNARY_OPS}}


class VfError(ValueError):
    pass


class ParseError(VfError):
    def __init__(self, message: str, position: int):
        super().__init__("%s (at token %d)" % (message, position))
        self.position = position


@dataclass(frozen=True)
class Node:
    op: str
    args: tuple


@dataclass(frozen=True)
class Leaf:
    lemma: str  # uppercase


Vf = Node | Leaf


def from_lambda(term) -> Vf:
    match term:
        case lam.Sym(name):
            return Leaf(name)
        case lam.Op(name, args):
            return Node(name, tuple(from_lambda(a) for a in args))
    raise VfError("term did not normalize to a variable-free formula: %r" % (term,))


def serialize(f: Vf) -> list[str]:
    out: list[str] = []

    def emit(g):
        match g:
            case Leaf(lemma):
                out.append(lemma)
            case Node(op, args):
                out.append(op)
                for a in args:
                    emit(a)
            case _:
                raise VfError("not a variable-free formula: %r" % (g,))

    emit(f)
    return out


def serialize_str(f: Vf) -> str:
    return " ".join(serialize(f))


def parse(tokens) -> Vf:
    if isinstance(tokens, str):
        tokens = tokens.split()
    tokens = list(tokens)
    pos = 0

    def read() -> Vf:
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of input", pos + 1)
        tok = tokens[pos]
        pos += 1
        arity = ARITY.get(tok)
        if arity is None:
            if not tok.isupper() or not tok.isalpha():
                raise ParseError("bad token %r" % tok, pos)
            return Leaf(tok)
        args = []
        for _ in range(arity):
            if pos >= len(tokens):
                raise ParseError("operator %s missing operand" % tok, pos + 1)
            args.append(read())
        return Node(tok, tuple(args))

    tree = read()
    if pos != len(tokens):
        raise ParseError("trailing input %r" % tokens[pos], pos + 1)
    return tree


def lemmas(f: Vf) -> list[str]:
    match f:
        case Leaf(lemma):
            return [lemma]
        case Node(_, args):
            out = []
            for a in args:
                out.extend(lemmas(a))
            return out
    raise VfError("not a variable-free formula: %r" % (f,))

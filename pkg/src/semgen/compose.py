"""Semantic composition: derivation tree -> first-order formula and
derivation tree -> variable-free formula, plus the bridge translating
variable-free formulas back into first-order form.

Composition builds a lambda term bottom-up over the tree, beta-normalizes it
and converts the normal form into the canonical formula representation.

Quantifier restrictors put the adjective before the noun for the existential
quantifiers (a, one) and after it for numerals and universals; both orders are
locked by golden outputs.  Proper nouns compose as existential predicates by
default; a switch selects the individual-constant reading instead.
"""

from __future__ import annotations

from . import fol, lam, vf
from .grammar import Tree
from .lexicon import Lexicon

PN_PREDICATE = "predicate"
PN_CONSTANT = "constant"

_EXISTENTIAL = frozenset({"a", "one"})
_NUMERAL = frozenset({"two", "three"})
_UNIVERSAL = frozenset({"every", "all"})


class Composer:
    def __init__(self, lexicon: Lexicon, pn_style: str = PN_PREDICATE):
        if pn_style not in (PN_PREDICATE, PN_CONSTANT):
            raise ValueError("pn_style must be %r or %r" % (PN_PREDICATE, PN_CONSTANT))
        self.lexicon = lexicon
        self.pn_style = pn_style

    # -- first-order pipeline -------------------------------------------------

    def fol(self, tree: Tree) -> fol.Fol:
        fresh = lam.Gensym("v")
        term = self._fol_term(tree, fresh)
        normal = lam.beta_normalize(term, fresh)
        formula = fol.canonicalize(fol.from_lambda(normal))
        self._check_arities(formula)
        return formula

    def fol_tokens(self, tree: Tree) -> list[str]:
        return fol.serialize(self.fol(tree))

    def _check_arities(self, formula: fol.Fol) -> None:
        binary = self.lexicon.transitive_lemmas
        for lemma, arity in fol.predicates(formula).items():
            expected = 2 if lemma in binary else 1
            if arity != expected:
                raise lam.ArityError(
                    "predicate %r has arity %d, expected %d" % (lemma, arity, expected)
                )

    def _quant_term(self, q, fresh) -> object:
        F, G, x = fresh(), fresh(), fresh()
        fx = lam.App(lam.Var(F), lam.Var(x))
        gx = lam.App(lam.Var(G), lam.Var(x))
        if q.klass == "universal":
            body = lam.Forall(x, lam.Imp(fx, gx))
        elif q.klass == "existential":
            body = lam.Exists(x, lam.And(fx, gx))
        else:
            body = lam.Exists(x, lam.And(lam.Pred(q.lemma, (lam.Var(x),)), lam.And(fx, gx)))
        return lam.Lam(F, lam.Lam(G, body))

    def _pn_term(self, word, fresh) -> object:
        F = fresh()
        if self.pn_style == PN_CONSTANT:
            return lam.Lam(F, lam.App(lam.Var(F), lam.Const(word.lemma)))
        x = fresh()
        return lam.Lam(
            F,
            lam.Exists(
                x,
                lam.And(lam.Pred(word.lemma, (lam.Var(x),)), lam.App(lam.Var(F), lam.Var(x))),
            ),
        )

    def _unary_term(self, lemma, fresh) -> object:
        x = fresh()
        return lam.Lam(x, lam.Pred(lemma, (lam.Var(x),)))

    def _restrictor(self, q, noun_t, mod_t, fresh) -> object:
        """Property combining noun and modifier; order depends on the
        quantifier class (adjective first for existentials)."""
        x = fresh()
        nx = lam.App(noun_t, lam.Var(x))
        mx = lam.App(mod_t, lam.Var(x))
        if q.klass == "existential":
            return lam.Lam(x, lam.And(mx, nx))
        return lam.Lam(x, lam.And(nx, mx))

    def _fol_term(self, t: Tree, fresh) -> object:
        if t.lex is not None:  # N / ADJ leaves reached from the NP rules
            return self._unary_term(t.lex.lemma, fresh)
        r = t.rule
        ch = t.children
        if r == "s":
            return lam.App(self._fol_term(ch[0], fresh), self._fol_term(ch[1], fresh))
        if r == "s_neg":
            x = fresh()
            vp = self._fol_term(ch[1], fresh)
            return lam.App(
                self._fol_term(ch[0], fresh),
                lam.Lam(x, lam.Not(lam.App(vp, lam.Var(x)))),
            )
        if r == "np_pn":
            return self._pn_term(ch[0].lex, fresh)
        if r == "np_qn":
            return lam.App(self._quant_term(ch[0].lex, fresh), self._fol_term(ch[1], fresh))
        if r == "np_q_adj_n":
            q = ch[0].lex
            adj = self._fol_term(ch[1], fresh)
            noun = self._fol_term(ch[2], fresh)
            return lam.App(self._quant_term(q, fresh), self._restrictor(q, noun, adj, fresh))
        if r == "np_qn_rel":
            x = fresh()
            noun = self._fol_term(ch[1], fresh)
            rel = self._fol_term(ch[2], fresh)
            restr = lam.Lam(
                x, lam.And(lam.App(noun, lam.Var(x)), lam.App(rel, lam.Var(x)))
            )
            return lam.App(self._quant_term(ch[0].lex, fresh), restr)
        if r == "np_pn_rel":
            word = ch[0].lex
            rel = self._fol_term(ch[1], fresh)
            G, x = fresh(), fresh()
            if self.pn_style == PN_CONSTANT:
                c = lam.Const(word.lemma)
                return lam.Lam(G, lam.And(lam.App(rel, c), lam.App(lam.Var(G), c)))
            xv = lam.Var(x)
            return lam.Lam(
                G,
                lam.Exists(
                    x,
                    lam.And(
                        lam.Pred(word.lemma, (xv,)),
                        lam.And(lam.App(rel, xv), lam.App(lam.Var(G), xv)),
                    ),
                ),
            )
        if r == "vp_iv":
            return self._unary_term(ch[0].lex.lemma, fresh)
        if r == "vp_iv_adv":
            x = fresh()
            return lam.Lam(
                x,
                lam.And(
                    lam.Pred(ch[0].lex.lemma, (lam.Var(x),)),
                    lam.Pred(ch[1].lex.lemma, (lam.Var(x),)),
                ),
            )
        if r in ("vp_or", "vp_and"):
            x = fresh()
            a = lam.Pred(ch[0].lex.lemma, (lam.Var(x),))
            b = lam.Pred(ch[1].lex.lemma, (lam.Var(x),))
            return lam.Lam(x, lam.Or(a, b) if r == "vp_or" else lam.And(a, b))
        if r == "vp_tv":
            x, y = fresh(), fresh()
            obj = self._fol_term(ch[1], fresh)
            pred = lam.Pred(ch[0].lex.lemma, (lam.Var(x), lam.Var(y)))
            return lam.Lam(x, lam.App(obj, lam.Lam(y, pred)))
        if r == "rel_subj":
            return self._fol_term(ch[0], fresh)
        if r == "rel_subj_neg":
            x = fresh()
            vp = self._fol_term(ch[0], fresh)
            return lam.Lam(x, lam.Not(lam.App(vp, lam.Var(x))))
        if r == "rel_obj":
            x, y = fresh(), fresh()
            np = self._fol_term(ch[0], fresh)
            pred = lam.Pred(ch[1].lex.lemma, (lam.Var(x), lam.Var(y)))
            return lam.Lam(y, lam.App(np, lam.Lam(x, pred)))
        if r == "rel_obj_neg":
            x, y = fresh(), fresh()
            np = self._fol_term(ch[0], fresh)
            pred = lam.Pred(ch[1].lex.lemma, (lam.Var(x), lam.Var(y)))
            return lam.Lam(y, lam.App(np, lam.Lam(x, lam.Not(pred))))
        raise ValueError("cannot compose node %r" % r)

    # -- variable-free pipeline ------------------------------------------------

    def vf(self, tree: Tree) -> vf.Vf:
        fresh = lam.Gensym("w")
        term = self._vf_term(tree, fresh)
        normal = lam.beta_normalize(term, fresh)
        return vf.from_lambda(normal)

    def vf_tokens(self, tree: Tree) -> list[str]:
        return vf.serialize(self.vf(tree))

    def _vf_quant_term(self, q, fresh) -> object:
        op = {"every": "ALL", "all": "ALL", "a": "EXIST", "one": "EXIST", "two": "TWO", "three": "THREE"}[
            q.lemma
        ]
        F, G = fresh(), fresh()
        return lam.Lam(F, lam.Lam(G, lam.Op(op, (lam.Var(F), lam.Var(G)))))

    def _vf_term(self, t: Tree, fresh) -> object:
        r = t.rule
        ch = t.children
        if r == "s":
            return lam.App(self._vf_term(ch[0], fresh), self._vf_term(ch[1], fresh))
        if r == "s_neg":
            return lam.App(
                self._vf_term(ch[0], fresh), lam.Op("NOT", (self._vf_term(ch[1], fresh),))
            )
        if r == "np_pn":
            F = fresh()
            sym = lam.Sym(ch[0].lex.lemma.upper())
            return lam.Lam(F, lam.Op("EXIST", (sym, lam.Var(F))))
        if r == "np_qn":
            return lam.App(
                self._vf_quant_term(ch[0].lex, fresh), lam.Sym(ch[1].lex.lemma.upper())
            )
        if r == "np_q_adj_n":
            q = ch[0].lex
            adj = lam.Sym(ch[1].lex.lemma.upper())
            noun = lam.Sym(ch[2].lex.lemma.upper())
            pair = (adj, noun) if q.klass == "existential" else (noun, adj)
            return lam.App(self._vf_quant_term(q, fresh), lam.Op("AND", pair))
        if r == "np_qn_rel":
            noun = lam.Sym(ch[1].lex.lemma.upper())
            rel = self._vf_term(ch[2], fresh)
            return lam.App(self._vf_quant_term(ch[0].lex, fresh), lam.Op("AND", (noun, rel)))
        if r == "np_pn_rel":
            F = fresh()
            sym = lam.Sym(ch[0].lex.lemma.upper())
            rel = self._vf_term(ch[1], fresh)
            return lam.Lam(F, lam.Op("EXIST", (lam.Op("AND", (sym, rel)), lam.Var(F))))
        if r == "vp_iv":
            return lam.Sym(ch[0].lex.lemma.upper())
        if r == "vp_iv_adv":
            return lam.Op(
                "AND", (lam.Sym(ch[0].lex.lemma.upper()), lam.Sym(ch[1].lex.lemma.upper()))
            )
        if r in ("vp_or", "vp_and"):
            op = "OR" if r == "vp_or" else "AND"
            return lam.Op(
                op, (lam.Sym(ch[0].lex.lemma.upper()), lam.Sym(ch[1].lex.lemma.upper()))
            )
        if r == "vp_tv":
            return lam.App(self._vf_term(ch[1], fresh), lam.Sym(ch[0].lex.lemma.upper()))
        if r == "rel_subj":
            return self._vf_term(ch[0], fresh)
        if r == "rel_subj_neg":
            return lam.Op("NOT", (self._vf_term(ch[0], fresh),))
        if r == "rel_obj":
            np = self._vf_term(ch[0], fresh)
            return lam.App(np, lam.Op("INV", (lam.Sym(ch[1].lex.lemma.upper()),)))
        if r == "rel_obj_neg":
            np = self._vf_term(ch[0], fresh)
            return lam.App(
                np, lam.Op("NOT", (lam.Op("INV", (lam.Sym(ch[1].lex.lemma.upper()),)),))
            )
        raise ValueError("cannot compose node %r" % r)


# -- variable-free -> first-order translation ---------------------------------

_QUANT_OPS = frozenset({"ALL", "EXIST", "TWO", "THREE"})
_MARKERS = {"TWO": "two", "THREE": "three"}


class VfTypeError(vf.VfError):
    pass


def vf_to_fol(formula: vf.Vf) -> fol.Fol:
    """Translate a variable-free formula into a logically equivalent
    first-order formula.

    Types are forced by position: the root is a sentence, quantifier
    restrictors are properties, and the second operand of a quantifier in
    property position is a binary relation (INV swaps its argument order).
    """
    counter = [0]

    def fresh() -> str:
        counter[0] += 1
        return "x%d" % counter[0]

    def quantify(op: str, restr: fol.Fol, body: fol.Fol, var: str) -> fol.Fol:
        if op == "ALL":
            return fol.Forall(var, fol.Imp(restr, body))
        parts: tuple[fol.Fol, ...] = (restr, body)
        if op in _MARKERS:
            parts = (fol.Pred(_MARKERS[op], (var,)),) + parts
        return fol.Exists(var, fol.And(parts))

    def sentence(t: vf.Vf) -> fol.Fol:
        match t:
            case vf.Node(op, (f, g)) if op in _QUANT_OPS:
                x = fresh()
                return quantify(op, prop(f, x), prop(g, x), x)
            case vf.Node("NOT", (a,)):
                return fol.Not(sentence(a))
            case vf.Node("AND", (a, b)):
                return fol.And((sentence(a), sentence(b)))
            case vf.Node("OR", (a, b)):
                return fol.Or((sentence(a), sentence(b)))
        raise VfTypeError("not a sentence: %r" % (t,))

    def prop(t: vf.Vf, x: str) -> fol.Fol:
        match t:
            case vf.Leaf(lemma):
                return fol.Pred(lemma.lower(), (x,))
            case vf.Node("AND", (a, b)):
                return fol.And((prop(a, x), prop(b, x)))
            case vf.Node("OR", (a, b)):
                return fol.Or((prop(a, x), prop(b, x)))
            case vf.Node("NOT", (a,)):
                return fol.Not(prop(a, x))
            case vf.Node(op, (f, g)) if op in _QUANT_OPS:
                y = fresh()
                return quantify(op, prop(f, y), rel(g, x, y), y)
        raise VfTypeError("not a property: %r" % (t,))

    def rel(t: vf.Vf, subj: str, obj: str) -> fol.Fol:
        match t:
            case vf.Leaf(lemma):
                return fol.Pred(lemma.lower(), (subj, obj))
            case vf.Node("INV", (a,)):
                return rel(a, obj, subj)
            case vf.Node("NOT", (a,)):
                return fol.Not(rel(a, subj, obj))
        raise VfTypeError("not a relation: %r" % (t,))

    return fol.canonicalize(sentence(formula))

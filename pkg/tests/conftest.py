import pytest

from semgen.compose import Composer
from semgen.grammar import Grammar, Tree
from semgen.lexicon import default_lexicon


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    outcomes = {}
    for status in ("passed", "failed", "error", "skipped"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" in nodeid and "::" in nodeid:
                outcomes[nodeid.split("::")[-1]] = status
    if not outcomes:
        return
    label = {"passed": "PASS", "failed": "FAIL", "error": "FAIL", "skipped": "SKIP"}
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name in sorted(outcomes):
        terminalreporter.write_line("  %-58s %s" % (name, label[outcomes[name]]))


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def grammar(lexicon):
    return Grammar(lexicon)


@pytest.fixture(scope="session")
def composer(lexicon):
    return Composer(lexicon)


@pytest.fixture(scope="session")
def constant_composer(lexicon):
    return Composer(lexicon, pn_style="constant")


class TreeBuilder:
    """Hand-construct derivation trees for named example sentences."""

    def __init__(self, lexicon):
        self.lexicon = lexicon

    def leaf(self, cat, lemma):
        for entry in self.lexicon.entries(cat):
            if entry.lemma == lemma:
                return Tree(cat, "lex:" + cat, (), entry)
        raise KeyError("%s/%s" % (cat, lemma))

    def np(self, q, n, adj=None, rel=None):
        if adj is not None:
            return Tree(
                "NP",
                "np_q_adj_n",
                (self.leaf("Q", q), self.leaf("ADJ", adj), self.leaf("N", n)),
            )
        if rel is not None:
            return Tree("NP", "np_qn_rel", (self.leaf("Q", q), self.leaf("N", n), rel))
        return Tree("NP", "np_qn", (self.leaf("Q", q), self.leaf("N", n)))

    def pn(self, lemma, rel=None):
        if rel is not None:
            return Tree("NP", "np_pn_rel", (self.leaf("PN", lemma), rel))
        return Tree("NP", "np_pn", (self.leaf("PN", lemma),))

    def vp_iv(self, verb, adv=None):
        if adv is not None:
            return Tree("VP", "vp_iv_adv", (self.leaf("IV", verb), self.leaf("ADV", adv)))
        return Tree("VP", "vp_iv", (self.leaf("IV", verb),))

    def vp_conj(self, verb, verb2, op):
        rule = "vp_or" if op == "or" else "vp_and"
        return Tree("VP", rule, (self.leaf("IV", verb), self.leaf("IV2", verb2)))

    def vp_tv(self, verb, obj):
        return Tree("VP", "vp_tv", (self.leaf("TV", verb), obj))

    def rel_subj(self, vp, neg=False):
        return Tree("SBAR", "rel_subj_neg" if neg else "rel_subj", (vp,))

    def rel_obj(self, np, verb, neg=False):
        return Tree(
            "SBAR", "rel_obj_neg" if neg else "rel_obj", (np, self.leaf("TV", verb))
        )

    def s(self, np, vp, neg=False):
        return Tree("S", "s_neg" if neg else "s", (np, vp))


@pytest.fixture(scope="session")
def build(lexicon):
    return TreeBuilder(lexicon)


@pytest.fixture(scope="session")
def one_white_dog_did_not_run(build):
    return build.s(build.np("one", "dog", adj="white"), build.vp_iv("run"), neg=True)


@pytest.fixture(scope="session")
def all_wild_dogs_ran(build):
    return build.s(build.np("all", "dog", adj="wild"), build.vp_iv("run"))


@pytest.fixture(scope="session")
def a_small_dog_did_not_swim(build):
    return build.s(build.np("a", "dog", adj="small"), build.vp_iv("swim"), neg=True)


@pytest.fixture(scope="session")
def all_tigers_ran_or_swam(build):
    return build.s(build.np("all", "tiger"), build.vp_conj("run", "swim", "or"))


@pytest.fixture(scope="session")
def ann_did_not_chase_two_dogs(build):
    return build.s(
        build.pn("ann"), build.vp_tv("chase", build.np("two", "dog")), neg=True
    )


@pytest.fixture(scope="session")
def two_small_cats_chased_bob(build):
    return build.s(build.np("two", "cat", adj="small"), build.vp_tv("chase", build.pn("bob")))


@pytest.fixture(scope="session")
def all_small_cats_chased_bob(build):
    return build.s(build.np("all", "cat", adj="small"), build.vp_tv("chase", build.pn("bob")))


@pytest.fixture(scope="session")
def table16_tree(build):
    # all lions that did not follow two bears that chased three monkeys did not cry
    inner = build.np(
        "two",
        "bear",
        rel=build.rel_subj(build.vp_tv("chase", build.np("three", "monkey"))),
    )
    subject = build.np(
        "all", "lion", rel=build.rel_subj(build.vp_tv("follow", inner), neg=True)
    )
    return build.s(subject, build.vp_iv("cry"), neg=True)


TABLE16_GOLD = [
    "b1 IMP b2 b4",
    "b2 REF x1",
    "b2 lion x1",
    "b2 NOT b3",
    "b3 REF x2",
    "b3 REF x3",
    "b3 two x2",
    "b3 bear x2",
    "b3 three x3",
    "b3 monkey x3",
    "b3 chase x3 x2",
    "b3 follow x2 x1",
    "b4 NOT b5",
    "b5 cry x1",
]

TABLE16_GRU = [
    "b1 IMP b2 b3",
    "b2 REF x1",
    "b2 lion x1",
    "b2 NOT b3",
    "b3 REF x2",
    "b3 two x2",
    "b3 bear x2",
    "b3 follow x2 x2",
    "b3 REF x3",
    "b3 three x3",
    "b4 monkey x3",
    "b4 like x3 x2",
    "b4 like x1 x2",
]

TABLE16_TRANSFORMER = [
    "b1 IMP b2 b3",
    "b2 REF x1",
    "b2 lion x1",
    "b2 NOT b3",
    "b3 REF x2",
    "b3 two x2",
    "b3 monkey x2",
    "b3 follow x2 x1",
    "b3 REF x3",
    "b3 john x3",
    "b3 chase x1 x3",
]

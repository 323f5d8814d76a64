import json

import pytest

from semgen.lexicon import (
    QUANTIFIERS,
    DEFAULT_CONFIG,
    LexiconError,
    default_lexicon,
    load_lexicon,
)


def test_quantifier_inventory(lexicon):
    assert [q.lemma for q in lexicon.quantifiers] == ["every", "all", "a", "one", "two", "three"]
    assert {q.klass for q in lexicon.quantifiers} == {"existential", "numeral", "universal"}


def test_category_sizes(lexicon):
    assert len(lexicon.nouns) == 11
    assert len(lexicon.adjectives) == 10
    assert len(lexicon.adverbs) == 10
    assert len(lexicon.second_intransitives) == 5  # x {and, or} = ten patterns
    assert len(lexicon.proper_nouns) >= 5
    assert len(lexicon.intransitives) >= 5
    assert len(lexicon.transitives) >= 5


def test_distinct_surface_forms(lexicon):
    for n in lexicon.nouns:
        assert n.sg != n.pl
    for v in lexicon.intransitives + lexicon.second_intransitives + lexicon.transitives:
        assert v.past != v.base


def test_lemmas_unique_within_category(lexicon):
    for cat in ("N", "PN", "IV", "IV2", "TV", "ADJ", "ADV"):
        lemmas = [e.lemma for e in lexicon.entries(cat)]
        assert len(set(lemmas)) == len(lemmas)


def test_load_from_config_file(tmp_path):
    path = tmp_path / "lex.json"
    path.write_text(json.dumps(DEFAULT_CONFIG))
    lex = load_lexicon(str(path))
    assert lex == default_lexicon()


def test_config_rejects_marker_collision(tmp_path):
    cfg = json.loads(json.dumps(DEFAULT_CONFIG))
    cfg["N"][0] = ["two", "two", "twos"]
    path = tmp_path / "lex.json"
    path.write_text(json.dumps(cfg))
    with pytest.raises(LexiconError):
        load_lexicon(str(path))


def test_config_rejects_same_sg_pl(tmp_path):
    cfg = json.loads(json.dumps(DEFAULT_CONFIG))
    cfg["N"][0] = ["sheep", "sheep", "sheep"]
    path = tmp_path / "lex.json"
    path.write_text(json.dumps(cfg))
    with pytest.raises(LexiconError):
        load_lexicon(str(path))


def test_quantifier_restriction(lexicon):
    sub = lexicon.restrict_quantifiers({"one"})
    assert [q.lemma for q in sub.quantifiers] == ["one"]
    with pytest.raises(LexiconError):
        lexicon.restrict_quantifiers({"most"})


def test_numeral_markers_are_quantifier_lemmas():
    assert {q.lemma for q in QUANTIFIERS if q.klass == "numeral"} == {"two", "three"}

"""Dataset records: one generated sentence with its derivation, tags and the
three meaning representations, plus the file formats everything travels in.

File formats (all UTF-8, LF line endings):
  * pool/dataset JSONL: one record per line, keys sorted;
  * per-representation TSV: sentence TAB target token string;
  * DRS clause files: one clause per line, blank line between records;
  * prediction TSV: record id TAB predicted token string.

In the flat DRS token string, clauses are joined with a SEP token so the
clause structure survives a sequence model's output format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import drs, fol, polarity, vf
from .compose import Composer
from .grammar import Grammar, PhenomenonTags, Tree, quantifier_lemmas, realize, tag

CLAUSE_SEP = "SEP"

MR_NAMES = ("fol", "vf", "drs")


class DataError(ValueError):
    pass


@dataclass
class DatasetRecord:
    id: str
    sentence: str
    tree: list
    tags: PhenomenonTags
    quantifiers: list[str]
    fol: str | None = None
    vf: str | None = None
    drs: list[str] = field(default_factory=list)
    polarity: list[dict] = field(default_factory=list)
    split: str | None = None
    strategy: str | None = None
    primitive: list[str] = field(default_factory=list)

    def target(self, mr: str) -> str:
        if mr == "fol":
            value = self.fol
        elif mr == "vf":
            value = self.vf
        elif mr == "drs":
            value = (" %s " % CLAUSE_SEP).join(self.drs) if self.drs else None
        else:
            raise DataError("unknown representation %r" % mr)
        if value is None:
            raise DataError("record %s has no %s form (run convert first)" % (self.id, mr))
        return value

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "sentence": self.sentence,
            "tree": self.tree,
            "tags": self.tags.to_json(),
            "quantifiers": self.quantifiers,
            "fol": self.fol,
            "vf": self.vf,
            "drs": self.drs,
            "polarity": self.polarity,
            "split": self.split,
            "strategy": self.strategy,
            "primitive": self.primitive,
        }

    @staticmethod
    def from_json(d: dict) -> "DatasetRecord":
        return DatasetRecord(
            id=d["id"],
            sentence=d["sentence"],
            tree=d["tree"],
            tags=PhenomenonTags.from_json(d["tags"]),
            quantifiers=list(d["quantifiers"]),
            fol=d.get("fol"),
            vf=d.get("vf"),
            drs=list(d.get("drs") or []),
            polarity=list(d.get("polarity") or []),
            split=d.get("split"),
            strategy=d.get("strategy"),
            primitive=list(d.get("primitive") or []),
        )


def record_from_tree(tree: Tree, rid: str) -> DatasetRecord:
    return DatasetRecord(
        id=rid,
        sentence=realize(tree),
        tree=tree.encode(),
        tags=tag(tree),
        quantifiers=list(quantifier_lemmas(tree)),
    )


def attach_representations(record: DatasetRecord, composer: Composer, grammar: Grammar) -> None:
    """Fill in the three meaning representations and the polarity marking."""
    tree = grammar.decode(record.tree)
    formula = composer.fol(tree)
    record.fol = fol.serialize_str(formula)
    record.vf = vf.serialize_str(composer.vf(tree))
    record.drs = [" ".join(c) for c in drs.drs_to_clauses(drs.fol_to_drs(formula))]
    marks = polarity.polarize_fol(formula, composer.lexicon.proper_noun_lemmas)
    record.polarity = [m.to_json() for m in marks]


# -- files ---------------------------------------------------------------------


def write_jsonl(records, path) -> int:
    n = 0
    seen: set[str] = set()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            if r.id in seen:
                raise DataError("duplicate record id %r" % r.id)
            seen.add(r.id)
            fh.write(json.dumps(r.to_json(), sort_keys=True, separators=(",", ":")))
            fh.write("\n")
            n += 1
    return n


def read_jsonl(path) -> list[DatasetRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                out.append(DatasetRecord.from_json(json.loads(line)))
            except (json.JSONDecodeError, KeyError) as exc:
                raise DataError("%s line %d: %s" % (path, i, exc)) from exc
    return out


def write_tsv(records, mr: str, path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write("%s\t%s\n" % (r.sentence, r.target(mr)))
            n += 1
    return n


def write_id_tsv(records, mr: str, path) -> int:
    """id TAB target variant, the shape prediction files come back in."""
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write("%s\t%s\n" % (r.id, r.target(mr)))
            n += 1
    return n


def write_clause_file(records, path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            if not r.drs:
                raise DataError("record %s has no clause form" % r.id)
            fh.write("\n".join(r.drs))
            fh.write("\n\n")
            n += 1
    return n


@dataclass
class Prediction:
    id: str
    tokens: str


def read_predictions(path) -> list[Prediction]:
    """id TAB tokens, tolerant of malformed payloads (kept raw); a missing id
    column is an error because scoring needs the alignment."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise DataError("%s line %d: expected 'id<TAB>tokens'" % (path, i))
            rid, tokens = line.split("\t", 1)
            out.append(Prediction(rid.strip(), tokens.strip()))
    return out


def prediction_clauses(tokens: str) -> list[tuple]:
    """Split a flat predicted DRS token string on SEP markers into clauses."""
    lines = []
    current: list[str] = []
    for token in tokens.split():
        if token == CLAUSE_SEP:
            lines.append(" ".join(current))
            current = []
        else:
            current.append(token)
    lines.append(" ".join(current))
    return drs.parse_clauses("\n".join(lines))


def write_manifest(path, payload: dict) -> None:
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8", newline="\n"
    )

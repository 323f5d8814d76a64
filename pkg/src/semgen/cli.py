"""Command-line entry point: generate -> split -> convert -> evaluate/prove,
plus polarity inspection and report rendering.

Every run writes a manifest next to its main output (inputs, seed, version,
counts) so outputs are reconstructible; all randomness flows from --seed.

Exit codes: 0 success, 1 usage error, 2 data error, 3 external tool error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, drs, fol, vf
from . import entailment as ent
from . import metrics as met
from . import polarity as pol
from . import records as rec
from . import splits as spl
from . import tptp
from .compose import Composer, vf_to_fol
from .grammar import Grammar, PopulationTooSmall
from .lexicon import LexiconError, load_lexicon

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_EXTERNAL = 3


class ExternalToolError(RuntimeError):
    pass


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_config_layer(args: argparse.Namespace, parser: argparse.ArgumentParser):
    """Apply config-file values for options left at their defaults (explicit
    flags win)."""
    if not getattr(args, "config", None):
        return
    with open(args.config, encoding="utf-8") as fh:
        overrides = json.load(fh)
    sub = parser._semgen_subparsers.get(args.command)
    defaults = {a.dest: a.default for a in parser._actions}
    if sub is not None:
        defaults.update({a.dest: a.default for a in sub._actions})
    for key, value in overrides.items():
        if not hasattr(args, key) or key not in defaults:
            continue
        if getattr(args, key) == defaults[key]:
            setattr(args, key, value)


def _manifest(out_path: str, command: str, config: dict, counts: dict) -> None:
    rec.write_manifest(
        str(Path(out_path).with_suffix(Path(out_path).suffix + ".manifest.json")),
        {"command": command, "config": config, "counts": counts, "version": __version__},
    )


def _composer(args) -> tuple[Grammar, Composer]:
    lexicon = load_lexicon(getattr(args, "lexicon", None))
    return Grammar(lexicon), Composer(lexicon, pn_style=getattr(args, "pn_style", "predicate"))


# -- generate --------------------------------------------------------------------


def cmd_generate(args) -> int:
    grammar, _ = _composer(args)
    if args.strategy:
        spec = spl.SplitSpec(
            strategy=args.strategy,
            primitive=tuple(args.primitive),
            pool_size=args.n,
            train_size=args.train,
            test_size=args.n - args.train,
            per_depth=args.per_depth,
            train_per_depth=args.train_per_depth,
            test_per_depth=args.test_per_depth,
            max_depth=args.max_depth,
            seed=args.seed,
        )
        pool = spl.build_pool(grammar, spec)
    else:
        trees = grammar.sample_trees(
            args.n,
            seed=args.seed,
            max_depth=args.max_depth,
            exact_depth=args.exact_depth,
        )
        pool = [rec.record_from_tree(t, "r%06d" % i) for i, t in enumerate(trees)]
    n = rec.write_jsonl(pool, args.out)
    _manifest(
        args.out,
        "generate",
        {
            "n": args.n,
            "seed": args.seed,
            "max_depth": args.max_depth,
            "exact_depth": args.exact_depth,
            "strategy": args.strategy,
            "primitive": list(args.primitive),
            "lexicon": args.lexicon,
        },
        {"records": n},
    )
    _log("generate: wrote %d records to %s" % (n, args.out))
    return EXIT_OK


# -- split -----------------------------------------------------------------------


def cmd_split(args) -> int:
    pool = rec.read_jsonl(args.pool)
    spec = spl.SplitSpec(
        strategy=args.strategy,
        primitive=tuple(args.primitive),
        pool_size=len(pool),
        train_size=args.train,
        test_size=args.test if args.test is not None else len(pool) - args.train,
        per_depth=args.per_depth,
        max_depth=args.max_depth,
        valid_fraction=args.valid_frac,
        seed=args.seed,
    )
    out = spl.build_split(pool, spec)
    leak = spl.leakage_report(out, spec.primitive)
    if args.strategy.startswith("systematicity") and (
        leak["sentence_overlap"] or leak["leaked_pairs"]
    ):
        raise rec.DataError("leakage detected: %r" % leak)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    counts = {}
    for name in (spl.TRAIN, spl.VALID, spl.TEST):
        subset = [r for r in out if r.split == name]
        counts[name] = rec.write_jsonl(subset, outdir / ("%s.jsonl" % name))
    _manifest(
        str(outdir / "split"),
        "split",
        {
            "strategy": args.strategy,
            "primitive": list(args.primitive),
            "train": args.train,
            "test": spec.test_size,
            "valid_frac": args.valid_frac,
            "seed": args.seed,
            "pool": args.pool,
        },
        {**counts, "leakage": leak},
    )
    _log("split: %s" % " ".join("%s=%d" % kv for kv in counts.items()))
    return EXIT_OK


# -- convert ---------------------------------------------------------------------


def cmd_convert(args) -> int:
    grammar, composer = _composer(args)
    data = rec.read_jsonl(args.infile)
    if args.jobs > 1:
        import multiprocessing as mp

        with mp.Pool(args.jobs, initializer=_pool_init, initargs=(args.lexicon, args.pn_style)) as p:
            payload = p.map(_convert_one, [r.to_json() for r in data], chunksize=64)
        data = [rec.DatasetRecord.from_json(d) for d in payload]
    else:
        for r in data:
            rec.attach_representations(r, composer, grammar)
    n = rec.write_jsonl(data, args.out)
    counts = {"records": n}
    if args.tsv_dir:
        tsv_dir = Path(args.tsv_dir)
        tsv_dir.mkdir(parents=True, exist_ok=True)
        stem = Path(args.out).stem
        for mr in args.mrs:
            counts["tsv_" + mr] = rec.write_tsv(data, mr, tsv_dir / ("%s.%s.tsv" % (stem, mr)))
            counts["gold_" + mr] = rec.write_id_tsv(
                data, mr, tsv_dir / ("%s.%s.gold.tsv" % (stem, mr))
            )
        if "drs" in args.mrs:
            counts["clauses"] = rec.write_clause_file(data, tsv_dir / ("%s.drs.clauses" % stem))
    _manifest(
        args.out,
        "convert",
        {"in": args.infile, "pn_style": args.pn_style, "mrs": args.mrs, "jobs": args.jobs},
        counts,
    )
    _log("convert: wrote %d records to %s" % (n, args.out))
    return EXIT_OK


_POOL_STATE: dict = {}


def _pool_init(lexicon_path, pn_style):
    lexicon = load_lexicon(lexicon_path)
    _POOL_STATE["grammar"] = Grammar(lexicon)
    _POOL_STATE["composer"] = Composer(lexicon, pn_style=pn_style)


def _convert_one(payload: dict) -> dict:
    r = rec.DatasetRecord.from_json(payload)
    rec.attach_representations(r, _POOL_STATE["composer"], _POOL_STATE["grammar"])
    return r.to_json()


# -- polarity --------------------------------------------------------------------


def cmd_polarity(args) -> int:
    _, composer = _composer(args)
    exclude = composer.lexicon.proper_noun_lemmas
    with open(args.infile, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    with open(args.out, "w", encoding="utf-8", newline="\n") as out:
        for ln in lines:
            try:
                if args.mr == "fol":
                    marks = pol.polarize_fol(fol.parse(ln), exclude)
                else:
                    marks = pol.polarize_vf(vf.parse(ln), exclude)
                out.write(" ".join("%s:%s" % (m.lemma, m.polarity) for m in marks))
            except (fol.FolError, vf.VfError):
                out.write("<unparseable>")
            out.write("\n")
    _log("polarity: annotated %d formulas" % len(lines))
    return EXIT_OK


# -- evaluate --------------------------------------------------------------------


def _polarity_of(mr: str, tokens: str, exclude):
    if mr == "fol":
        return pol.polarize_fol(fol.parse(tokens), exclude)
    if mr == "vf":
        return pol.polarize_vf(vf.parse(tokens), exclude)
    raise rec.DataError("polarity scoring needs --mr fol or vf")


def cmd_evaluate(args) -> int:
    _, composer = _composer(args)
    exclude = composer.lexicon.proper_noun_lemmas
    gold = {r.id: r for r in rec.read_jsonl(args.gold)}
    preds = rec.read_predictions(args.pred)
    missing = [p.id for p in preds if p.id not in gold]
    if missing:
        raise rec.DataError("prediction ids not in gold: %s..." % missing[:5])
    cfg = met.MappingSearchConfig(
        restarts=args.restarts, seed=args.seed, include_ref=args.include_ref
    )
    budget = ent.Budget(max_domain=args.max_domain, wall_clock=args.timeout)
    rows = []
    for p in preds:
        g = gold[p.id]
        scores: dict[str, float] = {}
        unparseable = False
        if "exact" in args.metrics:
            scores["exact"] = float(met.exact_match(g.target(args.mr), p.tokens))
        if "counter" in args.metrics:
            if args.mr != "drs":
                raise rec.DataError("counter scoring needs --mr drs")
            try:
                pred_clauses = rec.prediction_clauses(p.tokens)
                gold_clauses = [tuple(line.split()) for line in g.drs]
                scores["counter"] = met.clause_match_f(gold_clauses, pred_clauses, cfg).f
            except drs.ClauseParseError:
                unparseable = True
                scores["counter"] = 0.0
        if "polarity" in args.metrics:
            gold_marks = _polarity_of(args.mr, g.target(args.mr), exclude)
            try:
                pred_marks = _polarity_of(args.mr, p.tokens, exclude)
            except (fol.FolError, vf.VfError):
                unparseable = True
                pred_marks = []
            prf = met.polarity_prf(gold_marks, pred_marks)
            scores["polarity_up_f"] = prf[pol.UP]["f"]
            scores["polarity_down_f"] = prf[pol.DOWN]["f"]
        if "entail" in args.metrics:
            try:
                if args.mr == "fol":
                    pf = fol.parse(p.tokens)
                elif args.mr == "vf":
                    pf = vf_to_fol(vf.parse(p.tokens))
                else:
                    raise rec.DataError("entail scoring needs --mr fol or vf")
                gf = fol.parse(g.target("fol"))
                v_gp, v_pg = ent.check(gf, pf, budget)
            except (fol.FolError, vf.VfError):
                unparseable = True
                v_gp, v_pg = ent.malformed_verdicts()
            scores["entail_gp"] = float(v_gp.verdict == ent.ENTAILS)
            scores["entail_pg"] = float(v_pg.verdict == ent.ENTAILS)
            scores["entail_bi"] = scores["entail_gp"] * scores["entail_pg"]
        rows.append({"id": p.id, "tags": g.tags, "scores": scores, "unparseable": unparseable})
    report = met.aggregate(rows)
    payload = report.to_json()
    payload["mr"] = args.mr
    payload["metrics"] = args.metrics
    with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    _manifest(
        args.report,
        "evaluate",
        {
            "gold": args.gold,
            "pred": args.pred,
            "mr": args.mr,
            "metrics": args.metrics,
            "seed": args.seed,
        },
        {"records": report.n},
    )
    if args.table:
        print(render_table(payload))
    _log("evaluate: %d records -> %s" % (report.n, args.report))
    return EXIT_OK


# -- prove -----------------------------------------------------------------------


def cmd_prove(args) -> int:
    gold = {r.id: r for r in rec.read_jsonl(args.gold)}
    preds = rec.read_predictions(args.pred)
    if not preds:
        raise rec.DataError("no records in %s" % args.pred)
    budget = ent.Budget(max_domain=args.max_domain, wall_clock=args.timeout)
    if args.external and not _external_available(args.external):
        raise ExternalToolError(
            "external prover command %r is not runnable" % args.external.split()[0]
        )
    results = []
    pairs = []
    for p in preds:
        g = gold.get(p.id)
        if g is None:
            raise rec.DataError("prediction id %r not in gold" % p.id)
        gf = fol.parse(g.target("fol"))
        try:
            pf = fol.parse(p.tokens)
        except fol.FolError:
            v_gp, v_pg = ent.malformed_verdicts()
            results.append({"id": p.id, "gp": v_gp.to_json(), "pg": v_pg.to_json()})
            pairs.append((gf, None))
            continue
        pairs.append((gf, pf))
        if args.external:
            v_gp, v_pg = tptp.external_check(gf, pf, args.external, args.timeout)
        else:
            v_gp, v_pg = ent.check(gf, pf, budget)
        results.append({"id": p.id, "gp": v_gp.to_json(), "pg": v_pg.to_json()})
    summary = {
        "n": len(results),
        "accuracy": {
            ent.GP: sum(r["gp"]["verdict"] == ent.ENTAILS for r in results) / len(results),
            ent.PG: sum(r["pg"]["verdict"] == ent.ENTAILS for r in results) / len(results),
            "G<=>P": sum(
                r["gp"]["verdict"] == ent.ENTAILS and r["pg"]["verdict"] == ent.ENTAILS
                for r in results
            )
            / len(results),
        },
        "unknown": {
            ent.GP: sum(r["gp"]["verdict"] == ent.UNKNOWN for r in results),
            ent.PG: sum(r["pg"]["verdict"] == ent.UNKNOWN for r in results),
        },
        "verdicts": results,
    }
    with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
    _manifest(
        args.report,
        "prove",
        {"gold": args.gold, "pred": args.pred, "external": args.external, "timeout": args.timeout},
        {"records": summary["n"]},
    )
    _log(
        "prove: %d records, G=>P %.3f, G<=P %.3f, bi %.3f"
        % (
            summary["n"],
            summary["accuracy"][ent.GP],
            summary["accuracy"][ent.PG],
            summary["accuracy"]["G<=>P"],
        )
    )
    return EXIT_OK


def _external_available(command: str) -> bool:
    import shutil

    head = command.split()[0] if command.split() else ""
    return bool(head) and shutil.which(head) is not None


# -- report ----------------------------------------------------------------------


def render_table(payload: dict) -> str:
    lines = []
    metric_names = sorted(payload["overall"])
    width = max(16, max(len(m) for m in metric_names) + 2)
    header = "%-12s" % "cell" + "".join(m.rjust(width) for m in metric_names)
    for section in ("by_quantifier_type", "by_modifier", "by_depth"):
        lines.append(section)
        lines.append(header)
        for cell, values in payload[section].items():
            lines.append(
                "%-12s" % cell
                + "".join(("%.3f" % values.get(m, float("nan"))).rjust(width) for m in metric_names)
            )
        lines.append("")
    lines.append(
        "%-12s" % "overall"
        + "".join(("%.3f" % payload["overall"][m]).rjust(width) for m in metric_names)
    )
    return "\n".join(lines)


def cmd_report(args) -> int:
    with open(args.infile, encoding="utf-8") as fh:
        payload = json.load(fh)
    print(render_table(payload))
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semgen",
        description="Generate sentence/meaning-representation datasets with "
        "controlled generalization splits, and score predictions against them.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with default option values")
        p.add_argument("--lexicon", help="lexicon config JSON")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument(
            "--pn-style",
            choices=("predicate", "constant"),
            default="predicate",
            dest="pn_style",
        )

    g = sub.add_parser("generate", help="sample a sentence pool")
    common(g)
    g.add_argument("--max-depth", type=int, default=0, dest="max_depth")
    g.add_argument("--exact-depth", type=int, default=None, dest="exact_depth")
    g.add_argument("--n", type=int, default=50_000)
    g.add_argument("--strategy", choices=(
        "systematicity_modifier", "systematicity_negation", "productivity", "depth_exposure"))
    g.add_argument("--primitive", nargs="+", default=["one"])
    g.add_argument("--train", type=int, default=12_000)
    g.add_argument("--per-depth", type=int, default=20_000, dest="per_depth")
    g.add_argument("--train-per-depth", type=int, default=2_000, dest="train_per_depth")
    g.add_argument("--test-per-depth", type=int, default=2_000, dest="test_per_depth")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("split", help="partition a pool into train/valid/test")
    common(s)
    s.add_argument("--strategy", required=True, choices=(
        "systematicity_modifier", "systematicity_negation", "productivity", "depth_exposure"))
    s.add_argument("--primitive", nargs="+", default=["one"])
    s.add_argument("--pool", required=True)
    s.add_argument("--train", type=int, default=12_000)
    s.add_argument("--test", type=int, default=None)
    s.add_argument("--per-depth", type=int, default=20_000, dest="per_depth")
    s.add_argument("--max-depth", type=int, default=4, dest="max_depth")
    s.add_argument("--valid-frac", type=float, default=0.1, dest="valid_frac")
    s.add_argument("--out-dir", required=True, dest="out_dir")
    s.set_defaults(func=cmd_split)

    c = sub.add_parser("convert", help="attach meaning representations")
    common(c)
    c.add_argument("--in", required=True, dest="infile")
    c.add_argument("--out", required=True)
    c.add_argument("--tsv-dir", dest="tsv_dir")
    c.add_argument("--mrs", nargs="+", default=["fol", "vf", "drs"], choices=rec.MR_NAMES)
    c.add_argument("--jobs", type=int, default=1)
    c.set_defaults(func=cmd_convert)

    p = sub.add_parser("polarity", help="annotate formulas with polarity marks")
    common(p)
    p.add_argument("--mr", required=True, choices=("fol", "vf"))
    p.add_argument("--in", required=True, dest="infile")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_polarity)

    e = sub.add_parser("evaluate", help="score a prediction file")
    common(e)
    e.add_argument("--gold", required=True)
    e.add_argument("--pred", required=True)
    e.add_argument("--mr", required=True, choices=rec.MR_NAMES)
    e.add_argument("--metrics", nargs="+", default=["exact"],
                   choices=("exact", "counter", "polarity", "entail"))
    e.add_argument("--report", required=True)
    e.add_argument("--table", action="store_true")
    e.add_argument("--restarts", type=int, default=10)
    e.add_argument("--include-ref", action="store_true", dest="include_ref")
    e.add_argument("--max-domain", type=int, default=4, dest="max_domain")
    e.add_argument("--timeout", type=float, default=10.0)
    e.set_defaults(func=cmd_evaluate)

    v = sub.add_parser("prove", help="entailment between gold and predicted formulas")
    common(v)
    v.add_argument("--gold", required=True)
    v.add_argument("--pred", required=True)
    v.add_argument("--report", required=True)
    v.add_argument("--external", help="SZS prover command with {problem} placeholder")
    v.add_argument("--max-domain", type=int, default=4, dest="max_domain")
    v.add_argument("--timeout", type=float, default=10.0)
    v.set_defaults(func=cmd_prove)

    r = sub.add_parser("report", help="render an evaluation report as a table")
    r.add_argument("--in", required=True, dest="infile")
    r.set_defaults(func=cmd_report)

    parser._semgen_subparsers = {
        "generate": g, "split": s, "convert": c, "polarity": p,
        "evaluate": e, "prove": v, "report": r,
    }
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        _load_config_layer(args, parser)
        return args.func(args)
    except ExternalToolError as exc:
        _log("external tool error: %s" % exc)
        return EXIT_EXTERNAL
    except (
        rec.DataError,
        spl.SplitError,
        LexiconError,
        PopulationTooSmall,
        fol.FolError,
        vf.VfError,
        drs.DrsError,
        FileNotFoundError,
    ) as exc:
        _log("data error: %s" % exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

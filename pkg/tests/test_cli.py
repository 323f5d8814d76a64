import json
from pathlib import Path

import pytest

from semgen.cli import main


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture()
def pipeline(tmp_path):
    """Small generate -> split -> convert run shared by the CLI tests."""
    pool = tmp_path / "pool.jsonl"
    assert run([
        "generate", "--strategy", "systematicity_modifier", "--primitive", "one",
        "--n", "300", "--train", "80", "--seed", "3", "--out", pool,
    ]) == 0
    outdir = tmp_path / "split"
    assert run([
        "split", "--strategy", "systematicity_modifier", "--primitive", "one",
        "--pool", pool, "--train", "80", "--seed", "3", "--out-dir", outdir,
    ]) == 0
    full = tmp_path / "test.full.jsonl"
    assert run([
        "convert", "--in", outdir / "test.jsonl", "--out", full,
        "--tsv-dir", tmp_path / "tsv",
    ]) == 0
    return tmp_path


def test_generate_manifest(pipeline):
    manifest = json.loads((pipeline / "pool.jsonl.manifest.json").read_text())
    assert manifest["counts"]["records"] == 300
    assert manifest["config"]["seed"] == 3


def test_split_counts(pipeline):
    lines = (pipeline / "split" / "test.jsonl").read_text().splitlines()
    assert len(lines) == 220
    train = (pipeline / "split" / "train.jsonl").read_text().splitlines()
    valid = (pipeline / "split" / "valid.jsonl").read_text().splitlines()
    assert len(train) + len(valid) == 80


def test_evaluate_gold_as_prediction(pipeline):
    report = pipeline / "report.json"
    assert run([
        "evaluate", "--gold", pipeline / "test.full.jsonl",
        "--pred", pipeline / "tsv" / "test.full.vf.gold.tsv",
        "--mr", "vf", "--metrics", "exact", "polarity",
        "--report", report,
    ]) == 0
    payload = json.loads(report.read_text())
    assert payload["overall"]["exact"] == 1.0
    assert payload["overall"]["polarity_up_f"] == 1.0


def test_evaluate_drs_counter(pipeline):
    report = pipeline / "drs_report.json"
    assert run([
        "evaluate", "--gold", pipeline / "test.full.jsonl",
        "--pred", pipeline / "tsv" / "test.full.drs.gold.tsv",
        "--mr", "drs", "--metrics", "exact", "counter",
        "--report", report,
    ]) == 0
    payload = json.loads(report.read_text())
    assert payload["overall"]["counter"] == 1.0


def test_usage_error_exit_code():
    assert run(["no-such-command"]) == 1
    assert run(["generate"]) == 1  # --out is required


def test_data_error_exit_code(tmp_path):
    assert run([
        "split", "--strategy", "productivity", "--pool", tmp_path / "missing.jsonl",
        "--out-dir", tmp_path,
    ]) == 2


def test_external_tool_exit_code(pipeline, tmp_path):
    gold = pipeline / "test.full.jsonl"
    pred = pipeline / "tsv" / "test.full.fol.gold.tsv"
    code = run([
        "prove", "--gold", gold, "--pred", pred,
        "--external", "missing-binary-xyz {problem}",
        "--report", tmp_path / "r.json",
    ])
    assert code == 3


def test_prove_internal(pipeline, tmp_path):
    gold = pipeline / "test.full.jsonl"
    pred_path = tmp_path / "small.tsv"
    lines = (pipeline / "tsv" / "test.full.fol.gold.tsv").read_text().splitlines()[:10]
    pred_path.write_text("\n".join(lines) + "\n")
    report = tmp_path / "prove.json"
    assert run(["prove", "--gold", gold, "--pred", pred_path, "--report", report]) == 0
    payload = json.loads(report.read_text())
    assert payload["accuracy"]["G<=>P"] == 1.0


def test_pipeline_determinism(tmp_path):
    def run_once(root: Path):
        root.mkdir()
        pool = root / "pool.jsonl"
        run(["generate", "--strategy", "systematicity_modifier", "--n", "200",
             "--train", "60", "--seed", "11", "--out", pool])
        outdir = root / "split"
        run(["split", "--strategy", "systematicity_modifier", "--pool", pool,
             "--train", "60", "--seed", "11", "--out-dir", outdir])
        full = root / "full.jsonl"
        run(["convert", "--in", outdir / "test.jsonl", "--out", full,
             "--tsv-dir", root / "tsv"])
        # manifests echo the invocation (absolute paths differ per run);
        # the determinism contract covers the data and report files
        return {
            p.relative_to(root): p.read_bytes()
            for p in sorted(root.rglob("*"))
            if p.is_file() and not p.name.endswith(".manifest.json")
        }

    a = run_once(tmp_path / "a")
    b = run_once(tmp_path / "b")
    assert a == b


def test_config_file_layer(tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"n": 25, "seed": 13}))
    pool = tmp_path / "pool.jsonl"
    assert run(["generate", "--config", cfg, "--out", pool]) == 0
    manifest = json.loads((pool.parent / "pool.jsonl.manifest.json").read_text())
    assert manifest["counts"]["records"] == 25
    assert manifest["config"]["seed"] == 13


def test_convert_jobs_independent(pipeline, tmp_path):
    src = pipeline / "split" / "test.jsonl"
    single = tmp_path / "one.jsonl"
    multi = tmp_path / "two.jsonl"
    assert run(["convert", "--in", src, "--out", single]) == 0
    assert run(["convert", "--in", src, "--out", multi, "--jobs", "2"]) == 0
    assert single.read_bytes() == multi.read_bytes()


def test_report_command(pipeline, tmp_path, capsys):
    report = tmp_path / "r.json"
    assert run([
        "evaluate", "--gold", pipeline / "test.full.jsonl",
        "--pred", pipeline / "tsv" / "test.full.vf.gold.tsv",
        "--mr", "vf", "--metrics", "exact", "--report", report,
    ]) == 0
    capsys.readouterr()
    assert run(["report", "--in", report]) == 0
    out = capsys.readouterr().out
    assert "by_quantifier_type" in out and "overall" in out


def test_evaluate_entail_metric(pipeline, tmp_path):
    pred = tmp_path / "pred10.tsv"
    lines = (pipeline / "tsv" / "test.full.fol.gold.tsv").read_text().splitlines()[:10]
    pred.write_text("\n".join(lines) + "\n")
    report = tmp_path / "entail.json"
    assert run([
        "evaluate", "--gold", pipeline / "test.full.jsonl", "--pred", pred,
        "--mr", "fol", "--metrics", "entail", "--report", report,
    ]) == 0
    payload = json.loads(report.read_text())
    assert payload["overall"]["entail_bi"] == 1.0


def test_polarity_command(tmp_path):
    inp = tmp_path / "formulas.txt"
    inp.write_text("all x1 . ( dog ( x1 ) -> run ( x1 ) )\nbroken (\n")
    out = tmp_path / "marks.txt"
    assert run(["polarity", "--mr", "fol", "--in", inp, "--out", out]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "dog:down run:up"
    assert lines[1] == "<unparseable>"

"""Desk-scale generalization-trend check (opt in: pytest -m trend).

A single-seed GRU trained on the primitive-"one" modifier split should master
test items whose quantifier type matches the primitive (existential) while
failing on universal-quantifier items, for first-order-formula targets.
The published full-scale numbers are not reproducible here; this asserts the
qualitative gap only.
"""

import json
import os
import subprocess
import sys

import pytest

from baselines.models import TrainConfig
from baselines.train import predict, train

POOL = int(os.environ.get("TREND_POOL", "12000"))
TRAIN = int(os.environ.get("TREND_TRAIN", "3000"))


def run_semgen(argv):
    return subprocess.run(
        [sys.executable, "-m", "semgen.cli"] + [str(a) for a in argv],
        capture_output=True,
        text=True,
    )


@pytest.mark.trend
def test_gru_generalization_gap(tmp_path):
    pool = tmp_path / "pool.jsonl"
    assert run_semgen([
        "generate", "--strategy", "systematicity_modifier", "--primitive", "one",
        "--n", POOL, "--train", TRAIN, "--seed", "17", "--out", pool,
    ]).returncode == 0
    assert run_semgen([
        "split", "--strategy", "systematicity_modifier", "--primitive", "one",
        "--pool", pool, "--train", TRAIN, "--seed", "17", "--out-dir", tmp_path / "split",
    ]).returncode == 0
    for name in ("train", "valid", "test"):
        assert run_semgen([
            "convert", "--in", tmp_path / "split" / ("%s.jsonl" % name),
            "--out", tmp_path / ("%s.full.jsonl" % name),
            "--tsv-dir", tmp_path / "tsv", "--jobs", "4",
        ]).returncode == 0

    cfg = TrainConfig(model="gru", seed=17)
    checkpoint, _ = train(
        cfg,
        tmp_path / "tsv" / "train.full.fol.tsv",
        tmp_path / "tsv" / "valid.full.fol.tsv",
        tmp_path / "run",
    )
    pred = tmp_path / "pred.tsv"
    predict(checkpoint, tmp_path / "test.full.jsonl", pred)
    report = tmp_path / "report.json"
    assert run_semgen([
        "evaluate", "--gold", tmp_path / "test.full.jsonl", "--pred", pred,
        "--mr", "fol", "--metrics", "exact", "--report", report,
    ]).returncode == 0
    by_type = json.loads(report.read_text())["by_quantifier_type"]
    print("trend:", {k: v["exact"] for k, v in by_type.items()})
    assert by_type["Exi"]["exact"] > 0.90
    assert by_type["Uni"]["exact"] < 0.50

"""TPTP export and the external-prover adapter.

`to_tptp` renders a closed formula in first-order form (fof) syntax;
`external_check` writes one problem per direction (antecedent as axiom,
consequent as conjecture), runs a user-supplied prover command and maps its
SZS status line onto the internal verdict vocabulary.  Any failure mode of
the external tool (missing binary, crash, timeout, unparseable output)
degrades to `unknown` with a diagnostic, never to an exception.
"""

from __future__ import annotations

import re
import subprocess
import tempfile
import time
from pathlib import Path

from . import fol
from .entailment import ENTAILS, GP, NOT_ENTAILS, PG, UNKNOWN, EntailmentVerdict


class TptpError(ValueError):
    pass


def _term(arg: str) -> str:
    return arg.upper() if fol.is_var(arg) else arg


def _render(f: fol.Fol) -> str:
    match f:
        case fol.Pred(lemma, args):
            return "%s(%s)" % (lemma, ",".join(_term(a) for a in args))
        case fol.Not(body):
            return "~ %s" % _render_group(body)
        case fol.And(parts):
            return "( %s )" % " & ".join(_render_group(p) for p in parts)
        case fol.Or(parts):
            return "( %s )" % " | ".join(_render_group(p) for p in parts)
        case fol.Imp(left, right):
            return "( %s => %s )" % (_render_group(left), _render_group(right))
        case fol.Exists(var, body):
            return "? [%s] : %s" % (var.upper(), _render_group(body))
        case fol.Forall(var, body):
            return "! [%s] : %s" % (var.upper(), _render_group(body))
    raise TptpError("not a formula: %r" % (f,))


def _render_group(f: fol.Fol) -> str:
    text = _render(f)
    if isinstance(f, (fol.Exists, fol.Forall, fol.Not)):
        return "( %s )" % text
    return text


def to_tptp(formula: fol.Fol, role: str, name: str = "f") -> str:
    if role not in ("axiom", "conjecture"):
        raise TptpError("role must be axiom or conjecture, not %r" % role)
    if fol.free_variables(formula):
        raise TptpError("formula must be closed")
    return "fof(%s, %s, %s)." % (name, role, _render(formula))


def entailment_problem(antecedent: fol.Fol, consequent: fol.Fol) -> str:
    return (
        to_tptp(antecedent, "axiom", "antecedent")
        + "\n"
        + to_tptp(consequent, "conjecture", "consequent")
        + "\n"
    )


_SZS_RE = re.compile(r"SZS status ([A-Za-z]+)")

_STATUS_VERDICT = {
    "Theorem": ENTAILS,
    "Unsatisfiable": ENTAILS,
    "CounterSatisfiable": NOT_ENTAILS,
    "Satisfiable": NOT_ENTAILS,
}


def run_prover(command_template: str, problem_text: str, timeout: float = 30.0):
    """Run an SZS-speaking prover on one problem; returns (verdict, reason).

    `command_template` contains a `{problem}` placeholder for the problem
    file path (appended if missing).
    """
    with tempfile.TemporaryDirectory(prefix="tptp-") as tmp:
        problem = Path(tmp) / "problem.p"
        problem.write_text(problem_text, encoding="ascii")
        if "{problem}" in command_template:
            cmd = command_template.replace("{problem}", str(problem))
        else:
            cmd = command_template + " " + str(problem)
        try:
            proc = subprocess.run(
                cmd,
                shell=True,
                capture_output=True,
                text=True,
                timeout=timeout,
            )
        except subprocess.TimeoutExpired:
            return UNKNOWN, "prover timed out after %.1fs" % timeout
        except OSError as exc:
            return UNKNOWN, "prover could not run: %s" % exc
    output = proc.stdout + "\n" + proc.stderr
    m = _SZS_RE.search(output)
    if not m:
        if proc.returncode != 0:
            return UNKNOWN, "prover exited with %d and no SZS status" % proc.returncode
        return UNKNOWN, "no SZS status line in prover output"
    status = m.group(1)
    verdict = _STATUS_VERDICT.get(status)
    if verdict is None:
        return UNKNOWN, "unrecognized SZS status %r" % status
    return verdict, "SZS status %s" % status


def external_check(
    gold: fol.Fol, pred: fol.Fol, command_template: str, timeout: float = 30.0
) -> tuple[EntailmentVerdict, EntailmentVerdict]:
    out = []
    for direction, ant, con in ((GP, gold, pred), (PG, pred, gold)):
        start = time.monotonic()
        verdict, reason = run_prover(command_template, entailment_problem(ant, con), timeout)
        out.append(
            EntailmentVerdict(direction, verdict, None, reason, time.monotonic() - start)
        )
    return out[0], out[1]

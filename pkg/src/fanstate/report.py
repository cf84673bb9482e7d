"""Deterministic CSV/JSON serialization and the generation run report."""

from __future__ import annotations

import io
import json
import math

import numpy as np

from .coherent import fan_state, fidelity
from .fock import default_dim, oracle_protocol, superposition_to_fock
from .protocol import DetectionOutcome, fan_k, fan_schedule, run_protocol


def fmt(x):
    """17 significant digits, locale independent."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def to_csv(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _json_value(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}"{k}": {_json_value(v, indent, level + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _json_value(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # JSON has no inf/nan literals
        return fmt(x) if math.isfinite(x) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(obj, indent=2):
    """JSON text with insertion-ordered keys and 17-digit floats."""
    return _json_value(obj, indent, 0) + "\n"


def cplx(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def term_table(state):
    return [{"coeff": cplx(c), "amp": cplx(a)} for c, a in state.terms]


def run_report(run, target=None, oracle_deviation=None):
    """Plain-dict report of a ProtocolRun with both probability conventions."""
    report = {
        "alpha": cplx(run.alpha0),
        "steps": [
            {
                "xi": cplx(s.prep.xi),
                "eta": cplx(s.prep.eta),
                "tau": s.tau,
                "outcome": s.outcome.label,
            }
            for s in run.steps
        ],
        "per_step_norm_sq": list(run.per_step_norm_sq),
        "conditional_probs": list(run.conditional_probs),
        "paper_probability": run.paper_probability,
        "record_probability": run.record_probability,
        "probability_note": (
            "paper_probability multiplies the squared norms of every intermediate "
            "conditional state; record_probability is the squared norm of the final one"
        ),
        "final_state": term_table(run.final_state),
    }
    if target is not None:
        k, state = target
        report["target"] = {"fan_k": k, "fidelity": fidelity(run.final_state, state)}
    if oracle_deviation is not None:
        report["oracle_max_deviation"] = oracle_deviation
    return report


def oracle_deviation(run, D):
    """Largest disagreement between the analytic run and the number-basis oracle.

    Covers every per-step squared norm and each Fock amplitude of the final state.
    """
    final, norms = oracle_protocol(run.alpha0, run.steps, D)
    dev = float(np.max(np.abs(final - superposition_to_fock(run.final_state, D)), initial=0.0))
    if norms:
        dev = max(dev, float(np.max(np.abs(np.array(norms) - np.array(run.per_step_norm_sq)))))
    return dev


def generate(alpha, atoms, basis="minus", verify=False, dim=None):
    """Run the fan schedule and build its report.

    Returns ``(report, deviation)``; ``deviation`` is None unless ``verify``.
    """
    alpha = complex(alpha)
    steps = fan_schedule(atoms, basis)
    run = run_protocol(alpha, steps)
    k = fan_k(atoms)
    deviation = None
    if verify:
        D = dim if dim is not None else max(60, default_dim(abs(alpha)))
        deviation = oracle_deviation(run, D)
    report = run_report(run, target=(k, fan_state(alpha, k)), oracle_deviation=deviation)
    report["atoms"] = atoms
    report["basis"] = DetectionOutcome.parse(basis).label
    return report, deviation

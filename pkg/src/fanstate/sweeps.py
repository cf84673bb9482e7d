"""Tabulated probability curves for the three probability figures.

Output naming follows the figure captions: fig3 is the single-atom probability
against tau, fig4 the two-atom P1 against r, fig5 the fan-state probability
P_k against r.
"""

from __future__ import annotations

import math

import numpy as np

from .protocol import (
    AtomPreparation,
    DetectionOutcome,
    TauOrder,
    fan_k,
    p1_closed_form,
    pk_paper_formula,
    single_atom_probability,
)

FIG3_RADII = (0.5, 1.0, 5.0)
FIGURES = ("fig3", "fig4", "fig5")


def linspace(lo, hi, steps):
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
        raise ValueError(f"bad range [{lo}, {hi}]")
    if steps == 1:
        return np.array([lo], dtype=float)
    return np.linspace(lo, hi, steps)


def fig3_table(taus, radii=FIG3_RADII):
    """P(same) = P(+ -> +) and P(flip) = P(+ -> -) against tau for each r."""
    plus = AtomPreparation.basis(DetectionOutcome.PLUS)
    header = ["tau"]
    for r in radii:
        header += [f"P_same_r{r:g}", f"P_flip_r{r:g}"]
    rows = []
    for tau in taus:
        row = [tau]
        for r in radii:
            row.append(single_atom_probability(plus, DetectionOutcome.PLUS, tau, r))
            row.append(single_atom_probability(plus, DetectionOutcome.MINUS, tau, r))
        rows.append(row)
    return header, rows


def fig4_table(rs, orders=tuple(TauOrder)):
    header = ["r"] + [f"P1_{o.value.replace('-', '_')}" for o in orders]
    rows = [[r] + [p1_closed_form(r, o) for o in orders] for r in rs]
    return header, rows


def fig5_table(rs, max_atoms=5):
    atoms = range(2, max_atoms + 1)
    header = ["r"] + [f"P_k{fan_k(n)}" for n in atoms]
    rows = [[r] + [pk_paper_formula(r, n) for n in atoms] for r in rs]
    return header, rows

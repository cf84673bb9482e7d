"""Randomized self-check of the analytic engine against its independent routes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coherent import (
    CoherentSuperposition,
    circle_amplitudes,
    coherent_overlap,
    fan_state,
    fidelity,
    gram_sum,
    k_photon_coherent,
    norm_sq,
)
from .fock import JointState, apply_U_closed, apply_U_series, oracle_protocol
from .protocol import (
    AtomPreparation,
    DetectionOutcome,
    ProtocolStep,
    closed_form_state,
    kraus_step,
    probability_symmetries_check,
    run_protocol,
    single_atom_probability,
)


@dataclass
class Failure:
    check: str
    case: int
    detail: str

    def __str__(self):
        return f"{self.check} failed on case {self.case}: {self.detail}"


def random_prep(rng):
    v = rng.normal(size=4)
    return AtomPreparation.normalized(complex(v[0], v[1]), complex(v[2], v[3]))


def random_step(rng):
    return ProtocolStep(random_prep(rng), rng.uniform(0, 2 * math.pi), DetectionOutcome(rng.choice([-1, 1])))


def random_alpha(rng, r_max=2.5):
    return r_max * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())


def random_protocol(rng, max_atoms=4, r_max=2.5):
    return random_alpha(rng, r_max), [random_step(rng) for _ in range(rng.integers(1, max_atoms + 1))]


def check_oracle(rng, scale):
    alpha, steps = random_protocol(rng)
    run = run_protocol(alpha, steps)
    final, norms = oracle_protocol(alpha, steps, 60)
    dev = max(abs(a - b) for a, b in zip(norms, run.per_step_norm_sq))
    if not dev <= 1e-8 * scale:
        return f"alpha={alpha!r}, steps={steps!r}: norm deviation {dev:.3e}"


def check_closed_form(rng, scale):
    alpha, steps = random_protocol(rng, max_atoms=5)
    run = run_protocol(alpha, steps)
    closed = closed_form_state(alpha, [s.prep for s in steps], [s.tau for s in steps], [s.outcome for s in steps])
    n_seq, n_closed = norm_sq(run.final_state), norm_sq(closed)
    if n_seq < 1e-20 and n_closed < 1e-20:
        return None
    gap = 1 - fidelity(run.final_state, closed)
    if not (abs(gap) <= 1e-12 * scale and abs(n_seq - n_closed) <= 1e-12 * scale):
        return f"alpha={alpha!r}, steps={steps!r}: 1-F={gap:.3e}, norm gap {n_seq - n_closed:.3e}"


def check_single_atom(rng, scale):
    step = random_step(rng)
    alpha = random_alpha(rng, 3.0)
    analytic = single_atom_probability(step.prep, step.outcome, step.tau, abs(alpha))
    direct = norm_sq(kraus_step(CoherentSuperposition.coherent(alpha), step))
    if not abs(analytic - direct) <= 1e-12 * scale:
        return f"step={step!r}, alpha={alpha!r}: formula {analytic!r} vs state norm {direct!r}"


def check_symmetries(rng, scale):
    tau, r = rng.uniform(0, 4 * math.pi), rng.uniform(0, 5)
    if not probability_symmetries_check(tau, r, tol=1e-14 * scale):
        return f"tau={tau!r}, r={r!r}"


def check_completeness(rng, scale):
    alpha, steps = random_protocol(rng, max_atoms=3)
    prior = run_protocol(alpha, steps).final_state
    if len(prior) == 0:
        return None
    step = random_step(rng)
    total = norm_sq(prior)
    split = sum(
        norm_sq(kraus_step(prior, ProtocolStep(step.prep, step.tau, s))) for s in DetectionOutcome
    )
    if not abs(split / total - 1) <= 1e-12 * scale:
        return f"prior={prior!r}, step={step!r}: P(+)+P(-) = {split / total!r}"


def check_gram(rng, scale):
    K = int(rng.integers(1, 33))
    r_sq = rng.uniform(0, 9)
    amps = circle_amplitudes(math.sqrt(r_sq), K)
    brute = math.fsum(coherent_overlap(b, a).real for b in amps for a in amps)
    value = gram_sum(r_sq, K).value
    if not abs(value - brute) <= 1e-10 * scale * abs(brute):
        return f"r_sq={r_sq!r}, K={K}: {value!r} vs {brute!r}"


def check_fan_circle(rng, scale):
    k = int(rng.choice([1, 2, 4, 8]))
    alpha = random_alpha(rng, 3.0)
    gap = 1 - fidelity(fan_state(alpha, k), k_photon_coherent(alpha, 4 * k, 0))
    if not abs(gap) <= 1e-12 * scale:
        return f"alpha={alpha!r}, k={k}: 1-F={gap:.3e}"


def check_evolution(rng, scale):
    D = 24
    psi = JointState(
        rng.normal(size=D) + 1j * rng.normal(size=D), rng.normal(size=D) + 1j * rng.normal(size=D)
    )
    tau = rng.uniform(0, 2 * math.pi)
    diff = np.max(np.abs(apply_U_closed(psi, tau).as_vector() - apply_U_series(psi, tau).as_vector()))
    if not diff <= 1e-10 * scale:
        return f"tau={tau!r}, D={D}: sup deviation {diff:.3e}"


CHECKS = {
    "oracle-equivalence": check_oracle,
    "closed-form": check_closed_form,
    "single-atom-formula": check_single_atom,
    "probability-symmetries": check_symmetries,
    "outcome-completeness": check_completeness,
    "gram-sum": check_gram,
    "fan-circle-identity": check_fan_circle,
    "evolution-operator": check_evolution,
}


def run_suite(seed=0, cases=20, tol_scale=1.0):
    """Run every check ``cases`` times; return the first Failure or None."""
    rng = np.random.default_rng(seed)
    for case in range(cases):
        for name, check in CHECKS.items():
            detail = check(rng, tol_scale)
            if detail is not None:
                return Failure(name, case, detail)
    return None

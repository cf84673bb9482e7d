"""Sequential passage of Lambda-type atoms through a cavity, evaluated analytically.

Each atom enters in ``xi|-> + eta|+>``, interacts for a dimensionless time
``tau`` under U(tau) = 1 + (W/2)(exp(i tau a^dag a) - 1) and is detected in
``|s>``. The field is left in the unnormalized conditional state

    <s|U(tau)|F> |phi> = 1/2 [ s (eta - xi) |phi> + (eta + xi) R(tau)|phi> ],

where R(tau) rotates every coherent amplitude by exp(i tau).
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .coherent import (
    CoherentSuperposition,
    gram_sum,
    norm_sq,
    rotate,
)

PREP_TOL = 1e-12


class DetectionOutcome(enum.IntEnum):
    MINUS = -1
    PLUS = 1

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            key = value.strip().lower()
            if key in ("-", "minus", "-1", "ground"):
                return cls.MINUS
            if key in ("+", "plus", "+1", "1", "excited"):
                return cls.PLUS
            raise ValueError(f"unknown detection outcome {value!r}")
        return cls(int(value))

    @property
    def label(self):
        return "minus" if self is DetectionOutcome.MINUS else "plus"


class TauOrder(enum.Enum):
    PI_FIRST = "pi-first"
    HALF_PI_FIRST = "half-pi-first"

    @property
    def taus(self):
        if self is TauOrder.PI_FIRST:
            return (math.pi, math.pi / 2)
        return (math.pi / 2, math.pi)


@dataclass(frozen=True)
class AtomPreparation:
    """Entry state xi|-> + eta|+> of one atom; rejects unnormalized pairs."""

    xi: complex
    eta: complex

    def __post_init__(self):
        xi, eta = complex(self.xi), complex(self.eta)
        for z in (xi, eta):
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise ValueError("atomic coefficients must be finite")
        if abs(abs(xi) ** 2 + abs(eta) ** 2 - 1) > PREP_TOL:
            raise ValueError(f"|xi|^2 + |eta|^2 must be 1, got {abs(xi) ** 2 + abs(eta) ** 2!r}")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eta", eta)

    @classmethod
    def normalized(cls, xi, eta):
        n = math.hypot(abs(complex(xi)), abs(complex(eta)))
        if n == 0:
            raise ValueError("xi and eta cannot both vanish")
        return cls(complex(xi) / n, complex(eta) / n)

    @classmethod
    def basis(cls, outcome):
        """Pure |-> or |+> preparation."""
        if DetectionOutcome.parse(outcome) is DetectionOutcome.MINUS:
            return cls(1.0, 0.0)
        return cls(0.0, 1.0)


@dataclass(frozen=True)
class ProtocolStep:
    prep: AtomPreparation
    tau: float
    outcome: DetectionOutcome

    def __post_init__(self):
        tau = float(self.tau)
        if not math.isfinite(tau) or tau < 0:
            raise ValueError(f"tau must be finite and >= 0, got {self.tau!r}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "outcome", DetectionOutcome.parse(self.outcome))

    @property
    def stay_weight(self):
        """Weight of the unrotated branch, s (eta - xi) / 2."""
        return 0.5 * int(self.outcome) * (self.prep.eta - self.prep.xi)

    @property
    def rotate_weight(self):
        """Weight of the rotated branch, (eta + xi) / 2."""
        return 0.5 * (self.prep.eta + self.prep.xi)


@dataclass(frozen=True)
class ProtocolRun:
    """Result of sending a sequence of atoms through the cavity.

    ``paper_probability`` is the product of all intermediate squared norms;
    ``record_probability`` is the squared norm of the final conditional state,
    i.e. the probability of the whole detection record.
    """

    alpha0: complex
    steps: tuple
    per_step_norm_sq: tuple
    conditional_probs: tuple
    paper_probability: float
    record_probability: float
    final_state: CoherentSuperposition = field(repr=False)


def kraus_step(state, step):
    """Unnormalized field state after one atom passage and detection."""
    stay = state.scaled(step.stay_weight)
    moved = rotate(state, step.tau).scaled(step.rotate_weight)
    return stay + moved


def run_protocol(alpha0, steps):
    alpha0 = complex(alpha0)
    steps = tuple(steps)
    state = CoherentSuperposition.coherent(alpha0)
    norms, conditionals = [], []
    prev = 1.0
    for step in steps:
        state = kraus_step(state, step)
        n = norm_sq(state) if len(state) else 0.0
        norms.append(n)
        conditionals.append(n / prev if prev > 0 else 0.0)
        prev = n
    return ProtocolRun(
        alpha0=alpha0,
        steps=steps,
        per_step_norm_sq=tuple(norms),
        conditional_probs=tuple(conditionals),
        paper_probability=float(math.prod(norms)),
        record_probability=norms[-1] if norms else 1.0,
        final_state=state,
    )


def closed_form_state(alpha0, preps, taus, outcomes):
    """Build the N-atom conditional state directly as a sum over subsets of atoms.

    The subset L of atoms whose rotated branch is taken contributes
    2^-N prod_{p not in L} s_p (eta_p - xi_p) prod_{q in L} (eta_q + xi_q)
    times |alpha0 exp(i sum_{q in L} tau_q)>.
    """
    preps, taus, outcomes = list(preps), list(taus), list(outcomes)
    if not len(preps) == len(taus) == len(outcomes):
        raise ValueError("preps, taus and outcomes must have equal length")
    n = len(preps)
    alpha0 = complex(alpha0)
    minus = [int(DetectionOutcome.parse(s)) * (p.eta - p.xi) for p, s in zip(preps, outcomes)]
    plus = [p.eta + p.xi for p in preps]
    terms = []
    for mask in itertools.product((False, True), repeat=n):
        coeff = 2.0**-n
        phase = 0.0
        for j, chosen in enumerate(mask):
            if chosen:
                coeff *= plus[j]
                phase += taus[j]
            else:
                coeff *= minus[j]
        terms.append((coeff, alpha0 * np.exp(1j * phase)))
    return CoherentSuperposition.from_terms(terms)


def single_atom_probability(prep, outcome, tau, r):
    """Probability of detecting ``outcome`` after one atom meets a coherent field of modulus r.

    1/2 {1 + s e^{-r^2(1 - cos tau)} [(|eta|^2 - |xi|^2) cos(r^2 sin tau)
                                      + 2 Im(xi* eta) sin(r^2 sin tau)]}
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    s = int(DetectionOutcome.parse(outcome))
    xi, eta = prep.xi, prep.eta
    r2 = r * r
    phase = r2 * math.sin(tau)
    bracket = (abs(eta) ** 2 - abs(xi) ** 2) * math.cos(phase) + 2 * (xi.conjugate() * eta).imag * math.sin(
        phase
    )
    return 0.5 * (1 + s * math.exp(-r2 * (1 - math.cos(tau))) * bracket)


def _pure_probabilities(tau, r):
    """P[(prep, outcome)] for the four pure-basis combinations."""
    minus, plus = DetectionOutcome.MINUS, DetectionOutcome.PLUS
    return {
        (f, s): single_atom_probability(AtomPreparation.basis(f), s, tau, r)
        for f in (minus, plus)
        for s in (minus, plus)
    }


def probability_symmetries_check(tau, r, tol=1e-14):
    """True when P(+ -> +) = P(- -> -) and P(+ -> -) = P(- -> +)."""
    p = _pure_probabilities(tau, r)
    minus, plus = DetectionOutcome.MINUS, DetectionOutcome.PLUS
    return abs(p[plus, plus] - p[minus, minus]) <= tol and abs(p[plus, minus] - p[minus, plus]) <= tol


def fan_schedule(N, basis=DetectionOutcome.MINUS):
    """N atoms prepared and detected in ``basis`` with tau_j = pi / 2^(j-1)."""
    if N < 2:
        raise ValueError(f"a fan-state needs at least 2 atoms, got {N}")
    basis = DetectionOutcome.parse(basis)
    prep = AtomPreparation.basis(basis)
    return [ProtocolStep(prep, math.pi / 2**j, basis) for j in range(N)]


def fan_k(N):
    """Fan index k = 2^(N-2) produced by an N-atom schedule."""
    return 2 ** (N - 2)


def p1_closed_form(r, order=TauOrder.PI_FIRST):
    """Paper-convention probability of the two-atom k = 1 fan-state."""
    if r < 0:
        raise ValueError("r must be >= 0")
    order = TauOrder(order)
    r2 = r * r
    second = 1 + math.exp(-2 * r2) + 2 * math.exp(-r2) * math.cos(r2)
    if order is TauOrder.PI_FIRST:
        first = 1 + math.exp(-2 * r2)
    else:
        first = 1 + math.exp(-r2) * math.cos(r2)
    return second * first / 8


def pk_paper_formula(r, N):
    """Paper-convention probability of the N-atom fan schedule: prod_n S(r^2, 2^n) / 2^(2n)."""
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    if r < 0:
        raise ValueError("r must be >= 0")
    return math.prod(gram_sum(r * r, 2**n).value / 4**n for n in range(1, N + 1))

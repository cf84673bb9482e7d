"""Truncated number-basis simulation of one atom coupled to the cavity field.

Independent check of the coherent-state engine. A joint state holds two field
vectors of length D, one for each atomic level |-> and |+>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .protocol import DetectionOutcome

TAIL_BUDGET = 1e-12
SERIES_TOL = 1e-13
# largest |generator| * dt allowed in one Taylor slice
SLICE_NORM = 0.5


class TruncationError(ValueError):
    """The Fock cutoff is too small for the requested coherent amplitude."""


class SeriesDivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class JointState:
    minus: np.ndarray
    plus: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.minus, dtype=complex)
        p = np.asarray(self.plus, dtype=complex)
        if m.shape != p.shape or m.ndim != 1:
            raise ValueError("atomic blocks must be 1-d vectors of equal length")
        object.__setattr__(self, "minus", m)
        object.__setattr__(self, "plus", p)

    @property
    def dim(self):
        return self.minus.size

    @classmethod
    def product(cls, prep, field):
        field = np.asarray(field, dtype=complex)
        return cls(prep.xi * field, prep.eta * field)

    def norm_sq(self):
        return float(np.vdot(self.minus, self.minus).real + np.vdot(self.plus, self.plus).real)

    def as_vector(self):
        return np.concatenate([self.minus, self.plus])


def coherent_fock(alpha, D):
    """Number-basis amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!) for n < D."""
    if D < 1:
        raise ValueError(f"D must be >= 1, got {D}")
    alpha = complex(alpha)
    c = np.empty(D, dtype=complex)
    c[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, D):
        c[n] = c[n - 1] * alpha / math.sqrt(n)
    return c


def truncation_tail(r, D):
    """Poisson weight beyond the cutoff, sum_{n >= D} e^{-r^2} r^{2n} / n!."""
    if D < 0:
        raise ValueError("D must be >= 0")
    lam = float(r) ** 2
    if lam == 0:
        return 0.0 if D >= 1 else 1.0
    log_lam = math.log(lam)
    total = 0.0
    n = D
    while True:
        term = math.exp(-lam + n * log_lam - gammaln(n + 1))
        total += term
        # past the Poisson mode the terms shrink geometrically
        if n > lam and term <= 1e-17 * total:
            break
        if total == 0.0 and n > lam + 50:
            break
        n += 1
    return min(total, 1.0)


def default_dim(r):
    return max(32, math.ceil(r * r + 10 * r + 20))


def apply_U_closed(psi, tau):
    """Apply U(tau) = 1 + (W/2)(e^{i tau n} - 1); W is the all-ones 2x2 atomic matrix."""
    phases = np.exp(1j * tau * np.arange(psi.dim))
    shift = 0.5 * (phases - 1) * (psi.minus + psi.plus)
    return JointState(psi.minus + shift, psi.plus + shift)


W_MATRIX = np.ones((2, 2), dtype=complex)


def apply_U_series(psi, tau, terms=40):
    """Apply exp(-i H t) by its Taylor series, H = -lambda n W and tau = 2 lambda t.

    The generator i (tau/2) n W is applied directly (no W-power shortcut). The
    interval is cut into slices short enough for a ``terms``-term series to
    converge without cancellation; each slice is checked.
    """
    n = np.arange(psi.dim, dtype=float)
    gen_norm = abs(tau) * max(psi.dim - 1, 0)  # spectral norm of (tau/2) n W
    slices = max(1, math.ceil(gen_norm / SLICE_NORM))
    dt = tau / slices
    block = np.stack([psi.minus, psi.plus])  # shape (2, D)

    def generator(v):
        return 0.5j * dt * (W_MATRIX @ v) * n

    for _ in range(slices):
        result = block.copy()
        term = block
        for ell in range(1, terms + 1):
            term = generator(term) / ell
            result = result + term
        scale = max(np.linalg.norm(result), 1e-300)
        if np.linalg.norm(term) > SERIES_TOL * scale:
            raise SeriesDivergenceError(f"Taylor series not converged after {terms} terms")
        block = result
    return JointState(block[0], block[1])


def project_outcome(psi, outcome):
    """Unnormalized field block for the detected atomic level."""
    if DetectionOutcome.parse(outcome) is DetectionOutcome.MINUS:
        return psi.minus.copy()
    return psi.plus.copy()


def superposition_to_fock(state, D):
    """Embed a CoherentSuperposition in the truncated number basis."""
    out = np.zeros(D, dtype=complex)
    for c, a in zip(state.coeffs, state.amps):
        out += c * coherent_fock(a, D)
    return out


def oracle_protocol(alpha0, steps, D=None):
    """Run the atom sequence in the number basis; return final field and per-step norms."""
    r = abs(complex(alpha0))
    if D is None:
        D = default_dim(r)
    tail = truncation_tail(r, D)
    if tail >= TAIL_BUDGET:
        raise TruncationError(f"D={D} leaves a tail of {tail:.3g} for |alpha|={r}")
    field = coherent_fock(alpha0, D)
    norms = []
    for step in steps:
        joint = apply_U_closed(JointState.product(step.prep, field), step.tau)
        field = project_outcome(joint, step.outcome)
        norms.append(float(np.vdot(field, field).real))
    return field, norms

"""Finite superpositions of coherent states.

A field state is stored as two parallel complex arrays, the weights ``coeffs``
and the coherent amplitudes ``amps``, so that

    |psi> = sum_i coeffs[i] |amps[i]>.

Everything here is exact in the coherent-state basis: overlaps use the closed
form <beta|alpha> = exp(beta* alpha - |alpha|^2/2 - |beta|^2/2) and no photon
number cutoff is involved.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

MERGE_TOL = 1e-9
# merged weights below this are rounding debris from exact cancellations
ZERO_COEFF_TOL = 1e-15
IMAG_TOL = 1e-12
GRAM_COND_LIMIT = 1e3


def _as_finite_complex(value, name):
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return z


def coherent_overlap(beta, alpha):
    """Return <beta|alpha> for two coherent states."""
    beta = _as_finite_complex(beta, "beta")
    alpha = _as_finite_complex(alpha, "alpha")
    return cmath.exp(0.5 * (2 * beta.conjugate() * alpha - abs(alpha) ** 2 - abs(beta) ** 2))


def overlap_matrix(bra_amps, ket_amps):
    """Matrix of overlaps ``M[i, j] = <bra_amps[i]|ket_amps[j]>``."""
    b = np.asarray(bra_amps, dtype=complex).reshape(-1, 1)
    a = np.asarray(ket_amps, dtype=complex).reshape(1, -1)
    return np.exp(np.conj(b) * a - 0.5 * np.abs(a) ** 2 - 0.5 * np.abs(b) ** 2)


def _merge(coeffs, amps, tol):
    """Sum coefficients of coincident amplitudes, drop zeros, sort canonically."""
    if coeffs.size == 0:
        return coeffs, amps
    if coeffs.size > 1:
        pts = np.column_stack([amps.real, amps.imag])
        pairs = cKDTree(pts).query_pairs(tol, output_type="ndarray")
        n = coeffs.size
        graph = coo_matrix(
            (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])) if len(pairs) else ([], ([], [])),
            shape=(n, n),
        )
        n_groups, labels = connected_components(graph, directed=False)
        if n_groups < n:
            # representative amplitude: first member of each group in input order
            first = np.full(n_groups, n, dtype=int)
            np.minimum.at(first, labels, np.arange(n))
            merged = np.zeros(n_groups, dtype=complex)
            np.add.at(merged, labels, coeffs)
            coeffs, amps = merged, amps[first]

    keep = np.abs(coeffs) > ZERO_COEFF_TOL
    coeffs, amps = coeffs[keep], amps[keep]
    order = np.lexsort((np.angle(coeffs), np.abs(amps), np.angle(amps)))
    return coeffs[order], amps[order]


@dataclass(frozen=True, eq=False)
class CoherentSuperposition:
    """Immutable weighted sum of coherent states.

    Construction merges amplitudes closer than ``merge_tol`` (summing their
    weights), removes zero weights and sorts terms by (arg, modulus) of the
    amplitude. Use :meth:`from_terms` to build one.
    """

    coeffs: np.ndarray
    amps: np.ndarray
    merge_tol: float = MERGE_TOL

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex).ravel()
        amps = np.array(self.amps, dtype=complex).ravel()
        if coeffs.shape != amps.shape:
            raise ValueError("coeffs and amps must have the same length")
        if not (np.all(np.isfinite(coeffs)) and np.all(np.isfinite(amps))):
            raise ValueError("coefficients and amplitudes must be finite")
        coeffs, amps = _merge(coeffs, amps, self.merge_tol)
        coeffs.flags.writeable = False
        amps.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_terms(cls, terms, merge_tol=MERGE_TOL):
        """Build from an iterable of ``(coeff, amp)`` pairs."""
        terms = list(terms)
        if not terms:
            return cls(np.zeros(0, complex), np.zeros(0, complex), merge_tol)
        coeffs, amps = zip(*terms)
        return cls(np.array(coeffs, complex), np.array(amps, complex), merge_tol)

    @classmethod
    def coherent(cls, alpha, coeff=1.0):
        return cls(np.array([coeff], complex), np.array([alpha], complex))

    @classmethod
    def empty(cls):
        return cls(np.zeros(0, complex), np.zeros(0, complex))

    def __len__(self):
        return self.coeffs.size

    @property
    def terms(self):
        return list(zip(self.coeffs.tolist(), self.amps.tolist()))

    def scaled(self, factor):
        return CoherentSuperposition(self.coeffs * complex(factor), self.amps, self.merge_tol)

    def normalized(self):
        n = norm_sq(self)
        if n <= 0:
            raise ValueError("cannot normalize a zero-norm state")
        return self.scaled(1.0 / math.sqrt(n))

    def __add__(self, other):
        if not isinstance(other, CoherentSuperposition):
            return NotImplemented
        return CoherentSuperposition(
            np.concatenate([self.coeffs, other.coeffs]),
            np.concatenate([self.amps, other.amps]),
            min(self.merge_tol, other.merge_tol),
        )

    def __repr__(self):
        body = " + ".join(f"({c:.6g})|{a:.6g}>" for c, a in self.terms) or "0"
        return f"CoherentSuperposition({body})"


def superposition_inner(a, b):
    """<a|b> extended bilinearly over the terms of both superpositions."""
    if len(a) == 0 or len(b) == 0:
        return 0j
    # <a_i|b_j> = 1 + expm1(.) keeps relative precision for nearly cancelling clusters
    bra = a.amps.reshape(-1, 1)
    ket = b.amps.reshape(1, -1)
    excess = np.expm1(np.conj(bra) * ket - 0.5 * np.abs(ket) ** 2 - 0.5 * np.abs(bra) ** 2)
    ca = np.conj(a.coeffs)
    return complex(ca.sum() * b.coeffs.sum() + ca @ excess @ b.coeffs)


def norm_sq(a):
    val = superposition_inner(a, a)
    scale = max(1.0, float(np.sum(np.abs(a.coeffs)) ** 2))
    assert abs(val.imag) <= IMAG_TOL * scale, f"norm has imaginary part {val.imag}"
    return val.real


def fidelity(a, b):
    """Global-phase-insensitive overlap |<a|b>|^2 / (<a|a><b|b>)."""
    na, nb = norm_sq(a), norm_sq(b)
    if na <= 0 or nb <= 0:
        raise ValueError("fidelity is undefined for a zero-norm state")
    return abs(superposition_inner(a, b)) ** 2 / (na * nb)


def rotate(a, theta):
    """Phase-space rotation exp(i theta a^dag a): every |beta> becomes |beta e^{i theta}>."""
    return CoherentSuperposition(a.coeffs, a.amps * cmath.exp(1j * theta), a.merge_tol)


def apply_annihilation_power(a, K):
    """Apply a^K using a^K|beta> = beta^K |beta>; the result is not renormalized."""
    if K < 0:
        raise ValueError("K must be non-negative")
    if K == 0:
        return a
    return CoherentSuperposition(a.coeffs * a.amps**K, a.amps, a.merge_tol)


@dataclass(frozen=True)
class GramSum:
    """Sum of all pairwise overlaps of K coherent states equally spaced on a circle."""

    r_sq: float
    K: int
    value: float

    def unit_norm_coeff(self):
        # weight that makes sum_q |alpha_q> unit norm
        return self.value ** -0.5


def gram_sum(r_sq, K):
    """S(r^2, K) = K + 2 sum_{q=1}^{K-1} q cos[r^2 sin(2 pi q/K)] exp[r^2 (cos(2 pi q/K) - 1)]."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if r_sq < 0:
        raise ValueError(f"r_sq must be >= 0, got {r_sq}")
    q = np.arange(1, K)
    phi = 2 * np.pi * q / K
    tail = q * np.cos(r_sq * np.sin(phi)) * np.exp(r_sq * (np.cos(phi) - 1))
    value = K + 2 * math.fsum(tail)
    # large r^2 and K make the sum cancel down to ~K^2 e^{-r^2}; redo it with enough digits
    cond = (K + 2 * np.abs(tail).sum()) / abs(value) if value != 0 else math.inf
    if cond > GRAM_COND_LIMIT:
        value = _gram_sum_mp(r_sq, K, cond)
    return GramSum(float(r_sq), int(K), float(value))


def _gram_sum_mp(r_sq, K, cond):
    extra = 10 if not math.isfinite(cond) else int(math.log10(cond))
    with mpmath.workdps(30 + extra):
        r2 = mpmath.mpf(r_sq)
        tail = mpmath.fsum(
            q * mpmath.cos(r2 * mpmath.sin(2 * mpmath.pi * q / K)) * mpmath.exp(r2 * (mpmath.cos(2 * mpmath.pi * q / K) - 1))
            for q in range(1, K)
        )
        return float(K + 2 * tail)


def circle_amplitudes(alpha, K):
    return complex(alpha) * np.exp(2j * np.pi * np.arange(K) / K)


def k_photon_coherent(alpha, K, j=0):
    """Unit-norm right eigenstate of a^K with eigenvalue alpha^K, labelled by j.

    For j = 0 the weights are S(r^2, K)^(-1/2); other j are normalized from the
    phase-weighted Gram matrix.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if not 0 <= j < K:
        raise ValueError(f"j must lie in [0, {K - 1}], got {j}")
    alpha = _as_finite_complex(alpha, "alpha")
    amps = circle_amplitudes(alpha, K)
    weights = np.exp(2j * np.pi * j * np.arange(K) / K)
    if j == 0:
        coeffs = weights * gram_sum(abs(alpha) ** 2, K).unit_norm_coeff()
        return CoherentSuperposition(coeffs, amps)
    state = CoherentSuperposition(weights, amps)
    n = norm_sq(state) if len(state) else 0.0
    if n <= 0:
        raise ValueError(f"|alpha, K={K}, j={j}> has zero norm at alpha={alpha}")
    return state.scaled(1 / math.sqrt(n))


def fan_normalization(r_sq, k):
    """Fan-state weight N_F = N(r^2,4k) / (k N(r^2,2k)) with N = S^(-1/2)."""
    return math.sqrt(gram_sum(r_sq, 2 * k).value / gram_sum(r_sq, 4 * k).value) / k


def fan_components(alpha, k):
    """Unmerged coefficients and amplitudes of the 2k circle states forming |alpha, 2k>_F.

    Returns ``(coeffs, amps)`` with 4k^2 entries, already multiplied by the fan
    normalization.
    """
    alpha = _as_finite_complex(alpha, "alpha")
    r_sq = abs(alpha) ** 2
    circle_w = gram_sum(r_sq, 2 * k).unit_norm_coeff()
    p = np.arange(2 * k)
    centres = alpha * np.exp(1j * np.pi * p / (2 * k))
    amps = (centres[:, None] * np.exp(2j * np.pi * np.arange(2 * k) / (2 * k))[None, :]).ravel()
    coeffs = np.full(amps.size, fan_normalization(r_sq, k) * circle_w, dtype=complex)
    return coeffs, amps


def fan_state(alpha, k):
    """Unit-norm fan-state |alpha, 2k>_F: 4k coherent states spread over a half-turn pattern."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    coeffs, amps = fan_components(alpha, k)
    return CoherentSuperposition(coeffs, amps)

"""Husimi Q-function of coherent superpositions on rectangular grids."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coherent import norm_sq, overlap_matrix

NORM_TOL = 1e-10


@dataclass(frozen=True)
class QGrid:
    """Q sampled at cell centres; ``values[i, j]`` belongs to ``(xs[i], ys[j])``."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    values: np.ndarray

    @property
    def nx(self):
        return self.values.shape[0]

    @property
    def ny(self):
        return self.values.shape[1]

    @property
    def xs(self):
        return cell_centres(self.x_min, self.x_max, self.nx)

    @property
    def ys(self):
        return cell_centres(self.y_min, self.y_max, self.ny)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.nx

    @property
    def dy(self):
        return (self.y_max - self.y_min) / self.ny

    def rows(self):
        """(x, y, Q) triples in row-major order (x outer, y inner)."""
        xs, ys = self.xs, self.ys
        for i in range(self.nx):
            for j in range(self.ny):
                yield float(xs[i]), float(ys[j]), float(self.values[i, j])


def cell_centres(lo, hi, n):
    return lo + (np.arange(n) + 0.5) * (hi - lo) / n


def _require_normalized(state):
    n = norm_sq(state) if len(state) else 0.0
    if abs(n - 1) > NORM_TOL:
        raise ValueError(f"Q-function needs a normalized state, norm^2 = {n!r}")


def q_values(state, zetas):
    """Vectorized (1/pi)|<zeta|state>|^2 for an array of phase-space points."""
    zetas = np.asarray(zetas, dtype=complex)
    amp = overlap_matrix(zetas.ravel(), state.amps) @ state.coeffs
    return (np.abs(amp) ** 2 / math.pi).reshape(zetas.shape)


def q_value(state, zeta):
    _require_normalized(state)
    return float(q_values(state, np.array([zeta]))[0])


def default_bounds(alpha):
    half = abs(complex(alpha)) + 3
    return (-half, half, -half, half)


def q_grid(state, bounds, nx=201, ny=201):
    x_min, x_max, y_min, y_max = map(float, bounds)
    if not (x_min < x_max and y_min < y_max):
        raise ValueError(f"degenerate bounds {bounds!r}")
    if nx < 2 or ny < 2:
        raise ValueError("grid needs at least 2 cells per axis")
    _require_normalized(state)
    xs = cell_centres(x_min, x_max, nx)
    ys = cell_centres(y_min, y_max, ny)
    zetas = xs[:, None] + 1j * ys[None, :]
    values = q_values(state, zetas)
    values.flags.writeable = False
    return QGrid(x_min, x_max, y_min, y_max, values)


def peak_find(grid, threshold_frac=0.5):
    """Strict local maxima (8-neighbourhood) at or above ``threshold_frac`` of the grid maximum.

    Returns ``(x, y, value)`` tuples, largest first.
    """
    if not 0 < threshold_frac < 1:
        raise ValueError("threshold_frac must lie in (0, 1)")
    v = grid.values
    padded = np.pad(v, 1, constant_values=-np.inf)
    is_peak = np.ones(v.shape, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == dj == 0:
                continue
            neighbour = padded[1 + di : 1 + di + v.shape[0], 1 + dj : 1 + dj + v.shape[1]]
            is_peak &= v > neighbour
    is_peak &= v >= threshold_frac * v.max()
    xs, ys = grid.xs, grid.ys
    peaks = [(float(xs[i]), float(ys[j]), float(v[i, j])) for i, j in zip(*np.nonzero(is_peak))]
    peaks.sort(key=lambda p: (-p[2], p[0], p[1]))
    return peaks

"""Closed-form reference results, independent of the RK4/Wronskian path."""
from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import EvanescentChannel, InvalidParams


def sech2_lambda(v0: float) -> float:
    if v0 < 0:
        raise InvalidParams("v0 must be non-negative")
    return 0.5 * (1.0 + math.sqrt(1.0 + 8.0 * v0))


def sech2_transmission(v0: float, epsilon: float) -> float:
    """Exact T for ``v = -v0 / cosh(x)²``."""
    if not epsilon > 0:
        raise InvalidParams("epsilon must be positive")
    lam = sech2_lambda(v0)
    sh2 = math.sinh(math.pi * math.sqrt(2.0 * epsilon)) ** 2
    # sin(pi*lam) is not exactly zero in floating point at integer lam
    s2 = 0.0 if lam == round(lam) else math.sin(math.pi * lam) ** 2
    return sh2 / (sh2 + s2)


def sech2_bound_states(v0: float) -> list[float]:
    """Strictly negative bound-state energies ``-(lam-1-n)²/2``, ground state first.

    A zero-energy state at integer lambda sits at the rim and is not listed.
    """
    lam = sech2_lambda(v0)
    out = []
    n = 0
    while lam - 1 - n > 0:
        out.append(-0.5 * (lam - 1 - n) ** 2)
        n += 1
    return out


def sech2_resonant_depths(n_max: int) -> list[float]:
    """Depths ``lam(lam-1)/2`` for ``lam = 2 .. n_max+1`` where T = 1 at every energy."""
    if n_max < 1:
        raise InvalidParams("n_max must be at least 1")
    return [lam * (lam - 1) / 2 for lam in range(2, n_max + 2)]


def step_transmission(v_minus: float, v_plus: float, epsilon: float) -> float:
    if not epsilon > max(v_minus, v_plus):
        raise EvanescentChannel("energy below an asymptotic level")
    k1 = math.sqrt(2.0 * (epsilon - v_minus))
    k3 = math.sqrt(2.0 * (epsilon - v_plus))
    # 1 - r² cannot round above 1, unlike 4 k1 k3 / (k1 + k3)²
    return 1.0 - ((k1 - k3) / (k1 + k3)) ** 2


def square_barrier_transmission(v0: float, width: float, epsilon: float) -> float:
    """Textbook rectangular barrier of height ``v0`` and width ``width``."""
    if not (v0 > 0 and width > 0 and epsilon > 0):
        raise InvalidParams("need v0 > 0, width > 0, epsilon > 0")
    if epsilon == v0:
        return 1.0 / (1.0 + v0 * width**2 / 2.0)
    if epsilon < v0:
        kappa = math.sqrt(2.0 * (v0 - epsilon))
        return 1.0 / (1.0 + v0**2 * math.sinh(kappa * width) ** 2 / (4.0 * epsilon * (v0 - epsilon)))
    kq = math.sqrt(2.0 * (epsilon - v0))
    return 1.0 / (1.0 + v0**2 * math.sin(kq * width) ** 2 / (4.0 * epsilon * (epsilon - v0)))


def _tree_product(mats: np.ndarray) -> np.ndarray:
    """Ordered product ``mats[-1] @ ... @ mats[0]`` by pairwise reduction."""
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            mats = np.concatenate([mats, np.eye(2, dtype=mats.dtype)[None]])
        mats = mats[1::2] @ mats[0::2]
    return mats[0]


def transfer_matrix_transmission(potential, epsilon: float, x_lo: float = -8.0,
                                 x_hi: float = 8.0, n_slices: int = 100_000,
                                 v_minus: float = 0.0, v_plus: float = 0.0) -> float:
    """T from a product of piecewise-constant slice propagators.

    ``potential`` is any vectorised callable; it is sampled at slice
    midpoints.  Outside ``[x_lo, x_hi]`` the potential is taken as
    ``v_minus``/``v_plus``.
    """
    if not epsilon > max(v_minus, v_plus):
        raise EvanescentChannel("energy below an asymptotic level")
    edges = np.linspace(x_lo, x_hi, n_slices + 1)
    d = np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    kk = np.sqrt((2.0 * (epsilon - np.asarray(potential(mids), dtype=float))).astype(complex))
    kk = np.where(kk == 0, 1e-300, kk)
    c, s = np.cos(kk * d), np.sin(kk * d)
    mats = np.empty((n_slices, 2, 2), dtype=complex)
    mats[:, 0, 0] = c
    mats[:, 0, 1] = s / kk
    mats[:, 1, 0] = -kk * s
    mats[:, 1, 1] = c
    M = _tree_product(mats)
    k1 = math.sqrt(2.0 * (epsilon - v_minus))
    k3 = math.sqrt(2.0 * (epsilon - v_plus))
    # left: e^{ik1x} + r e^{-ik1x};  right: t e^{ik3x}
    el, elm = cmath.exp(1j * k1 * x_lo), cmath.exp(-1j * k1 * x_lo)
    er = cmath.exp(1j * k3 * x_hi)
    # M @ [el + r elm, ik1 (el - r elm)] = [t er, ik3 t er]
    a = np.array([
        [M[0, 0] * elm - 1j * k1 * M[0, 1] * elm, -er],
        [M[1, 0] * elm - 1j * k1 * M[1, 1] * elm, -1j * k3 * er],
    ])
    b = -np.array([
        M[0, 0] * el + 1j * k1 * M[0, 1] * el,
        M[1, 0] * el + 1j * k1 * M[1, 1] * el,
    ])
    r, t = np.linalg.solve(a, b)
    return float(k3 / k1 * abs(t) ** 2)

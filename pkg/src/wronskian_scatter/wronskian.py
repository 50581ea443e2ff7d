"""Wronskians between the propagated pair and asymptotic plane waves, and
detection of their constant asymptotic plateaus."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySide, InvalidParams, NoPlateau
from .integrator import SolutionTrace, discrete_wavenumber

LEFT = "left"
RIGHT = "right"

# key "f,g" holds W(f, g); "C"/"S" is the side's asymptotic pair
SERIES_KEYS = ("C2,S", "S2,S", "C,C2", "C,S2")


def wronskian(f, fp, g, gp):
    """``W(f, g) = f g' - g f'``; works elementwise on arrays."""
    return f * gp - g * fp


def antisymmetry_check(f_pair, g_pair) -> bool:
    return bool(np.all(wronskian(*f_pair, *g_pair) == -wronskian(*g_pair, *f_pair)))


@dataclass(frozen=True)
class AsymptoticPair:
    """``C = cos(k̃ x)``, ``S = sin(k̃ x)/k`` with ``W(C, S) = 1``.

    ``k`` is the physical wavenumber.  When ``h`` is given, the phase
    wavenumber ``k̃`` is the one the unit-determinant RK4 scheme with that step
    actually propagates, so the pair is an exact discrete solution of the
    constant-potential equation; otherwise ``k̃ = k``.
    """

    k: float
    h: float | None = None
    k_phase: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k > 0):
            raise InvalidParams(f"wavenumber must be positive, got {self.k!r}")
        kt = self.k if self.h is None else discrete_wavenumber(self.k**2, self.h)
        object.__setattr__(self, "k_phase", kt)

    def C(self, x):
        return np.cos(self.k_phase * x)

    def Cp(self, x):
        return -self.k * np.sin(self.k_phase * x)

    def S(self, x):
        return np.sin(self.k_phase * x) / self.k

    def Sp(self, x):
        return np.cos(self.k_phase * x)


@dataclass(frozen=True)
class PlateauConfig:
    tol: float = 1e-8
    window: int = 50

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidParams("plateau tol must be positive")
        if self.window < 3:
            raise InvalidParams("plateau window must be at least 3 nodes")


@dataclass(frozen=True)
class Plateau:
    value: float
    residual: float
    onset: float


def detect_plateau(series, x, cfg: PlateauConfig | None = None) -> Plateau:
    """Locate the terminal constant stretch of ``series`` sampled at ``x``.

    The last ``cfg.window`` samples must have max-min spread no larger than
    ``tol * max(1, |mean|)``; the plateau value is that window's mean.  The
    onset is the earliest sample from which the whole tail stays within the
    same bound.  ``series`` is ordered toward the asymptote.
    """
    cfg = cfg or PlateauConfig()
    series = np.asarray(series, dtype=float)
    x = np.asarray(x, dtype=float)
    if series.size < cfg.window:
        raise NoPlateau(f"only {series.size} samples, window is {cfg.window}")
    tail = series[-cfg.window:]
    value = float(np.mean(tail))
    residual = float(np.max(tail) - np.min(tail))
    bound = cfg.tol * max(1.0, abs(value))
    if not residual <= bound:
        raise NoPlateau(f"terminal spread {residual:.3g} exceeds {bound:.3g}")
    rev = series[::-1]
    spread = np.maximum.accumulate(rev) - np.minimum.accumulate(rev)
    ok = spread <= bound
    # first failure walking inward ends the plateau
    n_ok = int(np.argmin(ok)) if not ok.all() else ok.size
    onset = float(x[x.size - n_ok])
    return Plateau(value, residual, onset)


@dataclass(frozen=True, eq=False)
class WronskianTrace:
    side: str
    pair: AsymptoticPair
    x: np.ndarray
    series: dict
    plateaus: dict | None = None

    def plateau_values(self) -> dict:
        return {key: p.value for key, p in self.plateaus.items()}

    def max_residual(self) -> float:
        return max(p.residual for p in self.plateaus.values())

    def onset(self) -> float:
        """Outermost plateau onset: where all four series have settled."""
        onsets = [p.onset for p in self.plateaus.values()]
        return max(onsets) if self.side == RIGHT else min(onsets)


def trace_wronskians(trace: SolutionTrace, side: str, pair: AsymptoticPair | float) -> WronskianTrace:
    """The four Wronskians of C2, S2 against the side's asymptotic pair,
    ordered from the anchor outward."""
    if not isinstance(pair, AsymptoticPair):
        pair = AsymptoticPair(float(pair))
    x, c, cp, s, sp = trace.side(side)
    if x.size < 2:
        raise EmptySide(f"trace has no nodes on the {side} side")
    C, Cp, S, Sp = pair.C(x), pair.Cp(x), pair.S(x), pair.Sp(x)
    series = {
        "C2,S": wronskian(c, cp, S, Sp),
        "S2,S": wronskian(s, sp, S, Sp),
        "C,C2": wronskian(C, Cp, c, cp),
        "C,S2": wronskian(C, Cp, s, sp),
    }
    return WronskianTrace(side, pair, x, series)


def settle(wtrace: WronskianTrace, cfg: PlateauConfig | None = None) -> WronskianTrace:
    """Detect all four plateaus; ``NoPlateau`` names the failing side and series."""
    plateaus = {}
    for key in SERIES_KEYS:
        try:
            plateaus[key] = detect_plateau(wtrace.series[key], wtrace.x, cfg)
        except NoPlateau as exc:
            raise NoPlateau(f"{wtrace.side} W({key}): {exc}", side=wtrace.side, series=key) from None
    return WronskianTrace(wtrace.side, wtrace.pair, wtrace.x, wtrace.series, plateaus)

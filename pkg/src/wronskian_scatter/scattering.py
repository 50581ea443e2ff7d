"""Connection matrices and transmission probabilities.

Region 1 is the incident side (x -> -inf, wavenumber k1) and region 3 the
transmitted side (x -> +inf, wavenumber k3).  With ``phi = A_j C_j + B_j S_j``
in region j and ``phi = A2 C2 + B2 S2`` everywhere,

    (A1, B1) = R1 (A2, B2),   (A2, B2) = R2 (A3, B3),   R = R1 R2.

The R1 entries are plateaus of Wronskians against (C1, S1) on the left, the
R2 entries plateaus against (C3, S3) on the right.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DeterminantDrift, EvanescentChannel, InvalidInput, NoPlateau, ZeroIncident
from .integrator import IntegrationConfig, propagate_pair
from .potentials import PotentialModel
from .wronskian import LEFT, RIGHT, AsymptoticPair, PlateauConfig, settle, trace_wronskians

J = np.array([[0.0, 1.0], [-1.0, 0.0]])
THRESHOLD_GUARD = 1e-12


def _det(m) -> float:
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def symplectic_defect(m) -> float:
    """Largest entry of ``|m^t J m - J|``."""
    return float(np.max(np.abs(m.T @ J @ m - J)))


@dataclass(frozen=True, eq=False)
class ConnectionMatrices:
    R1: np.ndarray
    R2: np.ndarray
    R: np.ndarray
    det_residuals: tuple[float, float, float]
    symplectic_residual: float


def matrices_from_plateaus(left: dict, right: dict) -> ConnectionMatrices:
    """Assemble R1 (from left-side plateau values) and R2 (right side)."""
    R1 = np.array([
        [left["C2,S"], left["S2,S"]],
        [left["C,C2"], left["C,S2"]],
    ])
    # R2 = [[W(C3,S2), W(S3,S2)], [W(C2,C3), W(C2,S3)]]
    R2 = np.array([
        [right["C,S2"], -right["S2,S"]],
        [-right["C,C2"], right["C2,S"]],
    ])
    R = R1 @ R2
    dets = tuple(abs(_det(m) - 1.0) for m in (R1, R2, R))
    symp = max(symplectic_defect(m) for m in (R1, R2, R))
    return ConnectionMatrices(R1, R2, R, dets, symp)


def build_matrices(left_w, right_w, drift_tol: float = 1e-6) -> ConnectionMatrices:
    """Connection matrices from settled left/right Wronskian traces.

    Raises ``DeterminantDrift`` when any determinant misses 1 by more than
    ``drift_tol``.
    """
    if left_w.plateaus is None or right_w.plateaus is None:
        raise NoPlateau("Wronskian traces have not been settled")
    m = matrices_from_plateaus(left_w.plateau_values(), right_w.plateau_values())
    worst = max(m.det_residuals)
    if worst > drift_tol:
        raise DeterminantDrift(
            f"|det - 1| = {worst:.3g} exceeds {drift_tol:.3g}; "
            "extend the integration range or reduce the step"
        )
    return m


@dataclass(frozen=True)
class ScatterOutcome:
    T: float
    reflection: float
    k1: float
    k3: float
    transmitted_ratio: complex  # A3'/A1'
    reflected_ratio: complex  # B1'/A1'
    det_residuals: tuple[float, float, float]
    symplectic_residual: float
    unitarity_defect: float
    epsilon: float | None = None
    potential: dict | None = None
    plateau_residuals: dict = field(default_factory=dict)
    h: float | None = None
    x_range: tuple[float, float] | None = None
    T_symmetric: float | None = None
    route_discrepancy: float | None = None
    parity_defect: float | None = None
    incidence: str = "left"

    @property
    def det_residual(self) -> float:
        return max(self.det_residuals)

    @property
    def plateau_residual(self) -> float:
        return max(self.plateau_residuals.values()) if self.plateau_residuals else 0.0


def transmission_general(M: ConnectionMatrices, k1: float, k3: float) -> ScatterOutcome:
    """Transmission for a wave incident from the left.

    The transmitted side carries a pure outgoing wave, ``(A3, B3) = (1, i k3)``
    so that ``A3' = 1`` and ``B3' = 0``.  Then ``(A1, B1) = R (A3, B3)`` and
    ``T = k3 |A3'|² / (k1 |A1'|²)``.
    """
    if not (k1 > 0 and k3 > 0):
        raise InvalidInput("wavenumbers must be positive")
    R = M.R
    A3, B3 = 1.0 + 0j, 1j * k3
    A1 = R[0, 0] * A3 + R[0, 1] * B3
    B1 = R[1, 0] * A3 + R[1, 1] * B3
    A1p = 0.5 * (A1 - 1j * B1 / k1)
    B1p = 0.5 * (A1 + 1j * B1 / k1)
    A3p = 0.5 * (A3 - 1j * B3 / k3)
    if A1p == 0:
        raise ZeroIncident("incident amplitude vanished")
    T = k3 * abs(A3p) ** 2 / (k1 * abs(A1p) ** 2)
    refl = abs(B1p / A1p) ** 2
    return ScatterOutcome(
        T=T, reflection=refl, k1=k1, k3=k3,
        transmitted_ratio=A3p / A1p, reflected_ratio=B1p / A1p,
        det_residuals=M.det_residuals, symplectic_residual=M.symplectic_residual,
        unitarity_defect=abs(T + refl - 1.0),
    )


def transmission_symmetric(quartet, k: float) -> float:
    """Closed form for parity-symmetric potentials.

    ``quartet = (W(C2,S3), W(S3,S2), W(C2,C3), W(C3,S2))`` from the right side.
    """
    a, b, c, d = (float(v) for v in quartet)
    if not all(math.isfinite(v) for v in (a, b, c, d, k)):
        raise InvalidInput("non-finite quartet")
    return k * k / ((c * c + k * k * a * a) * (d * d + k * k * b * b))


def symmetric_quartet(right: dict) -> tuple[float, float, float, float]:
    return right["C2,S"], -right["S2,S"], -right["C,C2"], right["C,S2"]


def parity_pairs(left: dict, right: dict):
    """The four (left, right) plateau pairs that coincide for even potentials."""
    return [
        (left["C2,S"], right["C2,S"]),   # W(C2,S1) = W(C2,S3)
        (left["S2,S"], -right["S2,S"]),  # W(S2,S1) = W(S3,S2)
        (left["C,C2"], -right["C,C2"]),  # W(C1,C2) = W(C2,C3)
        (left["C,S2"], right["C,S2"]),   # W(C1,S2) = W(C3,S2)
    ]


def wavenumbers(model: PotentialModel, epsilon: float) -> tuple[float, float]:
    threshold = max(model.v_minus, model.v_plus)
    if not epsilon > threshold + THRESHOLD_GUARD:
        raise EvanescentChannel(
            f"epsilon={epsilon!r} is not above the asymptotic level {threshold!r}"
        )
    return math.sqrt(2.0 * (epsilon - model.v_minus)), math.sqrt(2.0 * (epsilon - model.v_plus))


@dataclass(frozen=True, eq=False)
class Settled:
    """Intermediate products of one converged scatter run."""

    trace: object
    left: object
    right: object
    half_range: float


def settle_pair(model: PotentialModel, epsilon: float, cfg: IntegrationConfig,
                pcfg: PlateauConfig) -> Settled:
    """Propagate and settle all eight Wronskians, doubling the range on failure."""
    k1, k3 = wavenumbers(model, epsilon)
    h_pair = cfg.h if cfg.unimodular else None
    pair1, pair3 = AsymptoticPair(k1, h_pair), AsymptoticPair(k3, h_pair)
    limit = max(cfg.hard_x_limit, cfg.x_max)
    half = min(cfg.x_max, limit)
    while True:
        trace = propagate_pair(model, epsilon, cfg, half)
        try:
            left = settle(trace_wronskians(trace, LEFT, pair1), pcfg)
            right = settle(trace_wronskians(trace, RIGHT, pair3), pcfg)
            return Settled(trace, left, right, half)
        except NoPlateau:
            capped = trace.n_right >= cfg.max_steps_per_side
            if half >= limit or capped:
                raise
            half = min(2.0 * half, limit)


def scatter(model: PotentialModel, epsilon: float, cfg: IntegrationConfig | None = None,
            pcfg: PlateauConfig | None = None, incidence: str = "left") -> ScatterOutcome:
    """Transmission and reflection probabilities at energy ``epsilon``.

    ``incidence='right'`` sends the wave in from +inf by scattering off the
    mirrored potential.
    """
    cfg = cfg or IntegrationConfig()
    pcfg = pcfg or PlateauConfig()
    if not math.isfinite(epsilon):
        raise InvalidInput("epsilon must be finite")
    if incidence not in ("left", "right"):
        raise InvalidInput(f"unknown incidence {incidence!r}")
    target = model.mirrored() if incidence == "right" else model
    k1, k3 = wavenumbers(target, epsilon)
    st = settle_pair(target, epsilon, cfg, pcfg)
    M = build_matrices(st.left, st.right, drift_tol=100 * pcfg.tol)
    out = transmission_general(M, k1, k3)

    residuals = {f"left:{k}": p.residual for k, p in st.left.plateaus.items()}
    residuals.update({f"right:{k}": p.residual for k, p in st.right.plateaus.items()})
    extra = {}
    if target.parity_symmetric:
        lv, rv = st.left.plateau_values(), st.right.plateau_values()
        t_sym = transmission_symmetric(symmetric_quartet(rv), k1)
        extra = dict(
            T_symmetric=t_sym,
            route_discrepancy=abs(t_sym - out.T),
            parity_defect=max(abs(a - b) for a, b in parity_pairs(lv, rv)),
        )
    return replace(
        out, epsilon=epsilon, potential=model.describe(), plateau_residuals=residuals,
        h=cfg.h, x_range=(float(st.trace.x[0]), float(st.trace.x[-1])),
        incidence=incidence, **extra,
    )

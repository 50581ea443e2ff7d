"""Parameter scans of T and location of full-transmission resonances."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import AllPointsFailed, BracketLost, InvalidParams, ScatterError
from .integrator import IntegrationConfig
from .potentials import Family, make_model
from .scattering import ScatterOutcome, scatter
from .wronskian import PlateauConfig

AXES = ("epsilon", "v0")
GOLDEN = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class PointSpec:
    """Everything needed to evaluate one point; picklable for worker processes."""

    family: str
    params: tuple  # sorted (name, value) pairs passed to make_model
    epsilon: float
    cfg: IntegrationConfig
    pcfg: PlateauConfig

    def run(self) -> ScatterOutcome:
        return scatter(make_model(self.family, **dict(self.params)), self.epsilon, self.cfg, self.pcfg)


def _evaluate(spec: PointSpec):
    try:
        return spec.run(), "ok", ""
    except ScatterError as exc:
        return None, exc.status, str(exc)


def default_jobs() -> int:
    env = os.environ.get("WRONSKIAN_SCATTER_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidParams(f"WRONSKIAN_SCATTER_JOBS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _run_all(specs, jobs):
    if jobs <= 1 or len(specs) <= 1:
        return [_evaluate(s) for s in specs]
    chunk = max(1, len(specs) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_evaluate, specs, chunksize=chunk))


@dataclass(frozen=True, eq=False)
class ScanResult:
    axis: str
    points: np.ndarray
    T: np.ndarray  # nan where the point failed
    outcomes: list
    statuses: list
    messages: list = field(default_factory=list)

    @property
    def failures(self):
        return [(float(p), s) for p, s in zip(self.points, self.statuses) if s != "ok"]

    @property
    def ok(self) -> np.ndarray:
        return np.array([s == "ok" for s in self.statuses])


def _params(family, v0, width, v_minus, v_plus, table):
    params = {"v0": v0, "width": width, "v_minus": v_minus, "v_plus": v_plus}
    if table is not None:
        params["table"] = table
    return params


def scan(family, axis: str, lo: float, hi: float, steps: int, *, v0: float = 0.0,
         epsilon: float | None = None, width: float = 1.0, v_minus: float = 0.0,
         v_plus: float = 0.0, table=None, cfg: IntegrationConfig | None = None,
         pcfg: PlateauConfig | None = None, jobs: int = 1) -> ScanResult:
    """Evaluate T on ``steps`` evenly spaced values of ``axis`` in ``[lo, hi]``.

    Failing points are recorded with their status instead of aborting.
    Results do not depend on ``jobs``.
    """
    if axis not in AXES:
        raise InvalidParams(f"axis must be one of {AXES}")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise InvalidParams("scan range needs lo < hi")
    if steps < 2:
        raise InvalidParams("scan needs at least 2 steps")
    if axis == "v0" and epsilon is None:
        raise InvalidParams("a depth scan needs a fixed epsilon")
    cfg = cfg or IntegrationConfig()
    pcfg = pcfg or PlateauConfig()
    points = np.linspace(lo, hi, steps)
    specs = []
    for p in points.tolist():
        params = _params(family, p if axis == "v0" else v0, width, v_minus, v_plus, table)
        eps = p if axis == "epsilon" else epsilon
        specs.append(PointSpec(Family(family).value, tuple(sorted(params.items())), eps, cfg, pcfg))
    results = _run_all(specs, jobs)
    outcomes = [r[0] for r in results]
    statuses = [r[1] for r in results]
    if all(s != "ok" for s in statuses):
        raise AllPointsFailed(f"every scan point failed; first error: {results[0][2]}")
    T = np.array([o.T if o is not None else np.nan for o in outcomes])
    return ScanResult(axis, points, T, outcomes, statuses, [r[2] for r in results])


def find_peaks(result: ScanResult, min_T: float = 0.99) -> list[tuple[float, float, float]]:
    """Interior local maxima of T with ``T >= min_T`` as ``(left, centre, right)``.

    A run of equal values counts once, centred on its first sample.  Points
    next to a failed sample are skipped.
    """
    T, x, ok = result.T, result.points, result.ok
    peaks = []
    i, n = 1, T.size
    while i < n - 1:
        if not (ok[i - 1] and ok[i]) or not T[i - 1] < T[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and ok[j + 1] and T[j + 1] == T[i]:
            j += 1
        if j + 1 < n and ok[j + 1] and T[j + 1] < T[i] and T[i] >= min_T:
            peaks.append((float(x[i - 1]), float(x[i]), float(x[j + 1])))
        i = j + 1
    return peaks


@dataclass(frozen=True)
class ResonancePeak:
    v0_location: float
    T_at_peak: float
    half_width: float
    epsilon: float


def refine_peak(family, epsilon: float, bracket, xtol: float = 1e-6, *, width: float = 1.0,
                cfg: IntegrationConfig | None = None, pcfg: PlateauConfig | None = None) -> ResonancePeak:
    """Golden-section maximisation of ``v0 -> T`` inside ``bracket = (lo, mid, hi)``.

    Stops once the bracket is no wider than ``xtol``.
    """
    cfg = cfg or IntegrationConfig()
    pcfg = pcfg or PlateauConfig()

    def T(v):
        try:
            return PointSpec(Family(family).value, tuple(sorted(_params(family, v, width, 0.0, 0.0, None).items())),
                             epsilon, cfg, pcfg).run().T
        except ScatterError as exc:
            raise BracketLost(f"T({v!r}) failed inside bracket: {exc}", bracket) from None

    a, b, c = (float(v) for v in bracket)
    if not a < b < c:
        raise BracketLost("bracket must satisfy lo < mid < hi", bracket)
    fa, fb, fc = T(a), T(b), T(c)
    if fb < fa or fb < fc:
        raise BracketLost(f"T(mid)={fb!r} below an edge ({fa!r}, {fc!r})", bracket)
    while c - a > xtol:
        if c - b > b - a:
            x = b + GOLDEN * (c - b)
        else:
            x = b - GOLDEN * (b - a)
        fx = T(x)
        if fx > fb:
            if x > b:
                a = b
            else:
                c = b
            b, fb = x, fx
        elif x > b:
            c = x
        else:
            a = x
    return ResonancePeak(b, fb, (c - a) / 2.0, epsilon)


def _refine_task(args):
    return refine_peak(*args[:4], **args[4])


def find_resonances(family, epsilon: float, v0_min: float, v0_max: float, steps: int = 400,
                    min_T: float = 0.99, xtol: float = 1e-6, *, width: float = 1.0,
                    cfg: IntegrationConfig | None = None, pcfg: PlateauConfig | None = None,
                    jobs: int = 1) -> list[ResonancePeak]:
    """Scan depth at fixed energy, then refine every peak found."""
    result = scan(family, "v0", v0_min, v0_max, steps, epsilon=epsilon, width=width,
                  cfg=cfg, pcfg=pcfg, jobs=jobs)
    brackets = find_peaks(result, min_T)
    tasks = [(family, epsilon, br, xtol, {"width": width, "cfg": cfg, "pcfg": pcfg})
             for br in brackets]
    if jobs <= 1 or len(tasks) <= 1:
        return [_refine_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(_refine_task, tasks))

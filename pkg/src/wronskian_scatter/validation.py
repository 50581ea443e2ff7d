"""Self-check suites run by ``wronskian-scatter validate``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ScatterError
from .integrator import IntegrationConfig, propagate_pair
from . import oracles
from .potentials import (PotentialModel, gaussian_barrier, gaussian_well, sech2_well,
                         square_barrier, step)
from .scattering import scatter
from .wronskian import PlateauConfig

SECH2_DEPTHS = (0.5, 1.0, 2.0, 5.0)
SECH2_ENERGIES = (0.25, 0.5, 1.0, 2.0)
GAUSS_DEPTHS = (1.0, 2.0, 4.0)
GAUSS_ENERGIES = (0.25, 0.5, 1.0, 2.0)
SQUARE_ENERGIES = (1.0, 2.0, 4.0)


@dataclass
class ValidationConfig:
    cfg: IntegrationConfig = field(default_factory=IntegrationConfig)
    pcfg: PlateauConfig = field(default_factory=PlateauConfig)
    sech2_tol: float = 1e-5
    step_tol: float = 1e-5
    square_tol: float = 1e-6
    matrix_tol: float = 1e-8
    unitarity_tol: float = 1e-7
    route_tol: float = 1e-9
    order_range: tuple[float, float] = (3.5, 4.5)
    extra_model: PotentialModel | None = None


@dataclass
class SuiteResult:
    name: str
    passed: bool
    worst: float
    tol: float
    failures: list = field(default_factory=list)
    detail: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        detail = self.detail or f"worst={self.worst:.3e}  tol={self.tol:.1e}"
        text = f"{flag}  {self.name:<16} {detail}"
        if self.failures:
            text += "  failing: " + "; ".join(self.failures[:8])
            if len(self.failures) > 8:
                text += f"; ... ({len(self.failures)} total)"
        return text


def _label(model: PotentialModel, eps: float) -> str:
    d = model.describe()
    bits = [d["family"]] + [f"{k}={v:g}" for k, v in d.items() if k in ("v0", "width")]
    if model.family.value == "step":
        bits += [f"v-={model.v_minus:g}", f"v+={model.v_plus:g}"]
    return f"({', '.join(bits)}, eps={eps:g})"


def matrix_grid(vc: ValidationConfig):
    pts = [(sech2_well(v0), e) for v0 in SECH2_DEPTHS for e in SECH2_ENERGIES]
    for make in (gaussian_barrier, gaussian_well):
        pts += [(make(v0), e) for v0 in GAUSS_DEPTHS for e in GAUSS_ENERGIES]
    if vc.extra_model is not None:
        base = max(vc.extra_model.v_minus, vc.extra_model.v_plus)
        pts += [(vc.extra_model, base + e) for e in GAUSS_ENERGIES]
    return pts


class _Runner:
    def __init__(self, vc: ValidationConfig):
        self.vc = vc
        self._cache = {}

    def run(self, model, eps, cfg=None):
        cfg = cfg or self.vc.cfg
        key = (model, eps, cfg)
        if key not in self._cache:
            try:
                self._cache[key] = (model, scatter(model, eps, cfg, self.vc.pcfg))
            except ScatterError as exc:
                self._cache[key] = (model, exc)
        return self._cache[key][1]


def _collect(name, tol, items):
    """``items`` yields (label, error or exception); pass when every error ≤ tol."""
    worst, failures = 0.0, []
    for label, err in items:
        if isinstance(err, Exception):
            failures.append(f"{label}: {type(err).__name__}")
            worst = math.inf
            continue
        worst = max(worst, err)
        if not err <= tol:
            failures.append(f"{label}: {err:.2e}")
    return SuiteResult(name, not failures, worst, tol, failures)


def suite_oracle(vc: ValidationConfig, runner: _Runner) -> list[SuiteResult]:
    def sech2_items():
        for v0 in SECH2_DEPTHS:
            for e in SECH2_ENERGIES:
                m = sech2_well(v0)
                out = runner.run(m, e)
                yield _label(m, e), out if isinstance(out, Exception) else abs(
                    out.T - oracles.sech2_transmission(v0, e))

    def step_items():
        m = step(0.0, -3.0)
        out = runner.run(m, 0.5)
        yield _label(m, 0.5), out if isinstance(out, Exception) else abs(
            out.T - oracles.step_transmission(0.0, -3.0, 0.5))

    def square_items():
        for e in SQUARE_ENERGIES:
            m = square_barrier(2.0, 1.0)
            out = runner.run(m, e)
            yield _label(m, e), out if isinstance(out, Exception) else abs(
                out.T - oracles.square_barrier_transmission(2.0, 1.0, e))

    return [
        _collect("oracle:sech2", vc.sech2_tol, sech2_items()),
        _collect("oracle:step", vc.step_tol, step_items()),
        _collect("oracle:square", vc.square_tol, square_items()),
    ]


def suite_symplectic(vc, runner) -> SuiteResult:
    def items():
        for m, e in matrix_grid(vc):
            out = runner.run(m, e)
            yield _label(m, e), out if isinstance(out, Exception) else max(
                out.det_residual, out.symplectic_residual)
    return _collect("symplecticity", vc.matrix_tol, items())


def suite_unitarity(vc, runner) -> SuiteResult:
    def items():
        for m, e in matrix_grid(vc):
            out = runner.run(m, e)
            yield _label(m, e), out if isinstance(out, Exception) else out.unitarity_defect
    return _collect("unitarity", vc.unitarity_tol, items())


def suite_parity(vc, runner) -> list[SuiteResult]:
    """Quartet equality from an independent two-sided integration, and
    agreement of the closed symmetric formula with the general route."""
    two_sided = replace(vc.cfg, use_parity=False)
    sym = [(m, e) for m, e in matrix_grid(vc) if m.parity_symmetric]

    def quartet():
        for m, e in sym:
            out = runner.run(m, e, two_sided)
            yield _label(m, e), out if isinstance(out, Exception) else out.parity_defect

    def route():
        for m, e in sym:
            out = runner.run(m, e)
            yield _label(m, e), out if isinstance(out, Exception) else out.route_discrepancy

    return [
        _collect("parity:quartet", 2 * vc.pcfg.tol, quartet()),
        _collect("parity:route", vc.route_tol, route()),
    ]


def observed_order(model: PotentialModel, epsilon: float, h: float, x_target: float = 5.0,
                   base: IntegrationConfig | None = None) -> float:
    """Convergence order of C2 at the last common node ≤ ``x_target`` from
    steps ``(2h, h, h/2)``."""
    base = base or IntegrationConfig()
    x_eval = math.floor(x_target / (2 * h) + 1e-9) * 2 * h
    vals = []
    for hh in (2 * h, h, h / 2):
        cfg = replace(base, h=hh, x_max=x_eval, max_steps_per_side=max(base.max_steps_per_side,
                                                                        int(x_eval / hh) + 2))
        tr = propagate_pair(model, epsilon, cfg, x_eval)
        vals.append(tr.c[tr.anchor + round(x_eval / hh)])
    return math.log2(abs(vals[0] - vals[1]) / abs(vals[1] - vals[2]))


def suite_order(vc) -> SuiteResult:
    lo, hi = vc.order_range
    try:
        p = observed_order(gaussian_barrier(2.0), 1.0, vc.cfg.h, base=vc.cfg)
    except ScatterError as exc:
        return SuiteResult("rk4-order", False, math.nan, 0.0, [type(exc).__name__])
    ok = lo <= p <= hi
    return SuiteResult("rk4-order", ok, p, 0.0, [] if ok else ["outside range"],
                       detail=f"order={p:.3f}  range=[{lo}, {hi}]")


def run_all(vc: ValidationConfig | None = None) -> list[SuiteResult]:
    vc = vc or ValidationConfig()
    runner = _Runner(vc)
    results = suite_oracle(vc, runner)
    results.append(suite_symplectic(vc, runner))
    results.append(suite_unitarity(vc, runner))
    results.extend(suite_parity(vc, runner))
    results.append(suite_order(vc))
    return results

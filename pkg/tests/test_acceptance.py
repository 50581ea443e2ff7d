"""Acceptance criteria, each at its stated tolerance.

Each test records a single PASS/FAIL line; the lines are repeated in the
terminal summary at the end of the run.
"""
import time

import numpy as np
import pytest

from wronskian_scatter import oracles
from wronskian_scatter import potentials as pot
from wronskian_scatter.cli import main
from wronskian_scatter.integrator import IntegrationConfig
from wronskian_scatter.resonance import default_jobs, find_resonances, scan
from wronskian_scatter.scattering import scatter
from wronskian_scatter.validation import ValidationConfig, matrix_grid, observed_order

SECH2_GRID = [(v0, e) for v0 in (0.5, 1.0, 2.0, 5.0) for e in (0.25, 0.5, 1.0, 2.0)]
JOBS = min(8, default_jobs())


@pytest.fixture(scope="module")
def grid_outcomes():
    return [(m, e, scatter(m, e)) for m, e in matrix_grid(ValidationConfig())]


def test_criterion_01_sech2_oracle(verdict):
    t0 = time.perf_counter()
    errs = [abs(scatter(pot.sech2_well(v0), e, IntegrationConfig(h=0.01)).T
                - oracles.sech2_transmission(v0, e)) for v0, e in SECH2_GRID]
    elapsed = time.perf_counter() - t0
    worst = max(errs)
    verdict(1, "sech2 oracle", worst <= 1e-5 and elapsed < 10.0,
            f"max|dT|={worst:.2e} (tol 1e-5), {elapsed:.2f}s (limit 10s)")


def test_criterion_02_sech2_resonant_depths(verdict, capsys):
    code = main(["resonances", "--potential", "sech2-well", "--epsilon", "0.5",
                 "--v0-min", "0", "--v0-max", "7", "--jobs", str(JOBS)])
    lines = capsys.readouterr().out.strip().split("\n")[1:]
    found = [float(l.split(",")[0]) for l in lines if l]
    dev = [min((abs(f - t) for f in found), default=np.inf) for t in (1.0, 3.0, 6.0)]
    ok = code == 0 and len(found) == 3 and max(dev) <= 1e-3
    verdict(2, "sech2 resonant depths", ok,
            f"peaks={[round(f, 7) for f in found]} max dev={max(dev):.1e} (tol 1e-3)")


def test_criterion_03_symplectic(verdict, grid_outcomes):
    worst_det = max(o.det_residual for _, _, o in grid_outcomes)
    worst_sym = max(o.symplectic_residual for _, _, o in grid_outcomes)
    ok = worst_det <= 1e-8 and worst_sym <= 1e-8
    verdict(3, "symplecticity", ok,
            f"{len(grid_outcomes)} points, |det-1|<={worst_det:.1e}, |RtJR-J|<={worst_sym:.1e} (tol 1e-8)")


def test_criterion_04_unitarity(verdict, grid_outcomes):
    worst = max(o.unitarity_defect for _, _, o in grid_outcomes)
    verdict(4, "unitarity", worst <= 1e-7, f"max|T+R-1|={worst:.1e} (tol 1e-7)")


def test_criterion_05_parity(verdict):
    cfg = ValidationConfig()
    two_sided = IntegrationConfig(use_parity=False)
    sym = [(m, e) for m, e in matrix_grid(cfg) if m.parity_symmetric]
    quartet = max(scatter(m, e, two_sided).parity_defect for m, e in sym)
    route = max(scatter(m, e).route_discrepancy for m, e in sym)
    ok = quartet <= 2 * cfg.pcfg.tol and route <= 1e-9
    verdict(5, "parity quartet/route", ok,
            f"quartet={quartet:.1e} (tol {2 * cfg.pcfg.tol:.0e}), route={route:.1e} (tol 1e-9)")


def test_criterion_06_gaussian_plateaus(verdict):
    out = scatter(pot.gaussian_barrier(2.0), 1.0, IntegrationConfig(h=0.01))
    worst = out.plateau_residual
    ok = len(out.plateau_residuals) == 8 and worst < 1e-6 and max(map(abs, out.x_range)) <= 5.0 + 1e-12
    verdict(6, "plateaus by |x|=5", ok, f"8 residuals <= {worst:.1e} (tol 1e-6), x_range={out.x_range}")


def test_criterion_07_barrier_curves(verdict):
    problems = []
    for v0 in (1.0, 2.0, 4.0):
        res = scan("gaussian-barrier", "epsilon", 0.25, 10.0, 100, v0=v0, jobs=JOBS)
        T = res.T
        if not res.ok.all():
            problems.append(f"v0={v0:g}: {len(res.failures)} failed points")
            continue
        if not np.all((T > 0) & (T < 1)):
            problems.append(f"v0={v0:g}: T outside (0,1)")
        interior_max = np.nonzero((T[1:-1] > T[:-2]) & (T[1:-1] > T[2:]))[0]
        if interior_max.size:
            problems.append(f"v0={v0:g}: interior maxima at {res.points[interior_max + 1]}")
        t50 = scatter(pot.gaussian_barrier(v0), 50.0).T
        if not t50 >= 0.999:
            problems.append(f"v0={v0:g}: T(50)={t50:.6f}")
    verdict(7, "barrier T(eps) shape", not problems, "; ".join(problems) or "v0 in {1,2,4} all satisfied")


def test_criterion_08_well_resonances(verdict):
    peaks = {}
    for eps in (0.1, 0.5):
        found = find_resonances("gaussian-well", eps, 0.0, 12.0, jobs=JOBS)
        peaks[eps] = [p.v0_location for p in found if p.T_at_peak >= 0.999]
    lo, hi = peaks[0.1], peaks[0.5]
    n = min(len(lo), len(hi))
    rel = [abs(a - b) / max(a, b) for a, b in zip(lo[:n], hi[:n])]
    ok = len(lo) >= 2 and len(hi) >= 2 and all(r <= 0.10 for r in rel)
    detail = (f"eps=0.1 peaks {[round(v, 4) for v in lo]}, eps=0.5 peaks {[round(v, 4) for v in hi]}, "
              f"relative shifts {[f'{r:.1%}' for r in rel]} (tol 10%)")
    verdict(8, "well resonance drift", ok, detail)


def test_criterion_09_asymmetric_branch(verdict):
    step_err = abs(scatter(pot.step(0.0, -3.0), 0.5).T - oracles.step_transmission(0.0, -3.0, 0.5))
    sq_err = max(abs(scatter(pot.square_barrier(2.0, 1.0), e).T
                     - oracles.square_barrier_transmission(2.0, 1.0, e)) for e in (1.0, 2.0, 4.0))
    ok = step_err <= 1e-5 and sq_err <= 1e-6
    verdict(9, "step and square", ok, f"step {step_err:.1e} (tol 1e-5), square {sq_err:.1e} (tol 1e-6)")


def test_criterion_10_rk4_order(verdict):
    p = observed_order(pot.gaussian_barrier(2.0), 1.0, 0.01)
    verdict(10, "integrator order", 3.5 <= p <= 4.5, f"order={p:.3f} from h=0.02/0.01/0.005 (range [3.5, 4.5])")


def test_criterion_11_determinism(verdict, tmp_path, capsys):
    base = ["scan", "--potential", "gaussian-well", "--axis", "v0", "--epsilon", "0.5",
            "--min", "0", "--max", "12", "--steps", "120"]
    blobs = {}
    for fmt in ("csv", "json"):
        for jobs in ("1", "8", "1", "8"):
            path = tmp_path / f"{fmt}-{jobs}-{len(blobs)}.out"
            assert main(base + ["--format", fmt, "--jobs", jobs, "--output", str(path)]) == 0
            blobs.setdefault(fmt, []).append(path.read_bytes())
    capsys.readouterr()
    ok = all(len(set(v)) == 1 for v in blobs.values())
    verdict(11, "determinism", ok, "csv and json identical across --jobs 1/8, two runs each" if ok
            else "outputs differ")

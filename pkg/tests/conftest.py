import numpy as np
import pytest

from wronskian_scatter import potentials as pot


@pytest.fixture
def gaussian_table_text():
    xs = np.linspace(-5.0, 5.0, 401)
    vs = 2.0 * np.exp(-xs**2)
    rows = "".join(f"{x!r}\t{v!r}\n" for x, v in zip(xs.tolist(), vs.tolist()))
    return (pot.TABLE_MAGIC + "\nv_minus 0.0 v_plus 0.0 tail_tol 1e-6\n" + rows).encode("ascii")


BUILTINS = [
    pot.free(),
    pot.gaussian_barrier(2.0),
    pot.gaussian_well(5.0),
    pot.sech2_well(1.0),
    pot.square_barrier(2.0, 1.0),
    pot.step(0.0, -3.0),
]


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for the acceptance summary, then assert it."""
    def record(number, name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}  {name:<22} {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)

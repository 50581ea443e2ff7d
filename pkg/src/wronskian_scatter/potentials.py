"""Dimensionless potentials v(x) for the scaled Schrödinger equation
``-phi''/2 + v(x) phi = epsilon phi``.

Models are immutable.  ``evaluate`` is vectorised over numpy arrays; the
integrator additionally uses ``evaluate_sided`` to take one-sided limits at
the jump points listed in ``breakpoints``.
"""
from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field
from typing import IO, Union

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import InvalidGrid, InvalidInput, InvalidParams, ParseError, TailMismatch

TABLE_MAGIC = "# wronskian-scatter potential v1"


class Family(str, enum.Enum):
    FREE = "free"
    GAUSSIAN_BARRIER = "gaussian-barrier"
    GAUSSIAN_WELL = "gaussian-well"
    SECH2_WELL = "sech2-well"
    SQUARE_BARRIER = "square-barrier"
    STEP = "step"
    TABULATED = "tabulated"


SYMMETRIC_FAMILIES = frozenset(
    {
        Family.FREE,
        Family.GAUSSIAN_BARRIER,
        Family.GAUSSIAN_WELL,
        Family.SECH2_WELL,
        Family.SQUARE_BARRIER,
    }
)


@dataclass(frozen=True)
class PhysicalParams:
    """Physical inputs for the Gaussian and sech² families.

    The natural length unit is ``1/sqrt(alpha)``.
    """

    mass: float
    hbar: float
    V0: float
    E: float
    alpha: float

    def __post_init__(self):
        for name in ("mass", "hbar", "alpha"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParams(f"{name} must be positive and finite, got {value!r}")
        if not (math.isfinite(self.V0) and math.isfinite(self.E)):
            raise InvalidParams("V0 and E must be finite")

    @property
    def length_scale(self) -> float:
        return 1.0 / math.sqrt(self.alpha)


def nondimensionalize(p: PhysicalParams) -> tuple[float, float]:
    """Return ``(v0, epsilon)`` with ``v0 = m V0/(hbar² alpha)`` and
    ``epsilon = m E/(hbar² alpha)``."""
    scale = p.mass / (p.hbar**2 * p.alpha)
    v0 = scale * p.V0
    epsilon = scale * p.E
    if not (math.isfinite(v0) and math.isfinite(epsilon)):
        raise InvalidParams("scaled parameters overflowed")
    return v0, epsilon


@dataclass(frozen=True, eq=False)
class TabulatedPotential:
    nodes: np.ndarray
    values: np.ndarray
    v_minus: float = 0.0
    v_plus: float = 0.0
    tail_tol: float = 1e-6
    _spline: CubicSpline = field(init=False, repr=False)

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        values = np.array(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.shape != values.shape:
            raise InvalidGrid("nodes and values must be 1-D arrays of equal length")
        if nodes.size < 4:
            raise ParseError(f"need at least 4 nodes, got {nodes.size}")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(values))):
            raise InvalidGrid("non-finite node or value")
        if np.any(np.diff(nodes) <= 0):
            raise InvalidGrid("x values must be strictly increasing")
        if not (math.isfinite(self.v_minus) and math.isfinite(self.v_plus)):
            raise InvalidParams("asymptotic constants must be finite")
        if not self.tail_tol >= 0:
            raise InvalidParams("tail_tol must be non-negative")
        if abs(values[0] - self.v_minus) > self.tail_tol:
            raise TailMismatch(
                f"first value {values[0]!r} differs from v_minus {self.v_minus!r} "
                f"by more than {self.tail_tol!r}"
            )
        if abs(values[-1] - self.v_plus) > self.tail_tol:
            raise TailMismatch(
                f"last value {values[-1]!r} differs from v_plus {self.v_plus!r} "
                f"by more than {self.tail_tol!r}"
            )
        nodes.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_spline", CubicSpline(nodes, values, bc_type="natural"))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(
            x < self.nodes[0],
            self.v_minus,
            np.where(x > self.nodes[-1], self.v_plus, self._spline(x)),
        )
        return out

    def mirrored(self) -> "TabulatedPotential":
        return TabulatedPotential(
            -self.nodes[::-1], self.values[::-1], self.v_plus, self.v_minus, self.tail_tol
        )


@dataclass(frozen=True)
class PotentialModel:
    """A dimensionless potential with declared asymptotes ``v_minus``/``v_plus``."""

    family: Family
    v0: float = 0.0
    width: float = 1.0
    v_minus: float = 0.0
    v_plus: float = 0.0
    table: TabulatedPotential | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        for name in ("v0", "width", "v_minus", "v_plus"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParams(f"{name} must be finite")
        fam = self.family
        if fam in (Family.GAUSSIAN_BARRIER, Family.GAUSSIAN_WELL, Family.SECH2_WELL) and self.v0 < 0:
            raise InvalidParams("v0 must be non-negative; the sign is set by the family")
        if fam is Family.SQUARE_BARRIER and not self.width > 0:
            raise InvalidParams("square barrier width must be positive")
        if fam is Family.TABULATED:
            if self.table is None:
                raise InvalidParams("tabulated model requires a table")
            object.__setattr__(self, "v_minus", float(self.table.v_minus))
            object.__setattr__(self, "v_plus", float(self.table.v_plus))
        elif fam is not Family.STEP and (self.v_minus != 0.0 or self.v_plus != 0.0):
            raise InvalidParams(f"{fam.value} potential decays to zero on both sides")

    @property
    def parity_symmetric(self) -> bool:
        return self.family in SYMMETRIC_FAMILIES

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Points where v(x) jumps; integrator steps never straddle them."""
        if self.family is Family.STEP:
            return (0.0,)
        if self.family is Family.SQUARE_BARRIER:
            return (-self.width / 2, self.width / 2)
        if self.family is Family.TABULATED:
            return (float(self.table.nodes[0]), float(self.table.nodes[-1]))
        return ()

    def evaluate(self, x):
        x_arr = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x_arr)):
            raise InvalidInput("potential evaluated at a non-finite coordinate")
        out = self._eval(x_arr)
        return float(out) if np.ndim(x) == 0 else out

    __call__ = evaluate

    def evaluate_sided(self, x: float, side: int) -> float:
        """Limit of v at ``x`` approached from the right (``side=+1``) or left (``-1``)."""
        if side not in (-1, 1):
            raise InvalidInput("side must be -1 or +1")
        fam = self.family
        if fam is Family.STEP and x == 0.0:
            return self.v_plus if side > 0 else self.v_minus
        if fam is Family.SQUARE_BARRIER and abs(x) == self.width / 2:
            inside = (x < 0) == (side > 0)
            return self.v0 if inside else 0.0
        if fam is Family.TABULATED:
            lo, hi = self.table.nodes[0], self.table.nodes[-1]
            if x == lo and side < 0:
                return self.v_minus
            if x == hi and side > 0:
                return self.v_plus
            if x == lo or x == hi:
                return float(self.table._spline(x))
        return self.evaluate(x)

    def _eval(self, x: np.ndarray) -> np.ndarray:
        fam = self.family
        if fam is Family.FREE:
            return np.zeros_like(x)
        if fam is Family.GAUSSIAN_BARRIER:
            return self.v0 * np.exp(-(x**2))
        if fam is Family.GAUSSIAN_WELL:
            return -self.v0 * np.exp(-(x**2))
        if fam is Family.SECH2_WELL:
            # cosh overflows near |x|~710; the limit is 0 either way
            with np.errstate(over="ignore"):
                return -self.v0 / np.cosh(x) ** 2
        if fam is Family.SQUARE_BARRIER:
            return np.where(np.abs(x) <= self.width / 2, self.v0, 0.0)
        if fam is Family.STEP:
            return np.where(x < 0, self.v_minus, self.v_plus)
        return self.table(x)

    def mirrored(self) -> "PotentialModel":
        """The reflected potential ``x -> v(-x)``."""
        if self.family is Family.STEP:
            return PotentialModel(Family.STEP, v_minus=self.v_plus, v_plus=self.v_minus)
        if self.family is Family.TABULATED:
            return PotentialModel(Family.TABULATED, table=self.table.mirrored())
        return self

    def describe(self) -> dict:
        d = {"family": self.family.value}
        if self.family in (Family.GAUSSIAN_BARRIER, Family.GAUSSIAN_WELL,
                           Family.SECH2_WELL, Family.SQUARE_BARRIER):
            d["v0"] = self.v0
        if self.family is Family.SQUARE_BARRIER:
            d["width"] = self.width
        d["v_minus"] = self.v_minus
        d["v_plus"] = self.v_plus
        return d


def free() -> PotentialModel:
    return PotentialModel(Family.FREE)


def gaussian_barrier(v0: float) -> PotentialModel:
    return PotentialModel(Family.GAUSSIAN_BARRIER, v0=v0)


def gaussian_well(v0: float) -> PotentialModel:
    return PotentialModel(Family.GAUSSIAN_WELL, v0=v0)


def sech2_well(v0: float) -> PotentialModel:
    return PotentialModel(Family.SECH2_WELL, v0=v0)


def square_barrier(v0: float, width: float) -> PotentialModel:
    return PotentialModel(Family.SQUARE_BARRIER, v0=v0, width=width)


def step(v_minus: float, v_plus: float) -> PotentialModel:
    return PotentialModel(Family.STEP, v_minus=v_minus, v_plus=v_plus)


def tabulated(table: TabulatedPotential) -> PotentialModel:
    return PotentialModel(Family.TABULATED, table=table)


def make_model(family, *, v0=0.0, width=1.0, v_minus=0.0, v_plus=0.0, table=None) -> PotentialModel:
    """Build a model from a family name, ignoring parameters the family lacks."""
    fam = Family(family)
    if fam is Family.FREE:
        return free()
    if fam in (Family.GAUSSIAN_BARRIER, Family.GAUSSIAN_WELL, Family.SECH2_WELL):
        return PotentialModel(fam, v0=v0)
    if fam is Family.SQUARE_BARRIER:
        return square_barrier(v0, width)
    if fam is Family.STEP:
        return step(v_minus, v_plus)
    if table is None:
        raise InvalidParams("tabulated family needs a table")
    return tabulated(table)


Source = Union[bytes, str, IO[bytes], IO[str]]


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        data = source
    elif isinstance(source, str):
        return source
    else:
        data = source.read()
        if isinstance(data, str):
            return data
    try:
        return data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise ParseError(f"non-ASCII input: {exc}") from None


def load_tabulated(source: Source) -> TabulatedPotential:
    """Parse the tabulated-potential text format.

    Line 1 is the magic header, line 2 ``v_minus <f> v_plus <f> tail_tol <f>``,
    then one ``x<TAB>v`` row per node.  Later ``#`` lines are comments.
    """
    lines = _read_text(source).splitlines()
    if not lines or lines[0].strip() != TABLE_MAGIC:
        raise ParseError(f"expected header {TABLE_MAGIC!r}", 1)
    if len(lines) < 2:
        raise ParseError("missing asymptote line", 2)
    tokens = lines[1].split()
    if len(tokens) != 6 or tokens[0::2] != ["v_minus", "v_plus", "tail_tol"]:
        raise ParseError("expected 'v_minus <float> v_plus <float> tail_tol <float>'", 2)
    try:
        v_minus, v_plus, tail_tol = (float(t) for t in tokens[1::2])
    except ValueError as exc:
        raise ParseError(str(exc), 2) from None

    xs, vs = [], []
    for lineno, line in enumerate(lines[2:], start=3):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split("\t") if "\t" in stripped else stripped.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'x<TAB>v', got {line!r}", lineno)
        try:
            x, v = float(parts[0]), float(parts[1])
        except ValueError:
            raise ParseError(f"malformed number in {line!r}", lineno) from None
        if not (math.isfinite(x) and math.isfinite(v)):
            raise ParseError("non-finite value", lineno)
        if xs and x <= xs[-1]:
            raise InvalidGrid(f"x={x!r} does not increase past {xs[-1]!r}", lineno)
        xs.append(x)
        vs.append(v)
    if len(xs) < 4:
        raise ParseError(f"need at least 4 nodes, got {len(xs)}")
    return TabulatedPotential(np.array(xs), np.array(vs), v_minus, v_plus, tail_tol)


def load_tabulated_file(path) -> TabulatedPotential:
    with open(path, "rb") as fh:
        return load_tabulated(fh)


def dump_tabulated(table: TabulatedPotential, out: IO[str] | None = None) -> str:
    """Serialise ``table``; ``repr`` floats make the round trip bit-exact."""
    buf = io.StringIO()
    buf.write(TABLE_MAGIC + "\n")
    head = (float(table.v_minus), float(table.v_plus), float(table.tail_tol))
    buf.write("v_minus {!r} v_plus {!r} tail_tol {!r}\n".format(*head))
    for x, v in zip(table.nodes.tolist(), table.values.tolist()):
        buf.write(f"{x!r}\t{v!r}\n")
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text

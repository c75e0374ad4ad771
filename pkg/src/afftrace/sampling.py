"""Grids, weighted quadrature, and sampled fields.

The boundary is discretized by a uniform grid on the box [-R, R)^d with
a power-of-two point count per axis, so the discrete Fourier transform
of a sampled field approximates the continuum transform. The half-line
carries the weight t^a; its quadrature rule treats the weight exactly on
the panel touching zero (Gauss-Jacobi) and folds it into the integrand
on the remaining panels (Gauss-Legendre), with either geometrically
graded or uniform panel layout.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import AffTraceError, ParameterError, ResolutionError, UsageError

PHYSICAL = "physical"
FREQUENCY = "frequency"

_SIDES = (PHYSICAL, FREQUENCY)

GEOMETRIC = "geometric"
GAUSS_COMPOSITE = "gauss-composite"

_GRADINGS = (GEOMETRIC, GAUSS_COMPOSITE)


class EvaluationError(AffTraceError, ValueError):
    """A sampled function produced a non-finite value.

    The message names the first offending node.
    """


@dataclass(frozen=True)
class Grid:
    """Uniform boundary grid on the box [-R, R)^d.

    Attributes
    ----------
    d : int
        Boundary dimension.
    halfExtent : float
        Half the box side R; samples cover [-R, R) per axis.
    pointsPerAxis : int
        Node count N per axis, a power of two.
    spacing : float
        Node spacing 2R/N, filled in automatically.
    """

    d: int
    halfExtent: float
    pointsPerAxis: int
    spacing: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "spacing", 2.0 * self.halfExtent / self.pointsPerAxis)

    @property
    def freqSpacing(self):
        """Frequency-side node spacing 1/(2R)."""
        return 1.0 / (2.0 * self.halfExtent)

    @property
    def shape(self):
        """Array shape of a field on this grid."""
        return (self.pointsPerAxis,) * self.d

    @property
    def cellVolume(self):
        """Volume of one physical-side cell."""
        return self.spacing**self.d

    @property
    def freqCellVolume(self):
        """Volume of one frequency-side cell."""
        return self.freqSpacing**self.d

    def axis(self):
        """Physical nodes along one axis, x_j = -R + j dx."""
        n = self.pointsPerAxis
        return (np.arange(n) - n // 2) * self.spacing

    def freq_axis(self):
        """Frequency nodes along one axis, centered with the zero mode at N/2."""
        n = self.pointsPerAxis
        return (np.arange(n) - n // 2) * self.freqSpacing

    def coords(self):
        """Tuple of d coordinate arrays broadcast over the grid."""
        ax = self.axis()
        return np.meshgrid(*([ax] * self.d), indexing="ij")

    def freq_coords(self):
        """Tuple of d frequency coordinate arrays broadcast over the grid."""
        ax = self.freq_axis()
        return np.meshgrid(*([ax] * self.d), indexing="ij")

    def radii(self):
        """Array of |x| over the grid."""
        c = self.coords()
        return np.sqrt(sum(np.square(x) for x in c))

    def freq_radii(self):
        """Array of |xi| over the frequency grid."""
        c = self.freq_coords()
        return np.sqrt(sum(np.square(x) for x in c))

    @property
    def zeroIndex(self):
        """Index of the zero node (both sides), N/2 along each axis."""
        return (self.pointsPerAxis // 2,) * self.d


def make_grid(d, halfExtent, pointsPerAxis):
    """Construct a boundary grid.

    Parameters
    ----------
    d : int
        Boundary dimension, one of 1, 2, 3.
    halfExtent : float
        Positive half-extent R.
    pointsPerAxis : int
        Power of two, at least 8.

    Returns
    -------
    Grid

    Raises
    ------
    ParameterError
        On an invalid dimension, extent, or point count.
    """
    if d not in (1, 2, 3):
        raise ParameterError(f"grid dimension must be 1, 2 or 3 (got {d})")
    halfExtent = float(halfExtent)
    if not halfExtent > 0.0:
        raise ParameterError(f"halfExtent must be positive (got {halfExtent})")
    n = pointsPerAxis
    if int(n) != n or n < 8 or (n & (n - 1)) != 0:
        raise ParameterError(f"pointsPerAxis must be a power of two >= 8 (got {n})")
    return Grid(d=int(d), halfExtent=halfExtent, pointsPerAxis=int(n))


class Field:
    """A complex-valued sampled function on a boundary grid.

    The sample array is frozen after construction; derive new fields
    with :meth:`with_values` instead of mutating in place.

    Attributes
    ----------
    grid : Grid
    values : numpy.ndarray
        Complex array of shape ``grid.shape``, read-only.
    side : str
        Either ``"physical"`` or ``"frequency"``.
    """

    __slots__ = ("grid", "values", "side")

    def __init__(self, grid, values, side=PHYSICAL):
        if side not in _SIDES:
            raise UsageError(f"side must be one of {_SIDES} (got {side!r})")
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != grid.shape:
            raise UsageError(
                f"value shape {values.shape} does not match the grid shape {grid.shape}"
            )
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "side", side)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    def with_values(self, values, side=None):
        """A new field on the same grid with different samples."""
        return Field(self.grid, values, self.side if side is None else side)

    def is_physical(self):
        return self.side == PHYSICAL

    def is_frequency(self):
        return self.side == FREQUENCY


def sample(fn, grid):
    """Sample a boundary function on a grid.

    Parameters
    ----------
    fn : callable
        Receives d coordinate arrays (broadcast over the grid) and
        returns the sampled values.
    grid : Grid

    Returns
    -------
    Field
        Physical-side field of pointwise samples.

    Raises
    ------
    EvaluationError
        Naming the first offending node if any sample is non-finite.
    """
    coords = grid.coords()
    values = np.asarray(fn(*coords), dtype=np.complex128)
    if values.shape != grid.shape:
        values = np.broadcast_to(values, grid.shape).copy()
    bad = ~np.isfinite(values)
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        node = tuple(float(coords[k][idx]) for k in range(grid.d))
        raise EvaluationError(f"non-finite sample at node {node}")
    return Field(grid, values, PHYSICAL)


@dataclass(frozen=True)
class TGrid:
    """Quadrature rule for the weighted half-line integral.

    Approximates ``int_0^Tmax phi(t) t^a dt`` as ``sum w_k phi(t_k)``;
    the weight t^a is folded into the weights, so the rule is applied to
    the bare integrand phi.

    Attributes
    ----------
    a : float
        Weight exponent, a >= 0.
    nodes : numpy.ndarray
        Strictly increasing nodes in (0, Tmax].
    weights : numpy.ndarray
        Positive weights.
    tMax : float
        Truncation point of the half-line.
    grading : str
        ``"geometric"`` (panels accumulate at zero) or
        ``"gauss-composite"`` (uniform panels).
    """

    a: float
    nodes: np.ndarray
    weights: np.ndarray
    tMax: float
    grading: str

    def apply(self, values):
        """Quadrature sum for sampled integrand values (last axis = nodes)."""
        values = np.asarray(values)
        return values @ self.weights

    @property
    def count(self):
        return self.nodes.size


def _panel_edges(t_max, panels, grading):
    if grading == GEOMETRIC:
        # edges T r^P < ... < T r < T with ratio 1/2
        ratio = 0.5
        edges = [t_max * ratio**k for k in range(panels, -1, -1)]
        edges[0] = 0.0
        return edges
    # uniform layout
    return [t_max * k / panels for k in range(panels + 1)]


def make_tgrid(a, tMax, count, grading=GEOMETRIC):
    """Build the weighted half-line quadrature rule.

    The panel touching zero uses a Gauss-Jacobi rule that integrates the
    weight t^a exactly; the remaining panels use Gauss-Legendre with the
    weight evaluated at the nodes. Under the geometric grading the
    panels shrink toward zero by factors of two, which also serves
    integrands decaying at infinity once Tmax is large enough.

    Parameters
    ----------
    a : float
        Weight exponent, a >= 0.
    tMax : float
        Positive truncation point.
    count : int
        Total node budget, at least 8.
    grading : str
        ``"geometric"`` or ``"gauss-composite"``.

    Returns
    -------
    TGrid

    Raises
    ------
    ParameterError
        On invalid arguments.
    ResolutionError
        If the constructed rule fails its own unit-integrand check
        (cannot happen for sane inputs; the check guards regressions).
    """
    a = float(a)
    if a < 0.0:
        raise ParameterError(f"weight exponent a must be nonnegative (got {a})")
    tMax = float(tMax)
    if not tMax > 0.0:
        raise ParameterError(f"tMax must be positive (got {tMax})")
    if int(count) != count or count < 8:
        raise ParameterError(f"node count must be an integer >= 8 (got {count})")
    if grading not in _GRADINGS:
        raise ParameterError(f"grading must be one of {_GRADINGS} (got {grading!r})")
    count = int(count)

    per_panel = 8
    panels = max(2, count // per_panel)
    base = count // panels
    sizes = [base] * panels
    for k in range(count - base * panels):
        sizes[k % panels] += 1
    edges = _panel_edges(tMax, panels, grading)

    nodes = []
    weights = []
    for k in range(panels):
        lo, hi = edges[k], edges[k + 1]
        m = sizes[k]
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        if lo == 0.0:
            # exact t^a weight on the panel containing zero:
            # t = half (x + 1), dt t^a -> half^{1+a} (1+x)^a dx
            x, w = roots_jacobi(m, 0.0, a)
            t = half * (x + 1.0)
            wt = half ** (1.0 + a) * w
        else:
            x, w = roots_legendre(m)
            t = mid + half * x
            wt = half * w * t**a
        nodes.append(t)
        weights.append(wt)
    nodes = np.concatenate(nodes)
    weights = np.concatenate(weights)
    order = np.argsort(nodes)
    nodes = nodes[order]
    weights = weights[order]
    nodes.flags.writeable = False
    weights.flags.writeable = False

    rule = TGrid(a=a, nodes=nodes, weights=weights, tMax=tMax, grading=grading)
    exact = tMax ** (a + 1.0) / (a + 1.0)
    got = float(np.sum(weights))
    if abs(got - exact) > 1e-8 * exact:
        raise ResolutionError(
            f"half-line rule failed the unit-integrand check: got {got}, need {exact}"
        )
    return rule


class HalfSpaceField:
    """A stack of boundary fields over the half-line quadrature nodes.

    Represents a sampled function on the half-space, one boundary slice
    per quadrature node, with the node weights carrying the measure
    t^a dt. The samples are stored as one read-only complex array of
    shape ``(K,) + grid.shape``.

    Attributes
    ----------
    tgrid : TGrid
    grid : Grid
    data : numpy.ndarray
        Complex array of shape ``(K,) + grid.shape``, read-only.
    side : str
        Side shared by all slices.
    """

    __slots__ = ("tgrid", "grid", "data", "side")

    def __init__(self, tgrid, grid, data, side=PHYSICAL):
        if side not in _SIDES:
            raise UsageError(f"side must be one of {_SIDES} (got {side!r})")
        data = np.asarray(data, dtype=np.complex128)
        expected = (tgrid.count,) + grid.shape
        if data.shape != expected:
            raise UsageError(f"stack shape {data.shape} does not match {expected}")
        data = data.copy()
        data.flags.writeable = False
        object.__setattr__(self, "tgrid", tgrid)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "side", side)

    def __setattr__(self, name, value):
        raise AttributeError("HalfSpaceField is immutable")

    @classmethod
    def from_slices(cls, tgrid, fields):
        """Assemble a stack from one field per quadrature node."""
        fields = list(fields)
        if len(fields) != tgrid.count:
            raise UsageError(
                f"need {tgrid.count} slices, got {len(fields)}"
            )
        grid = fields[0].grid
        side = fields[0].side
        for f in fields[1:]:
            if f.grid != grid:
                raise UsageError("all slices must share one grid")
            if f.side != side:
                raise UsageError("all slices must share one side")
        data = np.stack([f.values for f in fields])
        return cls(tgrid, grid, data, side)

    def slice(self, k):
        """The boundary field at node k."""
        return Field(self.grid, self.data[k], self.side)

    @property
    def slices(self):
        """All boundary slices as a list of fields."""
        return [self.slice(k) for k in range(self.tgrid.count)]


def export_field_csv(field, destination):
    """Write a field snapshot as CSV with header ``x1,...,xd,re,im``.

    Parameters
    ----------
    field : Field
    destination : str or file-like
        Path or open text file.

    Returns
    -------
    int
        Number of data rows written.
    """
    grid = field.grid
    coords = grid.coords() if field.is_physical() else grid.freq_coords()
    cols = [c.ravel() for c in coords]
    re = field.values.real.ravel()
    im = field.values.imag.ravel()
    header = ",".join(f"x{k + 1}" for k in range(grid.d)) + ",re,im"

    def write(fh):
        fh.write(header + "\n")
        for row in range(re.size):
            parts = [repr(float(c[row])) for c in cols]
            parts.append(repr(float(re[row])))
            parts.append(repr(float(im[row])))
            fh.write(",".join(parts) + "\n")
        return re.size

    if isinstance(destination, (str, bytes)):
        with open(destination, "w", encoding="ascii") as fh:
            return write(fh)
    if isinstance(destination, io.TextIOBase) or hasattr(destination, "write"):
        return write(destination)
    raise UsageError(f"destination must be a path or a text file (got {type(destination)})")

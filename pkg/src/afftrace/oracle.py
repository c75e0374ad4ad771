"""Slow, independent brute-force evaluators used by the test suite.

Everything here recomputes quantities the production modules obtain
spectrally, by direct summation in physical space or by dense
quadrature, sharing no code with the production paths. The point is
cross-validation: each oracle is simple enough to audit by eye, and
deliberately pays whatever it costs in running time.

The convolution kernels carry an integrable singularity on the
diagonal; the singular cell is handled by integrating the kernel
analytically over the disk of the same area as one grid cell,

    int_{|z| < r_eq} |z|^{s-d} dz = d omega_d r_eq^s / s,
    r_eq = (cell volume / omega_d)^{1/d},

a bounded, documented bias far below the comparison tolerances used
with these oracles.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaincc
from scipy.special import gamma as _scipy_gamma
from scipy.special import roots_legendre

from .constants import kappa, omega, sphere_area
from .errors import DomainError, ResolutionError, UsageError
from .sampling import Field

__all__ = [
    "dense_norm",
    "double_integral",
    "riesz_convolve_direct",
]

_MAX_AXIS = 64
_CHUNK = 512


def _check_small(field):
    if not isinstance(field, Field):
        raise UsageError("the oracle operates on boundary fields")
    if not field.is_physical():
        raise UsageError("the oracle operates on physical-side fields")
    n = field.grid.pointsPerAxis
    if n > _MAX_AXIS:
        raise ResolutionError(
            f"direct double sums are budgeted for at most {_MAX_AXIS} points per "
            f"axis (got {n})"
        )


_NEAR_RINGS = 4


def _near_field_averages(grid, power):
    """Cell-averaged kernel values for small lattice offsets.

    The midpoint value of ``|x - y|^power`` misrepresents the kernel
    where its curvature is large — the cells nearest the singularity —
    at the several-percent level. For every offset within a few rings
    the cell average ``h^{-d} int_cell |z0 + u|^power du`` is computed
    by tensor Gauss quadrature instead; beyond the rings the midpoint
    value is accurate to the comparison tolerances.
    """
    h = grid.spacing
    nodes, weights = roots_legendre(12)
    half = 0.5 * h
    pts = half * nodes
    wts = 0.5 * weights
    averages = {}
    rng = range(-_NEAR_RINGS, _NEAR_RINGS + 1)
    if grid.d == 1:
        for di in rng:
            if di == 0:
                continue
            z = di * h + pts
            averages[(di,)] = float(wts @ np.abs(z) ** power)
    elif grid.d == 2:
        xx = pts[:, None]
        yy = pts[None, :]
        for di in rng:
            for dj in rng:
                if di == 0 and dj == 0:
                    continue
                rad = np.sqrt((di * h + xx) ** 2 + (dj * h + yy) ** 2)
                averages[(di, dj)] = float(wts @ rad**power @ wts)
    else:
        for di in rng:
            for dj in rng:
                for dk in rng:
                    if di == dj == dk == 0:
                        continue
                    rad = np.sqrt(
                        (di * h + pts[:, None, None]) ** 2
                        + (dj * h + pts[None, :, None]) ** 2
                        + (dk * h + pts[None, None, :]) ** 2
                    )
                    averages[(di, dj, dk)] = float(
                        np.einsum("i,j,k,ijk->", wts, wts, wts, rad**power)
                    )
    return averages


def _kernel_rows(grid, alpha, rows, points, indices, near):
    """Kernel block |x_row - y|^(2 alpha - d), cell-averaged near the
    diagonal and on it (equal-area disk for the singular cell)."""
    d = grid.d
    power = 2.0 * alpha - d
    sq = np.zeros((rows.stop - rows.start, points[0].size))
    for axis in range(d):
        diff = points[axis][rows, None] - points[axis][None, :]
        sq += diff * diff
    block = np.zeros_like(sq)
    off = sq > 0.0
    block[off] = sq[off] ** (0.5 * power)
    cell = grid.cellVolume
    r_eq = (cell / omega(d)) ** (1.0 / d)
    s = 2.0 * alpha
    disk = d * omega(d) * r_eq**s / s
    for local, row in enumerate(range(rows.start, rows.stop)):
        base = indices[row]
        for offset, value in near.items():
            target = tuple(b + o for b, o in zip(base, offset))
            if all(0 <= t < grid.pointsPerAxis for t in target):
                col = 0
                for t in target:
                    col = col * grid.pointsPerAxis + t
                block[local, col] = value
        block[local, row] = disk / cell
    return block


def riesz_convolve_direct(f, alpha):
    """Riesz potential by direct double summation.

    Evaluates ``kappa(d, alpha)^{-1} int f(y) |x - y|^{2 alpha - d} dy``
    on the sampling lattice, cell by cell, with the analytic equal-area
    disk value on the singular diagonal. The production path computes
    the same potential spectrally (the fractional Laplacian at order
    ``-2 alpha`` with the zero mode excluded); for rapidly decaying
    zero-mean data the two agree at the periodization-error level.

    Parameters
    ----------
    f : Field
        Physical-side field on at most 64 points per axis.
    alpha : float
        Half the potential order, 0 < alpha < d/2.

    Returns
    -------
    Field
        Physical-side field holding the potential.

    Raises
    ------
    ResolutionError
        If the grid exceeds the direct-sum budget.
    DomainError
        If ``alpha`` lies outside (0, d/2).
    """
    _check_small(f)
    grid = f.grid
    alpha = float(alpha)
    norm = kappa(grid.d, alpha)
    points = tuple(c.ravel() for c in grid.coords())
    indices = list(np.ndindex(grid.shape))
    near = _near_field_averages(grid, 2.0 * alpha - grid.d)
    values = f.values.ravel()
    out = np.empty(values.size, dtype=np.complex128)
    for start in range(0, values.size, _CHUNK):
        rows = slice(start, min(start + _CHUNK, values.size))
        block = _kernel_rows(grid, alpha, rows, points, indices, near)
        out[rows] = block @ values
    out *= grid.cellVolume / norm
    return Field(grid, out.reshape(grid.shape), "physical")


def double_integral(f, g, alpha):
    """Brute-force pairing ``int int f(x) conj(g(y)) |x-y|^{2 alpha - d}``.

    Both fields live on the same grid; the kernel's singular diagonal is
    handled by the equal-area-disk cell average. The real part of the
    discrete sum is returned — for ``f = g`` the sum is a Hermitian
    quadratic form with a real symmetric kernel, hence exactly real.

    Parameters
    ----------
    f, g : Field
        Physical-side fields on one shared grid, at most 64 points per
        axis.
    alpha : float
        Half the kernel order, 0 < alpha < d/2.

    Returns
    -------
    float

    Raises
    ------
    ResolutionError, DomainError
        As for :func:`riesz_convolve_direct`.
    UsageError
        If the fields live on different grids.
    """
    _check_small(f)
    _check_small(g)
    if f.grid is not g.grid and f.grid != g.grid:
        raise UsageError("both fields must share one grid")
    grid = f.grid
    alpha = float(alpha)
    kappa(grid.d, alpha)  # domain check
    points = tuple(c.ravel() for c in grid.coords())
    indices = list(np.ndindex(grid.shape))
    near = _near_field_averages(grid, 2.0 * alpha - grid.d)
    fv = f.values.ravel()
    gv = np.conj(g.values.ravel())
    total = 0.0 + 0.0j
    for start in range(0, fv.size, _CHUNK):
        rows = slice(start, min(start + _CHUNK, fv.size))
        block = _kernel_rows(grid, alpha, rows, points, indices, near)
        total += np.sum(fv[rows] * (block @ gv))
    total *= grid.cellVolume**2
    return float(total.real)


def _panel_quadrature(fn, edges, order):
    nodes, weights = roots_legendre(order)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        t = mid + half * nodes
        total += half * float(weights @ np.asarray(fn(t), dtype=np.float64))
    return total


def _weight_callable(weight):
    if weight is None:
        return lambda t: np.ones_like(t), 0.0
    if callable(weight):
        return weight, None
    if isinstance(weight, tuple) and len(weight) == 2 and weight[0] == "power":
        s = float(weight[1])
        return lambda t: t**s, s
    raise UsageError(
        "weight must be None, a callable, or ('power', exponent) "
        f"(got {weight!r})"
    )


def dense_norm(fn, region, weight=None, r=1.0, tail=None):
    """High-node-count quadrature of ``(int |fn|^r weight)^(1/r)``.

    Regions
    -------
    ``("interval", a, b)``
        One-dimensional integral over [a, b].
    ``("square", a, b)``
        Tensor-product integral over [a, b]^2; ``fn`` receives two
        coordinate arrays.
    ``("halfline", cut)``
        Integral over (0, infinity), truncated at ``cut``; requires a
        tail bound.
    ``("plane-radial", d, cut)``
        Integral of a radial profile over R^d via the surface-measure
        reduction, truncated at radius ``cut``; requires a tail bound.

    Tail bounds
    -----------
    The unbounded regions refuse to integrate without an analytic decay
    model for ``|fn|`` beyond the cut: ``("power", C, beta)`` for
    ``|fn(t)| ~ C t^(-beta)``, or ``("exp", C, rate)`` for
    ``|fn(t)| ~ C exp(-rate t)``. The modeled tail integral (with the
    region's measure and a power weight folded in) is added to the
    truncated value; a tail that fails to decay integrably raises.

    Parameters
    ----------
    fn : callable
        Integrand, evaluated on coordinate arrays.
    region : tuple
        One of the shapes above.
    weight : None, callable, or ("power", s)
        Weight folded into the integrand. Unbounded regions accept only
        None or a power weight — an arbitrary callable admits no
        analytic tail bound.
    r : float
        Norm exponent, at least 1 (the returned value is the r-th root
        of the integral).
    tail : tuple, optional
        Decay model beyond the cut, required for unbounded regions.

    Returns
    -------
    float
    """
    r = float(r)
    if r < 1.0:
        raise UsageError(f"norm exponent must be at least 1 (got {r})")
    wfun, wexp = _weight_callable(weight)
    if not isinstance(region, tuple) or not region:
        raise UsageError(f"region must be a shape tuple (got {region!r})")
    kind = region[0]

    if kind == "interval":
        _, a, b = region
        if tail is not None:
            raise UsageError("bounded regions take no tail bound")
        value = _panel_quadrature(
            lambda t: np.abs(fn(t)) ** r * wfun(t), np.linspace(a, b, 129), 20
        )
        return value ** (1.0 / r)

    if kind == "square":
        _, a, b = region
        if tail is not None:
            raise UsageError("bounded regions take no tail bound")
        nodes, weights = roots_legendre(20)
        edges = np.linspace(a, b, 21)
        pts = []
        wts = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
            pts.append(mid + half * nodes)
            wts.append(half * weights)
        pts = np.concatenate(pts)
        wts = np.concatenate(wts)
        xx, yy = np.meshgrid(pts, pts, indexing="ij")
        integrand = np.abs(fn(xx, yy)) ** r * wfun(xx)
        value = float(wts @ integrand @ wts)
        return value ** (1.0 / r)

    if kind in ("halfline", "plane-radial"):
        if kind == "halfline":
            cut = float(region[1])
            d = 1
            surface = 1.0
            radial_extra = 0.0
        else:
            d = int(region[1])
            cut = float(region[2])
            surface = sphere_area(d)
            radial_extra = d - 1.0
        if tail is None:
            raise UsageError(
                "tail bound unavailable: integrating over an unbounded region "
                "requires a ('power', C, beta) or ('exp', C, rate) decay model"
            )
        if wexp is None:
            raise UsageError(
                "tail bound unavailable: an arbitrary weight callable admits "
                "no analytic tail; pass ('power', exponent) instead"
            )

        def integrand(t):
            return np.abs(fn(t)) ** r * wfun(t) * t**radial_extra

        edges = np.geomspace(max(cut * 1e-8, 1e-12), cut, 257)
        edges[0] = 0.0
        value = surface * _panel_quadrature(integrand, edges, 20)

        mode = tail[0]
        if mode == "power":
            _, coef, beta = tail
            decay = r * float(beta) - wexp - radial_extra - 1.0
            if decay <= 0.0:
                raise DomainError(
                    "tail bound diverges: the modeled decay does not make the "
                    "tail integrable"
                )
            tail_value = surface * float(coef) ** r * cut ** (-decay) / decay
        elif mode == "exp":
            _, coef, rate = tail
            lam = r * float(rate)
            if lam <= 0.0:
                raise DomainError("tail bound diverges: nonpositive decay rate")
            s = wexp + radial_extra
            # int_cut^inf t^s exp(-lam t) dt via the upper incomplete gamma
            tail_value = (
                surface
                * float(coef) ** r
                * lam ** (-(s + 1.0))
                * _scipy_gamma(s + 1.0)
                * float(gammaincc(s + 1.0, lam * cut))
            )
        else:
            raise UsageError(f"unknown tail model {mode!r}")
        return (value + tail_value) ** (1.0 / r)

    raise UsageError(f"unknown region kind {kind!r}")

"""Affine energy machinery on the weighted half-space.

This module turns a half-space stack into gradient data and reduces it
to the scalar quantities the trace bounds are built from:

* quadrature rules on the sphere of boundary directions;
* gradient stacks — the field together with its per-slice spatial
  gradient and its derivative across slices, with the provenance of the
  derivatives recorded (spectral multipliers or closed forms);
* directional derivative norms ``||<grad F, xi>||_{L^p(sigma)}``;
* the affine energy: the normalized ``(1-n)``-power mean of the
  directional norms over the sphere, invariant under volume-preserving
  linear maps of the boundary variables where the isotropic gradient
  norm is not;
* the weighted norm of the derivative across slices, and plain weighted
  ``L^r`` norms of stacks;
* the arithmetic–geometric split of the gradient energy that converts
  a product of the two energy factors into the full gradient integral.

The weighted measure is ``t^a dt dx`` with ``a = 2 alpha - 1`` carried
by the half-line quadrature rule; the split check alone uses the weight
``t^{1 - 2 alpha}`` (see :func:`amgm_split_check`).
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .constants import affine_normalizer, omega
from .errors import DegenerateEnergyError, ParameterError, UsageError
from .sampling import HalfSpaceField, TGrid

__all__ = [
    "ANALYTIC",
    "SPECTRAL",
    "GradientStack",
    "SphereRule",
    "affine_energy",
    "amgm_split_check",
    "directional_norm",
    "dt_norm",
    "gradient_stack",
    "make_sphere_rule",
    "weighted_lp_norm",
]

SPECTRAL = "spectral"
ANALYTIC = "analytic"

_PROVENANCES = (SPECTRAL, ANALYTIC)

#: Protocol methods an analytic family member must provide to be turned
#: into a gradient stack: each takes a height and a boundary grid and
#: returns sampled values (`slice_values`), the spatial gradient as an
#: array with a leading component axis (`slice_spatial_gradient`), and
#: the height derivative (`slice_time_derivative`).
_ANALYTIC_PROTOCOL = (
    "slice_values",
    "slice_spatial_gradient",
    "slice_time_derivative",
)


class SphereRule:
    """Quadrature rule on the unit sphere of boundary directions.

    Attributes
    ----------
    d : int
        Dimension of the ambient boundary space; directions live on
        its unit sphere.
    directions : numpy.ndarray
        Array of shape (M, d), one unit vector per row, read-only.
    weights : numpy.ndarray
        Positive weights of shape (M,), read-only; they sum to the
        total surface measure d * omega_d.
    """

    __slots__ = ("d", "directions", "weights")

    def __init__(self, d, directions, weights):
        d = int(d)
        directions = np.array(directions, dtype=np.float64)
        weights = np.array(weights, dtype=np.float64)
        if directions.ndim != 2 or directions.shape[1] != d:
            raise ParameterError(
                f"directions must have shape (M, {d}) (got {directions.shape})"
            )
        if weights.shape != (directions.shape[0],):
            raise ParameterError("one weight per direction is required")
        radii = np.sqrt(np.sum(directions**2, axis=1))
        worst = float(np.max(np.abs(radii - 1.0))) if radii.size else 0.0
        if worst > 1e-14:
            raise ParameterError(
                f"directions must be unit vectors to 1e-14 (worst defect {worst:.2e})"
            )
        if np.any(weights <= 0.0):
            raise ParameterError("weights must be positive")
        surface = d * omega(d)
        total = float(np.sum(weights))
        if abs(total - surface) > 1e-12 * max(1.0, surface):
            raise ParameterError(
                "weights must sum to the sphere surface measure "
                f"{surface!r} (got {total!r})"
            )
        directions.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "directions", directions)
        object.__setattr__(self, "weights", weights)

    def __setattr__(self, name, value):
        raise AttributeError("SphereRule is immutable")

    @property
    def count(self):
        """Number of directions."""
        return self.directions.shape[0]


def make_sphere_rule(d, count=None):
    """Build the default direction rule for a boundary dimension.

    For ``d = 2`` this is the uniform angle lattice (trapezoid rule on
    the circle), which integrates ``cos(k theta)`` exactly for every
    ``0 < k < count``; the default count is 512. For ``d = 3`` it is an
    octahedrally symmetric rule with 6 or 26 points (the 26-point rule
    is exact through spherical-polynomial degree 7); the default is 26.

    Parameters
    ----------
    d : int
        Boundary dimension, 2 or 3.
    count : int, optional
        Number of directions. For ``d = 2`` any count >= 4; for
        ``d = 3`` one of 6 or 26.

    Returns
    -------
    SphereRule
    """
    if int(d) != d or d not in (2, 3):
        raise ParameterError(f"sphere rules are provided for d in (2, 3) (got {d})")
    d = int(d)
    if d == 2:
        count = 512 if count is None else int(count)
        if count < 4:
            raise ParameterError(f"circle rule needs at least 4 directions (got {count})")
        theta = 2.0 * np.pi * np.arange(count) / count
        directions = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        weights = np.full(count, 2.0 * np.pi / count)
        return SphereRule(2, directions, weights)
    count = 26 if count is None else int(count)
    if count == 6:
        directions = np.concatenate([np.eye(3), -np.eye(3)])
        weights = np.full(6, 4.0 * np.pi / 6.0)
        return SphereRule(3, directions, weights)
    if count == 26:
        vertices = np.concatenate([np.eye(3), -np.eye(3)])
        edges = []
        for i in range(3):
            for j in range(i + 1, 3):
                for si in (1.0, -1.0):
                    for sj in (1.0, -1.0):
                        v = np.zeros(3)
                        v[i] = si
                        v[j] = sj
                        edges.append(v / math.sqrt(2.0))
        corners = (
            np.array([[sx, sy, sz] for sx in (1, -1) for sy in (1, -1) for sz in (1, -1)])
            / math.sqrt(3.0)
        )
        directions = np.concatenate([vertices, np.array(edges), corners])
        weights = np.concatenate(
            [
                np.full(6, 1.0 / 21.0),
                np.full(12, 4.0 / 105.0),
                np.full(8, 27.0 / 840.0),
            ]
        ) * (4.0 * np.pi)
        return SphereRule(3, directions, weights)
    raise ParameterError(f"octahedral rules exist for 6 or 26 points (got {count})")


class GradientStack:
    """A half-space stack together with its first derivatives.

    Attributes
    ----------
    field : HalfSpaceField
        The stack the derivatives belong to (physical side).
    spatial : numpy.ndarray
        Complex array of shape ``(d, K) + grid.shape``: the gradient in
        the boundary variables, one component per leading index,
        read-only.
    dt : numpy.ndarray
        Complex array of shape ``(K,) + grid.shape``: the derivative
        across slices, read-only.
    provenance : str
        ``"spectral"`` (derivatives from Fourier multipliers) or
        ``"analytic"`` (closed-form family derivatives).
    dtMethod : str
        How the slice derivative was obtained: ``"poisson"`` (the
        harmonic-extension multiplier), ``"difference"`` (finite
        differences across nodes, validation only), ``"custom"``
        (caller-supplied multiplier), or ``"analytic"``.
    """

    __slots__ = ("field", "spatial", "dt", "provenance", "dtMethod")

    def __init__(self, field, spatial, dt, provenance, dtMethod):
        if not isinstance(field, HalfSpaceField):
            raise UsageError("field must be a HalfSpaceField")
        if provenance not in _PROVENANCES:
            raise UsageError(f"provenance must be one of {_PROVENANCES} (got {provenance!r})")
        spatial = np.asarray(spatial, dtype=np.complex128).copy()
        dt = np.asarray(dt, dtype=np.complex128).copy()
        expected = (field.tgrid.count,) + field.grid.shape
        if spatial.shape != (field.grid.d,) + expected:
            raise UsageError(
                f"spatial gradient shape {spatial.shape} does not match "
                f"{(field.grid.d,) + expected}"
            )
        if dt.shape != expected:
            raise UsageError(f"slice-derivative shape {dt.shape} does not match {expected}")
        spatial.flags.writeable = False
        dt.flags.writeable = False
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "spatial", spatial)
        object.__setattr__(self, "dt", dt)
        object.__setattr__(self, "provenance", provenance)
        object.__setattr__(self, "dtMethod", str(dtMethod))

    def __setattr__(self, name, value):
        raise AttributeError("GradientStack is immutable")

    @property
    def grid(self):
        return self.field.grid

    @property
    def tgrid(self):
        return self.field.tgrid


def _stack_dft(data, grid):
    axes = tuple(range(1, 1 + grid.d))
    v = np.fft.ifftshift(data, axes=axes)
    v = np.fft.fftn(v, axes=axes)
    v = np.fft.fftshift(v, axes=axes)
    return v * grid.cellVolume


def _stack_idft(data, grid):
    axes = tuple(range(1, 1 + grid.d))
    v = np.fft.ifftshift(data, axes=axes)
    v = np.fft.ifftn(v, axes=axes)
    v = np.fft.fftshift(v, axes=axes)
    return v / grid.cellVolume


def gradient_stack(source, *, grid=None, tgrid=None, timeDerivative="poisson"):
    """Attach first derivatives to a half-space stack.

    Two kinds of input are accepted. A physical-side
    :class:`~afftrace.sampling.HalfSpaceField` yields a spectral stack:
    the spatial gradient of every slice is computed through the Fourier
    multiplier ``2 pi i xi_i``, and the derivative across slices through
    the choice of ``timeDerivative``:

    * ``"poisson"`` (default) — the harmonic-extension law: each slice
      of such a stack has spectrum ``exp(-2 pi t rho)`` times the
      boundary spectrum, so its height derivative is the slice's own
      spectrum times ``-2 pi rho``. Only correct for stacks built by
      the Poisson extension.
    * ``"difference"`` — centered finite differences across the slice
      nodes (one-sided at the ends). Provided for validation; its
      accuracy is limited by the node spacing.
    * a callable ``m(t, rho)`` — a custom spectral multiplier giving
      the height derivative of the slice at height ``t`` as ``m`` times
      the slice spectrum, evaluated on the frequency-radius array.

    Alternatively an analytic family member — any object providing the
    methods ``slice_values(t, grid)``, ``slice_spatial_gradient(t,
    grid)`` and ``slice_time_derivative(t, grid)`` — is sampled on an
    explicitly supplied ``grid`` and ``tgrid``, and the stack carries
    closed-form derivatives (provenance ``"analytic"``).

    Returns
    -------
    GradientStack
    """
    if isinstance(source, HalfSpaceField):
        if grid is not None or tgrid is not None:
            raise UsageError("grid and tgrid are taken from the stack itself")
        if source.side != "physical":
            raise UsageError("gradient stacks are built from physical-side stacks")
        g = source.grid
        spectra = _stack_dft(source.data, g)
        freq = g.freq_coords()
        spatial = np.empty((g.d,) + spectra.shape, dtype=np.complex128)
        for i in range(g.d):
            spatial[i] = _stack_idft(2.0j * np.pi * freq[i] * spectra, g)
        if callable(timeDerivative):
            rho = g.freq_radii()
            dt_spec = np.empty_like(spectra)
            for k, t in enumerate(source.tgrid.nodes):
                dt_spec[k] = np.asarray(timeDerivative(float(t), rho)) * spectra[k]
            dt = _stack_idft(dt_spec, g)
            method = "custom"
        elif timeDerivative == "poisson":
            rho = g.freq_radii()
            dt = _stack_idft(-2.0 * np.pi * rho * spectra, g)
            method = "poisson"
        elif timeDerivative == "difference":
            dt = np.gradient(source.data, source.tgrid.nodes, axis=0, edge_order=2)
            method = "difference"
        else:
            raise UsageError(
                "timeDerivative must be 'poisson', 'difference', or a multiplier "
                f"callable (got {timeDerivative!r})"
            )
        return GradientStack(source, spatial, dt, SPECTRAL, method)

    missing = [name for name in _ANALYTIC_PROTOCOL if not hasattr(source, name)]
    if missing:
        raise UsageError(
            "analytic input must provide the methods "
            f"{_ANALYTIC_PROTOCOL} (missing {missing})"
        )
    if grid is None or tgrid is None:
        raise UsageError("sampling an analytic member requires grid and tgrid")
    shape = (tgrid.count,) + grid.shape
    values = np.empty(shape, dtype=np.complex128)
    spatial = np.empty((grid.d,) + shape, dtype=np.complex128)
    dt = np.empty(shape, dtype=np.complex128)
    for k, t in enumerate(tgrid.nodes):
        t = float(t)
        values[k] = np.asarray(source.slice_values(t, grid))
        gradient = np.asarray(source.slice_spatial_gradient(t, grid))
        if gradient.shape != (grid.d,) + grid.shape:
            raise UsageError(
                f"slice_spatial_gradient returned shape {gradient.shape}, "
                f"expected {(grid.d,) + grid.shape}"
            )
        spatial[:, k] = gradient
        dt[k] = np.asarray(source.slice_time_derivative(t, grid))
    field = HalfSpaceField(tgrid, grid, values)
    return GradientStack(field, spatial, dt, ANALYTIC, "analytic")


def _check_quadrature(stack, sigma):
    if not isinstance(sigma, TGrid):
        raise UsageError("sigma must be a half-line quadrature rule")
    nodes = stack.tgrid.nodes
    if sigma.count != nodes.size or not np.allclose(
        sigma.nodes, nodes, rtol=1e-12, atol=1e-12
    ):
        raise UsageError("quadrature nodes do not match the stack's slices")


def _check_power(p):
    p = float(p)
    if not p >= 1.0:
        raise ParameterError(f"norm exponent must be at least 1 (got {p})")
    return p


def _slice_power_sums(data, p, cell):
    """Per-slice grid sums of |data|^p times the cell measure."""
    flat = data.reshape(data.shape[0], -1)
    sq = flat.real**2 + flat.imag**2
    if p != 2.0:
        sq = sq ** (0.5 * p)
    return sq.sum(axis=1) * cell


def directional_norm(stack, xi, p, sigma):
    """Weighted ``L^p`` norm of the derivative along one direction.

    Computes ``||<grad_x F, xi>||`` over the half-space with the measure
    carried by ``sigma``: slice-wise grid sums of the directional
    derivative modulus to the ``p``, combined by the half-line rule, to
    the power ``1/p``.

    A field with no variation along ``xi`` gives 0 — legitimate here,
    but such a direction makes the affine energy degenerate (see
    :func:`affine_energy`).

    Parameters
    ----------
    stack : GradientStack
    xi : array-like
        Unit direction in the boundary space.
    p : float
        Exponent, at least 1.
    sigma : TGrid
        Half-line rule matching the stack's slices.

    Returns
    -------
    float
    """
    if not isinstance(stack, GradientStack):
        raise UsageError("directional_norm expects a GradientStack")
    p = _check_power(p)
    _check_quadrature(stack, sigma)
    xi = np.asarray(xi, dtype=np.float64)
    if xi.shape != (stack.grid.d,):
        raise UsageError(f"direction must have shape ({stack.grid.d},) (got {xi.shape})")
    if abs(float(np.sqrt(np.sum(xi**2))) - 1.0) > 1e-8:
        raise UsageError("directions live on the unit sphere")
    combo = np.tensordot(xi, stack.spatial, axes=(0, 0))
    sums = _slice_power_sums(combo, p, stack.grid.cellVolume)
    return float(sigma.apply(sums)) ** (1.0 / p)


def affine_energy(stack, p, sigma, rule):
    """The affine energy of a half-space stack.

    The normalized ``(1-n)``-power mean of the directional derivative
    norms over the boundary sphere, with ``n - 1 = d`` the boundary
    dimension:

        c_{d,p} * ( sum_m w_m ||<grad_x F, xi_m>||^{-d} )^{-1/d}.

    Because the exponent is negative, a single direction with a
    vanishing derivative drives the energy to zero and the quotients
    built on it lose meaning; that state raises
    :class:`~afftrace.errors.DegenerateEnergyError` instead of
    returning 0. The energy never exceeds the isotropic gradient norm
    at ``p = 2`` and is invariant under volume-preserving linear maps
    of the boundary variables.

    Parameters
    ----------
    stack : GradientStack
    p : float
        Exponent, at least 1.
    sigma : TGrid
        Half-line rule matching the stack's slices.
    rule : SphereRule
        Direction rule for the sphere average.

    Returns
    -------
    float
    """
    if not isinstance(stack, GradientStack):
        raise UsageError("affine_energy expects a GradientStack")
    if not isinstance(rule, SphereRule):
        raise UsageError("rule must be a SphereRule")
    d = stack.grid.d
    if rule.d != d:
        raise UsageError(f"direction rule is for dimension {rule.d}, stack has {d}")
    p = _check_power(p)
    _check_quadrature(stack, sigma)
    flat = stack.spatial.reshape(d, stack.tgrid.count, -1)
    sums = kernels.directional_power_sums(flat, rule.directions, p)
    norms_p = (sums @ sigma.weights) * stack.grid.cellVolume
    if not np.all(np.isfinite(norms_p)) or np.any(norms_p <= 0.0):
        worst = int(np.argmin(norms_p))
        raise DegenerateEnergyError(
            "directional derivative norm vanished or lost significance "
            f"(direction index {worst})"
        )
    norms = norms_p ** (1.0 / p)
    # A direction along which the field barely varies shows up not as an
    # exact zero but as a norm at roundoff scale; the negative power then
    # turns noise into the dominant term, so treat it as degenerate.
    if float(np.min(norms)) < 1e-12 * float(np.max(norms)):
        worst = int(np.argmin(norms))
        raise DegenerateEnergyError(
            "directional derivative norm vanished or lost significance "
            f"(direction index {worst})"
        )
    mean = float(np.dot(rule.weights, norms ** (-float(d))))
    value = affine_normalizer(d, p) * mean ** (-1.0 / d)
    if not math.isfinite(value) or value <= 0.0:
        raise DegenerateEnergyError("affine energy lost significance")
    return value


def dt_norm(stack, p, sigma):
    """Weighted ``L^p`` norm of the derivative across slices.

    Parameters mirror :func:`directional_norm`; the reduced data is the
    stack's height derivative.

    Returns
    -------
    float
    """
    if not isinstance(stack, GradientStack):
        raise UsageError("dt_norm expects a GradientStack")
    p = _check_power(p)
    _check_quadrature(stack, sigma)
    sums = _slice_power_sums(stack.dt, p, stack.grid.cellVolume)
    return float(sigma.apply(sums)) ** (1.0 / p)


def weighted_lp_norm(field, r, sigma):
    """Weighted ``L^r`` norm of a half-space stack.

    ``( sum_k w_k sum_x |F(t_k, x)|^r dx )^{1/r}`` with the half-line
    weights carrying the measure ``t^a dt``.

    Parameters
    ----------
    field : HalfSpaceField
        Physical-side stack.
    r : float
        Exponent, at least 1.
    sigma : TGrid
        Half-line rule matching the stack's slices.

    Returns
    -------
    float
    """
    if not isinstance(field, HalfSpaceField):
        raise UsageError("weighted_lp_norm expects a HalfSpaceField")
    if field.side != "physical":
        raise UsageError("weighted norms are taken on the physical side")
    r = _check_power(r)
    nodes = field.tgrid.nodes
    if sigma.count != nodes.size or not np.allclose(
        sigma.nodes, nodes, rtol=1e-12, atol=1e-12
    ):
        raise UsageError("quadrature nodes do not match the stack's slices")
    sums = _slice_power_sums(field.data, r, field.grid.cellVolume)
    return float(sigma.apply(sums)) ** (1.0 / r)


def amgm_split_check(stack, sigma):
    """Both sides of the arithmetic–geometric split of the gradient energy.

    Returns ``(lhs, rhs)`` with

        lhs = int (|dF/dt|^2 + |grad_x F|^2) t^{1 - 2 alpha} dt dx,
        rhs = 2 * sqrt(A * B),

    where ``A`` and ``B`` are the height part and the boundary part of
    ``lhs``; the arithmetic–geometric mean inequality gives
    ``lhs >= rhs`` with equality exactly when the two parts carry equal
    energy, which is automatic for stacks obeying the harmonic
    extension law.

    The weight here is ``t^{1 - 2 alpha}``, as the elementary split
    uses it, while the energies entering the trace quotients carry
    ``t^{2 alpha - 1}``; the two coincide only at ``alpha = 1/2``. The
    exponent ``alpha`` is recovered from the rule's folded weight
    ``a = 2 alpha - 1``, and the integrand is reweighted by
    ``t^{-2a}`` to convert the rule's measure into the split's.

    Parameters
    ----------
    stack : GradientStack
    sigma : TGrid
        Half-line rule matching the stack's slices.

    Returns
    -------
    (float, float)
        The summed left side and the product right side.
    """
    if not isinstance(stack, GradientStack):
        raise UsageError("amgm_split_check expects a GradientStack")
    _check_quadrature(stack, sigma)
    cell = stack.grid.cellVolume
    tpart = _slice_power_sums(stack.dt, 2.0, cell)
    d = stack.grid.d
    xpart = np.zeros_like(tpart)
    for i in range(d):
        xpart += _slice_power_sums(stack.spatial[i], 2.0, cell)
    if sigma.a != 0.0:
        factor = sigma.nodes ** (-2.0 * sigma.a)
    else:
        factor = np.ones_like(sigma.nodes)
    height = float(sigma.apply(tpart * factor))
    boundary = float(sigma.apply(xpart * factor))
    lhs = height + boundary
    rhs = 2.0 * math.sqrt(height * boundary)
    return lhs, rhs

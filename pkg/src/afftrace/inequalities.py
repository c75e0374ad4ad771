"""Trace-quotient evaluations and sharp-inequality checks.

Every check in this module evaluates one side of an inequality against
its sharp constant and packages the outcome as a :class:`QuotientReport`:
the measured quotient, the closed-form reference, the margin between
them, and an explicit budget for whatever analytic tails or truncations
entered the evaluation.  The families that attain equality are provided
in closed form (:func:`haddad_extremal` and the conformal bubble
families), so every sharp constant can be approached numerically and
every strict inequality exhibited with a recorded gap.

Conventions shared by all quotients
-----------------------------------
* Half-space integrals carry the weight ``t^a dt`` through a half-line
  quadrature rule; the rule doubles as the slice layout of the stacks.
* Homogeneous boundary norms (the Sobolev norms of negative order and
  the non-Poisson anti-norm) exclude the zero frequency by
  construction.  Cross-checks against physical-side integrals therefore
  project the spatial mean out of each slice before comparing, so both
  paths see the same function.
* Every quotient is scale-invariant: numerator and denominator share
  homogeneity degree one in the field, so ``f -> c f`` cancels exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np
from scipy import integrate as _integrate
from scipy import special as _special

from .affine import (
    GradientStack,
    affine_energy,
    dt_norm,
    gradient_stack,
    make_sphere_rule,
    weighted_lp_norm,
)
from .constants import (
    Params,
    frac_sobolev_constant,
    haddad_constants,
    hls_constant,
    poisson_trace_constant,
    sphere_area,
)
from .errors import (
    DomainError,
    ParameterError,
    ResolutionError,
    UsageError,
)
from .extension import (
    nonpoisson_extend,
    nonpoisson_norm_report,
    poisson_extend,
    q_multiplier_dt,
    resolvable_mask,
)
from .sampling import (
    FREQUENCY,
    Field,
    Grid,
    HalfSpaceField,
    TGrid,
    make_grid,
    make_tgrid,
    sample,
)
from .spectral import dft, duality_pairing, idft, sobolev_norm

__all__ = [
    "CSV_HEADER",
    "ExtremalParams",
    "QuotientReport",
    "dual_sobolev_check",
    "frac_sobolev_check",
    "haddad_extremal",
    "haddad_quotient",
    "hls_pairing_check",
    "intro_chain_check",
    "reports_csv",
    "standard_corpus",
    "trace_quotient_nonpoisson",
    "trace_quotient_poisson",
]

#: Column layout of the one-line-per-check CSV summary.
CSV_HEADER = "check,quotient,reference,margin,tail_budget"

_DEFAULT_TNODES = 64
_SINGULAR_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# Parameter and report types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ExtremalParams:
    """Parameters selecting one member of an extremal family.

    ``c`` scales the member, ``gamma`` sets its width, ``x0`` its
    center, and ``B`` the linear distortion of the boundary variable.
    The isotropic conformal families (the pairing and embedding bubbles)
    use only ``(c, gamma, x0)``; the trace-extremal family uses all
    four.

    Parameters
    ----------
    c : float
        Nonzero real amplitude.
    gamma : float
        Positive width.
    x0 : sequence of float
        Center on the boundary, length ``d``.
    B : array_like, optional
        Real invertible ``d x d`` matrix; identity when omitted.
        Invariance checks use unit-determinant choices so the affine
        energy is preserved exactly.

    Raises
    ------
    ParameterError
        Nonfinite or zero amplitude, nonpositive width, shape mismatch,
        or a singular matrix.
    """

    c: float
    gamma: float
    x0: tuple
    B: np.ndarray = None

    def __init__(self, c, gamma, x0, B=None):
        c = float(c)
        gamma = float(gamma)
        if not math.isfinite(c) or c == 0.0:
            raise ParameterError(f"amplitude must be finite and nonzero (got {c})")
        if not math.isfinite(gamma) or gamma <= 0.0:
            raise ParameterError(f"width must be positive (got {gamma})")
        x0 = tuple(float(v) for v in np.atleast_1d(np.asarray(x0, dtype=float)))
        if not all(math.isfinite(v) for v in x0):
            raise ParameterError("center coordinates must be finite")
        d = len(x0)
        if B is None:
            B = np.eye(d)
        B = np.asarray(B, dtype=float)
        if B.shape != (d, d):
            raise ParameterError(
                f"matrix shape {B.shape} does not match the center dimension {d}"
            )
        if not np.all(np.isfinite(B)):
            raise ParameterError("matrix entries must be finite")
        det = float(np.linalg.det(B))
        if abs(det) < _SINGULAR_FLOOR:
            raise ParameterError(f"matrix is singular (determinant {det:.3e})")
        B = B.copy()
        B.flags.writeable = False
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "B", B)

    @property
    def d(self):
        """Boundary dimension the member lives on."""
        return len(self.x0)

    @property
    def determinant(self):
        """Determinant of the linear part."""
        return float(np.linalg.det(self.B))


def _json_safe(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, str) or value is None:
        return value
    if isinstance(value, Mapping):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_json_safe(v) for v in np.asarray(value).tolist()]
    return str(value)


@dataclass(frozen=True)
class QuotientReport:
    """Outcome of one inequality check.

    ``quotient`` is the measured ratio, ``reference`` the sharp constant
    it is compared against, and ``margin = reference - quotient`` is
    computed, never asserted: a negative margin is a finding, not an
    error.  ``tailBudget`` records the relative weight of everything
    that was handled analytically or truncated (box tails, excluded
    spectral mass, extent sensitivity); when it exceeds the trust
    threshold of the check, ``lowConfidence`` is set instead of failing.

    ``numerator`` is the quantity on top of the quotient.  For the
    trace quotients ``energyFactor`` and ``dtFactor`` are the affine
    energy and the height-derivative norm before their exponents are
    applied; for the single-ratio checks ``energyFactor`` carries the
    denominator and ``dtFactor`` is ``None``.

    ``resolution`` is a read-only mapping of every knob that indexes
    the evaluation (grid size, extents, node counts) plus auxiliary
    diagnostics such as cross-check agreements.
    """

    numerator: float
    energyFactor: Optional[float]
    dtFactor: Optional[float]
    quotient: float
    reference: float
    margin: float
    tailBudget: float
    resolution: Mapping
    lowConfidence: bool = False

    def to_json_dict(self):
        """All fields as one JSON-serializable dictionary."""
        return {
            "numerator": _json_safe(self.numerator),
            "energyFactor": _json_safe(self.energyFactor),
            "dtFactor": _json_safe(self.dtFactor),
            "quotient": _json_safe(self.quotient),
            "reference": _json_safe(self.reference),
            "margin": _json_safe(self.margin),
            "tailBudget": _json_safe(self.tailBudget),
            "lowConfidence": bool(self.lowConfidence),
            "resolution": _json_safe(dict(self.resolution)),
        }

    def csv_row(self, check):
        """One summary line ``check,quotient,reference,margin,tail_budget``."""
        name = str(check)
        if any(ch in name for ch in ",\n\r"):
            raise UsageError(f"check name {name!r} is not a valid CSV field")
        return (
            f"{name},{self.quotient:.17g},{self.reference:.17g},"
            f"{self.margin:.17g},{self.tailBudget:.17g}"
        )


def reports_csv(reports):
    """CSV summary of several reports, one line per check, sorted by name.

    Parameters
    ----------
    reports : mapping of str to QuotientReport

    Returns
    -------
    str
        Header line plus one row per report, ``\\n``-separated with a
        trailing newline.
    """
    lines = [CSV_HEADER]
    for name in sorted(reports):
        lines.append(reports[name].csv_row(name))
    return "\n".join(lines) + "\n"


def _freeze(mapping):
    import types

    return types.MappingProxyType(dict(mapping))


def _make_report(
    numerator,
    energy,
    dtf,
    quotient,
    reference,
    tail,
    resolution,
    low=False,
):
    return QuotientReport(
        numerator=float(numerator),
        energyFactor=None if energy is None else float(energy),
        dtFactor=None if dtf is None else float(dtf),
        quotient=float(quotient),
        reference=float(reference),
        margin=float(reference - quotient),
        tailBudget=float(tail),
        resolution=_freeze(resolution),
        lowConfidence=bool(low),
    )


# ---------------------------------------------------------------------------
# The closed-form trace-extremal family
# ---------------------------------------------------------------------------


class HaddadExtremal:
    """One member of the closed-form trace-extremal family.

    The member is ``F(t, x) = c (1 + |gamma t|^{p'} + |B(x - x0)|^{p'})^q``
    with ``q = (p - n - a)/p`` the decay exponent of the parameter set;
    the boundary profile decays like ``|x|^{p' q}``.  Values and both
    first derivatives are closed-form, so stacks built from a member
    carry analytic provenance and are the ground truth the spectral
    pipeline is compared against.

    Instances are callable as ``member(t, x)`` with ``t >= 0`` scalar
    and ``x`` either a ``d``-vector or a stack of coordinate arrays of
    shape ``(d,) + S``, and provide the analytic sampling protocol
    (``slice_values``, ``slice_spatial_gradient``,
    ``slice_time_derivative``) consumed by the gradient-stack builder.
    """

    def __init__(self, params, ep):
        if not isinstance(params, Params):
            raise UsageError("expected a derived parameter set")
        if not isinstance(ep, ExtremalParams):
            raise UsageError("expected extremal-family parameters")
        if ep.d != params.d:
            raise ParameterError(
                f"family center has dimension {ep.d}, parameters expect {params.d}"
            )
        self.params = params
        self.ep = ep
        self._Bt = np.ascontiguousarray(ep.B.T)

    @property
    def decay_exponent(self):
        """Radial decay power of the boundary profile, ``p' q``."""
        return self.params.pPrime * self.params.q

    def _core(self, t, xs):
        """Shared evaluation: returns (u, w, squared radius |w|^2)."""
        p = self.params
        ep = self.ep
        z = [np.asarray(xs[i], dtype=float) - ep.x0[i] for i in range(p.d)]
        z = np.broadcast_arrays(*z)
        w = [sum(ep.B[i, j] * z[j] for j in range(p.d)) for i in range(p.d)]
        s2 = sum(wi * wi for wi in w)
        u = 1.0 + abs(ep.gamma * t) ** p.pPrime + s2 ** (0.5 * p.pPrime)
        return u, w, s2

    def _check_t(self, t):
        t = float(t)
        if not math.isfinite(t) or t < 0.0:
            raise DomainError(f"height must be finite and nonnegative (got {t})")
        return t

    def __call__(self, t, x):
        """Value at height ``t`` and boundary point(s) ``x``."""
        t = self._check_t(t)
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 or x.shape[0] != self.params.d:
            raise UsageError(
                f"point must have leading dimension {self.params.d} (got shape {x.shape})"
            )
        u, _, _ = self._core(t, [x[i] for i in range(self.params.d)])
        out = self.ep.c * u**self.params.q
        if np.ndim(out) == 0:
            return float(out)
        return out

    def slice_values(self, t, grid):
        """Values on a grid slice at height ``t``."""
        t = self._check_t(t)
        u, _, _ = self._core(t, grid.coords())
        return self.ep.c * u**self.params.q

    def slice_spatial_gradient(self, t, grid):
        """Closed-form boundary gradient on a grid slice, shape ``(d,) + grid.shape``."""
        t = self._check_t(t)
        p = self.params
        u, w, s2 = self._core(t, grid.coords())
        # d/dx_j |B(x-x0)|^{p'} = p' |w|^{p'-2} (B^T w)_j ; the radial
        # factor vanishes at the center because p' > 2.
        radial = np.where(s2 > 0.0, s2 ** (0.5 * p.pPrime - 1.0), 0.0)
        common = self.ep.c * p.q * u ** (p.q - 1.0) * p.pPrime * radial
        out = np.empty((p.d,) + grid.shape, dtype=float)
        for j in range(p.d):
            btw = sum(self._Bt[j, i] * w[i] for i in range(p.d))
            out[j] = common * btw
        return out

    def slice_time_derivative(self, t, grid):
        """Closed-form height derivative on a grid slice."""
        t = self._check_t(t)
        p = self.params
        u, _, _ = self._core(t, grid.coords())
        g = self.ep.gamma
        return (
            self.ep.c
            * p.q
            * u ** (p.q - 1.0)
            * p.pPrime
            * g**p.pPrime
            * t ** (p.pPrime - 1.0)
        )

    def boundary_field(self, grid):
        """The ``t = 0`` slice sampled as a boundary field."""
        return Field(grid, self.slice_values(0.0, grid).astype(np.complex128))


def haddad_extremal(params, ep):
    """Closed-form member of the trace-extremal family.

    Parameters
    ----------
    params : Params
        Derived parameter set fixing ``(p, p', q, a)``.
    ep : ExtremalParams
        Amplitude, width, center, and linear part of the member.

    Returns
    -------
    HaddadExtremal
        Callable member carrying the analytic sampling protocol.

    Raises
    ------
    ParameterError
        Dimension mismatch between the center and the parameter set.
    """
    return HaddadExtremal(params, ep)


# ---------------------------------------------------------------------------
# Trace quotients
# ---------------------------------------------------------------------------


def _check_sigma(sigma, a, context):
    if not isinstance(sigma, TGrid):
        raise UsageError(f"{context} requires a half-line quadrature rule")
    if abs(sigma.a - a) > 1e-12:
        raise UsageError(
            f"{context}: quadrature weight exponent {sigma.a} does not match a = {a}"
        )
    return sigma


def _trace_exponents(params):
    total = params.n + params.a
    return (params.n - 1.0) / total, (1.0 + params.a) / total


def _stack_resolution(stack, rule):
    g = stack.field.grid
    tg = stack.field.tgrid
    return {
        "pointsPerAxis": g.pointsPerAxis,
        "halfExtent": g.halfExtent,
        "tNodes": tg.count,
        "tMax": tg.tMax,
        "sphereCount": rule.count,
        "provenance": stack.provenance,
        "dtMethod": stack.dtMethod,
    }


def haddad_quotient(stack, params, *, sigma=None, rule=None):
    """Trace quotient of a half-space stack against the sharp constant.

    Evaluates ``L^2(sigma)`` content over the affine energy and the
    height-derivative norm, each raised to its interpolation exponent:
    ``(n-1)/(n+a)`` on the energy and ``(1+a)/(n+a)`` on the
    derivative.  The reference is the product constant of the trace
    principle; the closed-form extremal family attains it.

    Parameters
    ----------
    stack : GradientStack
        Half-space stack with first derivatives attached.
    params : Params
        Derived parameter set; its weight exponent must match the rule.
    sigma : TGrid, optional
        Half-line rule; defaults to the stack's own slice rule.
    rule : SphereRule, optional
        Direction rule for the affine energy; defaults to the module
        default for the boundary dimension.

    Returns
    -------
    QuotientReport

    Raises
    ------
    UsageError
        Mismatched quadrature rule or weight exponent.
    DegenerateEnergyError
        A direction along which the stack carries no mass.
    """
    if not isinstance(stack, GradientStack):
        raise UsageError("haddad_quotient expects a gradient stack")
    if not isinstance(params, Params):
        raise UsageError("expected a derived parameter set")
    sigma = _check_sigma(
        stack.field.tgrid if sigma is None else sigma, params.a, "haddad_quotient"
    )
    rule = make_sphere_rule(params.d) if rule is None else rule
    numerator = weighted_lp_norm(stack.field, 2.0, sigma)
    energy = affine_energy(stack, params.p, sigma, rule)
    dtf = dt_norm(stack, params.p, sigma)
    e_energy, e_dt = _trace_exponents(params)
    quotient = numerator / (energy**e_energy * dtf**e_dt)
    reference = haddad_constants(params.n, params.p, params.a).J
    res = _stack_resolution(stack, rule)
    res.update(energyExponent=e_energy, dtExponent=e_dt)
    return _make_report(numerator, energy, dtf, quotient, reference, 0.0, res)


def _default_tgrid(params, grid):
    return make_tgrid(params.a, 2.0 * grid.halfExtent, _DEFAULT_TNODES)


def _slice_l2_meanfree(data, grid, sigma):
    """Weighted ``L^2`` of a stack with each slice's spatial mean removed."""
    axes = tuple(range(1, data.ndim))
    means = data.mean(axis=axes, keepdims=True)
    centered = data - means
    sums = np.sum(np.abs(centered) ** 2, axis=axes) * grid.cellVolume
    return math.sqrt(float(sigma.apply(sums)))


def trace_quotient_poisson(g, params, *, tgrid=None, rule=None):
    """Trace quotient of the harmonic-type extension of a boundary field.

    The numerator is the boundary Sobolev norm of order ``-alpha``; the
    denominator is the affine energy and height-derivative norm of the
    Poisson extension raised to the exponents ``(n-1)/(n-1+2 alpha)``
    and ``2 alpha/(n-1+2 alpha)``.  The reference constant is the
    Poisson-family sharp value, strictly above every quotient this
    family can produce.

    The report's resolution block carries ``numeratorAgreement``: the
    relative gap between the boundary norm and the equivalent
    weighted-``L^2`` content ``(2^{a+1}/Gamma(a+1))^{1/2} ||G||`` of the
    extension, with each slice's spatial mean projected out so both
    paths exclude the zero mode.  The tail budget is the relative decay
    ``exp(-2 pi Delta_xi t_max)`` left to the slowest surviving mode at
    the height cutoff; it shrinks as the cutoff grows.

    Parameters
    ----------
    g : Field
        Physical-side boundary field.
    params : Params
        Derived parameter set; the boundary dimension must match.
    tgrid : TGrid, optional
        Half-line rule; defaults to weight ``t^a``, 64 nodes, height
        cutoff twice the half-extent.
    rule : SphereRule, optional
        Direction rule for the affine energy.

    Returns
    -------
    QuotientReport
    """
    if not isinstance(g, Field) or not g.is_physical():
        raise UsageError("trace_quotient_poisson expects a physical boundary field")
    if not isinstance(params, Params):
        raise UsageError("expected a derived parameter set")
    if g.grid.d != params.d:
        raise UsageError(
            f"boundary field has dimension {g.grid.d}, parameters expect {params.d}"
        )
    tgrid = (
        _default_tgrid(params, g.grid)
        if tgrid is None
        else _check_sigma(tgrid, params.a, "trace_quotient_poisson")
    )
    rule = make_sphere_rule(params.d) if rule is None else rule
    G = poisson_extend(g, tgrid)
    stack = gradient_stack(G)
    numerator = sobolev_norm(g, -params.alpha)
    energy = affine_energy(stack, params.p, tgrid, rule)
    dtf = dt_norm(stack, params.p, tgrid)
    e_energy, e_dt = _trace_exponents(params)
    quotient = numerator / (energy**e_energy * dtf**e_dt)
    reference = poisson_trace_constant(params.n, params.alpha)

    l2 = _slice_l2_meanfree(G.data, g.grid, tgrid)
    factor = math.sqrt(2.0 ** (params.a + 1.0) / _special.gamma(params.a + 1.0))
    agreement = abs(numerator - factor * l2) / numerator if numerator > 0 else math.inf
    tail = math.exp(-2.0 * math.pi * g.grid.freqSpacing * tgrid.tMax)
    res = _stack_resolution(stack, rule)
    res.update(
        energyExponent=e_energy,
        dtExponent=e_dt,
        numeratorAgreement=agreement,
        weightedL2=factor * l2,
    )
    return _make_report(numerator, energy, dtf, quotient, reference, tail, res)


def _nonpoisson_stack(h, base, params, tgrid):
    """Gradient stack of the non-Poisson extension with closed-form heights.

    The spatial part is the slice-wise spectral gradient of the
    extension; the height derivative is rebuilt mode by mode from the
    derivative of the height multiplier, because the multiplier has
    zeros in height and a slice-spectrum ratio would be singular there.
    The zero mode carries the derivative of its mass-preserving height
    factor, matching the extension's own zero-mode convention.
    """
    H = nonpoisson_extend(h, base, params, tgrid)
    spatial_only = gradient_stack(
        H, timeDerivative=lambda t, rho: np.zeros_like(rho)
    )
    grid = h.grid
    spec = dft(h)
    rho = grid.freq_radii()
    mask = resolvable_mask(rho, base)
    zero = grid.zeroIndex
    rho_kept = rho[mask]
    coeff_kept = spec.values[mask]
    dc_coeff = spec.values[zero]
    p = params
    e = p.q + p.d / p.pPrime
    dt = np.empty_like(H.data)
    for k, t in enumerate(tgrid.nodes):
        t = float(t)
        dspec = np.zeros(grid.shape, dtype=np.complex128)
        if rho_kept.size:
            dspec[mask] = q_multiplier_dt(t, rho_kept, base, params) * coeff_kept
        s = 1.0 + t**p.pPrime
        dspec[zero] = dc_coeff * e * p.pPrime * t ** (p.pPrime - 1.0) * s ** (e - 1.0)
        dt[k] = idft(Field(grid, dspec, FREQUENCY)).values
    return GradientStack(H, spatial_only.spatial, dt, "spectral", "custom")


def trace_quotient_nonpoisson(h, params, base, *, tgrid=None, rule=None):
    """Trace quotient of the extremal-profile extension of a boundary field.

    The numerator is the anti-norm built from the height multiplier's
    squared weight; the denominators are the affine energy and
    height-derivative norm of the non-Poisson extension with the same
    exponents as the Poisson quotient.  The reference is the product
    constant the closed-form extremal attains, equal to the Poisson
    reference times ``(2^{-2 alpha} Gamma(2 alpha))^{1/2}``.

    Modes outside the profile's trusted band are excluded consistently
    from the numerator, the extension, and the derivative stack; their
    share of the squared boundary content is the report's tail budget
    and is also recorded as ``excludedMassFraction``.

    Parameters
    ----------
    h : Field
        Physical-side boundary field.
    params : Params
        Derived parameter set.
    base : RadialProfile
        Tabulated boundary-profile transform driving the extension; its
        tail must be certified decayed for heights past the table.
    tgrid : TGrid, optional
    rule : SphereRule, optional

    Returns
    -------
    QuotientReport

    Raises
    ------
    ConditioningError
        Propagated from the height multiplier near its floor.
    """
    if not isinstance(h, Field) or not h.is_physical():
        raise UsageError("trace_quotient_nonpoisson expects a physical boundary field")
    if not isinstance(params, Params):
        raise UsageError("expected a derived parameter set")
    if h.grid.d != params.d:
        raise UsageError(
            f"boundary field has dimension {h.grid.d}, parameters expect {params.d}"
        )
    tgrid = (
        _default_tgrid(params, h.grid)
        if tgrid is None
        else _check_sigma(tgrid, params.a, "trace_quotient_nonpoisson")
    )
    rule = make_sphere_rule(params.d) if rule is None else rule
    report = nonpoisson_norm_report(h, base, params, tgrid)
    numerator = report.value
    stack = _nonpoisson_stack(h, base, params, tgrid)
    energy = affine_energy(stack, params.p, tgrid, rule)
    dtf = dt_norm(stack, params.p, tgrid)
    e_energy, e_dt = _trace_exponents(params)
    quotient = numerator / (energy**e_energy * dtf**e_dt)
    reference = haddad_constants(params.n, params.p, params.a).J
    res = _stack_resolution(stack, rule)
    res.update(
        energyExponent=e_energy,
        dtExponent=e_dt,
        excludedMassFraction=report.excludedMassFraction,
        guardRadius=report.guardRadius,
    )
    return _make_report(
        numerator,
        energy,
        dtf,
        quotient,
        reference,
        report.excludedMassFraction,
        res,
    )


# ---------------------------------------------------------------------------
# Boundary-only checks: pairing, embedding, dual embedding
# ---------------------------------------------------------------------------


def _pairing_exponent(d, alpha):
    alpha = float(alpha)
    d = int(d)
    if d < 1:
        raise DomainError(f"dimension must be at least 1 (got {d})")
    if not (0.0 < alpha < 0.5 * d):
        raise DomainError(f"need 0 < alpha < d/2 (got alpha = {alpha}, d = {d})")
    return d, alpha


def _angular_average_factory(d, s):
    """Unit-sphere average of ``|x - y|^s`` between radii ``u < v``.

    Closed forms per dimension: two reflections in one dimension, a
    Gauss hypergeometric value on the circle.
    """
    if d == 1:

        def avg(u, v):
            return 0.5 * (np.abs(u - v) ** s + (u + v) ** s)

    elif d == 2:

        def avg(u, v):
            total = u + v
            m = 4.0 * u * v / total**2
            return total**s * _special.hyp2f1(-0.5 * s, 0.5, 1.0, m)

    else:  # pragma: no cover - pairing checks refuse d >= 3 before this
        raise ResolutionError("angular averages are provided for d <= 2")
    return avg


def _gauss01(count):
    nodes, weights = np.polynomial.legendre.leggauss(count)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def _bubble_tails(c, gamma, d, alpha, cut):
    """Analytic pairing content of the bubble outside the radius ``cut``.

    Splits the missing part of the double integral into the cross term
    (far point against the inner mass, expanded to second moments) and
    the far-far term (a two-dimensional radial quadrature with the
    angular kernel averaged in closed form).
    """
    s = 2.0 * alpha - d
    area = sphere_area(d)
    expo = -0.5 * (d + 2.0 * alpha)

    def f(u):
        return c * (gamma**2 + u**2) ** expo

    inner_mass = _integrate.quad(
        lambda u: f(u) * area * u ** (d - 1.0), 0.0, cut, limit=200
    )[0]
    inner_r2 = _integrate.quad(
        lambda u: f(u) * area * u ** (d + 1.0), 0.0, cut, limit=200
    )[0]
    c2 = s * (d + s - 2.0) / (2.0 * d)

    def cross_integrand(u):
        return (
            2.0
            * f(u)
            * u**s
            * (inner_mass + c2 * inner_r2 / u**2)
            * area
            * u ** (d - 1.0)
        )

    tail_cross = _integrate.quad(cross_integrand, cut, np.inf, limit=200)[0]

    avg = _angular_average_factory(d, s)
    yu, wu = _gauss01(96)
    yv, wv = _gauss01(97)
    u = cut / yu
    v = cut / yv
    ju = cut / yu**2
    jv = cut / yv**2
    U, V = np.meshgrid(u, v, indexing="ij")
    JU, JV = np.meshgrid(ju * wu, jv * wv, indexing="ij")
    values = (
        f(U)
        * f(V)
        * avg(U, V)
        * area**2
        * U ** (d - 1.0)
        * V ** (d - 1.0)
        * JU
        * JV
    )
    tail_far = float(np.sum(values))
    return tail_cross, tail_far


def _radial_lp_norm(fn, m, d, cut, tail_coeff, tail_power):
    """``L^m`` norm over ``R^d`` of a radial profile decaying like a power.

    The tail model describes the profile itself:
    ``|fn(u)| ~ tail_coeff * u^(-tail_power)`` beyond the cut radius.
    """
    from .oracle import dense_norm

    return dense_norm(
        fn,
        ("plane-radial", d, cut),
        r=m,
        tail=("power", tail_coeff, tail_power),
    )


def _field_lp_norm(field, m):
    """Discrete ``L^m`` norm of a sampled field."""
    return float(
        np.sum(np.abs(field.values) ** m) * field.grid.cellVolume
    ) ** (1.0 / m)


def hls_pairing_check(fp, d, alpha, *, field=None):
    """Pairing quotient against the sharp pairing constant.

    For a conformal bubble ``f = c (gamma^2 + |x - x0|^2)^{-(d+2 alpha)/2}``
    the double integral ``iint f(x) f(y) |x-y|^{2 alpha - d}`` divided by
    ``||f||^2`` in the matching Lebesgue exponent attains the sharp
    constant.  The double integral is evaluated by the brute-force
    pairwise quadrature on a grid proportional to the bubble's width
    (so translation of the center and rescaling of the width leave the
    quotient invariant to roundoff), masked to the largest inscribed
    disk; the content outside the disk is supplied by analytic tail
    integrals whose share of the numerator is the tail budget.

    Alternatively a sampled, effectively compactly supported ``field``
    may be passed instead of family parameters to check the inequality
    direction for general data; no analytic tails are added.

    Parameters
    ----------
    fp : ExtremalParams or None
        Bubble amplitude, width, and center; the linear part is not
        used by the isotropic family.
    d : int
        Boundary dimension, 1 or 2 (the pairwise quadrature refuses 3).
    alpha : float
        Order, ``0 < alpha < d/2``.
    field : Field, optional
        Physical-side field on a grid of at most 64 points per axis.

    Returns
    -------
    QuotientReport

    Raises
    ------
    ResolutionError
        Dimension 3, or a supplied field exceeding the pairwise budget.
    """
    d, alpha = _pairing_exponent(d, alpha)
    m = 2.0 * d / (d + 2.0 * alpha)
    reference = hls_constant(d, alpha)
    from .oracle import double_integral

    if field is not None:
        if fp is not None:
            raise UsageError("pass family parameters or a field, not both")
        if not isinstance(field, Field) or not field.is_physical():
            raise UsageError("expected a physical-side boundary field")
        if field.grid.d != d:
            raise UsageError(
                f"field dimension {field.grid.d} does not match d = {d}"
            )
        pair = double_integral(field, field, alpha)
        denom = _field_lp_norm(field, m) ** 2
        quotient = pair / denom
        res = {
            "pointsPerAxis": field.grid.pointsPerAxis,
            "halfExtent": field.grid.halfExtent,
            "mode": "sampled-field",
        }
        return _make_report(pair, denom, None, quotient, reference, 0.0, res)

    if not isinstance(fp, ExtremalParams):
        raise UsageError("expected extremal-family parameters")
    if fp.d != d:
        raise ParameterError(
            f"family center has dimension {fp.d}, check expects {d}"
        )
    if d > 2:
        raise ResolutionError(
            "the pairwise quadrature at d = 3 exceeds the oracle budget"
        )
    c, gamma = fp.c, fp.gamma
    points = 64
    half = 8.0 * gamma
    grid = make_grid(d, half, points)
    cut = half - 2.0 * half / points
    expo = -0.5 * (d + 2.0 * alpha)

    def profile(*xs):
        r2 = sum(x * x for x in xs)
        return c * (gamma**2 + r2) ** expo

    f = sample(profile, grid)
    radii = grid.radii()
    masked = Field(grid, np.where(radii <= cut, f.values, 0.0))
    pair_core = double_integral(masked, masked, alpha)
    tail_cross, tail_far = _bubble_tails(c, gamma, d, alpha, cut)
    numerator = pair_core + tail_cross + tail_far

    def radial(u):
        return c * (gamma**2 + u**2) ** expo

    denom = (
        _radial_lp_norm(radial, m, d, 10.0 * half, abs(c), d + 2.0 * alpha) ** 2
    )
    quotient = numerator / denom
    tail = (abs(tail_cross) + abs(tail_far)) / abs(numerator)
    res = {
        "pointsPerAxis": points,
        "halfExtent": half,
        "cutRadius": cut,
        "tailCross": tail_cross,
        "tailFar": tail_far,
        "center": fp.x0,
        "mode": "bubble-family",
    }
    return _make_report(numerator, denom, None, quotient, reference, tail, res)


_LOW_CONFIDENCE_BUDGET = 0.05


def frac_sobolev_check(fp, d, alpha, *, field=None):
    """Embedding quotient against the sharp embedding constant.

    For the conformal extremal ``f = A (gamma^2 + |x - a|^2)^{(2 alpha - d)/2}``
    the squared Lebesgue norm with exponent ``2d/(d - 2 alpha)`` over the
    squared Sobolev seminorm of order ``alpha`` attains the sharp
    constant.  The Lebesgue side is evaluated by a radial quadrature
    with an analytic power tail; the Sobolev side spectrally on a box
    proportional to the width.  Because the extremal decays slowly
    (``|x|^{2 alpha - d}``), the report carries an explicit tail budget
    — the sensitivity of the Sobolev side to halving the box — and is
    marked low-confidence when the budget exceeds 5 percent.

    A sampled compactly supported ``field`` may be passed instead, with
    both sides evaluated on its own grid and no tail model.

    Parameters
    ----------
    fp : ExtremalParams or None
    d : int
    alpha : float
        Order, ``0 < alpha < d/2``.
    field : Field, optional

    Returns
    -------
    QuotientReport
    """
    d, alpha = _pairing_exponent(d, alpha)
    m = 2.0 * d / (d - 2.0 * alpha)
    reference = frac_sobolev_constant(d, alpha)

    if field is not None:
        if fp is not None:
            raise UsageError("pass family parameters or a field, not both")
        if not isinstance(field, Field) or not field.is_physical():
            raise UsageError("expected a physical-side boundary field")
        if field.grid.d != d:
            raise UsageError(
                f"field dimension {field.grid.d} does not match d = {d}"
            )
        num = _field_lp_norm(field, m) ** 2
        den = sobolev_norm(field, alpha) ** 2
        quotient = num / den
        res = {
            "pointsPerAxis": field.grid.pointsPerAxis,
            "halfExtent": field.grid.halfExtent,
            "mode": "sampled-field",
        }
        return _make_report(num, den, None, quotient, reference, 0.0, res)

    if not isinstance(fp, ExtremalParams):
        raise UsageError("expected extremal-family parameters")
    if fp.d != d:
        raise ParameterError(
            f"family center has dimension {fp.d}, check expects {d}"
        )
    amp, gamma = fp.c, fp.gamma
    expo = 0.5 * (2.0 * alpha - d)

    def radial(u):
        return amp * (gamma**2 + u**2) ** expo

    num = (
        _radial_lp_norm(radial, m, d, 100.0 * gamma, abs(amp), d - 2.0 * alpha) ** 2
    )

    def profile(*xs):
        r2 = sum(x * x for x in xs)
        return amp * (gamma**2 + r2) ** expo

    # The tail of the extremal beyond radius R carries Sobolev content
    # scaling like R^(2 alpha - d), so the boxed seminorm is short by
    # that power of the box size.  Three dyadic extents at fixed cell
    # size cancel the leading term by extrapolation; the second
    # difference is the remaining budget.
    points, half = 512, 64.0 * gamma
    dens = []
    for k in range(3):
        f_k = sample(profile, make_grid(d, half / 2**k, points // 2**k))
        dens.append(sobolev_norm(f_k, alpha) ** 2)
    ratio = 2.0 ** (d - 2.0 * alpha)
    extrap = (ratio * dens[0] - dens[1]) / (ratio - 1.0)
    extrap_coarse = (ratio * dens[1] - dens[2]) / (ratio - 1.0)
    budget = abs(extrap - extrap_coarse) / abs(extrap)
    quotient = num / extrap
    res = {
        "pointsPerAxis": points,
        "halfExtent": half,
        "boxedSobolev": dens[0],
        "extrapolatedSobolev": extrap,
        "coarseExtrapolation": extrap_coarse,
        "center": fp.x0,
        "mode": "conformal-family",
    }
    return _make_report(
        num,
        extrap,
        None,
        quotient,
        reference,
        budget,
        res,
        low=budget > _LOW_CONFIDENCE_BUDGET,
    )


def dual_sobolev_check(f, d, alpha, *, bruteCheck=False):
    """Dual embedding quotient against the sharp embedding constant.

    Evaluates ``integral (2 pi |xi|)^{-2 alpha} |fhat|^2`` over the
    squared Lebesgue norm with exponent ``2d/(d + 2 alpha)`` — the dual
    form of the embedding, sharing its constant.  The frequency side is
    the squared Sobolev norm of order ``-alpha``; with ``bruteCheck``
    the same quantity is recomputed through the pairwise real-space
    quadrature divided by the kernel normalizer, and the relative gap
    between the two evaluation paths is recorded as
    ``pairingAgreement``.

    Parameters
    ----------
    f : Field
        Physical-side boundary field.
    d : int
        Must match the field's grid.
    alpha : float
        Order, ``0 < alpha < d/2``.
    bruteCheck : bool, optional
        Also run the pairwise-quadrature path (grids of at most 64
        points per axis).

    Returns
    -------
    QuotientReport
    """
    d, alpha = _pairing_exponent(d, alpha)
    if not isinstance(f, Field) or not f.is_physical():
        raise UsageError("dual_sobolev_check expects a physical boundary field")
    if f.grid.d != d:
        raise UsageError(f"field dimension {f.grid.d} does not match d = {d}")
    m = 2.0 * d / (d + 2.0 * alpha)
    reference = frac_sobolev_constant(d, alpha)
    lhs = sobolev_norm(f, -alpha) ** 2
    denom = _field_lp_norm(f, m) ** 2
    quotient = lhs / denom
    res = {
        "pointsPerAxis": f.grid.pointsPerAxis,
        "halfExtent": f.grid.halfExtent,
    }
    if bruteCheck:
        from .constants import kappa
        from .oracle import double_integral

        spectral = duality_pairing(f, f, alpha).real
        brute = double_integral(f, f, alpha) / kappa(d, alpha)
        res["pairingAgreement"] = abs(spectral - brute) / abs(brute)
        res["brutePairing"] = brute
        res["spectralPairing"] = spectral
    return _make_report(lhs, denom, None, quotient, reference, 0.0, res)


# ---------------------------------------------------------------------------
# Corpus and the introductory chain
# ---------------------------------------------------------------------------


def standard_corpus(grid, params, *, seed=0):
    """The standard family of boundary test fields on a grid.

    Spans radial against sheared, fast against slow decay, and smooth
    against band-limited: round and anisotropic Gaussians, conformal
    bubbles of two widths, the trace-extremal boundary profile, compact
    polynomial-times-cutoff bumps (one radial, one odd and therefore
    mean-free), and a seeded band-limited noise field (mean-free by
    construction).

    Parameters
    ----------
    grid : Grid
        Boundary grid, dimension matching the parameter set.
    params : Params
        Fixes the extremal profile's exponents.
    seed : int, optional
        Seed for the band-limited member.

    Returns
    -------
    dict of str to Field
        Insertion-ordered, name to physical-side field.
    """
    if not isinstance(grid, Grid):
        raise UsageError("expected a boundary grid")
    if not isinstance(params, Params):
        raise UsageError("expected a derived parameter set")
    if grid.d != params.d:
        raise UsageError(
            f"grid dimension {grid.d} does not match the parameter set ({params.d})"
        )
    R = grid.halfExtent
    members = {}

    def rsq(xs):
        return sum(x * x for x in xs)

    members["gaussian-round"] = sample(
        lambda *xs: np.exp(-rsq(xs) / (2.0 * (R / 5.0) ** 2)), grid
    )

    theta = np.pi / 6.0
    ct, st = np.cos(theta), np.sin(theta)
    s1, s2 = R / 4.0, R / 8.0

    def aniso(*xs):
        u = ct * xs[0] + st * xs[1] if len(xs) > 1 else xs[0]
        v = -st * xs[0] + ct * xs[1] if len(xs) > 1 else 0.0
        rest = rsq(xs[2:]) if len(xs) > 2 else 0.0
        return np.exp(-(u**2 / (2.0 * s1**2) + v**2 / (2.0 * s2**2) + rest))

    members["gaussian-aniso"] = sample(aniso, grid)

    bubble_expo = -0.5 * (params.d + 2.0 * params.alpha)
    members["bubble"] = sample(
        lambda *xs: (1.0 + rsq(xs)) ** bubble_expo, grid
    )
    members["bubble-wide"] = sample(
        lambda *xs: (4.0 + rsq(xs)) ** bubble_expo * 4.0**-bubble_expo, grid
    )

    members["hstar"] = sample(
        lambda *xs: (1.0 + rsq(xs) ** (0.5 * params.pPrime)) ** params.q, grid
    )

    r0 = 0.5 * R

    def bump(*xs):
        w = 1.0 - rsq(xs) / r0**2
        return np.where(w > 0.0, w, 0.0) ** 3

    members["bump-poly"] = sample(bump, grid)
    members["bump-odd"] = sample(
        lambda *xs: xs[0] / r0 * bump(*xs), grid
    )

    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(grid.shape)
    spec = dft(Field(grid, noise))
    rho = grid.freq_radii()
    cutoff = 4.0 * grid.freqSpacing
    kept = (rho > 0.0) & (rho <= cutoff)
    filtered = idft(Field(grid, np.where(kept, spec.values, 0.0), FREQUENCY))
    band = np.real(filtered.values)
    peak = float(np.max(np.abs(band)))
    members["band-limited"] = Field(grid, band / peak)
    return members


def intro_chain_check(g, *, tgrid=None, rule=None):
    """One-sided verification of the introductory chain at exponent 2.

    For the Poisson extension ``F`` of a boundary field, checks the
    chain ``2 E_2(F) ||dF/dt|| <= ||grad F||^2`` through its two steps:
    the affine energy is dominated by the full boundary-gradient norm,
    and the arithmetic-geometric mean inequality combines the two
    factors.  The boundary value ``F(0, .)`` is the extension's own
    boundary slice, so the check is one-sided: inequality only, no
    sharpness claim.  All norms carry the unweighted half-line measure.

    The report's quotient is the chain ratio
    ``2 E_2 ||dF/dt|| / ||grad F||^2`` with reference 1; the two step
    margins are recorded in the resolution block.

    Parameters
    ----------
    g : Field
        Physical-side boundary field.
    tgrid : TGrid, optional
        Unweighted half-line rule; defaults to 64 nodes up to twice the
        half-extent.
    rule : SphereRule, optional

    Returns
    -------
    QuotientReport
    """
    if not isinstance(g, Field) or not g.is_physical():
        raise UsageError("intro_chain_check expects a physical boundary field")
    if tgrid is None:
        tgrid = make_tgrid(0.0, 2.0 * g.grid.halfExtent, _DEFAULT_TNODES)
    elif abs(tgrid.a) > 1e-12:
        raise UsageError("the chain at exponent 2 carries the unweighted measure")
    rule = make_sphere_rule(g.grid.d) if rule is None else rule
    G = poisson_extend(g, tgrid)
    stack = gradient_stack(G)
    e2 = affine_energy(stack, 2.0, tgrid, rule)
    dtf = dt_norm(stack, 2.0, tgrid)
    axes = tuple(range(1, stack.dt.ndim))
    grad_sq = 0.0
    for i in range(g.grid.d):
        sums = np.sum(np.abs(stack.spatial[i]) ** 2, axis=axes) * g.grid.cellVolume
        grad_sq += float(tgrid.apply(sums))
    spatial_norm = math.sqrt(grad_sq)
    full_sq = grad_sq + dtf**2
    lhs = 2.0 * e2 * dtf
    quotient = lhs / full_sq
    res = {
        "pointsPerAxis": g.grid.pointsPerAxis,
        "halfExtent": g.grid.halfExtent,
        "tNodes": tgrid.count,
        "tMax": tgrid.tMax,
        "sphereCount": rule.count,
        "affineEnergy": e2,
        "spatialGradientNorm": spatial_norm,
        "dtNorm": dtf,
        "energyStepMargin": spatial_norm - e2,
        "meanStepMargin": full_sq - 2.0 * spatial_norm * dtf,
    }
    return _make_report(lhs, e2, dtf, quotient, 1.0, 0.0, res)

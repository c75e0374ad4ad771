"""Half-space extensions: the Poisson kernel and the non-Poisson kernel.

Two extension machines live here. The Poisson side is classical: the
kernel, its Fourier multiplier ``exp(-2 pi t |xi|)``, the closed-form
time weight ``Gamma(a+1)/(4 pi |xi|)^(a+1)``, and the slice-by-slice
spectral extension of a boundary field.

The non-Poisson side extends a boundary field with the multiplier

    Qhat_t(rho) = F[(1 + t^p' + |.|^p')^q](rho) / F[(1 + |.|^p')^q](rho),

the ratio of the transform of the shifted power profile to the transform
``H0hat`` of the unshifted one. ``H0hat`` is tabulated once as a
:class:`RadialProfile` and every ``Qhat_t`` value is produced by the
exact scaling reduction

    Qhat_t(rho) = (1+t^p')^(q + d/p') H0hat(lambda_t rho) / H0hat(rho),
    lambda_t = (1+t^p')^(1/p'),

with an independent direct-quadrature path kept for cross-checking.
``H0hat`` oscillates and crosses zero at finite radius, so the profile
records where its magnitude first drops below a configured floor and the
norm/extension operations restrict to radii below that guard, reporting
the spectral mass they exclude; dividing by a near-zero denominator
raises instead of silently amplifying noise.

The anti-Sobolev-type weight ``W(rho) = int_0^inf |Qhat_t(rho)|^2
t^(2 alpha - 1) dt`` and the norm built from it complete the module.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import roots_legendre

from .constants import Params, gamma
from .errors import (
    ConditioningError,
    DomainError,
    ParameterError,
    RangeError,
    UsageError,
)
from .kernels import radial_fourier_block, radial_fourier_block_full
from .sampling import (
    FREQUENCY,
    GAUSS_COMPOSITE,
    PHYSICAL,
    Field,
    HalfSpaceField,
    make_tgrid,
)
from .spectral import dft, idft

__all__ = [
    "RadialProfile",
    "NonPoissonNormReport",
    "base_profile",
    "export_profile_csv",
    "import_profile_csv",
    "nonpoisson_extend",
    "nonpoisson_norm",
    "nonpoisson_norm_report",
    "poisson_extend",
    "poisson_kernel",
    "poisson_multiplier",
    "poisson_time_weight",
    "q_multiplier",
    "q_multiplier_direct",
    "q_multiplier_dt",
    "q_weight_profile",
    "q_weight_profile_s_form",
]

DEFAULT_FLOOR_FRACTION = 1e-10
_TAIL_NODE_FRACTION = 0.05
_MAX_ANGLES = 1 << 17


# --------------------------------------------------------------------------
# tabulated radial profiles


class RadialProfile:
    """A tabulated radial function with cubic interpolation in log radius.

    Houses the kernel-profile transforms of the module: evaluation
    inside the tabulated range interpolates; outside it, on either side,
    it raises a range error (no extrapolation). The ``tailDecayed``
    property records whether the tabulated tail sits below the floor,
    letting consumers that need values beyond the table (the rescaled
    numerator of the kernel ratio) substitute zero instead.

    Attributes
    ----------
    rho : numpy.ndarray
        Increasing positive tabulation radii (log-spaced), read-only.
    values : numpy.ndarray
        Tabulated profile values, read-only.
    n, alpha, pPrime, q : float
        Parameter echo of the profile's origin.
    mass : float
        Zero-frequency value (the mass of the underlying profile).
    floor : float
        Absolute magnitude floor; denominators below it are treated as
        unresolvable by the consumers of this profile.
    guardRadius : float or None
        First tabulated radius where ``|value| < floor``; None when the
        whole table stays above the floor.
    imagResidue : float
        Largest imaginary residue observed while building the table
        (zero for imported profiles).
    """

    __slots__ = (
        "rho",
        "values",
        "n",
        "alpha",
        "pPrime",
        "q",
        "mass",
        "floor",
        "guardRadius",
        "imagResidue",
        "_spline",
        "_tail_decayed",
    )

    def __init__(self, rho, values, *, n, alpha, pPrime, q, mass, floor, imagResidue=0.0):
        rho = np.asarray(rho, dtype=np.float64).copy()
        values = np.asarray(values, dtype=np.float64).copy()
        if rho.ndim != 1 or rho.size < 8 or values.shape != rho.shape:
            raise UsageError("profile needs matching 1-d tables with at least 8 nodes")
        if not (np.all(rho > 0.0) and np.all(np.diff(rho) > 0.0)):
            raise UsageError("profile radii must be positive and strictly increasing")
        if not (np.isfinite(values).all() and np.isfinite(rho).all()):
            raise UsageError("profile tables must be finite")
        rho.flags.writeable = False
        values.flags.writeable = False
        floor = float(floor)
        below = np.flatnonzero(np.abs(values) < floor)
        guard = float(rho[below[0]]) if below.size else None
        tail = max(1, int(round(_TAIL_NODE_FRACTION * rho.size)))
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "n", float(n))
        object.__setattr__(self, "alpha", float(alpha))
        object.__setattr__(self, "pPrime", float(pPrime))
        object.__setattr__(self, "q", float(q))
        object.__setattr__(self, "mass", float(mass))
        object.__setattr__(self, "floor", floor)
        object.__setattr__(self, "guardRadius", guard)
        object.__setattr__(self, "imagResidue", float(imagResidue))
        object.__setattr__(self, "_spline", CubicSpline(np.log(rho), values))
        object.__setattr__(
            self, "_tail_decayed", bool(np.max(np.abs(values[-tail:])) < floor)
        )

    def __setattr__(self, name, value):
        raise AttributeError("RadialProfile is immutable")

    @property
    def rhoMin(self):
        return float(self.rho[0])

    @property
    def rhoMax(self):
        return float(self.rho[-1])

    @property
    def tailDecayed(self):
        """Whether the tabulated tail lies below the floor.

        True when every magnitude over the last twentieth of the table is
        below the floor; consumers needing values beyond the tabulated
        range (the rescaled numerator of the kernel ratio) may then treat
        them as zero. The profile itself never extrapolates.
        """
        return self._tail_decayed

    def _checked_radii(self, radius):
        arr = np.asarray(radius, dtype=np.float64)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if not np.isfinite(arr).all():
            raise DomainError("profile evaluation requires finite radii")
        if np.any(arr < self.rhoMin):
            bad = float(arr[arr < self.rhoMin][0])
            raise RangeError(
                f"radius {bad} is below the tabulated range "
                f"[{self.rhoMin}, {self.rhoMax}]"
            )
        if np.any(arr > self.rhoMax):
            bad = float(arr[arr > self.rhoMax][0])
            raise RangeError(
                f"radius {bad} is beyond the tabulated range "
                f"[{self.rhoMin}, {self.rhoMax}]: the profile does not extrapolate"
            )
        return arr, scalar

    def evaluate(self, radius):
        """Interpolated profile value(s) at the given radius or array.

        Raises
        ------
        RangeError
            Outside the tabulated range, on either side: the profile
            interpolates only and never extrapolates.
        """
        arr, scalar = self._checked_radii(radius)
        out = self._spline(np.log(arr))
        if scalar:
            return float(out[0])
        return out

    __call__ = evaluate

    def derivative(self, radius):
        """Radial derivative of the interpolant at the radius or array.

        Differentiates the log-radius spline itself (chain rule in the
        log variable), so the values are exactly the slope of what
        :meth:`evaluate` returns. Range rules match ``evaluate``: no
        extrapolation on either side.
        """
        arr, scalar = self._checked_radii(radius)
        out = self._spline(np.log(arr), 1) / arr
        if scalar:
            return float(out[0])
        return out


def _composite_legendre(r_max, panel_width, nodes_per_panel=16):
    """Composite Gauss-Legendre rule on [0, r_max]."""
    panels = max(4, int(math.ceil(r_max / panel_width)))
    x, w = roots_legendre(nodes_per_panel)
    edges = np.linspace(0.0, r_max, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _angle_count(z):
    """Initial angle-lattice size for a phase magnitude z."""
    need = max(64.0, 2.2 * z + 40.0)
    return 1 << int(math.ceil(math.log2(need)))


def _radial_transform(hr, r_nodes, rhos, tol_abs):
    """Angle-trapezoid transform with lattice doubling to self-consistency."""
    rhos = np.asarray(rhos, dtype=np.float64)
    r_max = float(r_nodes[-1])
    values = np.empty(rhos.size)
    start = np.array([_angle_count(2.0 * math.pi * rho * r_max) for rho in rhos])
    for m0 in np.unique(start):
        sel = start == m0
        batch = rhos[sel]
        m = int(m0)
        coarse = radial_fourier_block(hr, r_nodes, batch, m)
        while True:
            m *= 2
            if m > _MAX_ANGLES:
                raise ConditioningError(
                    "angle lattice failed to reach self-consistency "
                    f"within {_MAX_ANGLES} nodes"
                )
            fine = radial_fourier_block(hr, r_nodes, batch, m)
            if float(np.max(np.abs(fine - coarse))) <= tol_abs:
                break
            coarse = fine
        values[sel] = fine
    return values


def _imag_residue_subsample(hr, r_nodes, rhos, sample_count=12):
    """Largest imaginary residue over a subsample, via the full lattice."""
    step = max(1, rhos.size // sample_count)
    sample = np.ascontiguousarray(rhos[::step])
    r_max = float(r_nodes[-1])
    residue = 0.0
    for rho in sample:
        m = 2 * _angle_count(2.0 * math.pi * rho * r_max)
        _, imag = radial_fourier_block_full(hr, r_nodes, np.array([rho]), m)
        residue = max(residue, float(np.abs(imag[0])))
    return residue


def _check_profile_domain(params):
    d = params.n - 1
    if d != 2:
        raise ParameterError(
            "profile tabulation is implemented for a 2-dimensional boundary "
            f"(got boundary dimension {d})"
        )
    if params.pPrime * abs(params.q) <= d:
        raise DomainError(
            "kernel profile is not integrable: need p'|q| > boundary dimension "
            f"(got {params.pPrime * abs(params.q)} <= {d})"
        )
    return d


def base_profile(
    params,
    *,
    rhoMin=1e-3,
    rhoMax=9.0,
    count=512,
    floorFraction=DEFAULT_FLOOR_FRACTION,
    angleTol=1e-10,
    rMax=20.0,
):
    """Tabulate ``H0hat``, the planar transform of the power profile.

    Computes the radial Fourier transform of ``r -> (1+r^p')^q`` on a
    log-spaced radius table by radial quadrature of the angle-averaged
    kernel: the Bessel factor is realized as the uniform-lattice angle
    average of ``exp(-2 pi i r rho cos(theta))`` with the lattice doubled
    until self-consistent to ``angleTol`` (absolute, scaled by the mass).

    Parameters
    ----------
    params : Params
        Parameter pack; the boundary dimension must be 2 and the decay
        exponent must satisfy p'|q| > 2.
    rhoMin, rhoMax : float
        Tabulated radius range.
    count : int
        Number of log-spaced tabulation radii.
    floorFraction : float
        The profile floor as a fraction of the mass.
    angleTol : float
        Angle-lattice self-consistency target, relative to the mass.
    rMax : float
        Radial quadrature truncation point.

    Returns
    -------
    RadialProfile

    Raises
    ------
    ParameterError
        Boundary dimension other than 2, or malformed controls.
    DomainError
        Insufficient decay (p'|q| <= boundary dimension).
    """
    _check_profile_domain(params)
    if not (0.0 < rhoMin < rhoMax):
        raise ParameterError(f"need 0 < rhoMin < rhoMax (got {rhoMin}, {rhoMax})")
    if int(count) != count or count < 32:
        raise ParameterError(f"count must be an integer >= 32 (got {count})")
    if not (floorFraction > 0.0):
        raise ParameterError(f"floorFraction must be positive (got {floorFraction})")

    # radial rule: panel width short enough that a 16-node panel resolves
    # the fastest oscillation 2 pi rhoMax r over one panel
    panel_width = min(0.25, 1.8 / rhoMax)
    r_nodes, r_weights = _composite_legendre(rMax, panel_width)
    profile_vals = (1.0 + r_nodes**params.pPrime) ** params.q
    hr = r_weights * profile_vals * 2.0 * math.pi * r_nodes

    mass = float(np.sum(hr))
    rhos = np.geomspace(rhoMin, rhoMax, int(count))
    values = _radial_transform(hr, r_nodes, rhos, angleTol * mass)
    imag_residue = _imag_residue_subsample(hr, r_nodes, rhos)
    return RadialProfile(
        rhos,
        values,
        n=params.n,
        alpha=params.alpha,
        pPrime=params.pPrime,
        q=params.q,
        mass=mass,
        floor=floorFraction * mass,
        imagResidue=imag_residue,
    )


def export_profile_csv(profile, destination):
    """Write a profile as CSV ``rho,value`` rows.

    The first line is a comment header recording the parameters, floor,
    range, and mass, so the table is reproducible and re-importable.

    Returns
    -------
    int
        Number of data rows written.
    """
    header_meta = (
        f"# n={profile.n!r} alpha={profile.alpha!r} pPrime={profile.pPrime!r} "
        f"q={profile.q!r} floor={profile.floor!r} rhoMin={profile.rhoMin!r} "
        f"rhoMax={profile.rhoMax!r} mass={profile.mass!r}"
    )

    def write(fh):
        fh.write(header_meta + "\n")
        fh.write("rho,value\n")
        for rho, val in zip(profile.rho, profile.values):
            fh.write(f"{float(rho)!r},{float(val)!r}\n")
        return profile.rho.size

    if isinstance(destination, (str, bytes)):
        with open(destination, "w", encoding="ascii") as fh:
            return write(fh)
    if isinstance(destination, io.TextIOBase) or hasattr(destination, "write"):
        return write(destination)
    raise UsageError(f"destination must be a path or a text file (got {type(destination)})")


def import_profile_csv(source):
    """Rebuild a profile from :func:`export_profile_csv` output."""

    def read(fh):
        meta_line = fh.readline().strip()
        if not meta_line.startswith("#"):
            raise UsageError("profile CSV must start with a metadata header line")
        meta = {}
        for token in meta_line[1:].split():
            key, _, raw = token.partition("=")
            meta[key] = float(raw)
        needed = ("n", "alpha", "pPrime", "q", "floor", "mass")
        missing = [k for k in needed if k not in meta]
        if missing:
            raise UsageError(f"profile CSV header is missing {missing}")
        column_line = fh.readline().strip()
        if column_line != "rho,value":
            raise UsageError("profile CSV must have the column header 'rho,value'")
        rho = []
        values = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            left, _, right = line.partition(",")
            rho.append(float(left))
            values.append(float(right))
        return RadialProfile(
            np.array(rho),
            np.array(values),
            n=meta["n"],
            alpha=meta["alpha"],
            pPrime=meta["pPrime"],
            q=meta["q"],
            mass=meta["mass"],
            floor=meta["floor"],
        )

    if isinstance(source, (str, bytes)):
        with open(source, "r", encoding="ascii") as fh:
            return read(fh)
    if isinstance(source, io.TextIOBase) or hasattr(source, "readline"):
        return read(source)
    raise UsageError(f"source must be a path or a text file (got {type(source)})")


# --------------------------------------------------------------------------
# Poisson side


def poisson_kernel(t, x, n):
    """Poisson kernel value on the boundary of the upper half-space.

        P_t(x) = pi^(-n/2) Gamma(n/2) t (t^2 + |x|^2)^(-n/2)

    Parameters
    ----------
    t : float
        Positive height.
    x : array-like
        Boundary point(s): an array whose last axis has length n-1, or a
        scalar meaning the distance from the origin (the kernel is
        radial).
    n : int
        Ambient dimension, at least 2.

    Returns
    -------
    float or numpy.ndarray

    Raises
    ------
    DomainError
        If t <= 0.
    ParameterError
        If n < 2.
    UsageError
        If the last axis of a vector input does not have length n-1.
    """
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"poisson_kernel requires t > 0 (got {t})")
    if int(n) != n or n < 2:
        raise ParameterError(f"ambient dimension must be an integer >= 2 (got {n})")
    n = int(n)
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        r_sq = float(arr) ** 2
    else:
        if arr.shape[-1] != n - 1:
            raise UsageError(
                f"boundary points must have {n - 1} components on the last axis "
                f"(got shape {arr.shape})"
            )
        r_sq = np.sum(arr**2, axis=-1)
    norm = math.pi ** (-0.5 * n) * gamma(0.5 * n)
    out = norm * t * (t * t + r_sq) ** (-0.5 * n)
    if np.ndim(out) == 0:
        return float(out)
    return out


def poisson_multiplier(t, rho):
    """Fourier multiplier of the Poisson kernel, ``exp(-2 pi t rho)``.

    Parameters
    ----------
    t : float
        Nonnegative height (0 gives the identity multiplier).
    rho : float or numpy.ndarray
        Frequency radii.

    Raises
    ------
    DomainError
        If t < 0 or any radius is negative.
    """
    t = float(t)
    if t < 0.0:
        raise DomainError(f"poisson_multiplier requires t >= 0 (got {t})")
    rho_arr = np.asarray(rho, dtype=np.float64)
    if np.any(rho_arr < 0.0):
        raise DomainError("poisson_multiplier requires nonnegative radii")
    out = np.exp(-2.0 * math.pi * t * rho_arr)
    if rho_arr.ndim == 0:
        return float(out)
    return out


def poisson_time_weight(rho, a):
    """Closed-form time integral of the squared Poisson multiplier.

        int_0^inf exp(-4 pi rho t) t^a dt = Gamma(a+1) / (4 pi rho)^(a+1)

    Parameters
    ----------
    rho : float or numpy.ndarray
        Strictly positive frequency radii.
    a : float
        Nonnegative weight exponent.

    Raises
    ------
    DomainError
        If any radius is <= 0 (the integral diverges) or a < 0.
    """
    a = float(a)
    if a < 0.0:
        raise DomainError(f"poisson_time_weight requires a >= 0 (got {a})")
    rho_arr = np.asarray(rho, dtype=np.float64)
    if np.any(rho_arr <= 0.0):
        raise DomainError("poisson_time_weight diverges at rho <= 0")
    out = gamma(a + 1.0) * (4.0 * math.pi * rho_arr) ** (-(a + 1.0))
    if rho_arr.ndim == 0:
        return float(out)
    return out


def poisson_extend(g, tgrid):
    """Poisson extension of a boundary field onto the half-space.

    Slice k is the inverse transform of ``exp(-2 pi t_k |xi|) ghat``.

    Parameters
    ----------
    g : Field
        Physical-side boundary field.
    tgrid : TGrid
        Half-line quadrature rule supplying the slice heights.

    Returns
    -------
    HalfSpaceField
    """
    if not g.is_physical():
        raise UsageError("poisson_extend expects a physical-side field")
    spec = dft(g)
    rho = g.grid.freq_radii()
    data = np.empty((tgrid.count,) + g.grid.shape, dtype=np.complex128)
    for k, t in enumerate(tgrid.nodes):
        mult = np.exp(-2.0 * math.pi * float(t) * rho)
        data[k] = idft(Field(g.grid, spec.values * mult, FREQUENCY)).values
    return HalfSpaceField(tgrid, g.grid, data, side=PHYSICAL)


# --------------------------------------------------------------------------
# non-Poisson side


def _require_params_match(profile, params):
    if (
        abs(profile.pPrime - params.pPrime) > 1e-12
        or abs(profile.q - params.q) > 1e-12
    ):
        raise UsageError(
            "profile was tabulated for different kernel parameters "
            f"(profile p'={profile.pPrime}, q={profile.q}; "
            f"params p'={params.pPrime}, q={params.q})"
        )


def q_multiplier(t, rho, base, params):
    """Non-Poisson Fourier multiplier by the exact scaling reduction.

        Qhat_t(rho) = (1+t^p')^(q+d/p') H0hat(lambda_t rho) / H0hat(rho),
        lambda_t = (1+t^p')^(1/p')

    which follows from rescaling the shifted profile onto the unshifted
    one. Inputs broadcast: ``t`` and ``rho`` may be arrays.

    Parameters
    ----------
    t : float or numpy.ndarray
        Nonnegative heights.
    rho : float or numpy.ndarray
        Strictly positive frequency radii inside the tabulated range.
    base : RadialProfile
        Tabulated ``H0hat``.
    params : Params

    Raises
    ------
    DomainError
        Negative height or nonpositive radius.
    RangeError
        Radius outside the tabulation, or a rescaled numerator radius
        beyond it while the tabulated tail has not decayed below the
        floor (when it has decayed, the numerator is taken as zero).
    ConditioningError
        Denominator magnitude below the profile floor, reporting the
        offending radius.
    UsageError
        Profile/parameter mismatch.
    """
    _require_params_match(base, params)
    t_arr = np.asarray(t, dtype=np.float64)
    rho_arr = np.asarray(rho, dtype=np.float64)
    scalar = t_arr.ndim == 0 and rho_arr.ndim == 0
    if np.any(t_arr < 0.0):
        raise DomainError("q_multiplier requires t >= 0")
    if np.any(rho_arr <= 0.0):
        raise DomainError("q_multiplier requires rho > 0")
    den = np.asarray(base.evaluate(rho_arr))
    small = np.abs(den) < base.floor
    if np.any(small):
        bad_index = np.flatnonzero(small.ravel())[0]
        bad = float(np.broadcast_to(rho_arr, den.shape).ravel()[bad_index])
        raise ConditioningError(
            f"profile magnitude below the floor {base.floor:.3e} near rho ~ {bad}: "
            "denominator of the kernel ratio is unresolvable there"
        )
    shape_t = 1.0 + t_arr**params.pPrime
    lam = shape_t ** (1.0 / params.pPrime)
    prefactor = shape_t ** (params.q + params.d / params.pPrime)
    lam_rho = np.asarray(lam * rho_arr, dtype=np.float64)
    beyond = lam_rho > base.rhoMax
    if np.any(beyond):
        if not base.tailDecayed:
            bad = float(np.atleast_1d(lam_rho[beyond])[0])
            raise RangeError(
                f"rescaled radius {bad} is beyond the tabulated range "
                f"[{base.rhoMin}, {base.rhoMax}] and the tabulated tail has "
                "not decayed below the floor; extend the table or raise "
                "the floor"
            )
        num = np.zeros_like(lam_rho)
        inside = ~beyond
        if np.any(inside):
            num[inside] = base.evaluate(lam_rho[inside])
    else:
        num = np.asarray(base.evaluate(lam_rho))
    out = prefactor * num / den
    if scalar:
        return float(out)
    return out


def q_multiplier_dt(t, rho, base, params):
    """Height derivative of the non-Poisson Fourier multiplier.

    Differentiating the scaling form of :func:`q_multiplier`,

        Qhat_t(rho) = s^e H0hat(lambda rho) / H0hat(rho),
        s = 1 + t^p',  e = q + d/p',  lambda = s^(1/p'),

    in the height gives

        d/dt Qhat_t(rho) = [ e s'(t) s^(e-1) H0hat(lambda rho)
            + s^e H0hat'(lambda rho) rho lambda'(t) ] / H0hat(rho),
        s'(t) = p' t^(p'-1),  lambda'(t) = t^(p'-1) s^(1/p'-1).

    Domains, the denominator floor, the decayed-tail rule for rescaled
    radii beyond the table (numerator value and numerator slope are
    both taken as zero there), and broadcasting all match
    :func:`q_multiplier`; the raised errors are the same.
    """
    _require_params_match(base, params)
    t_arr = np.asarray(t, dtype=np.float64)
    rho_arr = np.asarray(rho, dtype=np.float64)
    scalar = t_arr.ndim == 0 and rho_arr.ndim == 0
    if np.any(t_arr < 0.0):
        raise DomainError("q_multiplier_dt requires t >= 0")
    if np.any(rho_arr <= 0.0):
        raise DomainError("q_multiplier_dt requires rho > 0")
    den = np.asarray(base.evaluate(rho_arr))
    small = np.abs(den) < base.floor
    if np.any(small):
        bad_index = np.flatnonzero(small.ravel())[0]
        bad = float(np.broadcast_to(rho_arr, den.shape).ravel()[bad_index])
        raise ConditioningError(
            f"profile magnitude below the floor {base.floor:.3e} near rho ~ {bad}: "
            "denominator of the kernel ratio is unresolvable there"
        )
    shape_t = 1.0 + t_arr**params.pPrime
    power_t = t_arr ** (params.pPrime - 1.0)
    exponent = params.q + params.d / params.pPrime
    lam = shape_t ** (1.0 / params.pPrime)
    lam_rho = np.asarray(lam * rho_arr, dtype=np.float64)
    beyond = lam_rho > base.rhoMax
    if np.any(beyond):
        if not base.tailDecayed:
            bad = float(np.atleast_1d(lam_rho[beyond])[0])
            raise RangeError(
                f"rescaled radius {bad} is beyond the tabulated range "
                f"[{base.rhoMin}, {base.rhoMax}] and the tabulated tail has "
                "not decayed below the floor; extend the table or raise "
                "the floor"
            )
        num = np.zeros_like(lam_rho)
        num_d = np.zeros_like(lam_rho)
        inside = ~beyond
        if np.any(inside):
            num[inside] = base.evaluate(lam_rho[inside])
            num_d[inside] = base.derivative(lam_rho[inside])
    else:
        num = np.asarray(base.evaluate(lam_rho))
        num_d = np.asarray(base.derivative(lam_rho))
    value_part = exponent * params.pPrime * power_t * shape_t ** (exponent - 1.0) * num
    slope_part = (
        shape_t**exponent
        * num_d
        * rho_arr
        * power_t
        * shape_t ** (1.0 / params.pPrime - 1.0)
    )
    out = (value_part + slope_part) / den
    if scalar:
        return float(out)
    return out


def q_multiplier_direct(t, rho, params, *, rMax=24.0, angleTol=1e-10):
    """Non-Poisson multiplier by direct quadrature of both transforms.

    Computes numerator and denominator transforms independently at the
    requested point (no tabulated profile, no scaling reduction); used
    to cross-check :func:`q_multiplier`.
    """
    _check_profile_domain(params)
    t = float(t)
    rho = float(rho)
    if t < 0.0:
        raise DomainError("q_multiplier_direct requires t >= 0")
    if rho <= 0.0:
        raise DomainError("q_multiplier_direct requires rho > 0")
    panel_width = min(0.25, 1.8 / max(rho, 1.0))
    r_nodes, r_weights = _composite_legendre(rMax, panel_width)
    base_vals = (1.0 + r_nodes**params.pPrime) ** params.q
    shifted_vals = (1.0 + t**params.pPrime + r_nodes**params.pPrime) ** params.q
    two_pi_r = 2.0 * math.pi * r_nodes
    mass = float(np.sum(r_weights * base_vals * two_pi_r))
    den = _radial_transform(
        r_weights * base_vals * two_pi_r, r_nodes, np.array([rho]), angleTol * mass
    )
    num = _radial_transform(
        r_weights * shifted_vals * two_pi_r, r_nodes, np.array([rho]), angleTol * mass
    )
    return float(num[0] / den[0])


def _require_weight_exponent(tgrid, params):
    if abs(tgrid.a - params.a) > 1e-12:
        raise UsageError(
            f"quadrature rule carries weight exponent {tgrid.a}, "
            f"but the parameters need a = 2 alpha - 1 = {params.a}"
        )


def _check_guard(rho, base):
    if base.guardRadius is not None and rho >= base.guardRadius:
        raise ConditioningError(
            f"rho = {rho} is at or beyond the guard radius {base.guardRadius} "
            "(first profile floor crossing); the kernel ratio is unresolvable there"
        )


def q_weight_profile(rho, base, params, tgrid, *, decayTol=1e-6):
    """Anti-Sobolev weight ``W(rho) = int_0^inf |Qhat_t(rho)|^2 t^(2a-1) dt``.

    Computed in the t-form with the weighted half-line rule (whose folded
    weight exponent must equal ``2 alpha - 1``).

    Parameters
    ----------
    rho : float
        Radius strictly below the profile guard.
    base : RadialProfile
    params : Params
    tgrid : TGrid
        Rule with weight exponent ``params.a``.
    decayTol : float
        Divergence guard: the bare integrand at the last node must not
        exceed this fraction of its maximum.

    Raises
    ------
    ConditioningError
        At or beyond the guard radius, or when the integrand tail has
        not decayed.
    """
    rho = float(rho)
    _require_weight_exponent(tgrid, params)
    _check_guard(rho, base)
    qm = q_multiplier(tgrid.nodes, rho, base, params)
    integrand = np.abs(qm) ** 2
    peak = float(np.max(integrand))
    if peak > 0.0 and float(integrand[-1]) > decayTol * peak:
        raise ConditioningError(
            f"time integrand has not decayed by t = {tgrid.tMax} at rho = {rho}: "
            f"tail fraction {float(integrand[-1]) / peak:.3e} exceeds {decayTol}"
        )
    return float(tgrid.apply(integrand))


def q_weight_profile_s_form(rho, base, params, *, count=384, tMaxFactor=None):
    """The same weight via the substituted form, as an independent check.

    Implements ``rho^(-2 alpha) int_0^inf |s^alpha Qhat_{s/rho}(rho)|^2
    ds/s`` with its own uniform-panel quadrature in s, independent of
    the t-form rule. Using ``2 alpha = a + 1``, the prefactor is
    ``rho^-(a+1)`` and the s-rule folds the weight ``s^a``.
    """
    rho = float(rho)
    _require_params_match(base, params)
    _check_guard(rho, base)
    s_max = (32.0 if tMaxFactor is None else tMaxFactor) * rho
    sgrid = make_tgrid(params.a, s_max, count, GAUSS_COMPOSITE)
    qm = q_multiplier(sgrid.nodes / rho, rho, base, params)
    integrand = np.abs(qm) ** 2
    return float(rho ** (-(params.a + 1.0)) * sgrid.apply(integrand))


@dataclass(frozen=True)
class NonPoissonNormReport:
    """Anti-Sobolev norm with the spectral restriction bookkeeping.

    Attributes
    ----------
    value : float
        The norm over frequency modes strictly inside the guard.
    excludedMassFraction : float
        Fraction of the (zero-mode-free) squared spectral mass of the
        input that lies at or beyond the guard radius and was excluded.
    guardRadius : float or None
        The profile guard that produced the restriction.
    """

    value: float
    excludedMassFraction: float
    guardRadius: float | None


def _q_multiplier_matrix(rho_flat, base, params, tgrid):
    """Qhat values on (modes x t-nodes)."""
    return q_multiplier(
        tgrid.nodes[None, :], rho_flat[:, None], base, params
    )


def resolvable_mask(rho, base):
    """Modes on which the kernel-ratio denominator is resolvable.

    A mode is kept when it is not the zero mode, lies inside the
    tabulated range and strictly inside the guard radius, and the
    tabulated magnitude at its radius clears the resolvability floor
    (the interpolant can dip below the floor slightly before the first
    tabulated sub-floor node; such modes are excluded as well).
    """
    kept = (rho > 0.0) & (rho >= base.rhoMin) & (rho <= base.rhoMax)
    guard = base.guardRadius
    if guard is not None:
        kept &= rho < guard
    if np.any(kept):
        vals = np.zeros_like(rho)
        vals[kept] = base.evaluate(rho[kept])
        kept &= np.abs(vals) >= base.floor
    return kept


def nonpoisson_norm_report(h, base, params, tgrid, *, decayTol=1e-6):
    """Anti-Sobolev-type norm of a boundary field, with restriction report.

    Evaluates ``(sum_(|xi|<guard) |hhat(xi)|^2 W(|xi|) dxi^d)^(1/2)``
    with ``W`` computed in the t-form on the supplied rule. The zero
    mode is kept and carries the exact mass-ratio weight
    ``int t^a (1+t^p')^(2(q+d/p')) dt`` (its kernel-ratio limit), so a
    mass-carrying field agrees with the weighted half-space norm of its
    extension; modes at or beyond the profile guard are excluded and
    their squared-mass fraction is reported.

    Raises
    ------
    UsageError
        Frequency-side input or weight-exponent mismatch.
    ConditioningError
        If the time integrand fails the decay check on any kept mode.
    """
    if not h.is_physical():
        raise UsageError("nonpoisson_norm expects a physical-side field")
    _require_weight_exponent(tgrid, params)
    _require_params_match(base, params)
    grid = h.grid
    spec = dft(h)
    rho = grid.freq_radii().ravel()
    power = (np.abs(spec.values.ravel()) ** 2).astype(np.float64)
    nonzero = rho > 0.0
    guard = base.guardRadius
    kept = resolvable_mask(rho, base)
    total = float(np.sum(power))
    excluded = float(np.sum(power[nonzero & ~kept]))
    fraction = excluded / total if total > 0.0 else 0.0
    shape_t = 1.0 + tgrid.nodes**params.pPrime
    dc_weight = float(
        (shape_t ** (2.0 * (params.q + params.d / params.pPrime))) @ tgrid.weights
    )
    dc_sq = float(np.sum(power[~nonzero])) * dc_weight
    rho_kept = rho[kept]
    if rho_kept.size == 0:
        return NonPoissonNormReport(
            math.sqrt(dc_sq * grid.freqCellVolume), fraction, guard
        )
    qm = _q_multiplier_matrix(rho_kept, base, params, tgrid)
    integrand = np.abs(qm) ** 2
    peaks = integrand.max(axis=1)
    tails = integrand[:, -1]
    bad = tails > decayTol * np.maximum(peaks, 1e-300)
    if np.any(bad):
        worst = int(np.argmax(tails / np.maximum(peaks, 1e-300)))
        raise ConditioningError(
            "time integrand has not decayed by "
            f"t = {tgrid.tMax} at rho = {float(rho_kept[worst])}"
        )
    w_vals = integrand @ tgrid.weights
    value = math.sqrt(
        (float(np.sum(power[kept] * w_vals)) + dc_sq) * grid.freqCellVolume
    )
    return NonPoissonNormReport(value, fraction, guard)


def nonpoisson_norm(h, base, params, tgrid, *, decayTol=1e-6):
    """Anti-Sobolev-type norm (value only); see :func:`nonpoisson_norm_report`."""
    return nonpoisson_norm_report(h, base, params, tgrid, decayTol=decayTol).value


def nonpoisson_extend(h, base, params, tgrid):
    """Non-Poisson extension of a boundary field onto the half-space.

    Slice k is the inverse transform of ``Qhat_{t_k}(|xi|) hhat(xi)``.
    The zero mode carries the exact mass-ratio multiplier
    ``(1+t^p')^(q+d/p')``; modes at or beyond the profile guard are
    zeroed (the kernel ratio is unresolvable there), consistent with the
    restriction in :func:`nonpoisson_norm_report`.

    Returns
    -------
    HalfSpaceField
    """
    if not h.is_physical():
        raise UsageError("nonpoisson_extend expects a physical-side field")
    _require_params_match(base, params)
    grid = h.grid
    spec = dft(h)
    rho = grid.freq_radii()
    kept = resolvable_mask(rho, base)
    rho_kept = rho[kept]
    data = np.empty((tgrid.count,) + grid.shape, dtype=np.complex128)
    shape_t = 1.0 + tgrid.nodes**params.pPrime
    dc_mult = shape_t ** (params.q + params.d / params.pPrime)
    qm = (
        q_multiplier(tgrid.nodes[None, :], rho_kept[:, None], base, params)
        if rho_kept.size
        else np.zeros((0, tgrid.count))
    )
    for k in range(tgrid.count):
        mult = np.zeros(grid.shape)
        mult[grid.zeroIndex] = dc_mult[k]
        if rho_kept.size:
            mult[kept] = qm[:, k]
        data[k] = idft(Field(grid, spec.values * mult, FREQUENCY)).values
    return HalfSpaceField(tgrid, grid, data, side=PHYSICAL)

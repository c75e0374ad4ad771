"""Backend dispatch for the numerics hot loops.

Two inner loops dominate the package's run time, and each is provided
in two interchangeable implementations — a compiled path (numba
``@njit``) and a pure-numpy path with chunked blocks:

* the angle-averaged radial Fourier transform used to tabulate kernel
  profiles: for each radius it averages ``exp(-2 pi i rho r cos(theta))``
  over a uniform angle lattice and integrates against a weighted radial
  profile;
* the directional power sums behind the affine energy: for every sphere
  direction and every half-space slice, the sum over grid points of
  ``|<gradient, direction>|^p``.

The radial transform offers a folded variant that exploits the exact
lattice symmetry ``cos(2 pi (M-c)/M) = cos(2 pi c/M)`` to halve the
work and return the real part only, and an unfolded variant that sums
the full complex lattice and also returns the imaginary residue (used
to verify the symmetry numerically rather than assume it).

The compiled path is used automatically when numba imports cleanly;
setting the environment variable ``AFFTRACE_DISABLE_NUMBA`` to a truthy
value (``1``, ``true``, ``yes``, ``on``) forces the numpy path. Both
produce identical results up to floating-point reassociation; the test
suite pins them against each other and ``benchmarks/bench_kernels.py``
compares their throughput.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "backend_name",
    "numba_enabled",
    "directional_power_sums",
    "radial_fourier_block",
    "radial_fourier_block_full",
]

_ANGLE_CHUNK = 2048
_DIRECTION_CHUNK = 128


def _truthy(text):
    return text.strip().lower() in ("1", "true", "yes", "on")


_DISABLED = _truthy(os.environ.get("AFFTRACE_DISABLE_NUMBA", ""))

_numba_folded = None
_numba_full = None
_numba_dirpow = None
if not _DISABLED:
    try:
        from numba import njit, prange

        @njit(parallel=True, fastmath=True, cache=True)
        def _numba_folded_impl(hr, r, rhos, angles, out_re):
            m = angles
            half = m // 2
            nr = r.size
            for i in prange(rhos.size):
                two_pi_rho = 2.0 * math.pi * rhos[i]
                acc = 0.0
                for c in range(half + 1):
                    weight = 1.0 if (c == 0 or c == half) else 2.0
                    z = two_pi_rho * math.cos(2.0 * math.pi * c / m)
                    s = 0.0
                    for j in range(nr):
                        s += hr[j] * math.cos(z * r[j])
                    acc += weight * s
                out_re[i] = acc / m

        @njit(parallel=True, fastmath=True, cache=True)
        def _numba_full_impl(hr, r, rhos, angles, out_re, out_im):
            m = angles
            nr = r.size
            for i in prange(rhos.size):
                two_pi_rho = 2.0 * math.pi * rhos[i]
                acc_re = 0.0
                acc_im = 0.0
                for c in range(m):
                    z = two_pi_rho * math.cos(2.0 * math.pi * c / m)
                    s_re = 0.0
                    s_im = 0.0
                    for j in range(nr):
                        arg = z * r[j]
                        s_re += hr[j] * math.cos(arg)
                        s_im += hr[j] * math.sin(arg)
                    acc_re += s_re
                    acc_im -= s_im
                out_re[i] = acc_re / m
                out_im[i] = acc_im / m

        @njit(parallel=True, fastmath=True, cache=True)
        def _numba_dirpow_impl(g1, g2, cosines, sines, half_p, out):
            slices = g1.shape[0]
            points = g1.shape[1]
            for m in prange(cosines.size):
                c = cosines[m]
                s = sines[m]
                for k in range(slices):
                    acc = 0.0
                    if half_p == 1.0:
                        for j in range(points):
                            re = c * g1[k, j].real + s * g2[k, j].real
                            im = c * g1[k, j].imag + s * g2[k, j].imag
                            acc += re * re + im * im
                    else:
                        for j in range(points):
                            re = c * g1[k, j].real + s * g2[k, j].real
                            im = c * g1[k, j].imag + s * g2[k, j].imag
                            acc += (re * re + im * im) ** half_p
                    out[m, k] = acc

        _numba_folded = _numba_folded_impl
        _numba_full = _numba_full_impl
        _numba_dirpow = _numba_dirpow_impl
    except Exception:  # pragma: no cover - exercised only on broken installs
        _numba_folded = None
        _numba_full = None
        _numba_dirpow = None


def numba_enabled():
    """Whether the compiled backend is active."""
    return _numba_folded is not None


def backend_name():
    """Name of the active backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if numba_enabled() else "numpy"


def _numpy_folded(hr, r, rhos, angles):
    half = angles // 2
    cosines = np.cos(2.0 * np.pi * np.arange(half + 1) / angles)
    fold_weights = np.full(half + 1, 2.0)
    fold_weights[0] = 1.0
    fold_weights[-1] = 1.0
    out_re = np.empty(rhos.size)
    for i, rho in enumerate(rhos):
        zr = 2.0 * np.pi * rho * r
        acc = 0.0
        for c0 in range(0, half + 1, _ANGLE_CHUNK):
            block = cosines[c0 : c0 + _ANGLE_CHUNK]
            wblock = fold_weights[c0 : c0 + _ANGLE_CHUNK]
            phase = np.multiply.outer(block, zr)
            acc += float(wblock @ (np.cos(phase) @ hr))
        out_re[i] = acc / angles
    return out_re


def _numpy_full(hr, r, rhos, angles):
    cosines = np.cos(2.0 * np.pi * np.arange(angles) / angles)
    out_re = np.empty(rhos.size)
    out_im = np.empty(rhos.size)
    for i, rho in enumerate(rhos):
        zr = 2.0 * np.pi * rho * r
        acc_re = 0.0
        acc_im = 0.0
        for c0 in range(0, angles, _ANGLE_CHUNK):
            block = cosines[c0 : c0 + _ANGLE_CHUNK]
            phase = np.multiply.outer(block, zr)
            acc_re += float((np.cos(phase) @ hr).sum())
            acc_im -= float((np.sin(phase) @ hr).sum())
        out_re[i] = acc_re / angles
        out_im[i] = acc_im / angles
    return out_re, out_im


def _as_inputs(hr, r, rhos):
    return (
        np.ascontiguousarray(hr, dtype=np.float64),
        np.ascontiguousarray(r, dtype=np.float64),
        np.ascontiguousarray(np.atleast_1d(rhos), dtype=np.float64),
    )


def radial_fourier_block(hr, r, rhos, angles):
    """Angle-trapezoid radial Fourier transform of a weighted profile.

    For each ``rho`` in the batch returns the lattice average

        (1/M) sum_{c=0}^{M-1} sum_j hr[j] cos(2 pi rho r[j] cos(2 pi c / M))

    using the exact cosine fold over the symmetric half of the lattice.
    ``hr`` carries the quadrature weights and the surface factor, so the
    result approximates the planar radial Fourier transform of the
    underlying profile at radius ``rho`` (whose imaginary part vanishes
    by symmetry; see :func:`radial_fourier_block_full` to verify that).

    Parameters
    ----------
    hr : numpy.ndarray
        Weighted profile samples at the radial nodes.
    r : numpy.ndarray
        Radial quadrature nodes.
    rhos : numpy.ndarray
        Batch of transform radii sharing one angle count.
    angles : int
        Number of uniform angle-lattice nodes M (even).

    Returns
    -------
    numpy.ndarray
        One transform value per radius.
    """
    hr, r, rhos = _as_inputs(hr, r, rhos)
    angles = int(angles)
    if angles % 2:
        raise ValueError("angle count must be even")
    if _numba_folded is not None:
        out_re = np.empty(rhos.size)
        _numba_folded(hr, r, rhos, angles, out_re)
        return out_re
    return _numpy_folded(hr, r, rhos, angles)


def radial_fourier_block_full(hr, r, rhos, angles):
    """Unfolded complex lattice average: returns (real, imaginary residue).

    Sums ``exp(-2 pi i rho r cos(theta))`` over the full angle lattice
    with no symmetry shortcut; the imaginary part measures how well the
    lattice realizes a real radial transform.
    """
    hr, r, rhos = _as_inputs(hr, r, rhos)
    angles = int(angles)
    if _numba_full is not None:
        out_re = np.empty(rhos.size)
        out_im = np.empty(rhos.size)
        _numba_full(hr, r, rhos, angles, out_re, out_im)
        return out_re, out_im
    return _numpy_full(hr, r, rhos, angles)


def _numpy_dirpow(gradients, directions, p):
    half_p = 0.5 * p
    count, slices = directions.shape[0], gradients.shape[1]
    out = np.empty((count, slices))
    for k in range(slices):
        block = gradients[:, k, :]
        for m0 in range(0, count, _DIRECTION_CHUNK):
            combo = directions[m0 : m0 + _DIRECTION_CHUNK] @ block
            sq = combo.real**2 + combo.imag**2
            if half_p != 1.0:
                np.power(sq, half_p, out=sq)
            out[m0 : m0 + _DIRECTION_CHUNK, k] = sq.sum(axis=1)
    return out


def directional_power_sums(gradients, directions, p):
    """Power sums of directional derivatives, per direction and slice.

    For direction index m and slice index k returns

        sum_j |sum_i directions[m, i] * gradients[i, k, j]|^p

    — the raw grid sum behind the slice-wise L^p norm of the derivative
    of a half-space stack along a fixed boundary direction. The caller
    supplies the flattened complex gradient components and applies the
    cell measure and quadrature weights afterwards.

    Parameters
    ----------
    gradients : numpy.ndarray
        Complex array of shape (d, K, P): component, slice, grid point.
    directions : numpy.ndarray
        Real array of shape (M, d), one unit direction per row.
    p : float
        Power applied to the directional-derivative modulus.

    Returns
    -------
    numpy.ndarray
        Real array of shape (M, K).
    """
    gradients = np.ascontiguousarray(gradients, dtype=np.complex128)
    directions = np.ascontiguousarray(directions, dtype=np.float64)
    if gradients.ndim != 3 or directions.ndim != 2:
        raise ValueError("gradients must be (d, K, P) and directions (M, d)")
    if gradients.shape[0] != directions.shape[1]:
        raise ValueError("component count mismatch between gradients and directions")
    p = float(p)
    if _numba_dirpow is not None and gradients.shape[0] == 2:
        out = np.empty((directions.shape[0], gradients.shape[1]))
        _numba_dirpow(
            gradients[0],
            gradients[1],
            np.ascontiguousarray(directions[:, 0]),
            np.ascontiguousarray(directions[:, 1]),
            0.5 * p,
            out,
        )
        return out
    return _numpy_dirpow(gradients, directions, p)

"""Tests for the brute-force oracle module.

Oracle values here are pinned three independent ways:

* impulse responses against the literal kernel formula (far field), the
  equal-area-disk formula (diagonal), and an adaptive ``dblquad`` cell
  average (first ring) — none of which go through the oracle's own
  quadrature;
* mass-carrying Gaussians against closed forms: the planar potential
  of ``exp(-r^2)`` at order one is ``(sqrt(pi)/2) e^{-r^2/2} I_0(r^2/2)``
  (Fourier–Bessel pair of the Gaussian against ``1/(2 pi rho)``), and
  the self-pairing ``int int e^{-x^2} e^{-y^2} / |x-y|`` equals
  ``pi^{5/2}/sqrt(2)`` by Parseval;
* the spectral production path, on a zero-mean Gaussian–Hermite input
  where the excluded-zero-mode discrete operator and the free-space
  direct sum represent the same object.

The dense quadrature examples use exact elementary integrals and the
Beta-function mass of the power profile ``(1+r^6)^{-3/2}``,
``2 pi Gamma(1/3) Gamma(7/6) / (6 Gamma(3/2))``.
"""

import numpy as np
import pytest
from scipy.integrate import dblquad
from scipy.special import gamma as sp_gamma
from scipy.special import i0e

from afftrace.constants import kappa
from afftrace.errors import DomainError, ResolutionError, UsageError
from afftrace.oracle import dense_norm, double_integral, riesz_convolve_direct
from afftrace.sampling import Field, Grid
from afftrace.spectral import dft, frac_laplacian, sobolev_norm


def _impulse(grid, index, value=1.0):
    data = np.zeros(grid.shape, dtype=np.complex128)
    data[index] = value
    return Field(grid, data, "physical")


def _gaussian_field(grid):
    coords = grid.coords()
    r2 = sum(c**2 for c in coords)
    return Field(grid, np.exp(-r2).astype(np.complex128), "physical"), r2


def _zero_mean_field(grid):
    coords = grid.coords()
    r2 = sum(c**2 for c in coords)
    return Field(grid, ((r2 - 1.0) * np.exp(-r2)).astype(np.complex128), "physical")


def _spectral_riesz(field, alpha):
    # The multiplier order -2 alpha is realized as two half-order factors,
    # each inside the fractional Laplacian's domain at d = 2.
    half = -float(alpha)
    return frac_laplacian(frac_laplacian(field, half), half)


@pytest.fixture(scope="module")
def grid32():
    return Grid(2, 2.0, 32)


@pytest.fixture(scope="module")
def grid64():
    return Grid(2, 8.0, 64)


class TestRieszConvolveDirect:
    def test_impulse_far_field_matches_kernel(self, grid32):
        ctr = grid32.pointsPerAxis // 2
        out = riesz_convolve_direct(_impulse(grid32, (ctr, ctr)), 0.5)
        h = grid32.spacing
        norm = kappa(2, 0.5)
        # Offsets beyond the near-field rings carry the plain midpoint kernel.
        for di, dj in [(8, 0), (0, 10), (7, 7), (5, -9)]:
            dist = h * np.hypot(di, dj)
            expected = grid32.cellVolume / (norm * dist)
            got = out.values.real[ctr + di, ctr + dj]
            assert got == pytest.approx(expected, rel=1e-12)

    def test_impulse_diagonal_equal_area_disk(self, grid32):
        ctr = grid32.pointsPerAxis // 2
        out = riesz_convolve_direct(_impulse(grid32, (ctr, ctr)), 0.5)
        h = grid32.spacing
        # d omega_d r_eq^{2 alpha} / (2 alpha) over the cell, r_eq = h/sqrt(pi).
        expected = 2.0 * np.sqrt(np.pi) * h / kappa(2, 0.5)
        assert out.values.real[ctr, ctr] == pytest.approx(expected, rel=1e-12)

    def test_impulse_first_ring_is_cell_average(self, grid32):
        ctr = grid32.pointsPerAxis // 2
        out = riesz_convolve_direct(_impulse(grid32, (ctr, ctr)), 0.5)
        h = grid32.spacing
        got = out.values.real[ctr + 1, ctr] * kappa(2, 0.5) / grid32.cellVolume
        avg, bound = dblquad(
            lambda y, x: 1.0 / np.hypot(x, y), 0.5 * h, 1.5 * h, -0.5 * h, 0.5 * h
        )
        avg /= h * h
        assert bound < 1e-7
        assert got == pytest.approx(avg, rel=1e-9)

    def test_gaussian_matches_closed_form(self, grid64):
        field, r2 = _gaussian_field(grid64)
        out = riesz_convolve_direct(field, 0.5)
        closed = (np.sqrt(np.pi) / 2.0) * i0e(r2 / 2.0)
        rel = np.linalg.norm(out.values.real - closed) / np.linalg.norm(closed)
        assert rel < 5e-3  # measured 1.30e-3

    def test_zero_mean_gaussian_matches_spectral_path(self, grid64):
        field = _zero_mean_field(grid64)
        direct = riesz_convolve_direct(field, 0.5)
        spectral = _spectral_riesz(field, 0.5)
        # The spectral operator drops the zero mode, so the paths are
        # compared as potentials modulo constants.
        dv = direct.values.real - np.mean(direct.values.real)
        sv = spectral.values.real - np.mean(spectral.values.real)
        rel = np.linalg.norm(dv - sv) / np.linalg.norm(sv)
        assert rel < 1e-2  # measured 8.04e-3

    def test_linearity(self):
        grid = Grid(2, 2.0, 16)
        rng = np.random.default_rng(5)
        fa = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        fb = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        a, b = 2.0, -3.0j
        combo = riesz_convolve_direct(
            Field(grid, a * fa + b * fb, "physical"), 0.5
        )
        parts = a * riesz_convolve_direct(Field(grid, fa, "physical"), 0.5).values
        parts = parts + b * riesz_convolve_direct(Field(grid, fb, "physical"), 0.5).values
        scale = np.linalg.norm(parts)
        assert np.linalg.norm(combo.values - parts) < 1e-12 * scale

    def test_resolution_budget(self):
        grid = Grid(2, 8.0, 128)
        field = Field(grid, np.zeros(grid.shape, dtype=complex), "physical")
        with pytest.raises(ResolutionError, match="64"):
            riesz_convolve_direct(field, 0.5)

    @pytest.mark.parametrize("alpha", [0.0, -0.3, 1.0, 2.5])
    def test_order_outside_domain(self, grid32, alpha):
        field = _impulse(grid32, (0, 0))
        with pytest.raises(DomainError):
            riesz_convolve_direct(field, alpha)

    def test_frequency_side_rejected(self, grid32):
        field = dft(_impulse(grid32, (0, 0)))
        with pytest.raises(UsageError):
            riesz_convolve_direct(field, 0.5)

    def test_non_field_rejected(self):
        with pytest.raises(UsageError):
            riesz_convolve_direct(np.zeros((8, 8)), 0.5)


class TestDoubleIntegral:
    def test_impulse_pair_samples_kernel(self, grid32):
        ctr = grid32.pointsPerAxis // 2
        f = _impulse(grid32, (ctr, ctr))
        g = _impulse(grid32, (ctr + 12, ctr))
        h = grid32.spacing
        expected = grid32.cellVolume**2 / (12.0 * h)
        assert double_integral(f, g, 0.5) == pytest.approx(expected, rel=1e-12)

    def test_shared_impulse_pair_adds_diagonal(self, grid32):
        # f = g holding both spikes: two diagonal cells plus the two
        # cross terms at the spike separation.
        ctr = grid32.pointsPerAxis // 2
        data = np.zeros(grid32.shape, dtype=complex)
        data[ctr, ctr] = 1.0
        data[ctr + 12, ctr] = 1.0
        f = Field(grid32, data, "physical")
        h = grid32.spacing
        diag = 2.0 * np.sqrt(np.pi) / h
        expected = grid32.cellVolume**2 * (2.0 * diag + 2.0 / (12.0 * h))
        assert double_integral(f, f, 0.5) == pytest.approx(expected, rel=1e-12)

    def test_symmetric_in_the_pair(self):
        grid = Grid(2, 2.0, 16)
        rng = np.random.default_rng(9)
        f = Field(
            grid,
            rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape),
            "physical",
        )
        g = Field(
            grid,
            rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape),
            "physical",
        )
        ab = double_integral(f, g, 0.5)
        ba = double_integral(g, f, 0.5)
        assert ab == pytest.approx(ba, rel=1e-12)

    def test_self_pairing_positive(self):
        grid = Grid(2, 2.0, 16)
        rng = np.random.default_rng(13)
        f = Field(
            grid,
            rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape),
            "physical",
        )
        assert double_integral(f, f, 0.5) > 0.0

    def test_gaussian_pairing_hits_continuum_value(self, grid64):
        field, _ = _gaussian_field(grid64)
        value = double_integral(field, field, 0.5)
        continuum = np.pi**2.5 / np.sqrt(2.0)
        assert value == pytest.approx(continuum, rel=5e-3)  # measured 1.83e-3

    def test_zero_mean_gaussian_matches_spectral_norm(self, grid64):
        field = _zero_mean_field(grid64)
        value = double_integral(field, field, 0.5)
        reference = kappa(2, 0.5) * sobolev_norm(field, -0.5) ** 2
        assert value == pytest.approx(reference, rel=1e-2)  # measured 8.09e-3

    def test_equal_grids_accepted_distinct_rejected(self, grid32):
        twin = Grid(2, 2.0, 32)
        other = Grid(2, 4.0, 32)
        f = _impulse(grid32, (3, 3))
        assert double_integral(f, _impulse(twin, (3, 3)), 0.5) > 0.0
        with pytest.raises(UsageError, match="grid"):
            double_integral(f, _impulse(other, (3, 3)), 0.5)


class TestDenseNorm:
    def test_constant_on_unit_square(self):
        value = dense_norm(lambda x, y: np.ones_like(x), ("square", 0.0, 1.0))
        assert value == pytest.approx(1.0, rel=1e-12)

    def test_product_on_unit_square(self):
        value = dense_norm(lambda x, y: x * y, ("square", 0.0, 1.0))
        assert value == pytest.approx(0.25, rel=1e-12)

    def test_exponential_halfline(self):
        value = dense_norm(
            lambda t: np.exp(-4.0 * np.pi * t),
            ("halfline", 1.0),
            tail=("exp", 1.0, 4.0 * np.pi),
        )
        assert value == pytest.approx(1.0 / (4.0 * np.pi), rel=1e-10)

    def test_interval_with_power_weight(self):
        value = dense_norm(
            lambda t: t, ("interval", 0.0, 1.0), weight=("power", 1.0), r=2.0
        )
        assert value == pytest.approx(0.5, rel=1e-12)

    def test_power_profile_mass_beta_closed_form(self):
        # Planar mass of (1 + r^6)^{-3/2}: substitute u = r^6 to get the
        # Beta integral 2 pi/6 * B(1/3, 7/6).
        value = dense_norm(
            lambda r: (1.0 + r**6) ** (-1.5),
            ("plane-radial", 2, 20.0),
            tail=("power", 1.0, 9.0),
        )
        closed = (
            2.0 * np.pi / 6.0 * sp_gamma(1.0 / 3.0) * sp_gamma(7.0 / 6.0) / sp_gamma(1.5)
        )
        assert value == pytest.approx(closed, rel=1e-10)
        assert value == pytest.approx(2.9367233340570116, rel=1e-10)

    def test_plane_radial_exact_power_tail(self):
        value = dense_norm(
            lambda r: (1.0 + r**2) ** (-1.5),
            ("plane-radial", 2, 200.0),
            tail=("power", 1.0, 3.0),
        )
        assert value == pytest.approx(2.0 * np.pi, rel=1e-6)

    def test_unbounded_region_refuses_without_tail(self):
        with pytest.raises(UsageError, match="tail bound unavailable"):
            dense_norm(lambda t: np.exp(-t), ("halfline", 1.0))

    def test_callable_weight_refused_on_unbounded_region(self):
        with pytest.raises(UsageError, match="tail bound unavailable"):
            dense_norm(
                lambda t: np.exp(-t),
                ("halfline", 1.0),
                weight=lambda t: np.ones_like(t),
                tail=("exp", 1.0, 1.0),
            )

    def test_divergent_power_tail_raises(self):
        with pytest.raises(DomainError, match="diverges"):
            dense_norm(
                lambda r: (1.0 + r**2) ** (-0.5),
                ("plane-radial", 2, 10.0),
                tail=("power", 1.0, 1.0),
            )

    def test_nonpositive_exponential_rate_raises(self):
        with pytest.raises(DomainError, match="diverges|rate"):
            dense_norm(
                lambda t: np.exp(-t), ("halfline", 1.0), tail=("exp", 1.0, 0.0)
            )

    def test_bounded_region_rejects_tail(self):
        with pytest.raises(UsageError, match="no tail"):
            dense_norm(
                lambda t: t, ("interval", 0.0, 1.0), tail=("power", 1.0, 2.0)
            )

    def test_norm_exponent_below_one_rejected(self):
        with pytest.raises(UsageError, match="at least 1"):
            dense_norm(lambda t: t, ("interval", 0.0, 1.0), r=0.5)

    def test_unknown_region_rejected(self):
        with pytest.raises(UsageError, match="region"):
            dense_norm(lambda t: t, ("disk", 0.0, 1.0))

    def test_unknown_tail_model_rejected(self):
        with pytest.raises(UsageError, match="tail model"):
            dense_norm(
                lambda t: np.exp(-t), ("halfline", 1.0), tail=("geometric", 1.0, 2.0)
            )

    def test_unknown_weight_rejected(self):
        with pytest.raises(UsageError, match="weight"):
            dense_norm(lambda t: t, ("interval", 0.0, 1.0), weight=("poly", 2.0))


class TestIndependence:
    def test_oracle_imports_no_production_numerics(self):
        # The module's stated invariant: oracle paths share no code with
        # production paths. Enforced at the import level.
        import inspect

        import afftrace.oracle as oracle

        source = inspect.getsource(oracle)
        for name in ("spectral", "extension", "affine", "kernels"):
            assert f"from .{name}" not in source
            assert f"afftrace.{name}" not in source

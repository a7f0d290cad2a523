import math

import numpy as np
import pytest

from hardybear.exceptions import (
    CompositionDiverges,
    IllConditioned,
    PointsNotSeparated,
    SoundnessAlarm,
    TruncationUnreliable,
)
from hardybear.inner import (
    atomic_singular,
    blaschke_factor,
    finite_blaschke,
    inner_product,
    monomial,
    unimodular_constant,
)
from hardybear.maps import LinearFractionalMap, automorphism, rotation
from hardybear.series import (
    PowerSeries,
    SectionRole,
    cphi_section,
    invariance_residual,
    invariance_residual_with_band,
    kernel_map_norm,
    kernel_relation_residual,
    littlewood_bound,
    littlewood_bound_check,
    mtheta_section,
    multiplier_kernel_residual,
    residual_error_band,
    series_compose,
    series_mul,
    taylor_of_inner,
    taylor_of_map,
)


def half():
    """phi(z) = z / 2."""
    return LinearFractionalMap(1, 0, 0, 2)


def hyperbolic():
    return LinearFractionalMap(2, 1, 1, 2)


class TestPowerSeries:
    def test___power_series__failure__tail_radius(self):
        with pytest.raises(ValueError, match="Tail radius"):
            PowerSeries(coeffs=[1, 0.5], tail_radius=1.0)

    def test___power_series__raises_tail_constant(self):
        series = PowerSeries(coeffs=[1, 0.5, 0.25], tail_radius=0.25, tail_constant=1.0)
        assert series.tail_constant == pytest.approx(4.0)

    def test___truncate__exact_polynomial_records_error(self):
        series = PowerSeries(coeffs=[1, 0, 0.5], tail_radius=0.0)
        truncated = series.truncate(2)
        assert truncated.N == 2
        assert truncated.error == pytest.approx(0.5)
        assert truncated.tail_l2() == pytest.approx(0.5)

    def test___shift__multiplies_by_monomial(self):
        series = PowerSeries(coeffs=[1, 2, 3], tail_radius=0.0)
        np.testing.assert_array_equal(series.shift(1).coeffs, np.array([0, 1, 2], dtype=complex))

    def test___series_mul__monomials(self):
        z = PowerSeries(coeffs=[0, 1, 0, 0], tail_radius=0.0)
        np.testing.assert_array_equal(series_mul(z, z).coeffs, np.array([0, 0, 1, 0], dtype=complex))
        assert series_mul(z, z).error == 0


class TestTaylor:
    def test___taylor_of_inner__blaschke_factor(self):
        """b_{1/2}(z) = 1/2 - (3/4) z - (3/8) z^2 - ..."""
        series = taylor_of_inner(blaschke_factor(0.5), 8)
        assert series.coeffs[0] == pytest.approx(0.5)
        assert series.coeffs[1] == pytest.approx(-0.75)
        assert series.coeffs[2] == pytest.approx(-0.375)

    def test___taylor_of_inner__atom_at_origin(self):
        series = taylor_of_inner(atomic_singular(1, 1.0), 16)
        assert series.coeffs[0] == pytest.approx(math.exp(-1))
        # exp(-(1 + z)/(1 - z)) = e^{-1} (1 - 2 z + ...)
        assert series.coeffs[1] == pytest.approx(-2 * math.exp(-1))

    def test___taylor_of_inner__matches_evaluation(self):
        theta = inner_product(finite_blaschke([0.3, -0.2j], [1, 2]), monomial(1))
        series = taylor_of_inner(theta, 64)
        for z in (0.1, 0.2j, -0.3 + 0.1j):
            assert series(z) == pytest.approx(theta(z), abs=1e-12)
        assert series.tail_l2() < 1e-12

    def test___taylor_of_inner__constant(self):
        series = taylor_of_inner(unimodular_constant(1j), 4)
        np.testing.assert_array_equal(series.coeffs, np.array([1j, 0, 0, 0]))

    def test___taylor_of_map__geometric(self):
        phi = hyperbolic()
        series = taylor_of_map(phi, 64)
        assert series.tail_radius == pytest.approx(0.5)
        for z in (0.3, -0.4j):
            assert series(z) == pytest.approx(phi(z), abs=1e-12)

    def test___taylor_of_map__exact_for_affine_maps(self):
        series = taylor_of_map(half(), 4)
        assert series.tail_radius == 0
        np.testing.assert_array_equal(series.coeffs, np.array([0, 0.5, 0, 0], dtype=complex))

    def test___series_compose__matches_evaluation(self):
        theta = blaschke_factor(0.5)
        composed = series_compose(taylor_of_inner(theta, 64), taylor_of_map(half(), 64))
        assert composed(0.3) == pytest.approx(theta(0.15), abs=1e-12)
        assert composed.error < 1e-12

    def test___series_compose__failure__diverges(self):
        f = taylor_of_inner(blaschke_factor(0.5), 4)
        with pytest.raises(CompositionDiverges):
            series_compose(f, PowerSeries(coeffs=[1, 0], tail_radius=0.0))


class TestSections:
    def test___cphi_section__rotation_is_diagonal(self):
        section = cphi_section(rotation(1j), 6)
        assert section.role is SectionRole.COMPOSITION
        np.testing.assert_allclose(section.entries, np.diag(1j ** np.arange(6)), atol=1e-15)

    def test___cphi_section__half(self):
        np.testing.assert_allclose(cphi_section(half(), 5).entries, np.diag(0.5 ** np.arange(5)))

    def test___mtheta_section__shift(self):
        section = mtheta_section(monomial(1), 4)
        assert section.role is SectionRole.MULTIPLICATION
        np.testing.assert_array_equal(section.entries, np.eye(4, k=-1))

    def test___mtheta_section__lower_triangular_toeplitz(self):
        entries = mtheta_section(blaschke_factor(0.5), 5).entries
        np.testing.assert_array_equal(entries, np.tril(entries))
        assert entries[3, 1] == entries[2, 0]

    def test___littlewood_bound__half(self):
        assert littlewood_bound(0.5) == pytest.approx(math.sqrt(3), abs=1e-12)

    def test___littlewood_bound_check__section_norm_below_bound(self):
        phi = LinearFractionalMap(1, 1, 0, 2)
        section_norm, bound = littlewood_bound_check(phi, 128)
        assert bound == pytest.approx(math.sqrt(3), abs=1e-12)
        assert section_norm <= bound + 1e-8

    def test___littlewood_bound_check__contraction(self):
        section_norm, bound = littlewood_bound_check(half(), 32)
        assert bound == 1
        assert section_norm == pytest.approx(1)

    def test___littlewood_bound_check__failure__bound_exceeded(self, monkeypatch):
        monkeypatch.setattr("hardybear.series.littlewood_bound", lambda phi0: 0.5)
        with pytest.raises(SoundnessAlarm, match="exceeds the Littlewood bound"):
            littlewood_bound_check(half(), 32)


class TestInvarianceResidual:
    def test___invariance_residual__member(self):
        assert invariance_residual(monomial(1), half(), N=64) < 1e-10

    def test___invariance_residual__non_member(self):
        assert invariance_residual(blaschke_factor(0.5), half(), N=64) > 0.01

    def test___invariance_residual__non_member__contraction_certified(self):
        """The column norms decay like 2^-k under z / 2, the certified error decays with them."""
        for theta in (blaschke_factor(0.5), inner_product(monomial(1), blaschke_factor(0.5))):
            assert invariance_residual(theta, half(), N=64) > 0.01

    def test___invariance_residual_with_band__contraction_band_is_tiny(self):
        residual, band = invariance_residual_with_band(blaschke_factor(0.5), half(), N=64)
        assert residual == pytest.approx(invariance_residual(blaschke_factor(0.5), half(), N=64))
        assert band < 1e-12

    def test___invariance_residual_with_band__atom_band_is_wide(self):
        residual, band = invariance_residual_with_band(atomic_singular(1, 1.0), hyperbolic(), N=64)
        assert np.isfinite(residual)
        assert band > 1e-9

    def test___residual_error_band__values(self):
        assert residual_error_band(0.0) == 0.0
        assert residual_error_band(0.5) == pytest.approx(2.0)
        assert residual_error_band(1.0) == math.inf

    def test___invariance_residual__constant_is_zero(self):
        assert invariance_residual(unimodular_constant(1), hyperbolic()) == 0.0

    def test___invariance_residual__elliptic_member(self):
        assert invariance_residual(monomial(2), rotation(np.exp(1j * np.pi / 3)), N=64) < 1e-10

    def test___invariance_residual__failure__too_many_columns(self):
        with pytest.raises(ValueError, match="At most N/4"):
            invariance_residual(monomial(1), half(), N=16, K=8)

    def test___invariance_residual__failure__truncation_unreliable(self):
        """An atom only carries the norm-defect tail, which stays above the oracle threshold."""
        with pytest.raises(TruncationUnreliable):
            invariance_residual(atomic_singular(1, 1.0), hyperbolic(), N=64)
        residual = invariance_residual(atomic_singular(1, 1.0), hyperbolic(), N=64, check_truncation=False)
        assert np.isfinite(residual)


class TestKernels:
    def test___kernel_relation_residual__small(self):
        for phi in (half(), hyperbolic(), automorphism(1j, 0.3)):
            for w in (0, 0.5, -0.3 + 0.6j):
                assert kernel_relation_residual(phi, w, N=128) < 1e-8

    def test___multiplier_kernel_residual__small(self):
        theta = finite_blaschke([0.5, -0.25j])
        assert multiplier_kernel_residual(theta, 0.3 + 0.3j, N=128) < 1e-8

    def test___kernel_map_norm__violation(self):
        """b_{1/2} under z / 2 at w = 0.45: c is about 4.4."""
        estimate = kernel_map_norm(blaschke_factor(0.5), half(), [0.45])
        assert estimate.c == pytest.approx(4.40, abs=0.01)
        assert estimate.c > estimate.bound

    def test___kernel_map_norm__grows_on_nested_points(self):
        """Points on [0, 1) approaching the zero 1/2 of theta; single-point ratios 1.55, 4.40 and 5.84."""
        nested = ([0.3], [0.3, 0.45], [0.3, 0.45, 0.53])
        estimates = [kernel_map_norm(blaschke_factor(0.5), half(), points).c for points in nested]
        assert estimates[0] == pytest.approx(1.55, abs=0.01)
        assert estimates[1] >= 4.39
        assert estimates[2] >= 5.83
        for smaller, larger in zip(estimates, estimates[1:]):
            assert larger >= smaller * (1 - 1e-9)

    def test___kernel_map_norm__invariant_pair_bounded(self):
        points = [0.5 * np.exp(2j * np.pi * k / 5) for k in range(5)]
        estimate = kernel_map_norm(monomial(1), half(), points)
        assert estimate.c <= estimate.bound + 1e-6

    def test___kernel_map_norm__failure__points_not_separated(self):
        with pytest.raises(PointsNotSeparated, match="closer than"):
            kernel_map_norm(monomial(1), half(), [0.3, 0.3001])
        with pytest.raises(PointsNotSeparated, match="kernel points"):
            kernel_map_norm(monomial(1), half(), [])

    def test___kernel_map_norm__failure__ill_conditioned(self):
        with pytest.raises(IllConditioned):
            kernel_map_norm(blaschke_factor(0.5), half(), [0.5, 0.1])

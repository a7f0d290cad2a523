import cmath

import numpy as np
import pytest

from hardybear.certify import (
    QuotientSamples,
    Route,
    _Decision,
    VerdictStatus,
    certify_invariance,
    construct_invariant_inner,
    elliptic_constant,
    is_inner_eigenfunction,
    multiplicity_table,
    quotient_is_holomorphic,
    quotient_samples,
    schur_membership,
    zero_set_transported,
)
from hardybear.exceptions import IdentityMap, NotAutomorphism, NotInvariant
from hardybear.inner import InnerFunction, atomic_singular, blaschke_factor, inner_product, monomial
from hardybear.maps import LinearFractionalMap, identity_map, parabolic_from_translation, rotation
from hardybear.orbits import orbit_sequence


def hyperbolic():
    return LinearFractionalMap(2, 1, 1, 2)


def half():
    return LinearFractionalMap(1, 0, 0, 2)


def orbit_theta(phi):
    """B_0 over the orbit of 0 under parabolic(b=2), whose half-plane point is u + iv = 1."""
    return InnerFunction(blaschke=orbit_sequence(phi, 0, 2.0, 1.0, 0.0))


class TestVerdictStatus:
    def test___member__maps_statuses(self):
        assert VerdictStatus.CERTIFIED_MEMBER.member is True
        assert VerdictStatus.NUMERICALLY_CONSISTENT.member is True
        assert VerdictStatus.CERTIFIED_NON_MEMBER.member is False
        assert VerdictStatus.NUMERICALLY_VIOLATED.member is False
        assert VerdictStatus.INDETERMINATE.member is None

    def test___values__are_camel_case(self):
        assert VerdictStatus.CERTIFIED_MEMBER.value == "CertifiedMember"
        assert Route.ATOM_DENJOY_WOLFF.value == "AtomDenjoyWolff"


class TestSchurMembership:
    def test___schur_membership__violation_reports_witness(self):
        verdict = schur_membership([(0.1 + 0j, 0.5 + 0j), (0.2 + 0j, 2.0 + 0j)])
        assert verdict.status is VerdictStatus.NUMERICALLY_VIOLATED
        assert verdict.witness == (0.2 + 0j, 2.0)
        assert verdict.sup_estimate == 2.0

    def test___schur_membership__consistent_never_certified(self):
        verdict = schur_membership([(0.1 + 0j, 0.5 + 0j), (0.3 + 0j, 1.0 + 1e-9 + 0j)])
        assert verdict.status is VerdictStatus.NUMERICALLY_CONSISTENT
        assert verdict.witness is None

    def test___schur_membership__error_bounds_decide_or_defer(self):
        points = np.array([0.1 + 0j, 0.2 + 0j])

        def verdict(value, error):
            values = np.array([0.5 + 0j, value])
            samples = QuotientSamples(points, values, np.zeros(0, dtype=complex), np.array([0.0, error]))
            return schur_membership(samples)

        assert verdict(0.8, 0.1).status is VerdictStatus.NUMERICALLY_CONSISTENT
        assert verdict(1.05, 0.1).status is VerdictStatus.INDETERMINATE
        assert verdict(1.05, 0.1).witness is None
        violated = verdict(1.2, 0.1)
        assert violated.status is VerdictStatus.NUMERICALLY_VIOLATED
        assert violated.witness == (0.2 + 0j, pytest.approx(1.2))
        assert verdict(0.8, np.inf).status is VerdictStatus.INDETERMINATE

    def test___schur_membership__failure__no_samples(self):
        with pytest.raises(ValueError, match="at least one sample"):
            schur_membership([])

    def test___quotient_samples__skips_uncancelled_zero(self):
        samples = quotient_samples(blaschke_factor(0.5), half())
        assert samples.skipped.size == 1
        assert samples.skipped[0] == pytest.approx(0.5)
        assert len(samples) >= 3 * 2048 - 1

    def test___quotient_samples__cancelled_zero_stays_bounded(self):
        samples = quotient_samples(monomial(2), rotation(1j), radii=(0.5, 0.9), angles=64)
        assert samples.skipped.size == 0
        np.testing.assert_allclose(np.abs(samples.values), 1.0, atol=1e-12)

    def test___quotient_samples__infinite_blaschke_carries_error_bound(self):
        phi = parabolic_from_translation(2.0)
        samples = quotient_samples(orbit_theta(phi), phi, radii=(0.5,), angles=64)
        assert samples.errors.shape == samples.points.shape
        assert 0 < samples.errors.max() < 0.01
        assert schur_membership(samples).status is not VerdictStatus.NUMERICALLY_VIOLATED

    def test___quotient_samples__finite_blaschke_is_exact(self):
        samples = quotient_samples(monomial(2), rotation(1j), radii=(0.5,), angles=16)
        assert not samples.errors.any()


class TestZeroTransport:
    def test___multiplicity_table__zero_not_transported(self):
        table = multiplicity_table(blaschke_factor(0.5), half())
        assert list(table.columns) == ["zero", "image", "mult_theta", "mult_composed", "transported"]
        row = table.iloc[0]
        assert row["zero"] == pytest.approx(0.5)
        assert row["image"] == pytest.approx(0.25)
        assert (row["mult_theta"], row["mult_composed"]) == (1, 0)
        assert not row["transported"]

    def test___multiplicity_table__origin_transported_by_dilation(self):
        table = multiplicity_table(monomial(3), half())
        assert table["mult_composed"].tolist() == [3]
        assert quotient_is_holomorphic(monomial(3), half())

    def test___zero_set_transported__needs_image_in_zero_set(self):
        assert not zero_set_transported(blaschke_factor(0.5), half())
        assert zero_set_transported(monomial(1), half())


class TestCertifyInvariance:
    def test___certify__finite_blaschke__non_member_with_witness(self):
        report = certify_invariance(blaschke_factor(0.5), half())
        assert report.route is Route.MULTIPLICITY_TEST
        assert report.verdict.status is VerdictStatus.CERTIFIED_NON_MEMBER
        point, modulus = report.verdict.witness
        assert abs(point) < 1
        assert modulus > 1

    def test___certify__finite_blaschke__member_agrees_with_oracle(self):
        report = certify_invariance(blaschke_factor(0), half())
        assert report.route is Route.MULTIPLICITY_TEST
        assert report.verdict.status is VerdictStatus.CERTIFIED_MEMBER
        assert report.oracle_residual < 1e-8
        assert report.agreement

    def test___certify__atom_at_denjoy_wolff_point__member(self):
        report = certify_invariance(atomic_singular(1, 3.0), hyperbolic())
        assert report.route is Route.ATOM_DENJOY_WOLFF
        assert report.verdict.status is VerdictStatus.CERTIFIED_MEMBER
        # the Taylor tail of an atomic singular factor is not certified
        assert report.oracle_residual is None
        assert report.agreement

    def test___certify__atom_at_repelling_point__non_member(self):
        report = certify_invariance(atomic_singular(-1, 2.0), hyperbolic())
        assert report.route is Route.ATOM_DENJOY_WOLFF
        assert report.verdict.status is VerdictStatus.CERTIFIED_NON_MEMBER

    def test___certify__elliptic__reports_constant(self):
        phi = rotation(cmath.exp(1j * cmath.pi / 3))
        report = certify_invariance(monomial(2), phi)
        assert report.route is Route.ELLIPTIC_CONSTANT
        assert report.verdict.status is VerdictStatus.CERTIFIED_MEMBER
        assert report.quotient_constant == pytest.approx(cmath.exp(2j * cmath.pi / 3))
        assert report.agreement

    def test___certify__identity__always_member(self):
        report = certify_invariance(blaschke_factor(0.3), identity_map())
        assert report.route is Route.MULTIPLICITY_TEST
        assert report.verdict.status is VerdictStatus.CERTIFIED_MEMBER
        assert report.quotient_constant == 1

        report = certify_invariance(atomic_singular(1j, 1.0), identity_map())
        assert report.route is Route.INTERIOR_FIXED_POINT_IDENTITY
        assert report.verdict.status is VerdictStatus.CERTIFIED_MEMBER

    def test___certify__non_automorphic_rigidity__non_member(self):
        theta = inner_product(atomic_singular(1, 1.0), atomic_singular(-1, 1.0))
        report = certify_invariance(theta, half())
        assert report.route is Route.NON_AUTOMORPHIC_RIGIDITY
        assert report.verdict.status is VerdictStatus.CERTIFIED_NON_MEMBER

    def test___certify__orbit_blaschke_under_its_parabolic_map(self):
        """Zeros accumulate at the boundary fixed point; the truncated quotient carries the tail as an error bound."""
        phi = parabolic_from_translation(2.0)
        report = certify_invariance(orbit_theta(phi), phi)
        assert report.route is Route.NUMERIC_FALLBACK
        assert report.verdict.status in (VerdictStatus.NUMERICALLY_CONSISTENT, VerdictStatus.INDETERMINATE)
        assert report.sampling.status is not VerdictStatus.NUMERICALLY_VIOLATED
        assert report.oracle_residual is None
        assert report.agreement

    def test___certify__interior_fixed_point_identity__member(self):
        theta = inner_product(atomic_singular(1, 1.0), atomic_singular(-1, 1.0))
        report = certify_invariance(theta, rotation(-1))
        assert report.route is Route.INTERIOR_FIXED_POINT_IDENTITY
        assert report.verdict.status is VerdictStatus.CERTIFIED_MEMBER
        assert report.quotient_constant == 1
        assert report.sampling.status is VerdictStatus.NUMERICALLY_CONSISTENT

    def test___certify__interior_fixed_point_identity__non_member_with_witness(self):
        theta = inner_product(atomic_singular(1, 1.0), atomic_singular(1j, 1.0))
        report = certify_invariance(theta, rotation(-1))
        assert report.route is Route.INTERIOR_FIXED_POINT_IDENTITY
        assert report.verdict.status is VerdictStatus.CERTIFIED_NON_MEMBER
        point, modulus = report.verdict.witness
        assert abs(point) < 1
        assert modulus > 1

    def test___certify__non_member_without_witness_is_indeterminate(self, monkeypatch):
        monkeypatch.setattr(
            "hardybear.certify._decide", lambda theta, phi, tolerances: _Decision(Route.NON_AUTOMORPHIC_RIGIDITY, False)
        )
        report = certify_invariance(monomial(1), half())
        assert report.verdict.status is VerdictStatus.INDETERMINATE
        assert report.verdict.witness is None

    def test___certify__overrides_sampling_parameters(self):
        report = certify_invariance(monomial(1), half(), radii=[0.5], angles=32, margin=1e-4, N=16)
        assert report.oracle_size == 16
        assert report.verdict.status is VerdictStatus.CERTIFIED_MEMBER

    def test___certify__sampling_reported_alongside_exact_route(self):
        report = certify_invariance(monomial(1), half())
        assert report.sampling.route == "SchurSampling"
        assert report.sampling.status is VerdictStatus.NUMERICALLY_CONSISTENT
        assert report.sampling.sup_estimate <= 1.0


class TestConstructions:
    def test___construct_invariant_inner__atom_for_boundary_attractor(self):
        theta = construct_invariant_inner(hyperbolic(), alpha=2.0)
        zeta, alpha = theta.single_atom
        assert zeta == pytest.approx(1)
        assert alpha == 2.0
        assert certify_invariance(theta, hyperbolic()).verdict.status is VerdictStatus.CERTIFIED_MEMBER

    def test___construct_invariant_inner__factor_at_interior_fixed_point(self):
        assert construct_invariant_inner(half()).zeros() == [(0, 1)]
        assert construct_invariant_inner(rotation(1j)).zeros() == [(0, 1)]

    def test___construct_invariant_inner__failure__identity(self):
        with pytest.raises(IdentityMap, match="Every subspace"):
            construct_invariant_inner(identity_map())

    def test___elliptic_constant__power_of_derivative(self):
        lam = cmath.exp(1j * cmath.pi / 3)
        assert elliptic_constant(monomial(2), rotation(lam)) == pytest.approx(lam**2)

    def test___elliptic_constant__failure__not_elliptic(self):
        with pytest.raises(NotAutomorphism, match="not an elliptic automorphism"):
            elliptic_constant(monomial(1), half())

    def test___elliptic_constant__failure__not_invariant(self):
        with pytest.raises(NotInvariant, match="not invariant: route EllipticConstant returned CertifiedNonMember"):
            elliptic_constant(blaschke_factor(0.5), rotation(1j))

    def test___is_inner_eigenfunction__monomial_under_rotation(self):
        assert is_inner_eigenfunction(monomial(2), rotation(1j))
        assert not is_inner_eigenfunction(blaschke_factor(0.5), rotation(1j))

import cmath

import numpy as np
import pytest

from hardybear.exceptions import (
    EllipticAutomorphism,
    EscapedDisk,
    IdentityMap,
    InvalidOrbitLength,
    NotAutomorphism,
    NotParabolic,
    NotSelfMap,
    NotUnimodular,
    OutsideDisk,
    PoleAtPoint,
)
from hardybear.maps import (
    LinearFractionalMap,
    MapClass,
    automorphism,
    classify_automorphism,
    denjoy_wolff,
    derivative_at,
    equivalent,
    fixed_points,
    from_matrix,
    half_plane_conjugate,
    identity_map,
    is_automorphism,
    is_identity,
    iterate,
    lf_compose,
    lf_eval,
    parabolic_from_translation,
    pseudo_hyperbolic_distance,
    rotation,
    rotation_conjugate,
    sup_modulus,
)
from hardybear.sampling import boundary_points, disk_samples


def hyperbolic():
    """(2z + 1) / (z + 2), fixed points 1 (attracting) and -1."""
    return LinearFractionalMap(2, 1, 1, 2)


class TestLinearFractionalMap:
    def test___construction__normalizes_coefficients(self):
        phi = hyperbolic()
        assert (phi.a, phi.b, phi.c, phi.d) == (1, 0.5, 0.5, 1)
        assert phi == LinearFractionalMap(4, 2, 2, 4)

    def test___construction__evaluates_vectorized(self):
        phi = LinearFractionalMap(1, 0, 0, 2)
        np.testing.assert_allclose(phi(np.array([0.5, 1j])), np.array([0.25, 0.5j]))

    def test___construction__failure__pole_in_closed_disk(self):
        with pytest.raises(NotSelfMap, match="Pole"):
            LinearFractionalMap(1, 0, 1, 0.5)

    def test___construction__failure__vanishing_determinant(self):
        with pytest.raises(NotSelfMap, match="Determinant"):
            LinearFractionalMap(1, 2, 0.5, 1)

    def test___construction__failure__boundary_escapes(self):
        with pytest.raises(NotSelfMap, match="boundary point"):
            LinearFractionalMap(2, 0, 0, 1)

    def test___construction__failure__zero_coefficients(self):
        with pytest.raises(NotSelfMap, match="not finite and nonzero"):
            LinearFractionalMap(0, 0, 0, 0)

    def test___from_matrix__matches_coefficients(self):
        assert from_matrix([[2, 1], [1, 2]]) == hyperbolic()


class TestConstructors:
    def test___rotation__fixes_origin(self):
        phi = rotation(1j)
        assert phi(0.5) == pytest.approx(0.5j)

    def test___rotation__failure__not_unimodular(self):
        with pytest.raises(NotUnimodular):
            rotation(0.5)

    def test___automorphism__swaps_a_and_origin(self):
        phi = automorphism(1, 0.3 + 0.2j)
        assert phi(0.3 + 0.2j) == pytest.approx(0)
        assert phi(0) == pytest.approx(0.3 + 0.2j)

    def test___automorphism__failure__outside_disk(self):
        with pytest.raises(OutsideDisk):
            automorphism(1, 1.2)

    def test___identity_map__is_identity(self):
        assert is_identity(identity_map())
        assert not is_identity(hyperbolic())

    def test___parabolic_from_translation__first_iterate(self):
        """b = 2 and z = 0: 1 - |phi(0)|^2 = 1/2."""
        phi = parabolic_from_translation(2.0)
        assert 1 - abs(phi(0)) ** 2 == pytest.approx(0.5, abs=1e-14)

    def test___parabolic_from_translation__failure__zero_translation(self):
        with pytest.raises(NotParabolic, match="nonzero"):
            parabolic_from_translation(0.0)


class TestEvaluation:
    def test___lf_eval__failure__pole(self):
        phi = LinearFractionalMap(0.5, 0, 0.5, 1)
        assert lf_eval(phi, 0.5) == pytest.approx(0.2)
        with pytest.raises(PoleAtPoint):
            lf_eval(phi, -2)

    def test___lf_compose__matches_pointwise(self):
        f, g = hyperbolic(), automorphism(1j, 0.4)
        composed = lf_compose(f, g)
        for z in disk_samples(10):
            assert composed(z) == pytest.approx(f(g(z)))

    def test___lf_compose__inverse_is_identity(self):
        phi = automorphism(1, 0.5)
        assert is_identity(lf_compose(phi, phi))

    def test___equivalent__projective(self):
        assert equivalent(hyperbolic(), from_matrix([[2j, 1j], [1j, 2j]]))
        assert not equivalent(hyperbolic(), identity_map())

    def test___derivative_at__hyperbolic_fixed_points(self):
        assert derivative_at(hyperbolic(), 1) == pytest.approx(1 / 3)
        assert derivative_at(hyperbolic(), -1) == pytest.approx(3)

    def test___pseudo_hyperbolic_distance__schwarz_pick(self):
        phi = LinearFractionalMap(1, 0.25, 0.1, 2)
        points = disk_samples(20)
        for z, w in zip(points[:10], points[10:]):
            assert pseudo_hyperbolic_distance(phi(z), phi(w)) <= pseudo_hyperbolic_distance(z, w) + 1e-15


    def test___sup_modulus__closed_form(self):
        assert sup_modulus(LinearFractionalMap(1, 0, 0, 2)) == pytest.approx(0.5)
        assert sup_modulus(LinearFractionalMap(1, 1, 0, 2)) == pytest.approx(1.0)
        assert sup_modulus(LinearFractionalMap(1, 0, 1, 3)) == pytest.approx(0.5)
        assert sup_modulus(automorphism(1j, 0.3)) == pytest.approx(1.0)

    def test___sup_modulus__matches_boundary_samples(self):
        phi = LinearFractionalMap(1, 0.25j, 0.5, 3)
        sampled = np.abs(phi(boundary_points(4096))).max()
        assert sampled <= sup_modulus(phi) + 1e-12
        assert sampled == pytest.approx(sup_modulus(phi), abs=1e-5)


class TestFixedPoints:
    def test___fixed_points__hyperbolic(self):
        points = fixed_points(hyperbolic())
        assert [k for _, k in points] == [1, 1]
        assert points[0][0] == pytest.approx(1)
        assert points[1][0] == pytest.approx(-1)

    def test___fixed_points__parabolic_double_root(self):
        points = fixed_points(parabolic_from_translation(2.0))
        assert len(points) == 1
        assert points[0][1] == 2
        assert points[0][0] == pytest.approx(1, abs=1e-8)

    def test___fixed_points__rotation_has_origin(self):
        assert fixed_points(rotation(-1)) == [(0j, 1)]

    def test___fixed_points__failure__identity(self):
        with pytest.raises(IdentityMap):
            fixed_points(identity_map())


class TestClassification:
    def test___classify_automorphism__three_kinds(self):
        assert classify_automorphism(rotation(cmath.exp(0.5j))).kind is MapClass.ELLIPTIC
        assert classify_automorphism(hyperbolic()).kind is MapClass.HYPERBOLIC
        assert classify_automorphism(parabolic_from_translation(-3.0, 1j)).kind is MapClass.PARABOLIC

    def test___classify_automorphism__canonical_form_reproduces_map(self):
        phi = automorphism(cmath.exp(1j), 0.2 - 0.5j)
        aut = classify_automorphism(phi)
        assert aut.lam == pytest.approx(cmath.exp(1j))
        assert aut.a == pytest.approx(0.2 - 0.5j)
        assert equivalent(aut.map, phi)

    def test___classify_automorphism__failure__not_automorphism(self):
        assert not is_automorphism(LinearFractionalMap(1, 0, 0, 2))
        with pytest.raises(NotAutomorphism):
            classify_automorphism(LinearFractionalMap(1, 0, 0, 2))


class TestDenjoyWolff:
    def test___denjoy_wolff__hyperbolic_boundary_point(self):
        dw = denjoy_wolff(hyperbolic())
        assert not dw.interior
        assert dw.point == pytest.approx(1)
        assert dw.derivative == pytest.approx(1 / 3)

    def test___denjoy_wolff__interior_contraction(self):
        dw = denjoy_wolff(LinearFractionalMap(1, 0, 0, 2))
        assert dw.interior
        assert dw.point == 0
        assert dw.derivative == pytest.approx(0.5)

    def test___denjoy_wolff__parabolic_derivative_one(self):
        dw = denjoy_wolff(parabolic_from_translation(1.0, -1))
        assert dw.point == pytest.approx(-1, abs=1e-8)
        assert dw.derivative.real == pytest.approx(1, abs=1e-6)

    def test___denjoy_wolff__failure__elliptic(self):
        with pytest.raises(EllipticAutomorphism):
            denjoy_wolff(rotation(1j))

    def test___iterate__converges_to_denjoy_wolff_point(self):
        orbit = iterate(hyperbolic(), 0.3j, 20)
        assert abs(orbit[-1] - 1) < 1e-6
        assert all(abs(w) < 1 for w in orbit)

    def test___iterate__failure__escapes(self):
        with pytest.raises(EscapedDisk):
            iterate(hyperbolic(), 0, 200)
        assert len(iterate(hyperbolic(), 0, 200, strict=False)) < 200

    def test___iterate__failure__no_iterates(self):
        for m in (0, -3):
            with pytest.raises(InvalidOrbitLength, match="at least one iterate"):
                iterate(hyperbolic(), 0.3j, m)


class TestConjugation:
    def test___rotation_conjugate__moves_fixed_point(self):
        phi = parabolic_from_translation(2.0, 1j)
        psi = rotation_conjugate(phi, 1j)
        assert psi(1) == pytest.approx(1)

    def test___half_plane_conjugate__recovers_translation(self):
        for b in (0.5, 1.0, 2.0, -3.0):
            translation = half_plane_conjugate(parabolic_from_translation(b))
            assert translation.b == pytest.approx(b, abs=1e-9)
            assert translation.rotation == pytest.approx(1)

    def test___half_plane_conjugate__rotated_fixed_point(self):
        zeta = cmath.exp(2j)
        translation = half_plane_conjugate(parabolic_from_translation(1.5, zeta))
        assert translation.b == pytest.approx(1.5, abs=1e-8)
        assert translation.rotation == pytest.approx(zeta, abs=1e-8)

    def test___half_plane_conjugate__failure__hyperbolic(self):
        with pytest.raises(NotParabolic, match="hyperbolic"):
            half_plane_conjugate(hyperbolic())

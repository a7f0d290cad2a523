import cmath
import dataclasses
import enum
import logging

import numpy as np

from hardybear.config import DEFAULT_TOLERANCES, Tolerances
from hardybear.decorators import check_domains
from hardybear.exceptions import (
    DegenerateComposition,
    EllipticAutomorphism,
    EscapedDisk,
    IdentityMap,
    InvalidOrbitLength,
    NoDenjoyWolffPoint,
    NotAutomorphism,
    NotParabolic,
    NotSelfMap,
    PoleAtPoint,
)
from hardybear.sampling import boundary_points
from hardybear.typehints import ClosedDiskPoint, DiskPoint, Unimodular

logger = logging.getLogger(__name__)

# omega(z) = (1 + z) / (1 - z) maps the disk onto the right half-plane, 1 -> infinity
OMEGA = np.array([[1, 1], [-1, 1]], dtype=complex)
OMEGA_INV = np.array([[1, -1], [1, 1]], dtype=complex)


class MapClass(str, enum.Enum):
    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"


def _normalize(coeffs: np.ndarray) -> tuple[complex, ...]:
    """Scale the coefficient vector so its largest entry (first on ties) equals 1."""
    coeffs = np.asarray(coeffs, dtype=complex).ravel()
    scale = coeffs[int(np.argmax(np.abs(coeffs)))]
    return tuple(complex(x) for x in coeffs / scale)


@dataclasses.dataclass(frozen=True)
class LinearFractionalMap:
    """The map z -> (a z + b) / (c z + d), certified to be a self map of the disk.

    Coefficients are stored normalized (largest modulus entry equal to 1), so two
    maps built from proportional coefficients compare equal up to rounding.

    Raises:
        NotSelfMap: On a vanishing determinant, a pole in the closed disk or a
            boundary sample mapped outside the closed disk.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        coeffs = np.array([self.a, self.b, self.c, self.d], dtype=complex)
        if not np.all(np.isfinite(coeffs)) or np.abs(coeffs).max() == 0:
            raise NotSelfMap(f"Coefficients {tuple(coeffs)} are not finite and nonzero")
        for name, value in zip("abcd", _normalize(coeffs)):
            object.__setattr__(self, name, value)
        self._certify_self_map()

    def _certify_self_map(self, tolerances: Tolerances = DEFAULT_TOLERANCES):
        if abs(self.determinant) <= tolerances.identity:
            raise NotSelfMap(f"Determinant ad - bc = {self.determinant:.3g} vanishes")
        if abs(self.d) <= abs(self.c):
            raise NotSelfMap(f"Pole -d/c = {-self.d / self.c:.6g} lies in the closed unit disk")
        images = self(boundary_points(tolerances.boundary_samples))
        worst = float(np.abs(images).max())
        if worst > 1.0 + tolerances.self_map:
            raise NotSelfMap(f"A boundary point is mapped to modulus {worst:.12g} > 1")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @property
    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    def __call__(self, z):
        return (self.a * z + self.b) / (self.c * z + self.d)


@dataclasses.dataclass(frozen=True)
class DiskAutomorphism:
    """phi(z) = lam (a - z) / (1 - conj(a) z) with its classification."""

    lam: complex
    a: complex
    kind: MapClass
    fixed_points: tuple[tuple[complex, int], ...]

    @property
    def map(self) -> LinearFractionalMap:
        return LinearFractionalMap(-self.lam, self.lam * self.a, -self.a.conjugate(), 1)


@dataclasses.dataclass(frozen=True)
class DenjoyWolffData:
    point: complex
    derivative: complex
    interior: bool


@dataclasses.dataclass(frozen=True)
class HalfPlaneTranslation:
    """sigma(s) = s + i b on the right half-plane; `rotation` moved the fixed point to 1."""

    b: float
    rotation: complex = 1 + 0j


def from_matrix(matrix) -> LinearFractionalMap:
    return LinearFractionalMap(*np.asarray(matrix, dtype=complex).ravel())


def identity_map() -> LinearFractionalMap:
    return LinearFractionalMap(1, 0, 0, 1)


@check_domains
def rotation(lam: Unimodular) -> LinearFractionalMap:
    return LinearFractionalMap(lam, 0, 0, 1)


@check_domains
def automorphism(lam: Unimodular, a: DiskPoint) -> LinearFractionalMap:
    """The automorphism z -> lam (a - z) / (1 - conj(a) z)."""
    return LinearFractionalMap(-lam, lam * a, -a.conjugate(), 1)


def is_identity(map: LinearFractionalMap, tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
    tol = tolerances.identity
    return abs(map.b) <= tol and abs(map.c) <= tol and abs(map.a - map.d) <= tol


def equivalent(f: LinearFractionalMap, g: LinearFractionalMap, tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Projective equality: every 2x2 minor of the stacked coefficient vectors vanishes."""
    u = np.array([f.a, f.b, f.c, f.d])
    v = np.array([g.a, g.b, g.c, g.d])
    minors = np.outer(u, v) - np.outer(v, u)
    return bool(np.abs(minors).max() <= tolerances.identity * 100)


def lf_eval(map: LinearFractionalMap, z: complex, tolerances: Tolerances = DEFAULT_TOLERANCES) -> complex:
    denominator = map.c * z + map.d
    if abs(denominator) < tolerances.pole:
        raise PoleAtPoint(f"|c z + d| = {abs(denominator):.3g} at z = {z}")
    return complex((map.a * z + map.b) / denominator)


def lf_compose(
    outer: LinearFractionalMap, inner: LinearFractionalMap, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> LinearFractionalMap:
    """outer o inner, as the product of coefficient matrices."""
    product = outer.matrix @ inner.matrix
    scale = np.abs(product).max()
    if abs(np.linalg.det(product)) <= tolerances.identity * scale**2:
        raise DegenerateComposition(f"Composition has determinant {np.linalg.det(product):.3g}")
    return from_matrix(product)


@check_domains
def derivative_at(map: LinearFractionalMap, z: ClosedDiskPoint, tolerances: Tolerances = DEFAULT_TOLERANCES) -> complex:
    """phi'(z) = (a d - b c) / (c z + d)^2; on the circle this is the radial limit."""
    denominator = map.c * z + map.d
    if abs(denominator) < tolerances.pole:
        raise PoleAtPoint(f"|c z + d| = {abs(denominator):.3g} at z = {z}")
    return complex(map.determinant / denominator**2)


@check_domains
def pseudo_hyperbolic_distance(z: DiskPoint, w: DiskPoint) -> float:
    return abs((z - w) / (1 - w.conjugate() * z))


def sup_modulus(map: LinearFractionalMap) -> float:
    """sup |phi| over the closed disk.

    With the pole outside the closed disk (|d| > |c|) the circle goes to the circle of
    center (b conj(d) - a conj(c)) / (|d|^2 - |c|^2) and radius |ad - bc| / (|d|^2 - |c|^2).
    """
    gap = abs(map.d) ** 2 - abs(map.c) ** 2
    center = (map.b * map.d.conjugate() - map.a * map.c.conjugate()) / gap
    return float(abs(center) + abs(map.determinant) / gap)


def _on_circle(point: complex, tolerances: Tolerances) -> bool:
    return abs(abs(point) - 1.0) <= tolerances.boundary


def fixed_points(map: LinearFractionalMap, tolerances: Tolerances = DEFAULT_TOLERANCES) -> list[tuple[complex, int]]:
    """Fixed points in the closed disk with multiplicities.

    Solves c z^2 + (d - a) z - b = 0. The two roots merge into a double root when
    they are closer than `root_merge`, or when the discriminant is below
    `root_merge` relative to the coefficient scale (the square root amplifies a
    rounding-level discriminant). Boundary roots are snapped onto the circle.

    Raises:
        IdentityMap: If every point is fixed.
    """
    if is_identity(map, tolerances):
        raise IdentityMap("The identity map fixes every point")

    qa, qb, qc = map.c, map.d - map.a, -map.b
    scale = max(abs(qa), abs(qb), abs(qc))

    if abs(qa) <= tolerances.identity * scale:
        # second fixed point at infinity
        roots = [(-qc / qb, 1)]
    else:
        disc = qb * qb - 4 * qa * qc
        sq = cmath.sqrt(disc)
        q = -(qb + sq) / 2 if abs(qb + sq) >= abs(qb - sq) else -(qb - sq) / 2
        if q == 0:
            r1 = r2 = 0j
        else:
            r1, r2 = q / qa, qc / q
        merge = abs(r1 - r2) < tolerances.root_merge or abs(disc) <= tolerances.root_merge * (
            abs(qb) ** 2 + abs(4 * qa * qc)
        )
        roots = [((r1 + r2) / 2, 2)] if merge else [(r1, 1), (r2, 1)]

    inside = []
    for root, mult in roots:
        if abs(root) > 1.0 + tolerances.boundary:
            continue
        if _on_circle(root, tolerances):
            root = root / abs(root)
        inside.append((complex(root), mult))
    logger.debug("fixed points of %s: %s", map, inside)
    return sorted(inside, key=lambda item: (-item[0].real, -item[0].imag))


def _canonical_form(map: LinearFractionalMap, tolerances: Tolerances = DEFAULT_TOLERANCES) -> tuple[complex, complex]:
    """(lam, a) with map(z) = lam (a - z) / (1 - conj(a) z), or NotAutomorphism."""
    try:
        LinearFractionalMap(map.d, -map.b, -map.c, map.a)
    except NotSelfMap as exc:
        raise NotAutomorphism(f"The inverse of {map} is not a self map: {exc}")

    lam = -map.a / map.d
    a = -(map.c / map.d).conjugate()
    if abs(abs(lam) - 1.0) > tolerances.boundary or abs(a) >= 1.0:
        raise NotAutomorphism(f"{map} has no canonical form lam (a - z) / (1 - conj(a) z)")
    if abs(lam * a - map.b / map.d) > tolerances.boundary:
        raise NotAutomorphism(f"{map} has no canonical form lam (a - z) / (1 - conj(a) z)")
    return complex(lam / abs(lam)), complex(a)


def is_automorphism(map: LinearFractionalMap, tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
    try:
        _canonical_form(map, tolerances)
    except NotAutomorphism:
        return False
    return True


def classify_automorphism(map: LinearFractionalMap, tolerances: Tolerances = DEFAULT_TOLERANCES) -> DiskAutomorphism:
    """Classify a disk automorphism as elliptic, hyperbolic or parabolic.

    Raises:
        NotAutomorphism: If the inverse map is not a self map.
        IdentityMap: For the identity, which has no classification.
    """
    if isinstance(map, DiskAutomorphism):
        return map
    lam, a = _canonical_form(map, tolerances)
    points = fixed_points(map, tolerances)

    if any(abs(point) < 1.0 - tolerances.boundary for point, _ in points):
        kind = MapClass.ELLIPTIC
    elif len(points) == 1 and points[0][1] == 2:
        kind = MapClass.PARABOLIC
    else:
        kind = MapClass.HYPERBOLIC
    return DiskAutomorphism(lam=lam, a=a, kind=kind, fixed_points=tuple(points))


def denjoy_wolff(map: LinearFractionalMap, tolerances: Tolerances = DEFAULT_TOLERANCES) -> DenjoyWolffData:
    """The attracting fixed point of a self map that is neither elliptic nor the identity.

    Interior candidates need |phi'(w)| < 1; boundary candidates need a real
    derivative in (0, 1]. An interior fixed point with |phi'(w)| = 1 means phi is
    an elliptic automorphism.
    """
    candidates = []
    for point, _ in fixed_points(map, tolerances):
        derivative = derivative_at(map, point, tolerances)
        if not _on_circle(point, tolerances):
            if abs(derivative) >= 1.0 - tolerances.boundary:
                raise EllipticAutomorphism(f"{map} rotates about its interior fixed point {point:.6g}")
            return DenjoyWolffData(point=point, derivative=derivative, interior=True)
        if abs(derivative.imag) <= tolerances.margin and 0 < derivative.real <= 1.0 + tolerances.margin:
            candidates.append(DenjoyWolffData(point=point, derivative=derivative, interior=False))

    if not candidates:
        raise NoDenjoyWolffPoint(f"No fixed point of {map} satisfies the Denjoy-Wolff derivative conditions")
    return min(candidates, key=lambda data: data.derivative.real)


@check_domains
def iterate(map: LinearFractionalMap, z: DiskPoint, m: int, strict: bool = True) -> list[complex]:
    """[phi_1(z), ..., phi_m(z)] from successive (renormalized) matrix powers.

    Raises:
        EscapedDisk: If an iterate rounds onto or outside the circle; with
            `strict=False` the orbit is cut before that iterate instead.
        InvalidOrbitLength: If m < 1.
    """
    if not isinstance(map, LinearFractionalMap):
        raise TypeError(f"iterate needs a LinearFractionalMap, found {type(map)}")
    if m < 1:
        raise InvalidOrbitLength(f"Need at least one iterate, found m = {m}")
    step = map.matrix
    power = np.eye(2, dtype=complex)
    orbit = []
    for k in range(1, m + 1):
        power = step @ power
        power = power / np.abs(power).max()
        w = complex((power[0, 0] * z + power[0, 1]) / (power[1, 0] * z + power[1, 1]))
        if abs(w) >= 1.0:
            if not strict:
                logger.debug("orbit of %s cut at iterate %d", z, k)
                break
            raise EscapedDisk(f"Iterate {k} of z = {z} has modulus {abs(w):.17g} >= 1")
        orbit.append(w)
    return orbit


@check_domains
def rotation_conjugate(map: LinearFractionalMap, a: Unimodular) -> LinearFractionalMap:
    """psi = omega o phi o omega^{-1} with omega(z) = conj(a) z."""
    return LinearFractionalMap(map.a, a.conjugate() * map.b, a * map.c, map.d)


def _as_parabolic(aut: DiskAutomorphism | LinearFractionalMap, tolerances: Tolerances) -> DiskAutomorphism:
    try:
        aut = classify_automorphism(aut, tolerances)
    except (NotAutomorphism, IdentityMap) as exc:
        raise NotParabolic(f"Expected a parabolic automorphism: {exc}")
    if aut.kind is not MapClass.PARABOLIC:
        raise NotParabolic(f"Expected a parabolic automorphism, found a {aut.kind.value} one")
    return aut


def half_plane_conjugate(
    aut: DiskAutomorphism | LinearFractionalMap, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> HalfPlaneTranslation:
    """Translation parameter b of omega o phi o omega^{-1} = (s -> s + i b).

    A fixed point zeta other than 1 is first moved to 1 by rotation conjugation.

    Raises:
        NotParabolic: If `aut` is not parabolic or the conjugate is not a translation.
    """
    aut = _as_parabolic(aut, tolerances)
    zeta = aut.fixed_points[0][0]
    psi = rotation_conjugate(aut.map, zeta)
    sigma = OMEGA @ psi.matrix @ OMEGA_INV
    b = float((sigma[0, 1] / sigma[1, 1]).imag)

    for s in (1.0, 2.0 + 1.0j, 0.5 - 3.0j):
        image = (sigma[0, 0] * s + sigma[0, 1]) / (sigma[1, 0] * s + sigma[1, 1])
        if abs(image - (s + 1j * b)) > 1e-12 * (1 + abs(s) + abs(b)):
            raise NotParabolic(f"Half-plane conjugate is not a translation at s = {s}")
    logger.debug("half-plane translation b=%r after rotation by %r", b, zeta)
    return HalfPlaneTranslation(b=b, rotation=zeta)


@check_domains
def parabolic_from_translation(b: float, zeta: Unimodular = 1 + 0j) -> LinearFractionalMap:
    """The parabolic automorphism omega^{-1} o (s -> s + i b) o omega, rotated to fix `zeta`."""
    if b == 0:
        raise NotParabolic("Translation parameter b must be nonzero")
    psi = LinearFractionalMap(2 - 1j * b, 1j * b, -1j * b, 2 + 1j * b)
    return rotation_conjugate(psi, zeta.conjugate())

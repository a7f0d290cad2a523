import dataclasses
import logging
import math
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.spatial import cKDTree

from hardybear.config import DEFAULT_TOLERANCES, Tolerances
from hardybear.decorators import check_domains
from hardybear.exceptions import (
    NotBlaschkeSummable,
    NotUnimodular,
    OutsideDisk,
    PoleInDisk,
    SoundnessAlarm,
    TailBoundUnavailable,
    UnsupportedInner,
    ZeroFunction,
)
from hardybear.maps import LinearFractionalMap
from hardybear.polynomials import from_roots, roots_with_multiplicity, trim
from hardybear.sampling import boundary_sup, disk_samples
from hardybear.typehints import DiskPoint, Unimodular

logger = logging.getLogger(__name__)


def _unimodular(c: complex, tolerances: Tolerances = DEFAULT_TOLERANCES) -> complex:
    c = complex(c)
    if abs(abs(c) - 1.0) > tolerances.boundary:
        raise NotUnimodular(f"Constant {c} is not unimodular")
    return c / abs(c)


def _merge_points(points: Sequence[tuple[complex, float]], tol: float) -> list[tuple[complex, float]]:
    """Merge (point, weight) pairs whose points are within `tol` of an earlier kept point, adding weights."""
    points = [(complex(p), w) for p, w in points]
    if not points:
        return []
    tree = cKDTree(np.array([[p.real, p.imag] for p, _ in points]))
    owner = [-1] * len(points)
    merged: dict[int, list] = {}
    for i, (point, weight) in enumerate(points):
        if owner[i] >= 0:
            merged[owner[i]][1] += weight
            continue
        merged[i] = [point, weight]
        for j in tree.query_ball_point([point.real, point.imag], tol):
            if j > i and owner[j] < 0:
                owner[j] = i
    return sorted(((p, w) for p, w in merged.values()), key=lambda item: (abs(item[0]), np.angle(item[0])))


def _factor(a: complex, z):
    """(|a|/a) (a - z) / (1 - conj(a) z) for a != 0."""
    return (abs(a) / a) * (a - z) / (1 - a.conjugate() * z)


@dataclasses.dataclass(frozen=True)
class FiniteBlaschkeProduct:
    """c z^m prod_n ((|a_n|/a_n) (a_n - z) / (1 - conj(a_n) z))^{k_n}.

    Zeros at the origin are folded into `m` and coincident zeros are merged.
    """

    m: int = 0
    zeros: tuple[tuple[complex, int], ...] = ()
    c: complex = 1 + 0j

    def __post_init__(self, tolerances: Tolerances = DEFAULT_TOLERANCES):
        if self.m < 0:
            raise ValueError(f"Order of the zero at the origin must be nonnegative, found {self.m}")
        m = self.m
        zeros = []
        for a, k in self.zeros:
            a = complex(a)
            if int(k) != k or k <= 0:
                raise ValueError(f"Multiplicity of zero {a} must be a positive integer, found {k}")
            if abs(a) >= 1.0:
                raise OutsideDisk(f"Blaschke zero {a} lies outside the open unit disk")
            if abs(a) <= tolerances.root_merge:
                m += int(k)
            else:
                zeros.append((a, int(k)))
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "zeros", tuple((a, int(k)) for a, k in _merge_points(zeros, tolerances.root_merge)))
        object.__setattr__(self, "c", _unimodular(self.c, tolerances))

    @property
    def degree(self) -> int:
        return self.m + sum(k for _, k in self.zeros)

    @property
    def all_zeros(self) -> list[tuple[complex, int]]:
        """Zeros with multiplicities, the origin included."""
        return ([(0j, self.m)] if self.m else []) + list(self.zeros)

    def __call__(self, z):
        value = self.c * np.power(z, self.m) if self.m else self.c * np.ones_like(z, dtype=complex)
        for a, k in self.zeros:
            value = value * _factor(a, z) ** k
        return value

    def mult(self, w: complex, tolerances: Tolerances = DEFAULT_TOLERANCES) -> int:
        if abs(w) <= tolerances.root_merge:
            return self.m
        return sum(k for a, k in self.zeros if abs(a - w) <= tolerances.root_merge)


@dataclasses.dataclass(frozen=True, eq=False)
class BlaschkeSequence:
    """A Blaschke product over a (possibly infinite) zero sequence.

    Args:
        first: `first(N)` returns the first N zeros (repeated by multiplicity).
        tail_bound: `tail_bound(N)` bounds sum_{n >= N} (1 - |a_n|) from above.
        length: Number of zeros, or None for an infinite sequence.
        c: Unimodular constant.
        description: Provenance, shown in reports.
    """

    first: Callable[[int], np.ndarray]
    tail_bound: Callable[[int], float]
    length: int | None = None
    c: complex = 1 + 0j
    description: str = ""

    def truncation(self, n: int) -> FiniteBlaschkeProduct:
        if self.length is not None:
            n = min(n, self.length)
        points = np.asarray(self.first(n), dtype=complex)
        return FiniteBlaschkeProduct(zeros=tuple((a, 1) for a in points), c=self.c)

    def truncation_length(self, radius: float, tol: float, tolerances: Tolerances = DEFAULT_TOLERANCES) -> int:
        """Smallest N (up to doubling then bisection) with (2 / (1 - radius)) tail(N) <= tol.

        Raises:
            TailBoundUnavailable: If no N up to `max_blaschke_terms` reaches `tol`.
        """
        if self.length is not None:
            return self.length
        budget = tol * (1.0 - radius) / 2.0

        def good(n: int) -> bool:
            return self.tail_bound(n) <= budget

        hi = 1
        while not good(hi):
            if hi >= tolerances.max_blaschke_terms:
                raise TailBoundUnavailable(
                    f"Tail bound {self.tail_bound(hi):.3g} after {hi} zeros does not reach {budget:.3g}"
                )
            hi = min(2 * hi, tolerances.max_blaschke_terms)
        lo = hi // 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if good(mid):
                hi = mid
            else:
                lo = mid
        logger.debug(
            "truncating %s at %d zeros for tol=%g at radius %g", self.description or "sequence", hi, tol, radius
        )
        return hi

    def mult(self, w: complex, tolerances: Tolerances = DEFAULT_TOLERANCES) -> int:
        """Zeros beyond N with tail(N) < 1 - |w| all have modulus above |w|, so only the prefix can match."""
        n = self.length
        if n is None:
            n = 1
            while self.tail_bound(n) >= 1.0 - abs(w):
                if n >= tolerances.max_blaschke_terms:
                    raise TailBoundUnavailable(f"Cannot isolate the zeros near {w} within {n} terms")
                n = min(2 * n, tolerances.max_blaschke_terms)
        return self.truncation(n).mult(w, tolerances)


@dataclasses.dataclass(frozen=True)
class AtomicSingularInner:
    """c exp(-sum_k alpha_k (zeta_k + z) / (zeta_k - z)); coincident atoms are merged."""

    atoms: tuple[tuple[complex, float], ...]
    c: complex = 1 + 0j

    def __post_init__(self, tolerances: Tolerances = DEFAULT_TOLERANCES):
        atoms = []
        for zeta, alpha in self.atoms:
            zeta = complex(zeta)
            if abs(abs(zeta) - 1.0) > tolerances.boundary:
                raise NotUnimodular(f"Atom {zeta} is not on the unit circle")
            if not alpha > 0:
                raise ValueError(f"Atom weight must be positive, found {alpha}")
            atoms.append((zeta / abs(zeta), float(alpha)))
        object.__setattr__(self, "atoms", tuple(_merge_points(atoms, tolerances.atom_match)))
        object.__setattr__(self, "c", _unimodular(self.c, tolerances))

    def exponent(self, z):
        """-sum_k alpha_k (zeta_k + z) / (zeta_k - z)."""
        total = np.zeros_like(z, dtype=complex)
        for zeta, alpha in self.atoms:
            total = total - alpha * (zeta + z) / (zeta - z)
        return total

    def __call__(self, z):
        return self.c * np.exp(self.exponent(z))


BlaschkePart = FiniteBlaschkeProduct | BlaschkeSequence


@dataclasses.dataclass(frozen=True)
class CertifiedValue:
    value: complex
    error: float


@dataclasses.dataclass(frozen=True, eq=False)
class InnerFunction:
    """theta = constant * B * S.

    Part constants are moved into `constant`; a Blaschke part without zeros is
    dropped, so the unimodular constants are exactly the functions with no parts.
    """

    blaschke: BlaschkePart | None = None
    singular: AtomicSingularInner | None = None
    constant: complex = 1 + 0j

    def __post_init__(self):
        constant = _unimodular(self.constant)
        blaschke = self.blaschke
        if blaschke is not None:
            constant *= blaschke.c
            blaschke = dataclasses.replace(blaschke, c=1 + 0j)
            if isinstance(blaschke, FiniteBlaschkeProduct) and blaschke.degree == 0:
                blaschke = None
        singular = self.singular
        if singular is not None:
            constant *= singular.c
            singular = AtomicSingularInner(singular.atoms) if singular.atoms else None
        object.__setattr__(self, "blaschke", blaschke)
        object.__setattr__(self, "singular", singular)
        object.__setattr__(self, "constant", constant / abs(constant))

    @property
    def is_constant(self) -> bool:
        return self.blaschke is None and self.singular is None

    @property
    def is_finite_blaschke(self) -> bool:
        """No singular part and a finite (possibly absent) Blaschke part."""
        return self.singular is None and not isinstance(self.blaschke, BlaschkeSequence)

    @property
    def single_atom(self) -> tuple[complex, float] | None:
        if self.blaschke is None and self.singular is not None and len(self.singular.atoms) == 1:
            return self.singular.atoms[0]
        return None

    def zeros(self) -> list[tuple[complex, int]]:
        """Zeros of a finite Blaschke part with multiplicities, the origin included."""
        if isinstance(self.blaschke, BlaschkeSequence):
            raise UnsupportedInner("The zero set of an infinite Blaschke product is not finite")
        return [] if self.blaschke is None else self.blaschke.all_zeros

    def __call__(self, z, tol: float = 1e-12):
        z = np.asarray(z, dtype=complex)
        value = self.constant * np.ones_like(z)
        if self.blaschke is not None:
            part = self.blaschke
            if isinstance(part, BlaschkeSequence):
                radius = float(np.abs(z).max()) if z.size else 0.0
                part = part.truncation(part.truncation_length(radius, tol))
            value = value * part(z)
        if self.singular is not None:
            value = value * self.singular(z)
        return value[()] if value.ndim == 0 else value


@check_domains
def blaschke_factor(w: DiskPoint) -> InnerFunction:
    """b_w(z) = (w - z) / (1 - conj(w) z), so b_w(w) = 0 and b_w(0) = w (b_0 = -z)."""
    if w == 0:
        return InnerFunction(FiniteBlaschkeProduct(m=1), constant=-1)
    return InnerFunction(FiniteBlaschkeProduct(zeros=((w, 1),)), constant=w / abs(w))


def monomial(m: int) -> InnerFunction:
    return InnerFunction(FiniteBlaschkeProduct(m=m))


@check_domains
def unimodular_constant(c: Unimodular = 1 + 0j) -> InnerFunction:
    return InnerFunction(constant=c)


def finite_blaschke(zeros: Sequence[complex], mults: Sequence[int] | None = None, c: complex = 1 + 0j) -> InnerFunction:
    mults = [1] * len(zeros) if mults is None else list(mults)
    if len(mults) != len(zeros):
        raise ValueError(f"Got {len(zeros)} zeros but {len(mults)} multiplicities")
    return InnerFunction(FiniteBlaschkeProduct(zeros=tuple(zip(zeros, mults))), constant=c)


@check_domains
def atomic_singular(zeta: Unimodular, alpha: float, c: complex = 1 + 0j) -> InnerFunction:
    return InnerFunction(singular=AtomicSingularInner(((zeta, alpha),)), constant=c)


@check_domains
def inner_eval(theta: InnerFunction, z: DiskPoint, tol: float = 1e-12) -> CertifiedValue:
    """theta(z) with a certified absolute error bound.

    Infinite Blaschke parts are truncated after N zeros with
    |B(z) - B_N(z)| <= (2 / (1 - |z|)) sum_{n >= N} (1 - |a_n|) <= tol.

    Raises:
        TailBoundUnavailable: If the tail bound cannot reach `tol`.
    """
    error = 0.0
    value = theta.constant
    part = theta.blaschke
    if isinstance(part, BlaschkeSequence):
        n = part.truncation_length(abs(z), tol)
        if part.length is None:
            error = 2.0 / (1.0 - abs(z)) * part.tail_bound(n)
        part = part.truncation(n)
    if part is not None:
        value *= part(z)
    if theta.singular is not None:
        value *= theta.singular(z)
    return CertifiedValue(value=complex(value), error=float(error))


@check_domains
def inner_mult(theta: InnerFunction, w: DiskPoint, tolerances: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Order of w as a zero of theta; singular parts have no zeros in the disk."""
    if theta.blaschke is None:
        return 0
    return theta.blaschke.mult(w, tolerances)


def _as_sequence(part: BlaschkePart) -> BlaschkeSequence:
    if isinstance(part, BlaschkeSequence):
        return part
    expanded = np.array([a for a, k in part.all_zeros for _ in range(k)], dtype=complex)
    defects = 1.0 - np.abs(expanded)
    return BlaschkeSequence(
        first=lambda n: expanded[:n],
        tail_bound=lambda n: float(defects[n:].sum()),
        length=int(expanded.size),
        c=part.c,
    )


def _blaschke_product(p: BlaschkePart, q: BlaschkePart) -> BlaschkePart:
    if isinstance(p, FiniteBlaschkeProduct) and isinstance(q, FiniteBlaschkeProduct):
        return FiniteBlaschkeProduct(m=p.m + q.m, zeros=p.zeros + q.zeros, c=p.c * q.c)
    p, q = _as_sequence(p), _as_sequence(q)
    if q.length is not None:
        p, q = q, p
    if p.length is not None:
        n_p = p.length

        def first(n: int) -> np.ndarray:
            return np.concatenate([p.first(min(n, n_p)), q.first(max(n - n_p, 0))])

        def tail_bound(n: int) -> float:
            return p.tail_bound(min(n, n_p)) + q.tail_bound(max(n - n_p, 0))

    else:

        def first(n: int) -> np.ndarray:
            return np.concatenate([p.first(math.ceil(n / 2)), q.first(n // 2)])

        def tail_bound(n: int) -> float:
            return p.tail_bound(math.ceil(n / 2)) + q.tail_bound(n // 2)

    length = None if p.length is None or q.length is None else p.length + q.length
    return BlaschkeSequence(first=first, tail_bound=tail_bound, length=length, c=p.c * q.c)


def inner_product(theta1: InnerFunction, theta2: InnerFunction) -> InnerFunction:
    """Pointwise product: zero lists merge, weights add at coincident atoms, constants multiply."""
    if theta1.blaschke is None or theta2.blaschke is None:
        blaschke = theta1.blaschke or theta2.blaschke
    else:
        blaschke = _blaschke_product(theta1.blaschke, theta2.blaschke)

    if theta1.singular is None or theta2.singular is None:
        singular = theta1.singular or theta2.singular
    else:
        singular = AtomicSingularInner(theta1.singular.atoms + theta2.singular.atoms)

    return InnerFunction(blaschke=blaschke, singular=singular, constant=theta1.constant * theta2.constant)


@check_domains
def inner_rotate(theta: InnerFunction, a: Unimodular) -> InnerFunction:
    """theta o omega with omega(z) = conj(a) z: zeros and atoms move by a, z^m picks up conj(a)^m."""
    blaschke = theta.blaschke
    constant = theta.constant
    if isinstance(blaschke, FiniteBlaschkeProduct):
        constant *= a.conjugate() ** blaschke.m
        blaschke = FiniteBlaschkeProduct(m=blaschke.m, zeros=tuple((a * b, k) for b, k in blaschke.zeros))
    elif isinstance(blaschke, BlaschkeSequence):
        source = blaschke
        blaschke = dataclasses.replace(source, first=lambda n: a * np.asarray(source.first(n), dtype=complex))
    singular = theta.singular
    if singular is not None:
        singular = AtomicSingularInner(tuple((a * zeta, alpha) for zeta, alpha in singular.atoms))
    return InnerFunction(blaschke=blaschke, singular=singular, constant=constant)


def compose_zeros(
    theta: InnerFunction, phi: LinearFractionalMap, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> list[tuple[complex, int]]:
    """Zeros of theta o phi in the open disk with multiplicities.

    Each zero a of theta pulls back to the single solution of phi(z) = a,
    z = (a d - b) / (a' - a c), kept when |z| < 1.

    Raises:
        UnsupportedInner: If theta has a singular part or an infinite Blaschke part.
    """
    if not theta.is_finite_blaschke:
        raise UnsupportedInner("Zero transport needs a finite Blaschke product without singular part")
    pulled = []
    for a, k in theta.zeros():
        denominator = phi.a - a * phi.c
        if abs(denominator) <= tolerances.pole:
            # a is the image of infinity
            continue
        z = (a * phi.d - phi.b) / denominator
        if abs(z) < 1.0:
            pulled.append((complex(z), k))
    return pulled


@check_domains
def composed_multiplicity(
    theta: InnerFunction, phi: LinearFractionalMap, w: DiskPoint, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> int:
    """mult of w as a zero of theta o phi, which is mult_theta(phi(w)) for a linear-fractional phi."""
    return inner_mult(theta, complex(phi(w)), tolerances)


def orbit_blaschke(
    orbit: Sequence[complex] | Callable[[int], np.ndarray],
    tail_bound: Callable[[int], float] | None = None,
    partial_sum_limit: float | None = None,
    description: str = "orbit",
) -> FiniteBlaschkeProduct | BlaschkeSequence:
    """Blaschke product over the points of an orbit.

    A finite list gives a `FiniteBlaschkeProduct` with repeated points merged.
    An infinite orbit is given by `orbit(N)` (the first N points) and must come
    with a certified `tail_bound`.

    Raises:
        NotBlaschkeSummable: If an infinite orbit has no finite tail bound, or the
            partial sum of a finite orbit exceeds `partial_sum_limit`.
    """
    if callable(orbit):
        if tail_bound is None or not math.isfinite(tail_bound(1)):
            raise NotBlaschkeSummable(f"No certified tail bound for {description}")
        return BlaschkeSequence(first=orbit, tail_bound=tail_bound, description=description)

    points = np.asarray(orbit, dtype=complex)
    if np.any(np.abs(points) >= 1.0):
        raise OutsideDisk(f"Orbit {description} leaves the open unit disk")
    partial = float((1.0 - np.abs(points)).sum())
    if partial_sum_limit is not None and partial > partial_sum_limit:
        raise NotBlaschkeSummable(f"Partial sum {partial:.6g} of {description} exceeds {partial_sum_limit:.6g}")
    return FiniteBlaschkeProduct(zeros=tuple((a, 1) for a in points))


@dataclasses.dataclass(frozen=True)
class RieszFactorization:
    """f = B g with B finite Blaschke and g = g_num / g_den zero-free in the disk."""

    blaschke: FiniteBlaschkeProduct
    g_num: np.ndarray
    g_den: np.ndarray
    sup_f: float
    sup_g: float

    def g(self, z):
        return P.polyval(z, self.g_num) / P.polyval(z, self.g_den)


def riesz_factor(numerator, denominator, tolerances: Tolerances = DEFAULT_TOLERANCES) -> RieszFactorization:
    """Split a rational function (ascending coefficients) into a Blaschke product and a zero-free factor.

    A zero a != 0 of multiplicity k leaves the numerator as (z - a)^k and comes
    back into g as (-a/|a|)^k (1 - conj(a) z)^k; zeros at the origin leave as z^k.

    Raises:
        ZeroFunction: If the numerator vanishes identically.
        PoleInDisk: If the denominator has a root in the closed disk.
        SoundnessAlarm: If f != B g on the disk samples or sup |f| != sup |g| on the circle.
    """
    num = trim(numerator)
    den = trim(denominator)
    if not np.any(num):
        raise ZeroFunction("Cannot factor the zero function")
    if not np.any(den):
        raise PoleInDisk("Denominator vanishes identically")
    for root, _ in roots_with_multiplicity(den, tolerances.root_cluster):
        if abs(root) <= 1.0 + tolerances.boundary:
            raise PoleInDisk(f"Denominator root {root:.6g} lies in the closed unit disk")

    disk_zeros = [(a, k) for a, k in roots_with_multiplicity(num, tolerances.root_cluster) if abs(a) < 1.0]
    quotient, _ = P.polydiv(num, from_roots(disk_zeros))
    g_num = np.asarray(quotient, dtype=complex)
    for a, k in disk_zeros:
        if a == 0:
            continue
        restore = np.array([1.0, -a.conjugate()], dtype=complex) * (-a / abs(a))
        for _ in range(k):
            g_num = P.polymul(g_num, restore)

    blaschke = FiniteBlaschkeProduct(zeros=tuple(disk_zeros))

    def f(z):
        return P.polyval(z, num) / P.polyval(z, den)

    def g(z):
        return P.polyval(z, g_num) / P.polyval(z, den)

    grid = disk_samples(100, tolerances.seed)
    values = f(grid)
    mismatch = float(np.abs(values - blaschke(grid) * g(grid)).max()) / max(1.0, float(np.abs(values).max()))
    if mismatch > 1e-10:
        raise SoundnessAlarm(f"Riesz factorization mismatch {mismatch:.3g} exceeds 1e-10")

    sup_f = boundary_sup(f, tolerances.boundary_samples)
    sup_g = boundary_sup(g, tolerances.boundary_samples)
    if abs(sup_f - sup_g) > 1e-8 * max(1.0, sup_f):
        raise SoundnessAlarm(f"Boundary sup norms differ: |f| {sup_f:.12g} vs |g| {sup_g:.12g}")
    return RieszFactorization(blaschke=blaschke, g_num=g_num, g_den=den, sup_f=sup_f, sup_g=sup_g)

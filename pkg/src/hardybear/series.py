import dataclasses
import enum
import logging
import math

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.linalg import eigh, norm, qr, toeplitz

from hardybear.config import DEFAULT_TOLERANCES, Tolerances
from hardybear.decorators import check_domains
from hardybear.exceptions import (
    CompositionDiverges,
    IllConditioned,
    PointsNotSeparated,
    PoleTooClose,
    SoundnessAlarm,
    TruncationUnreliable,
)
from hardybear.inner import BlaschkeSequence, InnerFunction
from hardybear.maps import LinearFractionalMap, pseudo_hyperbolic_distance, sup_modulus
from hardybear.typehints import DiskPoint

logger = logging.getLogger(__name__)

# Cauchy radius search: R = 1 + (1/rho0 - 1) t
CAUCHY_GRID = (0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99)
# rounding floor of the norm-defect tail bound
NORM_DEFECT_FLOOR = 1e-15


@dataclasses.dataclass(frozen=True, eq=False)
class PowerSeries:
    """First N Taylor coefficients of a function f on the disk, with tail metadata.

    The stored coefficients are those of a reference function g with
    ||f - g||_{H^2} <= error. When `tail_radius` is set, |g_n| <= C rho^n for
    every n; rho = 0 means g is exactly the stored polynomial.

    Args:
        coeffs: Coefficients of degree 0..N-1.
        tail_radius: rho < 1 of the geometric tail, or None when unknown.
        tail_constant: C of the geometric tail.
        l2_norm: Exact H^2 norm of f, when known (1 for inner functions).
        error: H^2 distance between f and the reference function.
        sup_bound: Upper bound of sup |f| on the disk, when known.
    """

    coeffs: np.ndarray
    tail_radius: float | None = None
    tail_constant: float = 0.0
    l2_norm: float | None = None
    error: float = 0.0
    sup_bound: float | None = None

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if coeffs.ndim != 1 or coeffs.size < 1:
            raise ValueError(f"A power series needs N >= 1 coefficients, found shape {coeffs.shape}")
        object.__setattr__(self, "coeffs", coeffs)
        rho = self.tail_radius
        if rho is not None:
            if not 0.0 <= rho < 1.0:
                raise ValueError(f"Tail radius must lie in [0, 1), found {rho}")
            if rho > 0:
                ratios = np.abs(coeffs) / rho ** np.arange(coeffs.size)
                if ratios.max() > self.tail_constant * (1 + 1e-9):
                    logger.debug("raising tail constant %g to %g", self.tail_constant, ratios.max())
                    object.__setattr__(self, "tail_constant", float(ratios.max()))

    @property
    def N(self) -> int:
        return self.coeffs.size

    def __call__(self, z):
        return P.polyval(z, self.coeffs)

    def truncate(self, n: int) -> "PowerSeries":
        """The first n coefficients; an exact polynomial loses its exactness if nonzero terms are dropped."""
        if n >= self.N:
            return self
        dropped = float(np.linalg.norm(self.coeffs[n:]))
        if self.tail_radius == 0 and dropped > 0:
            return dataclasses.replace(self, coeffs=self.coeffs[:n], error=self.error + dropped)
        return dataclasses.replace(self, coeffs=self.coeffs[:n])

    def shift(self, k: int) -> "PowerSeries":
        """z^k f, truncated to the same N."""
        coeffs = np.concatenate([np.zeros(k, dtype=complex), self.coeffs])
        shifted = dataclasses.replace(self, coeffs=coeffs, tail_constant=self._shifted_constant(k))
        return shifted.truncate(self.N)

    def _shifted_constant(self, k: int) -> float:
        if not self.tail_radius:
            return self.tail_constant
        return self.tail_constant / self.tail_radius**k

    def tail_l2(self) -> float:
        """Bound on ||f - sum_{n<N} c_n z^n||_{H^2}.

        The smaller of the geometric bound C rho^N / sqrt(1 - rho^2) and the
        norm-defect bound sqrt(||f||^2 - ||c||^2), each plus `error`.
        """
        bounds = [math.inf]
        rho = self.tail_radius
        if rho is not None:
            bounds.append(0.0 if rho == 0 else self.tail_constant * rho**self.N / math.sqrt(1 - rho**2))
        if self.l2_norm is not None:
            stored = max(float(np.linalg.norm(self.coeffs)) - self.error, 0.0)
            bounds.append(math.sqrt(max(self.l2_norm**2 - stored**2, 0.0) + NORM_DEFECT_FLOOR))
        return self.error + min(bounds)


class SectionRole(str, enum.Enum):
    COMPOSITION = "composition"
    MULTIPLICATION = "multiplication"


@dataclasses.dataclass(frozen=True, eq=False)
class OperatorSection:
    """N x N compression of an operator to the span of 1, z, ..., z^{N-1}."""

    entries: np.ndarray
    role: SectionRole
    source: str


@dataclasses.dataclass(frozen=True)
class KernelNormEstimate:
    points: tuple[complex, ...]
    c: float
    bound: float
    ridge: float
    condition: float


def littlewood_bound(phi0: complex) -> float:
    """sqrt((1 + |phi(0)|) / (1 - |phi(0)|)), the norm bound of C_phi."""
    r = abs(phi0)
    return math.sqrt((1 + r) / (1 - r))


def _sup_of_reference(f: PowerSeries) -> float:
    if f.tail_radius == 0:
        return float(np.abs(f.coeffs).sum())
    if f.error == 0 and f.sup_bound is not None:
        return f.sup_bound
    return math.inf


def _product_tail(f: PowerSeries, g: PowerSeries) -> tuple[float | None, float]:
    rho, sigma = f.tail_radius, g.tail_radius
    if rho is None or sigma is None:
        return None, 0.0
    if rho == 0 and sigma == 0:
        return 0.0, 0.0
    if rho == 0 or sigma == 0:
        poly, geo = (f, g) if rho == 0 else (g, f)
        r = geo.tail_radius
        weights = r ** -np.arange(poly.N, dtype=float)
        return r, geo.tail_constant * float(np.abs(poly.coeffs) @ weights)
    big, small = max(rho, sigma), min(rho, sigma)
    constant = f.tail_constant * g.tail_constant
    if big - small > 1e-12:
        return big, constant * big / (big - small)
    # (n + 1) R^n <= e^{-1} / (x (-ln x)) R'^n with R' = (1 + R) / 2, x = R / R'
    wider = (1 + big) / 2
    x = big / wider
    return wider, constant / (math.e * x * -math.log(x))


def series_mul(f: PowerSeries, g: PowerSeries) -> PowerSeries:
    """Cauchy product truncated to min(N_f, N_g), with propagated tail and error bounds."""
    n = min(f.N, g.N)
    full = np.convolve(f.coeffs[:n], g.coeffs[:n])
    tail_radius, tail_constant = _product_tail(f, g)

    error = 0.0
    if f.error:
        error += f.error * (g.sup_bound if g.sup_bound is not None else math.inf)
    if g.error:
        error += g.error * _sup_of_reference(f)
    if tail_radius == 0:
        error += float(np.linalg.norm(full[n:]))

    sup_bound = None if f.sup_bound is None or g.sup_bound is None else f.sup_bound * g.sup_bound
    # |f| = 1 a.e. on the circle iff ||f||_2 = 1 and sup |f| <= 1, and products of such functions keep both
    inner_like = f.l2_norm == 1.0 and g.l2_norm == 1.0 and f.sup_bound == 1.0 and g.sup_bound == 1.0
    return PowerSeries(
        coeffs=full[:n],
        tail_radius=tail_radius,
        tail_constant=tail_constant,
        l2_norm=1.0 if inner_like else None,
        error=error,
        sup_bound=sup_bound,
    )


def series_compose(f: PowerSeries, phi: PowerSeries) -> PowerSeries:
    """f o phi truncated to min(N_f, N_phi) by Horner accumulation.

    The error is ||C_phi|| times the H^2 tail of f, with ||C_phi|| from the
    Littlewood bound when phi is a self map (sup_bound <= 1).

    Raises:
        CompositionDiverges: If |phi(0)| >= 1.
    """
    phi0 = phi.coeffs[0]
    if abs(phi0) >= 1.0:
        raise CompositionDiverges(f"|phi(0)| = {abs(phi0):.6g} >= 1")
    n = min(f.N, phi.N)
    phi_coeffs = phi.coeffs[:n]

    result = np.array([f.coeffs[n - 1]], dtype=complex)
    for k in range(n - 2, -1, -1):
        result = np.convolve(result, phi_coeffs)[:n]
        result[0] += f.coeffs[k]
    result = np.pad(result, (0, n - result.size))

    if phi.sup_bound is not None and phi.sup_bound <= 1.0 and phi.error == 0:
        error = littlewood_bound(phi0) * f.truncate(n).tail_l2()
    else:
        error = 0.0 if f.truncate(n).tail_l2() == 0 and phi.error == 0 else math.inf
    return PowerSeries(coeffs=result, error=error)


def taylor_of_map(phi: LinearFractionalMap, N: int) -> PowerSeries:
    """b/d + sum_{n>=1} (ad - bc)/d^2 (-c/d)^{n-1} z^n, truncated to N coefficients.

    Raises:
        PoleTooClose: If the pole -d/c lies in the closed disk.
    """
    if phi.c != 0 and abs(phi.d / phi.c) <= 1.0:
        raise PoleTooClose(f"Pole -d/c = {-phi.d / phi.c:.6g} lies in the closed unit disk")
    ratio = -phi.c / phi.d
    coeffs = np.zeros(N, dtype=complex)
    coeffs[0] = phi.b / phi.d
    if N > 1:
        coeffs[1:] = phi.determinant / phi.d**2 * ratio ** np.arange(N - 1)
    rho = abs(ratio)
    if rho == 0:
        return PowerSeries(coeffs=coeffs, tail_radius=0.0, sup_bound=1.0)
    constant = max(abs(coeffs[0]), abs(phi.determinant) / abs(phi.d) ** 2 / rho)
    return PowerSeries(coeffs=coeffs, tail_radius=rho, tail_constant=constant, sup_bound=1.0)


def _blaschke_coefficients(zeros: list[tuple[complex, int]], N: int) -> np.ndarray:
    """Exact first N coefficients of prod ((|a|/a)(a - z)/(1 - conj(a) z))^k times z^m (a = 0 entries)."""
    coeffs = np.zeros(N, dtype=complex)
    coeffs[0] = 1.0
    n = np.arange(1, N)
    for a, k in zeros:
        if a == 0:
            factor = np.zeros(N, dtype=complex)
            if N > 1:
                factor[1] = 1.0
        else:
            factor = np.empty(N, dtype=complex)
            factor[0] = abs(a)
            factor[1:] = (abs(a) / a) * a.conjugate() ** (n - 1) * (abs(a) ** 2 - 1)
        for _ in range(k):
            coeffs = np.convolve(coeffs, factor)[:N]
    return coeffs


def _cauchy_tail(zeros: list[tuple[complex, int]], N: int) -> tuple[float, float]:
    """(rho, C) minimizing the geometric tail C rho^N / sqrt(1 - rho^2).

    |c_n| <= M(R) R^{-n} with M(R) <= R^m prod ((R + |a|) / (1 - |a| R))^k for R < 1 / max |a|.
    """
    moduli = [(abs(a), k) for a, k in zeros]
    rho0 = max(r for r, _ in moduli if r > 0)
    best = (math.inf, 0.0, 0.0)
    for t in CAUCHY_GRID:
        R = 1 + (1 / rho0 - 1) * t
        log_m = sum(k * (math.log(R) if r == 0 else math.log((R + r) / (1 - r * R))) for r, k in moduli)
        log_tail = log_m - N * math.log(R) - 0.5 * math.log(1 - R**-2)
        if log_tail < best[0]:
            best = (log_tail, 1 / R, math.exp(log_m))
    return best[1], best[2]


def _singular_coefficients(theta: InnerFunction, N: int) -> np.ndarray:
    """exp of h(z) = -sum alpha (zeta + z)/(zeta - z) by n g_n = sum_k k h_k g_{n-k}."""
    n = np.arange(N)
    h = np.zeros(N, dtype=complex)
    for zeta, alpha in theta.singular.atoms:
        h[1:] -= 2 * alpha * zeta.conjugate() ** n[1:]
        h[0] -= alpha
    g = np.zeros(N, dtype=complex)
    g[0] = np.exp(h[0])
    weighted = n * h
    for m in range(1, N):
        g[m] = np.dot(weighted[1 : m + 1], g[m - 1 :: -1][:m]) / m
    return g


def taylor_of_inner(theta: InnerFunction, N: int, blaschke_terms: int = 1024) -> PowerSeries:
    """Truncated Taylor series of an inner function with certified tails.

    Finite Blaschke parts are expanded exactly and get a Cauchy-estimate
    geometric tail. An infinite Blaschke part is cut after at most
    `blaschke_terms` zeros, at H^2 distance sqrt(2 sum_{n>=N} (1 - |a_n|)).
    Atomic singular parts are expanded through the exponential recurrence and
    only carry the norm-defect tail.

    Raises:
        TailBoundUnavailable: If an infinite Blaschke part has no finite tail bound.
    """
    series = PowerSeries(
        coeffs=np.eye(1, N, dtype=complex)[0], tail_radius=0.0, l2_norm=1.0, sup_bound=1.0
    )
    part = theta.blaschke
    if part is not None:
        error = 0.0
        if isinstance(part, BlaschkeSequence):
            n = part.length if part.length is not None else blaschke_terms
            error = math.sqrt(2 * part.tail_bound(n)) if part.length is None else 0.0
            part = part.truncation(n)
        zeros = part.all_zeros
        coeffs = _blaschke_coefficients(zeros, N)
        if all(a == 0 for a, _ in zeros):
            rho, constant = 0.0, 0.0
        else:
            rho, constant = _cauchy_tail(zeros, N)
        blaschke = PowerSeries(
            coeffs=coeffs, tail_radius=rho, tail_constant=constant, l2_norm=1.0, error=error, sup_bound=1.0
        )
        series = series_mul(series, blaschke)
    if theta.singular is not None:
        singular = PowerSeries(coeffs=_singular_coefficients(theta, N), l2_norm=1.0, sup_bound=1.0)
        series = series_mul(series, singular)
    return dataclasses.replace(series, coeffs=theta.constant * series.coeffs)


def _as_map_series(phi: LinearFractionalMap | PowerSeries, N: int) -> PowerSeries:
    return taylor_of_map(phi, N) if isinstance(phi, LinearFractionalMap) else phi


def cphi_section(phi: LinearFractionalMap | PowerSeries, N: int) -> OperatorSection:
    """Column k holds the first N coefficients of phi^k.

    Raises:
        CompositionDiverges: If |phi(0)| >= 1.
    """
    series = _as_map_series(phi, N)
    if abs(series.coeffs[0]) >= 1.0:
        raise CompositionDiverges(f"|phi(0)| = {abs(series.coeffs[0]):.6g} >= 1")
    coeffs = np.pad(series.coeffs[:N], (0, max(N - series.N, 0)))
    entries = np.zeros((N, N), dtype=complex)
    column = np.eye(1, N, dtype=complex)[0]
    for k in range(N):
        entries[:, k] = column
        column = np.convolve(column, coeffs)[:N]
    return OperatorSection(entries=entries, role=SectionRole.COMPOSITION, source=f"C_phi for {phi}")


def mtheta_section(theta: InnerFunction | PowerSeries, N: int) -> OperatorSection:
    """Lower-triangular Toeplitz matrix with first column theta's coefficients."""
    series = taylor_of_inner(theta, N) if isinstance(theta, InnerFunction) else theta
    column = np.pad(series.coeffs[:N], (0, max(N - series.N, 0)))
    entries = toeplitz(column, np.zeros(N, dtype=complex))
    return OperatorSection(entries=entries, role=SectionRole.MULTIPLICATION, source=f"M_theta for {theta}")


def _residual_and_error(
    theta: InnerFunction, phi: LinearFractionalMap, N: int, K: int | None, tolerances: Tolerances
) -> tuple[float, float, int]:
    """(residual, worst certified relative error of a column, rank of the basis)."""
    n_eff = N // 2
    K = max(N // 4, 1) if K is None else K
    if K > max(N // 4, 1):
        raise ValueError(f"At most N/4 = {N // 4} columns, found K = {K}")

    series = taylor_of_inner(theta, N)
    coeffs = series.coeffs
    section = cphi_section(phi, N).entries

    basis = toeplitz(coeffs, np.zeros(n_eff, dtype=complex))
    q, r, _ = qr(basis, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(r))
    rank = int(np.sum(diagonal > 1e-12 * diagonal[0]))
    q = q[:, :rank]

    # z^k (theta - theta_{N-k}) = z^N h, and (z^N h) o phi = phi^N (h o phi)
    littlewood = littlewood_bound(phi(0))
    s = min(sup_modulus(phi), 1.0)
    residual = 0.0
    worst_relative_error = 0.0
    for k in range(K):
        column = np.concatenate([np.zeros(k, dtype=complex), coeffs[: N - k]])
        c = section @ column
        size = np.linalg.norm(c)
        if size == 0:
            continue
        error = littlewood * (s**k * series.error + s**N * series.truncate(N - k).tail_l2())
        residual = max(residual, float(np.linalg.norm(c - q @ (q.conj().T @ c)) / size))
        worst_relative_error = max(worst_relative_error, error / size)
    return residual, worst_relative_error, rank


def residual_error_band(relative_error: float) -> float:
    """Bound on the change of ||(I - P) c|| / ||c|| when c moves by relative_error ||c||."""
    if relative_error >= 1.0:
        return math.inf
    return 2 * relative_error / (1 - relative_error)


def invariance_residual(
    theta: InnerFunction,
    phi: LinearFractionalMap,
    N: int | None = None,
    K: int | None = None,
    check_truncation: bool = True,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Numerical evidence for C_phi(theta H^2) in theta H^2.

    For k < K, c_k holds the first N coefficients of (theta z^k) o phi. The
    residual is max_k ||(I - P) c_k|| / ||c_k||, where P projects onto the span
    of theta z^j, j < N/2, in the first N coordinates. The certified error of
    c_k is L (s^k e + s^N t_k) with L the Littlewood bound, s = sup |phi|, e the
    H^2 error of theta's reference coefficients and t_k the tail of theta beyond N - k.

    Raises:
        TruncationUnreliable: If the certified error of some c_k, relative to
            its norm, exceeds oracle_invariant / 10 (unless `check_truncation` is False).
    """
    if theta.is_constant:
        return 0.0
    N = tolerances.section_size if N is None else N
    residual, worst_relative_error, rank = _residual_and_error(theta, phi, N, K, tolerances)
    logger.debug(
        "invariance residual %.3g (rank %d, certified error %.3g) at N=%d", residual, rank, worst_relative_error, N
    )
    if check_truncation and worst_relative_error > tolerances.oracle_invariant / 10:
        raise TruncationUnreliable(
            f"Certified truncation error {worst_relative_error:.3g} exceeds "
            f"{tolerances.oracle_invariant / 10:.3g} at N={N}"
        )
    return residual


def invariance_residual_with_band(
    theta: InnerFunction,
    phi: LinearFractionalMap,
    N: int | None = None,
    K: int | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[float, float]:
    """(invariance_residual without the truncation check, certified band around it)."""
    if theta.is_constant:
        return 0.0, 0.0
    N = tolerances.section_size if N is None else N
    residual, worst_relative_error, _ = _residual_and_error(theta, phi, N, K, tolerances)
    return residual, residual_error_band(worst_relative_error)


def littlewood_bound_check(phi: LinearFractionalMap, N: int | None = None) -> tuple[float, float]:
    """(spectral norm of the N x N composition section, Littlewood bound).

    Raises:
        SoundnessAlarm: If the section norm exceeds the bound.
    """
    N = DEFAULT_TOLERANCES.kernel_section_size if N is None else N
    section_norm = float(norm(cphi_section(phi, N).entries, 2))
    bound = littlewood_bound(phi(0))
    if section_norm > bound * (1 + 1e-8):
        raise SoundnessAlarm(f"Section norm {section_norm:.12g} exceeds the Littlewood bound {bound:.12g}")
    return section_norm, bound


def _kernel_vector(w: complex, N: int) -> np.ndarray:
    return np.conj(w) ** np.arange(N)


@check_domains
def kernel_relation_residual(phi: LinearFractionalMap, w: DiskPoint, N: int | None = None) -> float:
    """||(C_phi section)^* k_w - k_{phi(w)}|| on the first N/2 coordinates."""
    N = DEFAULT_TOLERANCES.kernel_section_size if N is None else N
    section = cphi_section(phi, N).entries
    image = section.conj().T @ _kernel_vector(w, N)
    half = N // 2
    return float(np.linalg.norm(image[:half] - _kernel_vector(complex(phi(w)), half)))


@check_domains
def multiplier_kernel_residual(theta: InnerFunction, w: DiskPoint, N: int | None = None) -> float:
    """||(M_theta section)^* k_w - conj(theta(w)) k_w|| on the first N/2 coordinates."""
    N = DEFAULT_TOLERANCES.kernel_section_size if N is None else N
    section = mtheta_section(theta, N).entries
    image = section.conj().T @ _kernel_vector(w, N)
    half = N // 2
    expected = np.conj(complex(theta(w))) * _kernel_vector(w, half)
    return float(np.linalg.norm(image[:half] - expected))


def _gram(values: np.ndarray, points: np.ndarray) -> np.ndarray:
    """G[i, j] = values_i conj(values_j) / (1 - points_i conj(points_j))."""
    return np.outer(values, values.conj()) / (1 - np.outer(points, points.conj()))


def kernel_map_norm(
    theta: InnerFunction,
    phi: LinearFractionalMap,
    points: list[complex],
    ridge: float | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> KernelNormEstimate:
    """Norm of A: conj(theta(w)) K_w -> conj(theta(phi(w))) K_{phi(w)} on the span of the given kernels.

    c is the square root of the largest generalized eigenvalue of the ridged
    pair (G_out, G_in) of Szego Gram matrices.

    Raises:
        PointsNotSeparated: For more than `max_kernel_points` points or two points
            closer than `kernel_separation` pseudo-hyperbolically.
        IllConditioned: If the un-ridged input Gram matrix has condition number above `gram_condition`.
    """
    ridge = tolerances.ridge if ridge is None else ridge
    points = [complex(w) for w in points]
    if not 1 <= len(points) <= tolerances.max_kernel_points:
        raise PointsNotSeparated(f"Need 1 to {tolerances.max_kernel_points} kernel points, found {len(points)}")
    for i, w in enumerate(points):
        for v in points[:i]:
            if pseudo_hyperbolic_distance(w, v) < tolerances.kernel_separation:
                raise PointsNotSeparated(f"Points {v} and {w} are closer than {tolerances.kernel_separation}")

    w = np.array(points)
    images = phi(w)
    g_in = _gram(theta(w), w)
    g_out = _gram(theta(images), images)

    condition = float(np.linalg.cond(g_in))
    if condition > tolerances.gram_condition:
        raise IllConditioned(f"Gram condition number {condition:.3g} exceeds {tolerances.gram_condition:.3g}")

    identity = np.eye(len(points))
    eigenvalues = eigh(g_out + ridge * identity, g_in + ridge * identity, eigvals_only=True)
    c = math.sqrt(max(float(eigenvalues.max()), 0.0))
    return KernelNormEstimate(
        points=tuple(points), c=c, bound=littlewood_bound(phi(0)), ridge=ridge, condition=condition
    )

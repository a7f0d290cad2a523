import dataclasses
import logging
import math
from typing import Callable, Sequence

import numpy as np
import pandas as pd
from scipy.special import digamma

from hardybear.config import DEFAULT_TOLERANCES, Tolerances
from hardybear.decorators import check_domains
from hardybear.exceptions import InvalidOrbitLength
from hardybear.inner import BlaschkeSequence, InnerFunction, composed_multiplicity, inner_mult, orbit_blaschke
from hardybear.maps import DiskAutomorphism, LinearFractionalMap, half_plane_conjugate, iterate
from hardybear.series import invariance_residual_with_band
from hardybear.typehints import DiskPoint

logger = logging.getLogger(__name__)

MIN_ORBIT_LENGTH = 10
HARMONIC_HORIZON = 10**6
TRANSPORT_POINTS = 20
RESIDUAL_FACTORS = (5, 10, 20)
# the decay is 1/m^2 and a c/m decay would fit slope -1
CLAIMED_SLOPE = -1.0
SLOPE_WINDOW = (-2.05, -1.95)

TABLE_COLUMNS = ["m", "re_phi_m", "im_phi_m", "direct", "formula", "partial_sum"]


@dataclasses.dataclass(frozen=True, eq=False)
class OrbitReport:
    """Orbit of z under a parabolic automorphism next to the closed-form decay.

    `table` has one row per m = 1..M with the columns of `TABLE_COLUMNS`:
    direct = 1 - |phi_m(z)|^2, formula = 4u / ((m b + v)^2 + (1 + u)^2) and
    partial_sum = sum_{j <= m} (1 - |phi_j(z)|).
    """

    z: complex
    b: float
    u: float
    v: float
    rotation: complex
    table: pd.DataFrame
    fit_slope: float

    @property
    def max_formula_error(self) -> float:
        return float((self.table["direct"] - self.table["formula"]).abs().max())


@dataclasses.dataclass(frozen=True, eq=False)
class JonesReport:
    """Evidence against 1 - |phi_m(z)|^2 ~ c/m for parabolic orbits, and for the invariance of B_z H^2."""

    orbit: OrbitReport
    fit_slope: float
    claimed_slope: float
    slope_rejects_claim: bool
    orbit_sum: float
    orbit_tail: float
    harmonic_sum: float
    forward_invariance_error: float
    transport: pd.DataFrame
    transported: bool
    residual_trend: dict[int, float]
    residual_bands: dict[int, float]
    residual_trend_decreasing: bool


def _half_plane_point(z: complex, rotation: complex) -> tuple[float, float]:
    """u + i v = omega(conj(rotation) z) with omega(z) = (1 + z) / (1 - z)."""
    s = (1 + rotation.conjugate() * z) / (1 - rotation.conjugate() * z)
    return float(s.real), float(s.imag)


def decay_formula(b: float, u: float, v: float, m):
    return 4 * u / ((m * b + v) ** 2 + (1 + u) ** 2)


def fit_slope(m, values) -> float:
    """Least squares slope of log(values) against log(m)."""
    slope, _ = np.polyfit(np.log(np.asarray(m, dtype=float)), np.log(np.asarray(values, dtype=float)), 1)
    return float(slope)


@check_domains
def parabolic_orbit_report(phi: DiskAutomorphism | LinearFractionalMap, z: DiskPoint, M: int) -> OrbitReport:
    """Tabulate the orbit of z under a parabolic phi against the exact decay formula.

    Raises:
        InvalidOrbitLength: If M < 10.
        NotParabolic: If phi is not a parabolic automorphism.
    """
    if M < MIN_ORBIT_LENGTH:
        raise InvalidOrbitLength(f"Need at least {MIN_ORBIT_LENGTH} orbit terms, found M = {M}")
    translation = half_plane_conjugate(phi)
    lf_map = phi.map if isinstance(phi, DiskAutomorphism) else phi
    u, v = _half_plane_point(z, translation.rotation)

    orbit = np.array(iterate(lf_map, z, M))
    m = np.arange(1, M + 1)
    modulus = np.abs(orbit)
    table = pd.DataFrame(
        dict(
            m=m,
            re_phi_m=orbit.real,
            im_phi_m=orbit.imag,
            direct=(1 - modulus) * (1 + modulus),
            formula=decay_formula(translation.b, u, v, m),
            partial_sum=np.cumsum(1 - modulus),
        ),
        columns=TABLE_COLUMNS,
    )
    second_half = table[table["m"] >= M / 2]
    slope = fit_slope(second_half["m"], second_half["direct"])
    logger.debug("orbit of %s: b=%r u=%r v=%r slope=%r", z, translation.b, u, v, slope)
    return OrbitReport(z=z, b=translation.b, u=u, v=v, rotation=translation.rotation, table=table, fit_slope=slope)


def parabolic_tail_bound(b: float, u: float, v: float) -> Callable[[int], float]:
    """N -> upper bound of sum_{m >= N} 4u / ((m b + v)^2 + (1 + u)^2).

    Beyond K > 2|v/b| the integral comparison gives (4u/b^2) / (K - |v/b|); the
    terms below K are summed exactly.
    """
    shift = abs(v / b)
    scale = 4 * u / b**2
    threshold = math.floor(2 * shift) + 1

    def tail(N: int) -> float:
        start = max(N - 1, threshold)
        head = float(decay_formula(b, u, v, np.arange(N, start + 1)).sum()) if start + 1 > N else 0.0
        return head + scale / (start - shift)

    return tail


def blaschke_summability(
    values: Sequence[float], tail_bound: Callable[[int], float] | None = None
) -> tuple[float, float, bool]:
    """(partial sum, tail bound, certified) for a sequence of 1 - |a_m|.

    Without a tail bound, or with an infinite one, the sum is not certified.
    """
    values = np.asarray(values, dtype=float)
    partial = float(values.sum())
    tail = math.inf if tail_bound is None else float(tail_bound(values.size))
    return partial, tail, math.isfinite(tail)


def geometric_tail_bound(values: Sequence[float]) -> Callable[[int], float]:
    """Empirical geometric tail from the largest ratio over the second half of `values`.

    Not a certificate: the ratio is observed, not proven.
    """
    values = np.asarray(values, dtype=float)
    half = values[values.size // 2 :]
    ratios = half[1:] / half[:-1] if half.size > 1 else np.array([math.inf])
    q = float(ratios.max())
    last = float(values[-1])

    def tail(N: int) -> float:
        if not q < 1:
            return math.inf
        head = float(values[N:].sum()) if N < values.size else 0.0
        return head + last * q ** (max(N, values.size) - values.size + 1) / (1 - q)

    return tail


@check_domains
def orbit_decay_table(phi: LinearFractionalMap, z: DiskPoint, M: int) -> pd.DataFrame:
    """1 - |phi_m(z)| for any self map, cut where the iterates round onto the circle."""
    orbit = np.array(iterate(phi, z, M, strict=False))
    modulus = np.abs(orbit)
    return pd.DataFrame(
        dict(m=np.arange(1, orbit.size + 1), re_phi_m=orbit.real, im_phi_m=orbit.imag, defect=1 - modulus)
    )


def orbit_sequence(phi: LinearFractionalMap, z: complex, b: float, u: float, v: float) -> BlaschkeSequence:
    """B_z over the orbit {phi_m(z)}_{m >= 0} with the parabolic tail bound."""

    def first(n: int) -> np.ndarray:
        if n <= 0:
            return np.zeros(0, dtype=complex)
        if n == 1:
            return np.array([z], dtype=complex)
        return np.array([z] + iterate(phi, z, n - 1), dtype=complex)

    return orbit_blaschke(first, tail_bound=parabolic_tail_bound(b, u, v), description=f"orbit of {z}")


@check_domains
def jones_refutation(
    phi: DiskAutomorphism | LinearFractionalMap,
    z: DiskPoint,
    M: int,
    N: int | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> JonesReport:
    """Refute 1 - |phi_m(z)|^2 ~ c/m and exhibit B_z H^2 as an invariant subspace.

    Reports the log-log slope (-2, not -1), the certified orbit sum next to the
    harmonic sum of the matched c/m sequence up to m = 10^6, the forward
    invariance of the orbit, the multiplicity transport at the first orbit
    points and the oracle residual of truncated orbit products.
    """
    report = parabolic_orbit_report(phi, z, M)
    lf_map = phi.map if isinstance(phi, DiskAutomorphism) else phi
    N = tolerances.section_size if N is None else N

    defects = 1 - np.abs(report.table["re_phi_m"] + 1j * report.table["im_phi_m"])
    tail_bound = parabolic_tail_bound(report.b, report.u, report.v)
    # tail_bound counts from m = 0, the table from m = 1
    orbit_sum, orbit_tail, _ = blaschke_summability(defects, lambda n: tail_bound(n + 1))

    c = float(report.table["direct"].iloc[0])
    harmonic_sum = c * float(digamma(HARMONIC_HORIZON + 1) + np.euler_gamma)

    orbit = np.concatenate([[z], report.table["re_phi_m"] + 1j * report.table["im_phi_m"]])
    forward_error = float(np.abs(lf_map(orbit[:-1]) - orbit[1:]).max())

    sequence = orbit_sequence(lf_map, z, report.b, report.u, report.v)
    theta = InnerFunction(blaschke=sequence)
    rows = []
    for m, point in enumerate(orbit[:TRANSPORT_POINTS]):
        mult = inner_mult(theta, complex(point), tolerances)
        mult_composed = composed_multiplicity(theta, lf_map, complex(point), tolerances)
        rows.append(dict(m=m, point=complex(point), mult=mult, mult_composed=mult_composed))
    transport = pd.DataFrame(rows)
    transport["transported"] = transport["mult_composed"] >= transport["mult"]

    trend, bands = {}, {}
    for n in RESIDUAL_FACTORS:
        truncated = InnerFunction(blaschke=sequence.truncation(n))
        trend[n], bands[n] = invariance_residual_with_band(truncated, lf_map, N=N, tolerances=tolerances)
    # a later residual may exceed an earlier one only within their certified bands
    decreasing = all(
        trend[later] <= trend[earlier] + bands[earlier] + bands[later]
        for earlier, later in zip(RESIDUAL_FACTORS, RESIDUAL_FACTORS[1:])
    )
    logger.debug("residual trend %s with certified bands %s", trend, bands)

    low, high = SLOPE_WINDOW
    return JonesReport(
        orbit=report,
        fit_slope=report.fit_slope,
        claimed_slope=CLAIMED_SLOPE,
        slope_rejects_claim=low <= report.fit_slope <= high,
        orbit_sum=orbit_sum,
        orbit_tail=orbit_tail,
        harmonic_sum=harmonic_sum,
        forward_invariance_error=forward_error,
        transport=transport,
        transported=bool(transport["transported"].all()),
        residual_trend=trend,
        residual_bands=bands,
        residual_trend_decreasing=decreasing,
    )

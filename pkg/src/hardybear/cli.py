"""Command line front end.

Function specs are written in a small grammar:

    spec    := inner | map
    inner   := term { "*" term }
    term    := "z" ["^" INT] | "blaschke(" complex {"," complex} [";" "mult=" INT {"," INT}] ")"
             | "atom(" complex "," REAL ")" | "const(" complex ")" | complex
    map     := "mobius(" complex "," complex "," complex "," complex ")" | "rot(" complex ")"
             | "autom(" complex "," complex ")" | "parabolic(b=" REAL ["," "zeta=" complex] ")"
    complex := REAL | REAL ("+" | "-") REAL "i" | REAL "i" | "i" | "exp(" [REAL] "i" ["pi"] ["/" REAL] ")"

Reports are JSON on stdout; logs go to stderr.
"""
import argparse
import cmath
import dataclasses
import enum
import json
import logging
import math
import re
import sys
from typing import Any, Sequence

import numpy as np

from hardybear import __version__
from hardybear.certify import InvarianceReport, VerdictStatus, certify_invariance
from hardybear.config import DEFAULT_TOLERANCES, Tolerances
from hardybear.exceptions import (
    EllipticAutomorphism,
    HardyBearError,
    IllConditioned,
    NoDenjoyWolffPoint,
    NotAutomorphism,
    PointsNotSeparated,
    SoundnessAlarm,
    SpecSemanticsError,
    SpecSyntaxError,
    TruncationUnreliable,
    UnsupportedInner,
)
from hardybear.inner import (
    AtomicSingularInner,
    FiniteBlaschkeProduct,
    InnerFunction,
    inner_product,
    unimodular_constant,
)
from hardybear.maps import (
    LinearFractionalMap,
    automorphism,
    classify_automorphism,
    denjoy_wolff,
    fixed_points,
    is_identity,
    parabolic_from_translation,
    rotation,
)
from hardybear.orbits import TABLE_COLUMNS, jones_refutation
from hardybear.series import (
    invariance_residual,
    kernel_map_norm,
    kernel_relation_residual,
    littlewood_bound_check,
    multiplier_kernel_residual,
)

logger = logging.getLogger(__name__)

_REAL = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_INT = re.compile(r"\d+")
# kernel points for the oracle battery
ORACLE_POINTS = tuple(0.5 * cmath.exp(2j * math.pi * k / 5) for k in range(5))


class ExitCode(enum.IntEnum):
    OK = 0
    VIOLATED = 1
    INPUT_ERROR = 2
    INDETERMINATE = 3
    SOUNDNESS_ALARM = 4


class SpecKind(str, enum.Enum):
    INNER = "inner"
    MAP = "map"


@dataclasses.dataclass(frozen=True, eq=False)
class FunctionSpec:
    raw: str
    parsed: InnerFunction | LinearFractionalMap

    @property
    def kind(self) -> SpecKind:
        return SpecKind.MAP if isinstance(self.parsed, LinearFractionalMap) else SpecKind.INNER

    @property
    def canonical(self) -> str:
        return print_spec(self.parsed)


@dataclasses.dataclass(frozen=True)
class ReportEnvelope:
    command: str
    inputs: dict[str, str]
    result: dict[str, Any]
    tolerance_table: dict[str, Any]
    version: str = __version__

    def to_json(self) -> str:
        return json.dumps(_jsonable(dataclasses.asdict(self)), sort_keys=True, indent=2)


def _jsonable(value: Any) -> Any:
    """Complex numbers become {"re", "im"}; non-finite floats become null."""
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _jsonable(float(value.real)), "im": _jsonable(float(value.imag))}
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value


class _SpecParser:
    """Recursive descent over a spec string; `pos` is a 0-based offset into `raw`."""

    def __init__(self, raw: str):
        self.raw = raw
        self.pos = 0

    def _location(self, pos: int) -> tuple[int, int]:
        line = self.raw.count("\n", 0, pos) + 1
        column = pos - (self.raw.rfind("\n", 0, pos) + 1) + 1
        return line, column

    def syntax_error(self, reason: str, pos: int | None = None) -> SpecSyntaxError:
        line, column = self._location(self.pos if pos is None else pos)
        return SpecSyntaxError(reason, self.raw, column, line=line)

    def semantics_error(self, error: Exception, pos: int) -> SpecSemanticsError:
        line, column = self._location(pos)
        return SpecSemanticsError(str(error), self.raw, column, cause=error, line=line)

    def skip_ws(self):
        while self.pos < len(self.raw) and self.raw[self.pos].isspace():
            self.pos += 1

    def peek(self, literal: str) -> bool:
        self.skip_ws()
        return self.raw.startswith(literal, self.pos)

    def accept(self, literal: str) -> bool:
        if self.peek(literal):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str):
        if not self.accept(literal):
            found = self.raw[self.pos : self.pos + 1] or "end of input"
            raise self.syntax_error(f"expected '{literal}' but found '{found}'")

    def _match(self, pattern: re.Pattern, what: str) -> str:
        self.skip_ws()
        match = pattern.match(self.raw, self.pos)
        if match is None:
            raise self.syntax_error(f"expected {what}")
        self.pos = match.end()
        return match.group()

    def real(self) -> float:
        return float(self._match(_REAL, "a real number"))

    def integer(self) -> int:
        return int(self._match(_INT, "an integer"))

    def _imaginary_unit(self) -> bool:
        if self.raw.startswith("i", self.pos):
            self.pos += 1
            return True
        return False

    def _exponential(self) -> complex:
        coefficient = 1.0
        if not self.peek("i"):
            coefficient = self.real()
        self.skip_ws()
        if not self._imaginary_unit():
            raise self.syntax_error("expected 'i' in the exponent")
        if self.accept("*"):
            self.expect("pi")
            coefficient *= math.pi
        elif self.accept("pi"):
            coefficient *= math.pi
        if self.accept("/"):
            divisor_pos = self.pos
            divisor = self.real()
            if divisor == 0:
                raise self.syntax_error("division by zero in the exponent", divisor_pos)
            coefficient /= divisor
        self.expect(")")
        return cmath.exp(1j * coefficient)

    def complex(self) -> complex:
        if self.accept("exp("):
            return self._exponential()
        self.skip_ws()
        sign = 1.0
        if self.raw.startswith(("+i", "-i"), self.pos):
            sign = -1.0 if self.raw[self.pos] == "-" else 1.0
            self.pos += 1
        if self._imaginary_unit():
            return complex(0.0, sign)
        real = sign * self.real()
        if self._imaginary_unit():
            return complex(0.0, real)
        start = self.pos
        self.skip_ws()
        if self.raw.startswith(("+", "-"), self.pos):
            op = self.raw[self.pos]
            self.pos += 1
            self.skip_ws()
            if self._imaginary_unit():
                imag = 1.0
            else:
                imag = self.real()
                if not self._imaginary_unit():
                    raise self.syntax_error("expected 'i' after the imaginary part")
            return complex(real, imag if op == "+" else -imag)
        self.pos = start
        return complex(real, 0.0)

    def _complex_list(self) -> list[complex]:
        values = [self.complex()]
        while self.accept(","):
            values.append(self.complex())
        return values

    def _term(self) -> InnerFunction:
        start = self.pos
        try:
            if self.accept("blaschke("):
                zeros = self._complex_list()
                mults = None
                if self.accept(";"):
                    self.expect("mult=")
                    mults = [self.integer()]
                    while self.accept(","):
                        mults.append(self.integer())
                    if len(mults) != len(zeros):
                        raise self.syntax_error(f"{len(zeros)} zeros but {len(mults)} multiplicities")
                self.expect(")")
                mults = [1] * len(zeros) if mults is None else mults
                origin = sum(k for a, k in zip(zeros, mults) if a == 0)
                rest = tuple((a, k) for a, k in zip(zeros, mults) if a != 0)
                return InnerFunction(FiniteBlaschkeProduct(m=origin, zeros=rest))
            if self.accept("atom("):
                zeta = self.complex()
                self.expect(",")
                alpha = self.real()
                self.expect(")")
                return InnerFunction(singular=AtomicSingularInner(((zeta, alpha),)))
            if self.accept("const("):
                c = self.complex()
                self.expect(")")
                return unimodular_constant(c)
            if self.accept("z"):
                m = self.integer() if self.accept("^") else 1
                return InnerFunction(FiniteBlaschkeProduct(m=m))
            self.skip_ws()
            start = self.pos
            return unimodular_constant(self.complex())
        except SpecSyntaxError:
            raise
        except (HardyBearError, ValueError) as exc:
            raise self.semantics_error(exc, start)

    def _map(self) -> LinearFractionalMap:
        start = self.pos
        try:
            if self.accept("mobius("):
                coefficients = [self.complex()]
                for _ in range(3):
                    self.expect(",")
                    coefficients.append(self.complex())
                self.expect(")")
                return LinearFractionalMap(*coefficients)
            if self.accept("rot("):
                lam = self.complex()
                self.expect(")")
                return rotation(lam)
            if self.accept("autom("):
                lam = self.complex()
                self.expect(",")
                a = self.complex()
                self.expect(")")
                return automorphism(lam, a)
            self.expect("parabolic(")
            self.expect("b=")
            b = self.real()
            zeta = 1 + 0j
            if self.accept(","):
                self.expect("zeta=")
                zeta = self.complex()
            self.expect(")")
            return parabolic_from_translation(b, zeta)
        except SpecSyntaxError:
            raise
        except (HardyBearError, ValueError) as exc:
            raise self.semantics_error(exc, start)

    def parse(self) -> InnerFunction | LinearFractionalMap:
        if any(self.peek(head) for head in ("mobius(", "rot(", "autom(", "parabolic(")):
            parsed = self._map()
        else:
            parsed = self._term()
            while self.accept("*"):
                parsed = inner_product(parsed, self._term())
        self.skip_ws()
        if self.pos != len(self.raw):
            raise self.syntax_error("unexpected trailing input")
        return parsed


def parse_spec(raw: str) -> FunctionSpec:
    """Parse a function spec string into an inner function or a linear-fractional map.

    Raises:
        SpecSyntaxError: If `raw` does not follow the grammar.
        SpecSemanticsError: If it names an invalid object, e.g. a zero outside the disk.
    """
    return FunctionSpec(raw=raw, parsed=_SpecParser(raw).parse())


def parse_complex(raw: str) -> complex:
    parser = _SpecParser(raw)
    value = parser.complex()
    parser.skip_ws()
    if parser.pos != len(raw):
        raise parser.syntax_error("unexpected trailing input")
    return value


def _format_real(x: float) -> str:
    return f"{x:.17g}"


def format_complex(w: complex) -> str:
    if w.imag == 0:
        return _format_real(w.real)
    if w.real == 0:
        return f"{_format_real(w.imag)}i"
    op = "+" if w.imag >= 0 else "-"
    return f"{_format_real(w.real)}{op}{_format_real(abs(w.imag))}i"


def print_spec(parsed: InnerFunction | LinearFractionalMap) -> str:
    """Canonical spec string of a parsed object."""
    if isinstance(parsed, LinearFractionalMap):
        return "mobius(" + ", ".join(format_complex(x) for x in (parsed.a, parsed.b, parsed.c, parsed.d)) + ")"

    terms = []
    if parsed.constant != 1:
        terms.append(f"const({format_complex(parsed.constant)})")
    part = parsed.blaschke
    if part is not None:
        if not isinstance(part, FiniteBlaschkeProduct):
            raise UnsupportedInner("An infinite Blaschke product has no spec string")
        if part.m:
            terms.append("z" if part.m == 1 else f"z^{part.m}")
        if part.zeros:
            body = ", ".join(format_complex(a) for a, _ in part.zeros)
            if any(k != 1 for _, k in part.zeros):
                body += "; mult=" + ",".join(str(k) for _, k in part.zeros)
            terms.append(f"blaschke({body})")
    if parsed.singular is not None:
        terms.extend(f"atom({format_complex(zeta)}, {_format_real(alpha)})" for zeta, alpha in parsed.singular.atoms)
    return " * ".join(terms) or "const(1)"


def _expect_kind(spec: FunctionSpec, kind: SpecKind) -> FunctionSpec:
    if spec.kind is not kind:
        expected = "a map" if kind is SpecKind.MAP else "an inner function"
        error = ValueError(f"expected {expected}, found {spec.kind.value}")
        raise SpecSemanticsError(str(error), spec.raw, 1, cause=error)
    return spec


def cmd_classify(spec: FunctionSpec, tolerances: Tolerances = DEFAULT_TOLERANCES) -> tuple[ReportEnvelope, ExitCode]:
    phi = _expect_kind(spec, SpecKind.MAP).parsed
    result: dict[str, Any] = dict(automorphism=False, fixed_points=None, dw=None)
    if is_identity(phi, tolerances):
        result.update(automorphism=True, **{"class": "identity"})
    else:
        points = fixed_points(phi, tolerances)
        result["fixed_points"] = [dict(point=point, multiplicity=k) for point, k in points]
        try:
            result.update(automorphism=True, **{"class": classify_automorphism(phi, tolerances).kind.value})
        except NotAutomorphism:
            result["class"] = "non-automorphic"
        try:
            dw = denjoy_wolff(phi, tolerances)
            result["dw"] = dict(point=dw.point, derivative=dw.derivative, interior=dw.interior)
        except (EllipticAutomorphism, NoDenjoyWolffPoint) as exc:
            logger.debug("no Denjoy-Wolff point: %s", exc)
    envelope = ReportEnvelope("classify", dict(phi=spec.canonical), result, tolerances.as_table())
    return envelope, ExitCode.OK


def _exit_code(report: InvarianceReport) -> ExitCode:
    status = report.verdict.status
    exact = status in (VerdictStatus.CERTIFIED_MEMBER, VerdictStatus.CERTIFIED_NON_MEMBER)
    if exact and not report.agreement:
        return ExitCode.SOUNDNESS_ALARM
    if status.member is None:
        return ExitCode.INDETERMINATE
    return ExitCode.OK if status.member else ExitCode.VIOLATED


def _report_payload(report: InvarianceReport) -> dict[str, Any]:
    witness = report.verdict.witness
    return dict(
        route=report.route,
        verdict=report.verdict.status,
        witness=None if witness is None else dict(point=witness[0], modulus=witness[1]),
        sup_estimate=report.verdict.sup_estimate,
        sampling=report.sampling.status,
        oracle_residual=report.oracle_residual,
        oracle_size=report.oracle_size,
        quotient_constant=report.quotient_constant,
        agreement=report.agreement,
    )


def cmd_certify(
    theta_spec: FunctionSpec,
    phi_spec: FunctionSpec,
    radii: Sequence[float] | None = None,
    angles: int | None = None,
    margin: float | None = None,
    N: int | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[ReportEnvelope, ExitCode]:
    theta = _expect_kind(theta_spec, SpecKind.INNER).parsed
    phi = _expect_kind(phi_spec, SpecKind.MAP).parsed
    report = certify_invariance(theta, phi, radii=radii, angles=angles, margin=margin, N=N, tolerances=tolerances)
    changes = dict(radii=None if radii is None else tuple(radii), angles=angles, margin=margin)
    used = tolerances.override(**{name: value for name, value in changes.items() if value is not None})
    inputs = dict(theta=theta_spec.canonical, phi=phi_spec.canonical)
    return ReportEnvelope("certify", inputs, _report_payload(report), used.as_table()), _exit_code(report)


def cmd_orbit(
    phi_spec: FunctionSpec,
    z: complex,
    M: int,
    out: str | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[ReportEnvelope, ExitCode]:
    phi = _expect_kind(phi_spec, SpecKind.MAP).parsed
    jones = jones_refutation(phi, z, M, tolerances=tolerances)
    report = jones.orbit
    if out is not None:
        report.table.to_csv(out, columns=TABLE_COLUMNS, index=False, float_format="%.17g")
        logger.info("orbit table written to %s", out)
    result = dict(
        b=report.b,
        u=report.u,
        v=report.v,
        rotation=report.rotation,
        terms=M,
        fit_slope=jones.fit_slope,
        claimed_slope=jones.claimed_slope,
        slope_rejects_claim=jones.slope_rejects_claim,
        max_formula_error=report.max_formula_error,
        orbit_sum=jones.orbit_sum,
        orbit_tail=jones.orbit_tail,
        certified=math.isfinite(jones.orbit_tail),
        harmonic_sum=jones.harmonic_sum,
        forward_invariance_error=jones.forward_invariance_error,
        transported=jones.transported,
        residual_trend={str(n): residual for n, residual in jones.residual_trend.items()},
        residual_bands={str(n): band for n, band in jones.residual_bands.items()},
        residual_trend_decreasing=jones.residual_trend_decreasing,
    )
    inputs = dict(phi=phi_spec.canonical, z=format_complex(z))
    return ReportEnvelope("orbit", inputs, result, tolerances.as_table()), ExitCode.OK


def cmd_oracle(
    theta_spec: FunctionSpec, phi_spec: FunctionSpec, N: int | None = None, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> tuple[ReportEnvelope, ExitCode]:
    theta = _expect_kind(theta_spec, SpecKind.INNER).parsed
    phi = _expect_kind(phi_spec, SpecKind.MAP).parsed
    N = tolerances.section_size if N is None else N

    try:
        residual = invariance_residual(theta, phi, N=N, tolerances=tolerances)
        truncation_reliable = True
    except TruncationUnreliable as exc:
        logger.debug("%s", exc)
        residual = invariance_residual(theta, phi, N=N, check_truncation=False, tolerances=tolerances)
        truncation_reliable = False
    section_norm, littlewood = littlewood_bound_check(phi, tolerances.kernel_section_size)
    try:
        estimate = kernel_map_norm(theta, phi, list(ORACLE_POINTS), tolerances=tolerances)
        kernel_norm = dict(c=estimate.c, bound=estimate.bound, condition=estimate.condition)
    except (IllConditioned, PointsNotSeparated) as exc:
        logger.debug("kernel map norm skipped: %s", exc)
        kernel_norm = None

    report = certify_invariance(theta, phi, N=N, tolerances=tolerances)
    exit_code = ExitCode.SOUNDNESS_ALARM if _exit_code(report) is ExitCode.SOUNDNESS_ALARM else ExitCode.OK
    if exit_code is ExitCode.SOUNDNESS_ALARM:
        logger.warning("exact verdict %s disagrees with the oracle", report.verdict.status.value)

    result = dict(
        N=N,
        residual=residual,
        truncation_reliable=truncation_reliable,
        section_norm=section_norm,
        littlewood_bound=littlewood,
        kernel_relation=max(kernel_relation_residual(phi, w) for w in ORACLE_POINTS),
        multiplier_kernel=max(multiplier_kernel_residual(theta, w) for w in ORACLE_POINTS),
        kernel_map_norm=kernel_norm,
        verdict=report.verdict.status,
        route=report.route,
        agreement=report.agreement,
    )
    inputs = dict(theta=theta_spec.canonical, phi=phi_spec.canonical)
    return ReportEnvelope("oracle", inputs, result, tolerances.as_table()), exit_code


def _sampling_radius(raw: str) -> float:
    value = float(raw)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"radius must lie in (0, 1), found {raw}")
    return value


def _positive_int(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, found {raw}")
    return value


def _section_size(raw: str) -> int:
    value = int(raw)
    if value < 4:
        raise argparse.ArgumentTypeError(f"section size must be at least 4, found {raw}")
    return value


def _non_negative_float(raw: str) -> float:
    value = float(raw)
    if not value >= 0.0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, found {raw}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardybear", description="Invariant Beurling subspaces of composition operators on H^2."
    )
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level on stderr.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    classify = commands.add_parser("classify", help="Classify a map and locate its Denjoy-Wolff point.")
    classify.add_argument("phi", help="Map spec, e.g. 'mobius(2,1,1,2)'.")

    certify = commands.add_parser("certify", help="Decide whether theta H^2 is invariant under C_phi.")
    certify.add_argument("--theta", required=True, help="Inner function spec, e.g. 'atom(1,2)*blaschke(0.5)'.")
    certify.add_argument("--phi", required=True, help="Map spec.")
    certify.add_argument("--radii", type=_sampling_radius, nargs="+", default=None, help="Sampling radii.")
    certify.add_argument("--angles", type=_positive_int, default=None, help="Sampling angles per radius.")
    certify.add_argument("--margin", type=_non_negative_float, default=None, help="Schur sampling margin.")
    certify.add_argument("-N", type=_section_size, default=None, help="Oracle section size.")

    orbit = commands.add_parser("orbit", help="Orbit decay of a parabolic automorphism.")
    orbit.add_argument("--phi", required=True, help="Parabolic map spec, e.g. 'parabolic(b=2)'.")
    orbit.add_argument("--z", required=True, help="Starting point, e.g. '0.3+0.4i'.")
    orbit.add_argument("--terms", type=int, required=True, help="Number of iterates M (at least 10).")
    orbit.add_argument("--out", default=None, help="CSV path for the orbit table.")

    oracle = commands.add_parser("oracle", help="Run the numerical cross-check battery.")
    oracle.add_argument("--theta", required=True, help="Inner function spec.")
    oracle.add_argument("--phi", required=True, help="Map spec.")
    oracle.add_argument("-N", type=_section_size, default=None, help="Section size.")
    return parser


def _run(args: argparse.Namespace) -> tuple[ReportEnvelope, ExitCode]:
    if args.command == "classify":
        return cmd_classify(parse_spec(args.phi))
    if args.command == "certify":
        return cmd_certify(
            parse_spec(args.theta),
            parse_spec(args.phi),
            radii=args.radii,
            angles=args.angles,
            margin=args.margin,
            N=args.N,
        )
    if args.command == "orbit":
        return cmd_orbit(parse_spec(args.phi), parse_complex(args.z), args.terms, out=args.out)
    return cmd_oracle(parse_spec(args.theta), parse_spec(args.phi), N=args.N)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        envelope, exit_code = _run(args)
    except SoundnessAlarm as exc:
        logger.error("%s", exc)
        return int(ExitCode.SOUNDNESS_ALARM)
    except HardyBearError as exc:
        logger.error("%s", exc)
        return int(ExitCode.INPUT_ERROR)
    print(envelope.to_json())
    return int(exit_code)


if __name__ == "__main__":
    sys.exit(main())

import re
from typing import Any

MAX_SPEC_ECHO = 80


class HardyBearError(Exception):
    """Base class for every error raised by `hardybear`.

    The command line front end maps any subclass to exit code 2 (input error).
    """

    def __init__(self, message):
        super().__init__(message)


class PoleAtPoint(HardyBearError):
    """Raise when a linear-fractional map is evaluated at (or next to) its pole."""

    def __init__(self, message):
        super().__init__(message)


class DegenerateComposition(HardyBearError):
    """Raise when a composition of maps has a numerically vanishing determinant."""

    def __init__(self, message):
        super().__init__(message)


class NotSelfMap(HardyBearError):
    """Raise when coefficients do not define a holomorphic self map of the disk.

    This happens when the pole lies in the closed disk, when the determinant
    vanishes, or when a boundary sample is mapped outside the closed disk.
    """

    def __init__(self, message):
        # strip trailing "." and " " from message
        message = re.sub(r"[. ]+$", "", message)
        suggestion = ". Check the coefficient order (a, b, c, d) of z -> (a z + b) / (c z + d)."
        super().__init__(message + suggestion)


class IdentityMap(HardyBearError):
    """Raise when an operation needs a map other than the identity (every point is fixed)."""

    def __init__(self, message):
        super().__init__(message)


class NotAutomorphism(HardyBearError):
    """Raise when a map expected to be a disk automorphism has an inverse that is not a self map."""

    def __init__(self, message):
        super().__init__(message)


class EllipticAutomorphism(HardyBearError):
    """Raise when the Denjoy-Wolff point is requested for an elliptic automorphism."""

    def __init__(self, message):
        super().__init__(message)


class NoDenjoyWolffPoint(HardyBearError):
    """Raise when no fixed point meets the Denjoy-Wolff derivative conditions.

    For valid self maps this signals a tolerance problem rather than a math one.
    """

    def __init__(self, message):
        super().__init__(message)


class EscapedDisk(HardyBearError):
    """Raise when an iterate leaves the open disk numerically."""

    def __init__(self, message):
        super().__init__(message)


class NotParabolic(HardyBearError):
    """Raise when an operation requires a parabolic automorphism."""

    def __init__(self, message):
        super().__init__(message)


class NotUnimodular(HardyBearError):
    """Raise when a value expected on the unit circle is not unimodular."""

    def __init__(self, message):
        super().__init__(message)


class OutsideDisk(HardyBearError):
    """Raise when a point expected in the (open or closed) unit disk lies outside it."""

    def __init__(self, message):
        super().__init__(message)


class TailBoundUnavailable(HardyBearError):
    """Raise when an infinite Blaschke part has no summable tail bound at the requested tolerance."""

    def __init__(self, message):
        super().__init__(message)


class NotBlaschkeSummable(HardyBearError):
    """Raise when a zero sequence cannot be certified to satisfy the Blaschke condition."""

    def __init__(self, message):
        super().__init__(message)


class PoleInDisk(HardyBearError):
    """Raise when a rational function has a pole in the closed unit disk."""

    def __init__(self, message):
        super().__init__(message)


class ZeroFunction(HardyBearError):
    """Raise when a factorization is requested for the zero function."""

    def __init__(self, message):
        super().__init__(message)


class UnsupportedInner(HardyBearError):
    """Raise when an operation does not support the given kind of inner function.

    For example zero transport needs a finite Blaschke product without singular part.
    """

    def __init__(self, message):
        super().__init__(message)


class CompositionDiverges(HardyBearError):
    """Raise when a series is composed with a series whose constant term is not in the open disk."""

    def __init__(self, message):
        super().__init__(message)


class PoleTooClose(HardyBearError):
    """Raise when a Taylor expansion at 0 is requested for a map whose pole is in the closed disk."""

    def __init__(self, message):
        super().__init__(message)


class TruncationUnreliable(HardyBearError):
    """Raise when the certified truncation error of a matrix section exceeds the oracle budget."""

    def __init__(self, message):
        super().__init__(message)


class IllConditioned(HardyBearError):
    """Raise when a kernel Gram matrix is too ill-conditioned to trust."""

    def __init__(self, message):
        super().__init__(message)


class PointsNotSeparated(HardyBearError):
    """Raise when kernel points are closer than the pseudo-hyperbolic separation (or too many)."""

    def __init__(self, message):
        super().__init__(message)


class InvalidOrbitLength(HardyBearError):
    """Raise when an orbit report is requested with too few terms."""

    def __init__(self, message):
        super().__init__(message)


class NotInvariant(HardyBearError):
    """Raise when an operation requires C_phi(theta H^2) to be contained in theta H^2, but it is not.

    Report the route that decided it and the witness (a point where the quotient
    (theta o phi) / theta has modulus above one) when one is known.
    """

    def __init__(self, route: str, status: str, witness: tuple[complex, float] | None = None):
        self.route = route
        self.status = status
        self.witness = witness
        super().__init__(self._get_message())

    def _get_message(self) -> str:
        text_msg = f"theta H^2 is not invariant: route {self.route} returned {self.status}"
        if self.witness is None:
            return text_msg
        point, modulus = self.witness
        return f"{text_msg} (|quotient({point:.6g})| = {modulus:.6g} > 1)"


class SpecSyntaxError(HardyBearError):
    """Raise when a function spec string does not follow the grammar.

    Report the 1-based line and column and draw a caret under the failing character.
    """

    def __init__(self, reason: str, raw: str, column: int, line: int = 1):
        self.reason = reason
        self.raw = raw
        self.column = column
        self.line = line
        super().__init__(self._get_message())

    def _get_message(self) -> str:
        echo = self.raw[:MAX_SPEC_ECHO]
        caret = " " * (self.column - 1) + "^"
        return f"line {self.line}, column {self.column}: {self.reason}\n  {echo}\n  {caret}"


class SpecSemanticsError(HardyBearError):
    """Raise when a syntactically valid spec names an invalid object (e.g. a zero outside the disk)."""

    def __init__(self, reason: str, raw: str, column: int, cause: Any = None, line: int = 1):
        self.reason = reason
        self.raw = raw
        self.column = column
        self.line = line
        self.cause = cause
        super().__init__(f"line {line}, column {column}: {reason}")


class SoundnessAlarm(HardyBearError):
    """Raise when a post-condition of a computed factorization or bound fails."""

    def __init__(self, message):
        super().__init__(message)

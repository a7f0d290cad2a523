import dataclasses
from typing import Annotated, Callable

from hardybear.config import DEFAULT_TOLERANCES
from hardybear.exceptions import NotUnimodular, OutsideDisk


@dataclasses.dataclass(frozen=True)
class Domain:
    """Marker attached to a complex type hint with `typing.Annotated`.

    The `check_domains` decorator looks for these markers and raises `error`
    when an argument fails `contains`.
    """

    name: str
    contains: Callable[[complex], bool]
    error: type[Exception]


OPEN_DISK = Domain("the open unit disk", lambda z: abs(z) < 1.0, OutsideDisk)
CLOSED_DISK = Domain("the closed unit disk", lambda z: abs(z) <= 1.0 + DEFAULT_TOLERANCES.boundary, OutsideDisk)
UNIT_CIRCLE = Domain("the unit circle", lambda z: abs(abs(z) - 1.0) <= DEFAULT_TOLERANCES.boundary, NotUnimodular)

# `z: DiskPoint` reads as "a complex number with |z| < 1"
DiskPoint = Annotated[complex, OPEN_DISK]
ClosedDiskPoint = Annotated[complex, CLOSED_DISK]
Unimodular = Annotated[complex, UNIT_CIRCLE]

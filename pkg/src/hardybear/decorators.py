import inspect
import numbers
from functools import wraps
from typing import Annotated, Any, Callable, ParamSpec, TypeVar, get_args, get_origin

from hardybear.typehints import Domain

P = ParamSpec("P")
R = TypeVar("R")


def _domain_of(type_hint: Any) -> Domain | None:
    """Return the `Domain` marker of an `Annotated[complex, Domain]` hint, if any."""
    if get_origin(type_hint) is not Annotated:
        return None
    for extra in get_args(type_hint)[1:]:
        if isinstance(extra, Domain):
            return extra
    return None


def _validate_variable_against_type_hint(var: Any, type_hint: Any, name: str) -> Any:
    """Validate a variable against a domain type hint.

    This function is used by the `check_domains` decorator to validate input
    arguments of a function. Complex arguments are normalized to `complex`.

    Args:
        var (Any): The variable to validate.
        type_hint (Any): The type hint to validate against.
        name (str): Argument name, used in error messages.

    Raises:
        TypeError: If a domain-annotated argument is not a number.
        OutsideDisk | NotUnimodular: If the number is outside the annotated domain.
    """
    # type hint like: `DiskPoint`
    if (domain := _domain_of(type_hint)) is not None:
        if not isinstance(var, numbers.Number):
            raise TypeError(f"Expected a complex number in argument `{name}`, but found {type(var)}")
        value = complex(var)
        if not domain.contains(value):
            raise domain.error(f"Argument `{name}` = {value} must lie in {domain.name}")
        return value

    # type hint like: `list[DiskPoint]` or `tuple[DiskPoint, ...]` (or deeper nesting)
    if get_origin(type_hint) in (list, tuple) and (args := get_args(type_hint)):
        if not isinstance(var, (list, tuple)):
            return var
        inner_hint = args[0]
        transformed_var = [
            _validate_variable_against_type_hint(var_i, inner_hint, f"{name}[{i}]") for i, var_i in enumerate(var)
        ]
        return type(var)(transformed_var)

    # type hint carries no domain
    return var


def check_domains(func: Callable[P, R]) -> Callable[P, R]:
    """Decorator validating arguments whose type hints carry a `Domain` marker.

    Args:
        func (Callable[P, R]): The function to decorate.

    Returns:
        Callable[P, R]: The decorated function.

    Examples:
        >>> from hardybear.typehints import DiskPoint
        >>>
        >>> @check_domains
        >>> def kernel(z: DiskPoint, w: DiskPoint) -> complex:
        >>>     return 1 / (1 - z * w.conjugate())
        >>>
        >>> kernel(0.5, 0.2j)
        >>> kernel(1.5, 0.2j)
        OutsideDisk: Argument `z` = (1.5+0j) must lie in the open unit disk
    """
    sig = inspect.signature(func)

    @wraps(func)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> R:
        bound_args = sig.bind(*args, **kwargs)
        bound_args.apply_defaults()

        for name, variable in bound_args.arguments.items():
            type_hint = sig.parameters[name].annotation
            bound_args.arguments[name] = _validate_variable_against_type_hint(variable, type_hint, name)

        return func(*bound_args.args, **bound_args.kwargs)

    return wrapper

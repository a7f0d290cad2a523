import dataclasses
from typing import Any


@dataclasses.dataclass(frozen=True)
class Tolerances:
    """Every tolerance and numerical default in force.

    Args:
        pole: Minimum |c z + d| accepted when evaluating a map.
        self_map: Slack on |phi(e^{it})| <= 1 in the self map certificate.
        boundary_samples: Number of boundary samples for self map and sup norm checks.
        root_merge: Root separation (or relative discriminant) below which fixed points merge.
        boundary: ||w| - 1| below which a point counts as unimodular.
        identity: Coefficient proportionality tolerance for detecting the identity map.
        root_cluster: Backward error level used to cluster companion matrix eigenvalues.
        atom_match: Distance on the circle under which two atoms coincide.
        oracle_invariant: Residual below which the matrix oracle reports invariance.
        oracle_violation: Residual above which the matrix oracle reports non-invariance.
        ridge: Regularizer added to kernel Gram matrices.
        gram_condition: Largest acceptable condition number of an un-ridged Gram matrix.
        margin: Slack on |quotient| <= 1 before a violation is declared.
        constancy: Pointwise tolerance for quotient constancy and identity tests.
        seed: Seed of every pseudo-random point set.
        section_size: Default truncation N for certification cross-checks.
        kernel_section_size: Default truncation N for kernel identities.
        radii: Radii of the quotient sampling grid.
        angles: Angles per radius on the quotient sampling grid.
        kernel_separation: Minimum pseudo-hyperbolic distance between kernel points.
        max_kernel_points: Maximum number of kernel points.
        max_blaschke_terms: Largest truncation of an infinite Blaschke product.
        max_quotient_terms: Largest truncation of an infinite Blaschke product inside a sampled quotient.
    """

    pole: float = 1e-14
    self_map: float = 1e-10
    boundary_samples: int = 4096
    root_merge: float = 1e-9
    boundary: float = 1e-9
    identity: float = 1e-12
    root_cluster: float = 1e-8
    atom_match: float = 1e-12
    oracle_invariant: float = 1e-8
    oracle_violation: float = 1e-2
    ridge: float = 1e-12
    gram_condition: float = 1e14
    margin: float = 1e-6
    constancy: float = 1e-10
    seed: int = 0x5EED
    section_size: int = 64
    kernel_section_size: int = 128
    radii: tuple = (0.5, 0.9, 0.99)
    angles: int = 2048
    kernel_separation: float = 0.1
    max_kernel_points: int = 20
    max_blaschke_terms: int = 200_000
    max_quotient_terms: int = 4096

    @classmethod
    def _override(cls, other_cls) -> "Tolerances":
        """Build tolerances from a class whose attributes override the defaults.

        >>> class Loose:
        >>>     margin = 1e-4
        >>> Tolerances._override(Loose).margin
        0.0001
        """
        if isinstance(other_cls, cls):
            return other_cls
        changes = {name: getattr(other_cls, name) for name in dir(other_cls) if not name.startswith("_")}
        return cls().override(**changes)

    def override(self, **changes: Any) -> "Tolerances":
        """Return a copy with `changes` applied, after checking names and types."""
        self._assert_tolerance_fields(changes)
        self._assert_tolerance_types(changes)
        return dataclasses.replace(self, **changes)

    @classmethod
    def _assert_tolerance_fields(cls, changes: dict[str, Any]):
        known = {field.name for field in dataclasses.fields(cls)}
        for name in changes:
            if name not in known:
                raise ValueError(f"Tolerance field `{name}` is not defined in Tolerances")

    @classmethod
    def _assert_tolerance_types(cls, changes: dict[str, Any]):
        defaults = cls()
        for name, value in changes.items():
            expected_typ = type(getattr(defaults, name))
            # ints are accepted where floats are expected
            if expected_typ is float and isinstance(value, int) and not isinstance(value, bool):
                continue
            if not isinstance(value, expected_typ) or isinstance(value, bool):
                raise TypeError(f"Tolerance field `{name}` expected type {expected_typ} but found {type(value)}")

    def as_table(self) -> dict[str, Any]:
        """Deterministic mapping of every tolerance, for reports."""
        table = dataclasses.asdict(self)
        table["radii"] = list(self.radii)
        return dict(sorted(table.items()))


DEFAULT_TOLERANCES = Tolerances()

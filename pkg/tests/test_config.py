import dataclasses

import pytest

from hardybear.config import DEFAULT_TOLERANCES, Tolerances


def test_default_tolerances():
    """This test checks whether the default tolerances carry the documented
    values and types, and whether the report table lists every one of them."""

    tolerances = Tolerances()
    assert tolerances == DEFAULT_TOLERANCES
    assert tolerances.pole == 1e-14
    assert tolerances.self_map == 1e-10
    assert tolerances.boundary_samples == 4096
    assert tolerances.oracle_invariant == 1e-8
    assert tolerances.oracle_violation == 1e-2
    assert tolerances.gram_condition == 1e14
    assert tolerances.seed == 0x5EED
    assert tolerances.radii == (0.5, 0.9, 0.99)

    table = tolerances.as_table()
    assert list(table) == sorted(field.name for field in dataclasses.fields(Tolerances))
    assert table["radii"] == [0.5, 0.9, 0.99]


def test_override_tolerances():
    """This test checks whether the _override method of the Tolerances class
    works with plain classes and with keyword overrides."""

    # 1. Test that class style overrides work

    class MyTolerances:
        margin = 1e-4

    tolerances = Tolerances._override(MyTolerances)

    assert tolerances.margin == 1e-4
    assert tolerances.pole == DEFAULT_TOLERANCES.pole

    # 2. Test that keyword overrides work and leave the original untouched

    tolerances = DEFAULT_TOLERANCES.override(angles=512, radii=(0.5, 0.999))

    assert tolerances.angles == 512
    assert tolerances.radii == (0.5, 0.999)
    assert DEFAULT_TOLERANCES.angles == 2048

    # 3. Test that ints are accepted for float fields

    assert DEFAULT_TOLERANCES.override(margin=0).margin == 0

    # 4. Test that a Tolerances instance passes through

    assert Tolerances._override(tolerances) is tolerances


def test_assert_tolerance_fields():
    class BadTolerances:
        BAD_FIELD = True

    expected_msg = "Tolerance field `BAD_FIELD` is not defined in Tolerances"
    with pytest.raises(ValueError, match=expected_msg):
        Tolerances._override(BadTolerances)


def test_assert_tolerance_types():
    expected_msg = "Tolerance field `angles` expected type <class 'int'> but found <class 'float'>"
    with pytest.raises(TypeError, match=expected_msg):
        DEFAULT_TOLERANCES.override(angles=512.0)

    with pytest.raises(TypeError, match="Tolerance field `margin`"):
        DEFAULT_TOLERANCES.override(margin=True)


def test_tolerances_are_frozen():
    with pytest.raises(dataclasses.FrozenInstanceError):
        DEFAULT_TOLERANCES.margin = 1.0

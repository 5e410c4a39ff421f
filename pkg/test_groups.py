"""Tests for group construction, field arithmetic and automorphisms."""

import numpy as np
import pytest

from errors import CapacityError, FormatError, GroupConstructionError, InvalidParametersError, UnsupportedOperationError
from groups import automorphism_count, automorphisms, group_from_text, make_group
from models import GroupSpec


def test_gf25_element_encoding(gf25):
    one_plus_x = gf25.encode((1, 1))
    two_plus_4x = gf25.encode((2, 4))
    assert one_plus_x == 6
    assert two_plus_4x == 22
    assert gf25.coefficients(22) == (2, 4)
    assert gf25.add(one_plus_x, two_plus_4x) == 3
    assert gf25.neg(one_plus_x) == 24
    assert gf25.sub(3, 6) == 22


def test_gf25_multiplication_by_x(gf25):
    # x^2 = -2 = 3 modulo x^2 + 2
    assert gf25.field_mul(5, 5) == 3


def test_scalar_multiples(gf25):
    assert gf25.scale(6, 3) == 18
    assert list(gf25.multiples(6)) == [0, 6, 12, 18, 24]


def test_cyclic_group_tables(z9):
    assert z9.add(5, 7) == 3
    assert z9.neg(2) == 7
    assert z9.sub(1, 4) == 6
    assert z9.zero == 0
    assert not z9.is_field


def test_spec_text_round_trip():
    for text in ("cyclic:37", "ea:5^2:2,0,1", "ea:3^3:1,2,0,1"):
        assert GroupSpec.parse(text).text == text
        assert group_from_text(text).spec.text == text


def test_bad_spec_text():
    with pytest.raises(FormatError):
        GroupSpec.parse("dihedral:8")


def test_make_group_is_cached():
    spec = GroupSpec.cyclic(11)
    assert make_group(spec) is make_group(GroupSpec.parse("cyclic:11"))


GROUPS_UP_TO_128 = [f"cyclic:{n}" for n in range(1, 129)] + [
    "ea:2^4:1,1,0,0,1",
    "ea:3^2:1,0,1",
    "ea:5^2:2,0,1",
    "ea:3^3:1,2,0,1",
    "ea:7^2:4,0,1",
    "ea:5^3:2,3,0,1",
    "ea:2^7:1,1,0,0,0,0,0,1",
]


@pytest.mark.parametrize("text", GROUPS_UP_TO_128)
def test_group_axioms_exhaustive(text):
    g = group_from_text(text)
    a = np.arange(g.order)
    add, neg = g.add_table, g.neg_table

    assert np.array_equal(np.sort(add, axis=1), np.broadcast_to(a, add.shape))
    assert np.array_equal(add, add.T)
    assert np.array_equal(add[add[:, :, None], a[None, None, :]], add[a[:, None, None], add[None, :, :]])
    assert np.array_equal(add[0], a)
    assert np.array_equal(neg[neg], a)
    assert not add[a, neg].any()
    assert np.array_equal(g.sub_table, add[:, neg])


@pytest.mark.parametrize("fixture", ["gf9", "gf25", "gf27"])
def test_field_axioms_exhaustive(fixture, request):
    g = request.getfixturevalue(fixture)
    a = np.arange(g.order)
    add, mul = g.add_table, g.mul_table

    assert np.array_equal(add, add.T)
    assert np.array_equal(mul, mul.T)
    assert np.array_equal(add[add[a][:, :, None], a[None, None, :]], add[a[:, None, None], add[a][None, :, :]])
    assert np.array_equal(mul[mul[a][:, :, None], a[None, None, :]], mul[a[:, None, None], mul[a][None, :, :]])
    left = mul[a[:, None, None], add[None, :, :]]
    right = add[mul[:, :, None], mul[:, None, :]]
    assert np.array_equal(left, right)
    assert np.array_equal(mul[1], a)
    assert not mul[0].any()


@pytest.mark.parametrize("fixture", ["gf49", "gf125"])
def test_field_axioms_sampled(fixture, request):
    g = request.getfixturevalue(fixture)
    rng = np.random.default_rng(20)
    for a, b, c in rng.integers(0, g.order, size=(200, 3)):
        a, b, c = int(a), int(b), int(c)
        assert g.field_mul(a, g.add(b, c)) == g.add(g.field_mul(a, b), g.field_mul(a, c))
        assert g.field_mul(g.field_mul(a, b), c) == g.field_mul(a, g.field_mul(b, c))


def test_inverses(gf25):
    for a in range(1, gf25.order):
        assert gf25.field_mul(a, gf25.field_inv(a)) == 1
    with pytest.raises(InvalidParametersError):
        gf25.field_inv(0)


def test_primitive_element_of_gf125(gf125):
    assert gf125.multiplicative_order(5) == 124
    assert gf125.field_pow(5, 124) == 1
    assert gf125.field_pow(5, 62) == gf125.neg(1)


def test_field_operations_on_cyclic_group(z5):
    with pytest.raises(UnsupportedOperationError):
        z5.field_mul(2, 3)
    with pytest.raises(UnsupportedOperationError):
        z5.multiplicative_order(2)
    with pytest.raises(TypeError):
        z5.field_inv(2)


def test_reducible_modulus_names_a_factor():
    # x^2 - 1 = (x + 1)(x - 1) over Z_5
    with pytest.raises(GroupConstructionError) as excinfo:
        make_group(GroupSpec.elementary_abelian(5, 2, (4, 0, 1)))
    assert excinfo.value.factor in ([1, 1], [4, 1])
    assert "reducible" in str(excinfo.value)


@pytest.mark.parametrize("spec", [
    GroupSpec.cyclic(0),
    GroupSpec.elementary_abelian(4, 2, (1, 1, 1)),
    GroupSpec.elementary_abelian(5, 2, (2, 1)),
    GroupSpec.elementary_abelian(5, 2, (2, 0, 2)),
])
def test_invalid_group_specs(spec):
    with pytest.raises(GroupConstructionError):
        make_group(spec)


def test_group_construction_error_is_value_error():
    with pytest.raises(ValueError):
        make_group(GroupSpec.cyclic(0))


def test_trivial_group():
    g = make_group(GroupSpec.cyclic(1))
    assert g.order == 1
    assert [a.images for a in automorphisms(g)] == [(0,)]


@pytest.mark.parametrize("text, count", [
    ("cyclic:9", 6),
    ("cyclic:7", 6),
    ("ea:3^2:1,0,1", 48),
    ("ea:5^2:2,0,1", 480),
    ("ea:3^3:1,2,0,1", 11232),
])
def test_automorphism_counts(text, count):
    g = group_from_text(text)
    assert automorphism_count(g) == count
    tables = {a.table.tobytes() for a in automorphisms(g)}
    assert len(tables) == count


@pytest.mark.parametrize("text", ["cyclic:9", "cyclic:27", "ea:5^2:2,0,1", "ea:3^3:1,2,0,1"])
def test_automorphisms_are_homomorphisms(text):
    g = group_from_text(text)
    for aut in automorphisms(g):
        t = aut.table
        assert sorted(t) == list(range(g.order))
        assert np.array_equal(t[g.add_table], g.add_table[t[:, None], t[None, :]])
        assert np.array_equal(t[g.sub_table], g.sub_table[t[:, None], t[None, :]])
        assert aut(0) == 0


def test_automorphism_capacity():
    g = make_group(GroupSpec.cyclic(11))
    with pytest.raises(CapacityError) as excinfo:
        list(automorphisms(g, bound=10))
    assert excinfo.value.bound == 10

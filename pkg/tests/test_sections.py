from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cohiggs.sections import (
    ProjPoint,
    Section,
    as_rational,
    evaluate,
    format_poly,
    poly_gcd,
    section_arith,
    squarefree_info,
    zero_of_linear,
)

rationals = st.builds(Fraction, st.integers(-50, 50), st.integers(1, 20))


@st.composite
def sections(draw, twist=None):
    n = draw(st.integers(-2, 5)) if twist is None else twist
    return Section(n, tuple(draw(st.lists(rationals, min_size=max(0, n + 1),
                                          max_size=max(0, n + 1)))))


def test_length_validation():
    with pytest.raises(ValueError):
        Section(2, (1, 2))
    assert Section(-3, ()).is_zero()


def test_no_floats():
    with pytest.raises(TypeError):
        as_rational(0.5)
    assert as_rational("3/4") == Fraction(3, 4)


@pytest.mark.parametrize("lhs, rhs, op, want", [
    (Section(2, (1, 0, 0)), Section(2, (0, 0, 1)), "add", Section(2, (1, 0, 1))),
    (Section(1, (0, 1)), Section(3, (1, 0, 0, 0)), "mul", Section(4, (0, 1, 0, 0, 0))),
    (Section(2, (0, 0, 1)), Section(2, (0, 0, 1)), "mul", Section(4, (0, 0, 0, 0, 1))),
    (Section(-1, ()), Section(-1, ()), "add", Section(-1, ())),
])
def test_section_arith(lhs, rhs, op, want):
    assert section_arith(lhs, rhs, op) == want


def test_add_twist_mismatch():
    with pytest.raises(ValueError):
        Section(1, (0, 1)) + Section(2, (0, 0, 1))


@pytest.mark.parametrize("s, p, want", [
    (Section(2, (1, 2, 1)), ProjPoint(1, 1), 4),
    (Section(2, (1, 2, 1)), ProjPoint.infinity(), 1),
    (Section(4, (4, 0, 0, 0, 0)), ProjPoint(0, 1), 4),
])
def test_evaluate(s, p, want):
    assert evaluate(s, p) == want


@pytest.mark.parametrize("c, want", [
    ((-3, 1), ProjPoint(3, 1)),
    ((5, 0), ProjPoint.infinity()),
    ((0, 7), ProjPoint(0, 1)),
])
def test_zero_of_linear(c, want):
    assert zero_of_linear(Section(1, c)) == want


def test_zero_of_linear_rejects_zero():
    with pytest.raises(ValueError):
        zero_of_linear(Section(1, (0, 0)))


@pytest.mark.parametrize("coeffs, squarefree, distinct", [
    ((9, 0, 0, 0, 1), True, 4),
    ((0, 0, 1, 0, 0), False, 2),
    ((1, 0, 0, 0, 0), False, 1),
    ((0, 1, 0, 0, -1), True, 4),
])
def test_squarefree_info(coeffs, squarefree, distinct):
    info = squarefree_info(Section(len(coeffs) - 1, coeffs))
    assert info.is_squarefree is squarefree
    assert info.distinct_roots == distinct


def test_squarefree_root_at_infinity():
    # z as a section of O(2): simple zeros at 0 and at infinity
    info = squarefree_info(Section(2, (0, 1, 0)))
    assert info.is_squarefree and info.multiplicity_at_infinity == 1


def test_projpoint_canonical():
    assert ProjPoint(2, 4) == ProjPoint(Fraction(1, 2))
    assert ProjPoint(-3, 0) == ProjPoint.infinity()
    assert str(ProjPoint(3, 6)) == "[1/2:1]"
    assert ProjPoint.parse("[1:0]").is_infinite
    with pytest.raises(ValueError):
        ProjPoint(0, 0)
    with pytest.raises(ValueError):
        ProjPoint.parse("1:2")


def test_format_poly():
    assert format_poly([1, 0, 3], "z") == "1 + 3z^2"
    assert format_poly([0, -1, Fraction(1, 2)], "z") == "-z + (1/2)z^2"
    assert format_poly([0, 0], "z") == "0"


def test_poly_gcd_monic():
    assert poly_gcd([Fraction(-1), 0, 1], [Fraction(2), 2]) == [1, 1]


@given(sections(), st.builds(Fraction, st.integers(1, 30) | st.integers(-30, -1), st.integers(1, 9)))
def test_chart_consistency(s, z):
    u1 = s.other_chart()
    assert evaluate(s, ProjPoint(z)) == z ** s.twist * evaluate_u1(u1, 1 / z)


def evaluate_u1(u1, w):
    return sum(c * w ** k for k, c in enumerate(u1.coeffs))


@given(sections())
def test_other_chart_involution(s):
    assert s.other_chart().other_chart() == s


@given(sections(), sections(), sections())
def test_mul_commutative_associative(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert (a * b).twist == a.twist + b.twist


@given(sections())
def test_json_round_trip(s):
    assert Section.from_json(s.to_json()) == s

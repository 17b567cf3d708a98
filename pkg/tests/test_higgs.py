import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cohiggs.higgs import (
    Automorphism,
    HiggsField,
    SplittingType,
    admits_semistable,
    canonical_stable_higgs,
    char_coeffs,
    conjugate,
    first_violation,
    format_charpoly,
    reassemble,
    spectral_smooth_r2,
    trace_split,
    twist_bundle,
)
from cohiggs.sections import Section

small = st.builds(Fraction, st.integers(-10, 10), st.integers(1, 5))
nonzero = st.builds(Fraction, st.integers(1, 10) | st.integers(-10, -1), st.integers(1, 5))


def sec(twist, *coeffs):
    return Section.from_poly(twist, coeffs)


@st.composite
def splittings(draw, max_rank=3):
    r = draw(st.integers(1, max_rank))
    return SplittingType(draw(st.lists(st.integers(-3, 3), min_size=r, max_size=r)))


@st.composite
def fields(draw, split):
    r = split.rank
    rows = []
    for i in range(r):
        row = []
        for j in range(r):
            n = split.entry_twist(i, j)
            row.append(Section(n, tuple(draw(st.lists(small, min_size=max(0, n + 1),
                                                      max_size=max(0, n + 1))))))
        rows.append(tuple(row))
    return HiggsField(split, tuple(rows))


@st.composite
def automorphisms(draw, split):
    r = split.rank
    rows = []
    for i in range(r):
        row = []
        for j in range(r):
            n = split.m[i] - split.m[j]
            if i == j:
                row.append(Section.constant(0, draw(nonzero)))
            elif i > j and n >= 0:
                # equal summands: keep the matrix triangular so it stays invertible
                row.append(Section.zero(n))
            else:
                row.append(Section(n, tuple(draw(st.lists(small, min_size=max(0, n + 1),
                                                          max_size=max(0, n + 1))))))
        rows.append(tuple(row))
    return Automorphism(split, tuple(rows))


@pytest.mark.parametrize("m, ok", [
    ((0, -1), True), ((2, -2), False), ((1, -1), True), ((0, 0), True),
    ((3, 3, 3), True), ((5,), True), ((3, 0), False), ((0, 2, 4), True), ((0, 3, 4), False),
])
def test_admits_semistable(m, ok):
    assert admits_semistable(SplittingType(m)) is ok


def test_first_violation():
    assert first_violation(SplittingType((3, 0))) == (3, 0)
    assert first_violation(SplittingType((0, -1))) is None


@given(st.lists(st.integers(-4, 4), min_size=1, max_size=5), st.randoms())
def test_admissibility_permutation_invariant(m, rnd):
    shuffled = list(m)
    rnd.shuffle(shuffled)
    assert admits_semistable(SplittingType(m)) == admits_semistable(SplittingType(shuffled))


def test_canonical_rank2():
    phi = canonical_stable_higgs(SplittingType((0, -1)))
    assert phi[0, 1] == Section(3, (0, 1, 0, 0))
    assert phi[1, 0] == Section(1, (1, 0))
    assert format_charpoly(phi) == "-z + y^2"
    assert char_coeffs(phi).rho == (Section.zero(2), Section(4, (0, 1, 0, 0, 0)))


def test_canonical_twists_on_e11():
    phi = canonical_stable_higgs(SplittingType((1, -1)))
    assert [[s.twist for s in row] for row in phi.entries] == [[2, 4], [0, 2]]


def test_canonical_rank3():
    phi = canonical_stable_higgs(SplittingType((0, -1, -2)))
    rho = char_coeffs(phi).rho
    assert rho[0].is_zero() and rho[1].is_zero()
    assert rho[2] == Section(6, (0, 1, 0, 0, 0, 0, 0))


def test_canonical_rejects_inadmissible():
    with pytest.raises(ValueError):
        canonical_stable_higgs(SplittingType((3, 0)))


def test_char_coeffs_rank2():
    a, b, c = sec(2, 1, 2), sec(2, 0, 0, 3), sec(2, 5)
    phi = HiggsField(SplittingType((0, 0)), ((a, b), (c, -a)))
    rho = char_coeffs(phi).rho
    assert rho[0].is_zero()
    assert rho[1] == a * a + b * c


def test_char_coeffs_scalar():
    a = sec(2, 1, 0, 2)
    z = Section.zero(2)
    rho = char_coeffs(HiggsField(SplittingType((0, 0)), ((a, z), (z, a)))).rho
    assert rho == (a * 2, -(a * a))


def test_conjugate_identity():
    split = SplittingType((0, -1))
    phi = canonical_stable_higgs(split)
    assert conjugate(phi, Automorphism.identity(split)) == phi


def test_conjugate_top_left():
    split = SplittingType((0, -1))
    a, b, c = sec(2, 1, 1), sec(3, 2), sec(1, 3, 1)
    d, e, f = Fraction(2), sec(1, 1, -1), Fraction(5)
    psi = Automorphism(split, ((Section.constant(0, d), e), (Section.zero(-1), Section.constant(0, f))))
    out = conjugate(HiggsField(split, ((a, b), (c, -a))), psi)
    assert out[0, 0] == a + (e * c) / d


def test_conjugate_hitchin_normal_form():
    split = SplittingType((1, -1))
    a, b, c = sec(2, 1, 0, 3), sec(4, 1, 2), Fraction(2)
    phi = HiggsField(split, ((a, b), (Section.constant(0, c), -a)))
    psi = Automorphism(split, ((Section.constant(0, 1), (a / c).scale(-1)),
                               (Section.zero(-2), Section.constant(0, 1 / c))))
    out = conjugate(phi, psi)
    assert out[0, 0].is_zero() and out[1, 1].is_zero()
    assert out[0, 1] == a * a + b * c
    assert out[1, 0] == Section.constant(0, 1)


def test_automorphism_rejects_singular():
    split = SplittingType((0, 0))
    zero = Section.zero(0)
    with pytest.raises(ValueError):
        Automorphism(split, ((zero, zero), (zero, Section.constant(0, 1))))


@given(st.data())
def test_conjugation_invariance(data):
    split = data.draw(splittings())
    phi = data.draw(fields(split))
    psi = data.draw(automorphisms(split))
    assert char_coeffs(conjugate(phi, psi)) == char_coeffs(phi)


@given(st.data())
def test_trace_split_round_trip(data):
    split = data.draw(splittings())
    phi = data.draw(fields(split))
    tr, traceless = trace_split(phi)
    assert char_coeffs(traceless).rho[0].is_zero()
    assert reassemble(tr, traceless) == phi


def test_trace_split_examples():
    split = SplittingType((0, 0))
    a, z = sec(2, 2, 4), Section.zero(2)
    tr, tl = trace_split(HiggsField(split, ((a, z), (z, z))))
    assert tr == a and tl.entries == ((a / 2, z), (z, -(a / 2)))
    phi = canonical_stable_higgs(SplittingType((0, -1)))
    tr, tl = trace_split(phi)
    assert tr.is_zero() and tl == phi


@given(st.data(), st.integers(-3, 3))
def test_twist_bundle(data, n):
    split = data.draw(splittings())
    phi = data.draw(fields(split))
    moved = twist_bundle(phi, n)
    assert moved.splitting.degree == split.degree + split.rank * n
    assert char_coeffs(moved) == char_coeffs(phi)
    assert twist_bundle(moved, -n) == phi


def test_twist_bundle_examples():
    phi = canonical_stable_higgs(SplittingType((0, -1)))
    assert twist_bundle(phi, 1).splitting.m == (1, 0)
    zero = HiggsField.zero(SplittingType((0, 0)))
    assert twist_bundle(zero, -1).splitting.degree == -2


@pytest.mark.parametrize("coeffs, smooth", [
    ((9, 0, 0, 0, 1), True), ((0, 0, 1, 0, 0), False), ((0, 0, 0, 0, 0), False),
    ((0, 1, 0, 0, 0), False), ((0, 1, 0, -1, 0), True),
])
def test_spectral_smooth(coeffs, smooth):
    from cohiggs.higgs import CharCoeffs
    rho = CharCoeffs((Section.zero(2), Section(4, coeffs)))
    assert spectral_smooth_r2(rho) is smooth


def test_higgs_json_round_trip():
    phi = canonical_stable_higgs(SplittingType((1, 0, -1)))
    assert HiggsField.from_json(phi.to_json()) == phi


def test_entry_twist_validation():
    split = SplittingType((0, -1))
    with pytest.raises(ValueError):
        HiggsField(split, ((sec(2), sec(2)), (sec(1), sec(2))))


def test_canonical_all_small_types():
    # the characteristic polynomial is y^r - z for every admissible type
    for r in range(2, 5):
        for m in itertools.product(range(-3, 4), repeat=r):
            t = SplittingType(m)
            if list(t.m) != list(m) or not admits_semistable(t):
                continue
            rho = char_coeffs(canonical_stable_higgs(t)).rho
            assert all(s.is_zero() for s in rho[:-1])
            assert rho[-1] == Section.monomial(2 * r, 1)

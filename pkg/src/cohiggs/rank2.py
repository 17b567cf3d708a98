"""Rank-2 moduli: the odd-degree model S and the even-degree normal forms.

Odd degree.  On E = O + O(-1) every trace-free field is (a b; c -a) with
a, b, c sections of O(2), O(3), O(1).  Stable fields (c != 0) map to
(z0, a(z0), a^2 + bc) where z0 is the zero of c; the image lies on

    y^2 = a0 + a1 z + a2 z^2 + a3 z^3 + a4 z^4     (chart U0)
    w'^2 = a4 + a3 w + ... + a0 w^4                (chart U1, w = 1/z).

Even degree.  On O(1) + O(-1) the conjugacy class is fixed by rho = a^2 + bc;
on O + O a field is strictly semistable iff its three coefficient matrices
share an eigenvector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .higgs import Automorphism, HiggsField, SplittingType, char_coeffs, conjugate
from .sections import (
    ProjPoint,
    Section,
    as_rational,
    evaluate,
    format_rational,
    poly_divmod,
    poly_eval,
    poly_gcd,
    poly_trim,
    zero_of_linear,
)

ODD, EVEN_E11, EVEN_E0 = "odd", "even_E11", "even_E0"

_TWISTS = {ODD: (2, 3, 1), EVEN_E11: (2, 4, 0), EVEN_E0: (2, 2, 2)}
_SPLITTINGS = {ODD: (0, -1), EVEN_E11: (1, -1), EVEN_E0: (0, 0)}


class UnstableError(ValueError):
    pass


@dataclass(frozen=True)
class TraceFreeHiggs2:
    """The trace-free field (a b; c -a) on one of the three rank-2 bundles."""

    variant: str
    a: Section
    b: Section
    c: Section

    def __post_init__(self):
        if self.variant not in _TWISTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        want = _TWISTS[self.variant]
        got = (self.a.twist, self.b.twist, self.c.twist)
        if got != want:
            raise ValueError(f"{self.variant} fields need (a, b, c) twists {want}, got {got}")

    @property
    def splitting(self) -> SplittingType:
        return SplittingType(_SPLITTINGS[self.variant])

    def to_higgs(self) -> HiggsField:
        return HiggsField(self.splitting, ((self.a, self.b), (self.c, -self.a)))

    @classmethod
    def from_higgs(cls, phi: HiggsField) -> TraceFreeHiggs2:
        for variant, m in _SPLITTINGS.items():
            if phi.splitting.m == m:
                break
        else:
            raise ValueError(f"no rank-2 variant on splitting {phi.splitting.m}")
        (a, b), (c, d) = phi.entries
        if a + d:
            raise ValueError("field is not trace-free")
        return cls(variant, a, b, c)

    @classmethod
    def odd(cls, a, b, c) -> TraceFreeHiggs2:
        return cls(ODD, _sec(2, a), _sec(3, b), _sec(1, c))

    @classmethod
    def even_e11(cls, a, b, c) -> TraceFreeHiggs2:
        return cls(EVEN_E11, _sec(2, a), _sec(4, b), _sec(0, c))

    @classmethod
    def even_e0(cls, a, b, c) -> TraceFreeHiggs2:
        return cls(EVEN_E0, _sec(2, a), _sec(2, b), _sec(2, c))

    def rho(self) -> Section:
        """-det = a^2 + bc, a section of O(4)."""
        return self.a * self.a + self.b * self.c

    def to_json(self) -> dict:
        return {"variant": self.variant, "a": self.a.to_json(), "b": self.b.to_json(),
                "c": self.c.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> TraceFreeHiggs2:
        return cls(data["variant"], Section.from_json(data["a"]), Section.from_json(data["b"]),
                   Section.from_json(data["c"]))


def _sec(twist: int, value) -> Section:
    if isinstance(value, Section):
        return value
    return Section.from_poly(twist, value)


@dataclass(frozen=True)
class SPoint:
    """A point of S: base point z0, fiber value y0 at z0, and rho in H^0(O(4)).

    y0 is the U0 fiber coordinate when z0 is finite and the U1 coordinate
    when z0 is the point at infinity.
    """

    z0: ProjPoint
    y0: Fraction
    rho: Section

    def __post_init__(self):
        object.__setattr__(self, "y0", as_rational(self.y0))
        if self.rho.twist != 4:
            raise ValueError("rho must be a section of O(4)")

    def residual(self) -> Fraction:
        """y0^2 - rho(z0) in the chart of z0; zero exactly on S."""
        return self.y0 * self.y0 - evaluate(self.rho, self.z0)

    def on_variety(self) -> bool:
        return self.residual() == 0

    def to_json(self) -> dict:
        return {"z0": str(self.z0), "y0": format_rational(self.y0),
                "rho": [format_rational(c) for c in self.rho.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> SPoint:
        return cls(ProjPoint.parse(data["z0"]), as_rational(data["y0"]),
                   Section(4, tuple(as_rational(c) for c in data["rho"])))


def defining_equation(chart: str, z, y, a):
    """f = y^2 - sum a_k z^k on U0, or the mirrored f~ on U1.

    Works on any ring elements supporting +, *, ** (rationals or symbols).
    """
    if chart == "U0":
        return y ** 2 - sum(a[k] * z ** k for k in range(5))
    if chart == "U1":
        return y ** 2 - sum(a[4 - k] * z ** k for k in range(5))
    raise ValueError("chart must be 'U0' or 'U1'")


# -- odd degree ---------------------------------------------------------------

def is_stable_odd(phi: TraceFreeHiggs2) -> bool:
    _require(phi, ODD)
    return not phi.c.is_zero()


def to_S(phi: TraceFreeHiggs2) -> SPoint:
    _require(phi, ODD)
    if not is_stable_odd(phi):
        raise UnstableError("c = 0: the trivial sub-line bundle is invariant")
    z0 = zero_of_linear(phi.c)
    return SPoint(z0, evaluate(phi.a, z0), phi.rho())


def divided_difference(rho: Section, z0: Fraction) -> Section:
    """(rho(z) - rho(z0)) / (z - z0) by synthetic division, a section of O(3)."""
    num = list(rho.coeffs)
    num[0] -= poly_eval(rho.coeffs, z0)
    quo, rem = poly_divmod(num, [-z0, Fraction(1)])
    assert not rem
    return Section.from_poly(rho.twist - 1, quo)


def from_S(p: SPoint) -> TraceFreeHiggs2:
    """A representative field with a constant in the chart of z0 and c vanishing at z0."""
    if not p.on_variety():
        raise ValueError(f"point is not on S: y0^2 - rho(z0) = {p.residual()}")
    if p.z0.is_infinite:
        # Mirror image of the finite construction in the U1 chart.
        a = Section.monomial(2, 2, p.y0)
        c = Section.constant(1, 1)
        mirrored = divided_difference(p.rho.other_chart(), Fraction(0))
        b = mirrored.other_chart()
        return TraceFreeHiggs2(ODD, a, b, c)
    z0 = p.z0.z
    a = Section.constant(2, p.y0)
    c = Section.of(1, (-z0, 1))
    return TraceFreeHiggs2(ODD, a, divided_difference(p.rho, z0), c)


def plus_minus_collision(p: SPoint) -> bool:
    """True iff the two sheets over z0 meet, i.e. y0 = 0 (rho ramifies at z0)."""
    return p.y0 == 0


# -- even degree ---------------------------------------------------------------

def q_section(rho: Section) -> TraceFreeHiggs2:
    """The Hitchin section (0 rho; 1 0) on O(1) + O(-1); -det equals rho."""
    if rho.twist != 4:
        raise ValueError("rho must be a section of O(4)")
    return TraceFreeHiggs2(EVEN_E11, Section.zero(2), rho, Section.constant(0, 1))


def normalize_even_E11(phi: TraceFreeHiggs2) -> Section:
    """Conjugate phi into the Hitchin section and return its rho."""
    _require(phi, EVEN_E11)
    c = phi.c.coeffs[0]
    if c == 0:
        raise UnstableError("c = 0: O(1) is invariant and destabilizing")
    split = phi.splitting
    psi = Automorphism(split, (
        (Section.constant(0, 1), (phi.a / c).scale(-1)),
        (Section.zero(-2), Section.constant(0, 1 / c)),
    ))
    normal = conjugate(phi.to_higgs(), psi)
    rho = phi.rho()
    if normal != q_section(rho).to_higgs():
        raise AssertionError("conjugation did not reach the Hitchin section")
    return rho


@dataclass(frozen=True)
class E0Classification:
    """Stable, or strictly semistable with graded object diag(a, -a).

    ``graded`` is given as sqrt(radicand) * graded when the common eigenvector
    is only defined over a quadratic extension, with radicand a squarefree
    integer; radicand is 1 otherwise.
    """

    stable: bool
    graded: Optional[Section] = None
    radicand: Fraction = Fraction(1)

    def to_json(self) -> dict:
        if self.stable:
            return {"status": "stable"}
        return {"status": "semistable", "graded": self.graded.to_json(),
                "radicand": format_rational(self.radicand)}


def _binary_quadratic(alpha, beta, gamma):
    """det[A v | v] for A = (alpha beta; gamma -alpha), as (v1^2, v1 v2, v2^2) coefficients."""
    return (-gamma, 2 * alpha, beta)


def _binary_gcd(forms):
    """Common factor of binary quadratics, as (multiplicity of v2, monic poly in t = v1/v2).

    The zero form is ignored; returns None when every form vanishes.
    """
    forms = [f for f in forms if any(f)]
    if not forms:
        return None
    # v2 divides (c0 v1^2 + c1 v1 v2 + c2 v2^2) iff c0 = 0.
    inf_mult = min(_v2_multiplicity(f) for f in forms)
    g = None
    for f in forms:
        # dehomogenize at v2 = 1: poly in t = v1 with coefficients low -> high
        p = poly_trim([f[2], f[1], f[0]])
        g = p if g is None else poly_gcd(g, p)
    if g:
        g = [x / g[-1] for x in g]
    return inf_mult, g


def _v2_multiplicity(f) -> int:
    c0, c1, _ = f
    if c0 != 0:
        return 0
    return 1 if c1 != 0 else 2


def classify_even_E0(phi: TraceFreeHiggs2) -> E0Classification:
    """Decide whether A0, A1, A2 in phi = A0 + A1 z + A2 z^2 share an eigenvector."""
    _require(phi, EVEN_E0)
    mats = [(phi.a.coeffs[k], phi.b.coeffs[k], phi.c.coeffs[k]) for k in range(3)]
    g = _binary_gcd([_binary_quadratic(*m) for m in mats])
    if g is None:
        return E0Classification(False, Section.zero(2))
    inf_mult, poly = g
    if inf_mult > 0:
        return E0Classification(False, _eigen_section(mats, (Fraction(1), Fraction(0))))
    deg = len(poly) - 1
    if deg <= 0:
        return E0Classification(True)
    if deg == 1:
        t = -poly[0]
        return E0Classification(False, _eigen_section(mats, (t, Fraction(1))))
    p0, p1 = poly[0], poly[1]
    disc = p1 * p1 - 4 * p0
    root = _rational_sqrt(disc)
    if root is not None:
        # split over Q: either rational eigenvector gives the graded object up to sign
        return E0Classification(False, _eigen_section(mats, ((-p1 + root) / 2, Fraction(1))))
    # Irreducible over Q: v = (t, 1) with t = (-p1 + s)/2, s^2 = disc, and t t' = p0.
    # lambda = alpha + beta / t = u + w s; trace-freeness forces u = 0.
    scale, radicand = _squarefree_part(disc)
    coeffs = []
    for alpha, beta, gamma in mats:
        u = alpha + beta * (-p1) / (2 * p0)
        w = beta * (-1) / (2 * p0)
        if u != 0:
            raise AssertionError("trace-free common eigenvalue must be purely irrational")
        coeffs.append(w * scale)
    return E0Classification(False, Section.of(2, coeffs), Fraction(radicand))


def _rational_sqrt(x: Fraction) -> Optional[Fraction]:
    if x < 0:
        return None
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    return Fraction(n, d) if n * n == x.numerator and d * d == x.denominator else None


def _squarefree_part(x: Fraction) -> tuple[Fraction, int]:
    """sqrt(x) = scale * sqrt(m) with m a squarefree integer."""
    n = x.numerator * x.denominator
    sign, n = (-1 if n < 0 else 1), abs(n)
    scale, f = 1, 2
    while f * f <= n:
        while n % (f * f) == 0:
            n //= f * f
            scale *= f
        f += 1
    return Fraction(scale, x.denominator), sign * n


def _eigen_section(mats, v) -> Section:
    v1, v2 = v
    coeffs = []
    for alpha, beta, gamma in mats:
        first = alpha * v1 + beta * v2
        second = gamma * v1 - alpha * v2
        lam = first / v1 if v1 != 0 else second / v2
        coeffs.append(lam)
    return Section.of(2, coeffs)


def _require(phi: TraceFreeHiggs2, variant: str) -> None:
    if phi.variant != variant:
        raise ValueError(f"expected a {variant} field, got {phi.variant}")

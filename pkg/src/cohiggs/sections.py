"""Global sections of O(n) on the projective line, stored exactly.

A section of O(n) is kept as its polynomial in the affine coordinate z of the
chart U0 = P^1 - {inf}; the chart U1 = P^1 - {0} (coordinate w = 1/z) sees
w^n * s(1/w), i.e. the reversed coefficient list.  All arithmetic is over
``fractions.Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def format_rational(x: Fraction) -> str:
    return str(x)


# -- dense univariate polynomials over Q, lowest degree first -----------------

def poly_trim(p: Sequence[Fraction]) -> list[Fraction]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_degree(p: Sequence[Fraction]) -> int:
    """Degree of a coefficient list; -1 for the zero polynomial."""
    return len(poly_trim(p)) - 1


def poly_mul(p: Sequence[Fraction], q: Sequence[Fraction]) -> list[Fraction]:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def poly_divmod(p: Sequence[Fraction], d: Sequence[Fraction]):
    d = poly_trim(d)
    if not d:
        raise ZeroDivisionError("polynomial division by zero")
    r = poly_trim(p)
    if len(r) < len(d):
        return [], r
    quo = [Fraction(0)] * (len(r) - len(d) + 1)
    lead = d[-1]
    while len(r) >= len(d):
        shift = len(r) - len(d)
        c = r[-1] / lead
        quo[shift] = c
        for i, b in enumerate(d):
            r[i + shift] -= c * b
        r = poly_trim(r)
    return quo, r


def poly_gcd(p: Sequence[Fraction], q: Sequence[Fraction]) -> list[Fraction]:
    """Monic gcd (the zero polynomial if both inputs vanish)."""
    a, b = poly_trim(p), poly_trim(q)
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, r
    if not a:
        return []
    return [c / a[-1] for c in a]


def poly_derivative(p: Sequence[Fraction]) -> list[Fraction]:
    return poly_trim([i * c for i, c in enumerate(p)][1:])


def poly_eval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


# -- projective points --------------------------------------------------------

@dataclass(frozen=True, init=False)
class ProjPoint:
    """A point [u:v] of P^1 over Q, stored canonically (v = 1, or [1:0])."""

    u: Fraction
    v: Fraction

    def __init__(self, u, v=1):
        u, v = as_rational(u), as_rational(v)
        if u == 0 and v == 0:
            raise ValueError("[0:0] is not a point of P^1")
        if v == 0:
            u = Fraction(1)
        else:
            u, v = u / v, Fraction(1)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @classmethod
    def infinity(cls) -> ProjPoint:
        return cls(1, 0)

    @property
    def is_infinite(self) -> bool:
        return self.v == 0

    @property
    def z(self) -> Fraction:
        if self.is_infinite:
            raise ValueError("the point at infinity has no affine coordinate")
        return self.u

    def __str__(self) -> str:
        return f"[{self.u}:{self.v}]"

    @classmethod
    def parse(cls, text: str) -> ProjPoint:
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")) or ":" not in body:
            raise ValueError(f"expected '[u:v]', got {text!r}")
        u, v = body[1:-1].split(":")
        return cls(u, v)


# -- sections -----------------------------------------------------------------

@dataclass(frozen=True)
class Section:
    """A global section of O(twist); ``coeffs[k]`` multiplies z^k in U0."""

    twist: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        n = self.twist
        if not isinstance(n, int):
            raise TypeError("twist must be an integer")
        coeffs = tuple(as_rational(c) for c in self.coeffs)
        if len(coeffs) != max(0, n + 1):
            raise ValueError(
                f"a section of O({n}) needs {max(0, n + 1)} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def of(cls, twist: int, coeffs: Iterable) -> Section:
        return cls(twist, tuple(coeffs))

    @classmethod
    def zero(cls, twist: int) -> Section:
        return cls(twist, (Fraction(0),) * max(0, twist + 1))

    @classmethod
    def monomial(cls, twist: int, power: int, coeff=1) -> Section:
        if not 0 <= power <= twist:
            raise ValueError(f"z^{power} is not a section of O({twist})")
        c = [Fraction(0)] * (twist + 1)
        c[power] = as_rational(coeff)
        return cls(twist, tuple(c))

    @classmethod
    def constant(cls, twist: int, value=1) -> Section:
        """The section equal to ``value`` on U0 (it is value * w^twist on U1)."""
        return cls.monomial(twist, 0, value)

    @classmethod
    def from_poly(cls, twist: int, poly: Sequence) -> Section:
        """Pad or validate a coefficient list against the twist."""
        p = poly_trim([as_rational(c) for c in poly])
        if len(p) > max(0, twist + 1):
            raise ValueError(f"degree {len(p) - 1} polynomial is not a section of O({twist})")
        return cls(twist, tuple(p) + (Fraction(0),) * (max(0, twist + 1) - len(p)))

    # structure

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    @property
    def u0_degree(self) -> int:
        """Degree of the U0 polynomial (-1 for the zero section)."""
        return poly_degree(self.coeffs)

    def other_chart(self) -> Section:
        """The U1 representation w^n s(1/w) as a coefficient list in w."""
        return Section(self.twist, tuple(reversed(self.coeffs)))

    def is_constant_multiple(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    # arithmetic

    def __add__(self, other: Section) -> Section:
        if not isinstance(other, Section):
            return NotImplemented
        if self.twist != other.twist:
            raise ValueError(f"cannot add sections of O({self.twist}) and O({other.twist})")
        return Section(self.twist, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> Section:
        return Section(self.twist, tuple(-c for c in self.coeffs))

    def __sub__(self, other: Section) -> Section:
        if not isinstance(other, Section):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> Section:
        if isinstance(other, Section):
            twist = self.twist + other.twist
            if self.is_zero() or other.is_zero():
                return Section.zero(twist)
            return Section.from_poly(twist, poly_mul(self.coeffs, other.coeffs))
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, c) -> Section:
        c = as_rational(c)
        return Section(self.twist, tuple(c * x for x in self.coeffs))

    def __truediv__(self, c) -> Section:
        return self.scale(1 / as_rational(c))

    def __str__(self) -> str:
        return f"O({self.twist}):{format_poly(self.coeffs, 'z')}"

    # serialization

    def to_json(self) -> dict:
        return {"twist": self.twist, "coeffs": [format_rational(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> Section:
        return cls(int(data["twist"]), tuple(as_rational(c) for c in data["coeffs"]))


def section_arith(lhs: Section, rhs: Section, op: str) -> Section:
    if op == "add":
        return lhs + rhs
    if op == "mul":
        return lhs * rhs
    raise ValueError(f"unknown section operation {op!r}")


def evaluate(s: Section, p: ProjPoint) -> Fraction:
    """Fiber value of s at p: U0 value for finite p, U1 value at w = 0 otherwise."""
    if p.is_infinite:
        return s.coeffs[-1] if s.coeffs else Fraction(0)
    return poly_eval(s.coeffs, p.z)


def zero_of_linear(c: Section) -> ProjPoint:
    if c.twist != 1:
        raise ValueError("zero_of_linear needs a section of O(1)")
    c0, c1 = c.coeffs
    if c0 == 0 and c1 == 0:
        raise ValueError("the zero section has no unique zero")
    return ProjPoint(-c0, c1)


@dataclass(frozen=True)
class SquarefreeInfo:
    distinct_roots: int
    is_squarefree: bool
    multiplicity_at_infinity: int


def squarefree_info(s: Section) -> SquarefreeInfo:
    """Count distinct zeros of s on P^1 without extracting roots.

    Finite zeros come from the squarefree part p / gcd(p, p'); the zero at
    infinity has multiplicity twist - deg_U0(s).
    """
    if s.is_zero():
        raise ValueError("the zero section vanishes everywhere")
    p = poly_trim(s.coeffs)
    g = poly_gcd(p, poly_derivative(p))
    finite_distinct = len(p) - len(g)
    at_inf = s.twist - (len(p) - 1)
    distinct = finite_distinct + (1 if at_inf > 0 else 0)
    return SquarefreeInfo(distinct, distinct == s.twist, at_inf)


def format_poly(coeffs: Sequence[Fraction], var: str = "z") -> str:
    """Ascending-degree rendering with explicit '^' powers, e.g. '1 + 3z^2'."""
    terms = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if mono and c == 1:
            body = mono
        elif mono and c == -1:
            body = "-" + mono
        elif mono:
            body = f"({c}){mono}" if c.denominator != 1 else f"{c}{mono}"
        else:
            body = str(c)
        terms.append(body)
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return out

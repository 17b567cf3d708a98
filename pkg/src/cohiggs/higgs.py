"""Splitting types, Higgs fields as matrices of sections, and the Hitchin map.

On E = O(m_1) + ... + O(m_r) (sorted non-increasing) a co-Higgs field is an
r x r matrix whose (i, j) entry is a section of O(m_i - m_j + 2).  The
characteristic coefficients rho_k are defined by

    det(eta I - phi) = eta^r - rho_1 eta^(r-1) - ... - rho_r,

so rho_1 = tr(phi) and, in rank 2, rho_2 = -det(phi).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .sections import Section, format_poly, squarefree_info

Matrix = tuple[tuple[Section, ...], ...]


@dataclass(frozen=True, init=False)
class SplittingType:
    m: tuple[int, ...]

    def __init__(self, m: Sequence[int]):
        m = tuple(sorted((int(x) for x in m), reverse=True))
        if not m:
            raise ValueError("a splitting type needs at least one summand")
        object.__setattr__(self, "m", m)

    @property
    def rank(self) -> int:
        return len(self.m)

    @property
    def degree(self) -> int:
        return sum(self.m)

    def entry_twist(self, i: int, j: int) -> int:
        """Twist of the (i, j) entry of a Higgs field: m_i - m_j + 2."""
        return self.m[i] - self.m[j] + 2

    def shifted(self, n: int) -> SplittingType:
        return SplittingType([x + n for x in self.m])


def _check_matrix(split: SplittingType, entries, offset: int) -> Matrix:
    r = split.rank
    rows = tuple(tuple(row) for row in entries)
    if len(rows) != r or any(len(row) != r for row in rows):
        raise ValueError(f"expected a {r}x{r} matrix of sections")
    for i, j in itertools.product(range(r), repeat=2):
        want = split.m[i] - split.m[j] + offset
        if rows[i][j].twist != want:
            raise ValueError(
                f"entry ({i + 1},{j + 1}) lives in O({want}), got O({rows[i][j].twist})")
    return rows


@dataclass(frozen=True)
class HiggsField:
    splitting: SplittingType
    entries: Matrix

    def __post_init__(self):
        object.__setattr__(self, "entries", _check_matrix(self.splitting, self.entries, 2))

    @property
    def rank(self) -> int:
        return self.splitting.rank

    def __getitem__(self, ij) -> Section:
        i, j = ij
        return self.entries[i][j]

    @classmethod
    def zero(cls, split: SplittingType) -> HiggsField:
        r = split.rank
        return cls(split, tuple(tuple(Section.zero(split.entry_twist(i, j)) for j in range(r))
                                for i in range(r)))

    def to_json(self) -> dict:
        return {"splitting": list(self.splitting.m),
                "entries": [[s.to_json() for s in row] for row in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> HiggsField:
        split = SplittingType(data["splitting"])
        if list(split.m) != [int(x) for x in data["splitting"]]:
            raise ValueError("splitting must be listed in non-increasing order")
        return cls(split, tuple(tuple(Section.from_json(s) for s in row)
                                for row in data["entries"]))


@dataclass(frozen=True)
class Automorphism:
    """A bundle automorphism psi; entry (i, j) is a section of O(m_i - m_j)."""

    splitting: SplittingType
    entries: Matrix

    def __post_init__(self):
        object.__setattr__(self, "entries", _check_matrix(self.splitting, self.entries, 0))
        if self.determinant() == 0:
            raise ValueError("automorphism has vanishing determinant")

    def determinant(self) -> Fraction:
        d = det(self.entries, 0)
        return d.coeffs[0]

    def inverse(self) -> Automorphism:
        return Automorphism(self.splitting, inverse_matrix(self.entries))

    @classmethod
    def identity(cls, split: SplittingType) -> Automorphism:
        r = split.rank
        return cls(split, tuple(
            tuple(Section.constant(split.m[i] - split.m[j], 1 if i == j else 0)
                  if split.m[i] >= split.m[j] else Section.zero(split.m[i] - split.m[j])
                  for j in range(r)) for i in range(r)))


@dataclass(frozen=True)
class CharCoeffs:
    rho: tuple[Section, ...]

    def __post_init__(self):
        for k, s in enumerate(self.rho, start=1):
            if s.twist != 2 * k:
                raise ValueError(f"rho_{k} must be a section of O({2 * k}), got O({s.twist})")

    def __len__(self) -> int:
        return len(self.rho)

    def __getitem__(self, k: int) -> Section:
        return self.rho[k]

    def to_json(self) -> list:
        return [s.to_json() for s in self.rho]


# -- matrices of sections -------------------------------------------------------

def _perm_sign(perm: Sequence[int]) -> int:
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _leibniz(entries: Matrix, rows: Sequence[int], cols: Sequence[int], twist: int) -> Section:
    total = Section.zero(twist)
    for perm in itertools.permutations(range(len(cols))):
        term = None
        for k, p in enumerate(perm):
            e = entries[rows[k]][cols[p]]
            if e.is_zero():
                term = None
                break
            term = e if term is None else term * e
        if term is None:
            continue
        total = total + (term if _perm_sign(perm) > 0 else -term)
    return total


def det(entries: Matrix, offset: int) -> Section:
    """Determinant of a square matrix whose entries have twist m_i - m_j + offset."""
    r = len(entries)
    return _leibniz(entries, range(r), range(r), r * offset)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    r = len(a)
    out = []
    for i in range(r):
        row = []
        for k in range(r):
            acc = a[i][0] * b[0][k]
            for j in range(1, r):
                acc = acc + a[i][j] * b[j][k]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def inverse_matrix(entries: Matrix) -> Matrix:
    """Inverse of an automorphism matrix via the adjugate (det is a constant)."""
    r = len(entries)
    d = det(entries, 0).coeffs[0]
    if d == 0:
        raise ValueError("matrix is not invertible")
    if r == 1:
        return ((Section.constant(0, 1 / d),),)
    out = [[None] * r for _ in range(r)]
    for i, j in itertools.product(range(r), repeat=2):
        rows = [k for k in range(r) if k != i]
        cols = [k for k in range(r) if k != j]
        twist = entries[j][i].twist
        minor = _leibniz(entries, rows, cols, twist)
        cof = minor if (i + j) % 2 == 0 else -minor
        out[j][i] = cof / d
    return tuple(tuple(row) for row in out)


# -- operations ---------------------------------------------------------------

def first_violation(t: SplittingType):
    """First consecutive pair (m_i, m_{i+1}) with m_i > m_{i+1} + 2, or None."""
    for a, b in zip(t.m, t.m[1:]):
        if a > b + 2:
            return (a, b)
    return None


def admits_semistable(t: SplittingType) -> bool:
    return first_violation(t) is None


def canonical_stable_higgs(t: SplittingType) -> HiggsField:
    """Subdiagonal ones and z in the top-right corner; no invariant subbundles."""
    r = t.rank
    if r < 2:
        raise ValueError("the canonical field needs rank at least 2")
    if not admits_semistable(t):
        raise ValueError(f"splitting {t.m} admits no semistable Higgs field")
    rows = []
    for i in range(r):
        row = []
        for j in range(r):
            tw = t.entry_twist(i, j)
            if i == j + 1:
                row.append(Section.constant(tw, 1))
            elif i == 0 and j == r - 1:
                row.append(Section.monomial(tw, 1))
            else:
                row.append(Section.zero(tw))
        rows.append(tuple(row))
    return HiggsField(t, tuple(rows))


def char_coeffs(phi: HiggsField) -> CharCoeffs:
    """rho_k = (-1)^(k+1) * (sum of principal k x k minors of phi)."""
    r = phi.rank
    rho = []
    for k in range(1, r + 1):
        acc = Section.zero(2 * k)
        for subset in itertools.combinations(range(r), k):
            acc = acc + _leibniz(phi.entries, subset, subset, 2 * k)
        rho.append(acc if k % 2 == 1 else -acc)
    return CharCoeffs(tuple(rho))


def charpoly_u0(phi: HiggsField) -> list[list[Fraction]]:
    """det(yI - phi) over U0, as coefficients in y of polynomials in z."""
    rho = char_coeffs(phi).rho
    r = phi.rank
    out = [None] * (r + 1)
    out[r] = [Fraction(1)]
    for k, s in enumerate(rho, start=1):
        out[r - k] = [-c for c in s.coeffs]
    return out


def format_charpoly(phi: HiggsField) -> str:
    terms = []
    for power, zpoly in enumerate(charpoly_u0(phi)):
        if not any(zpoly):
            continue
        body = format_poly(zpoly, "z")
        mono = "" if power == 0 else ("y" if power == 1 else f"y^{power}")
        if not mono:
            terms.append(body)
        elif body == "1":
            terms.append(mono)
        else:
            terms.append(f"({body}){mono}")
    return " + ".join(terms) if terms else "0"


def conjugate(phi: HiggsField, psi: Automorphism) -> HiggsField:
    if phi.splitting != psi.splitting:
        raise ValueError("Higgs field and automorphism live on different bundles")
    out = matmul(matmul(psi.entries, phi.entries), inverse_matrix(psi.entries))
    return HiggsField(phi.splitting, out)


def trace(phi: HiggsField) -> Section:
    acc = Section.zero(2)
    for i in range(phi.rank):
        acc = acc + phi.entries[i][i]
    return acc


def trace_split(phi: HiggsField) -> tuple[Section, HiggsField]:
    """Split phi into (tr phi, phi - (1/r) tr(phi) Id)."""
    t = trace(phi)
    r = phi.rank
    shift = t / r
    rows = tuple(tuple(phi.entries[i][j] - shift if i == j else phi.entries[i][j]
                       for j in range(r)) for i in range(r))
    return t, HiggsField(phi.splitting, rows)


def reassemble(tr: Section, traceless: HiggsField) -> HiggsField:
    r = traceless.rank
    shift = tr / r
    rows = tuple(tuple(traceless.entries[i][j] + shift if i == j else traceless.entries[i][j]
                       for j in range(r)) for i in range(r))
    return HiggsField(traceless.splitting, rows)


def twist_bundle(phi: HiggsField, n: int) -> HiggsField:
    """Tensor E by O(n); entry twists m_i - m_j + 2 are unchanged."""
    return HiggsField(phi.splitting.shifted(n), phi.entries)


def spectral_smooth_r2(rho: CharCoeffs) -> bool:
    """True iff the quartic rho_2 has four distinct zeros on P^1."""
    if len(rho) != 2:
        raise ValueError("spectral_smooth_r2 is a rank-2 criterion")
    if not rho[0].is_zero():
        raise ValueError("expected trace-free characteristic data (rho_1 = 0)")
    if rho[1].is_zero():
        return False
    return squarefree_info(rho[1]).is_squarefree

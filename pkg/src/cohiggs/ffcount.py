"""Point counts of chain components over prime fields.

For a component (U_1, ..., U_n) the stable chains phi_i: U_i -> U_{i+1}(2)
over F_q form a set on which Aut(U_1) x ... x Aut(U_n) acts with stabilizer
exactly the scalars.  The orbit count, a polynomial in q for a pure component,
becomes the Poincare polynomial after q -> x^2.

Stability is decided honestly on concrete F_q data: every candidate sub-chain
(per block: zero, everything, or a saturated sub-line of a rank-2 block) is
tested for phi-compatibility and slope.  Two counting methods share that test:

* ``brute``: enumerate every chain tuple (small spaces only);
* ``grouped``: partition chain tuples by the data stability depends on (which
  maps vanish, the degrees of image and kernel lines in rank-2 blocks, and
  whether an image line equals a kernel line), count each class in closed
  form and test one representative per class.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .chains import ChainComponent, PoincarePolynomial

DEFAULT_PRIMES = (2, 3, 5, 7, 11)
BRUTE_LIMIT = 300_000


class CostGuardError(ValueError):
    """The requested count is outside the supported size."""


class FitError(ArithmeticError):
    """Counts are not fitted by an integral, nonnegative polynomial in q."""


# -- binary forms over F_p ---------------------------------------------------------

Poly = tuple[int, ...]


def _trim(f: Sequence[int]) -> list[int]:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmul(f: Sequence[int], g: Sequence[int], p: int, length: int) -> Poly:
    """Product of two sections, padded to ``length`` coefficients."""
    out = [0] * length
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] = (out[i + j] + a * b) % p
    return tuple(out)


def _pgcd_degree(f: Sequence[int], g: Sequence[int], p: int) -> int:
    a, b = _trim(f), _trim(g)
    while b:
        inv = pow(b[-1], p - 2, p)
        while len(a) >= len(b):
            c = a[-1] * inv % p
            shift = len(a) - len(b)
            for k, x in enumerate(b):
                a[k + shift] = (a[k + shift] - c * x) % p
            a = _trim(a)
        a, b = b, a
    return len(a) - 1


def coprime(f: Sequence[int], g: Sequence[int], p: int) -> bool:
    """No common zero on P^1 (the zero form vanishes everywhere)."""
    top_f = f[-1] % p if f else 0
    top_g = g[-1] % p if g else 0
    if top_f == 0 and top_g == 0:
        return False
    if not any(f) and not any(g):
        return False
    return _pgcd_degree(f, g, p) <= 0


def _h0(n: int) -> int:
    return max(0, n + 1)


def _normalized_vectors(length: int, p: int):
    """Nonzero vectors of F_p^length whose first nonzero entry is 1."""
    for lead in range(length):
        for tail in itertools.product(range(p), repeat=length - lead - 1):
            yield (0,) * lead + (1,) + tail


@lru_cache(maxsize=None)
def sub_lines(a: int, b: int, e: int, p: int) -> tuple[tuple[Poly, Poly], ...]:
    """Saturated sub-line bundles O(e) of O(a) + O(b), as coprime (f, g) up to scalar."""
    n1, n2 = _h0(a - e), _h0(b - e)
    out = []
    for v in _normalized_vectors(n1 + n2, p):
        f, g = v[:n1], v[n1:]
        if coprime(f, g, p):
            out.append((f, g))
    return tuple(out)


def coprime_pair_count(m1: int, m2: int, q: int) -> int:
    """Pairs (f, g) of binary forms of degrees m1, m2 over F_q without common zero."""
    return _coprime_pairs(m1, m2, q)


@lru_cache(maxsize=None)
def _coprime_pairs(m1: int, m2: int, q: int) -> int:
    if m1 < 0 and m2 < 0:
        return 0
    total = q ** (_h0(m1) + _h0(m2)) - 1
    t = 1
    while m1 - t >= 0 or m2 - t >= 0:
        total -= (q ** (t + 1) - 1) // (q - 1) * _coprime_pairs(m1 - t, m2 - t, q)
        t += 1
    return total


def line_count(a: int, b: int, e: int, q: int) -> int:
    """Number of saturated O(e) inside O(a) + O(b) over F_q."""
    c = coprime_pair_count(a - e, b - e, q)
    assert c % (q - 1) == 0
    return c // (q - 1)


# -- automorphisms ---------------------------------------------------------------

def gl_order(m: int, q: int) -> int:
    return math.prod(q ** m - q ** k for k in range(m))


def aut_order(splitting: Sequence[int], q: int) -> int:
    """|Aut(O(a_1) + ... + O(a_k))| over F_q."""
    dim_end = sum(max(0, y - x + 1) for x in splitting for y in splitting)
    mult = [len(list(g)) for _, g in itertools.groupby(sorted(splitting))]
    levi = sum(m * m for m in mult)
    return q ** (dim_end - levi) * math.prod(gl_order(m, q) for m in mult)


# -- chains over F_p ---------------------------------------------------------------

@dataclass(frozen=True)
class FFChain:
    """Concrete chain maps: ``maps[i][j][k]`` is the (target j, source k) entry of phi_i."""

    splittings: tuple[tuple[int, ...], ...]
    maps: tuple
    p: int


def map_entry_twist(src: int, dst: int) -> int:
    return dst - src + 2


def chain_space_dimension(c: ChainComponent) -> int:
    return c.chain_map_dimension()


def _apply(m, col: Sequence[Poly], src: Sequence[int], dst: Sequence[int], p: int,
           col_twists: Sequence[int]) -> list[Poly]:
    """phi applied to a column of sections; results are U0 coefficient tuples."""
    out = []
    for j, b in enumerate(dst):
        acc = None
        for k, a in enumerate(src):
            entry = m[j][k]
            if not any(entry) or not any(col[k]):
                continue
            length = len(entry) + len(col[k]) - 1
            prod = _pmul(entry, col[k], p, length)
            if acc is None:
                acc = list(prod)
            else:
                if len(prod) > len(acc):
                    acc += [0] * (len(prod) - len(acc))
                for t, x in enumerate(prod):
                    acc[t] = (acc[t] + x) % p
        out.append(tuple(_trim(acc)) if acc is not None else ())
    return out


def _cross_zero(w: Sequence[Poly], u: tuple[Poly, Poly], p: int) -> bool:
    """w_1 u_2 - w_2 u_1 == 0."""
    lhs = _trim(_pmul(w[0], u[1], p, len(w[0]) + len(u[1])) if w[0] and u[1] else [])
    rhs = _trim(_pmul(w[1], u[0], p, len(w[1]) + len(u[0])) if w[1] and u[0] else [])
    return lhs == rhs


# A sub-object choice for one block: (rank, degree, columns) with columns None
# for "everything" and a single (f, g) for a sub-line of a rank-2 block.
ZERO, FULL, LINE = 0, 1, 2


def _compatible(chain: FFChain, i: int, ci, cj) -> bool:
    """phi_i maps the choice ci in block i into the choice cj in block i+1."""
    kind_i, kind_j = ci[0], cj[0]
    if kind_i == ZERO or kind_j == FULL:
        return True
    src, dst = chain.splittings[i], chain.splittings[i + 1]
    m, p = chain.maps[i], chain.p
    if kind_i == FULL:
        cols = []
        for k in range(len(src)):
            col = [()] * len(src)
            col[k] = (1,)
            cols.append(col)
    else:
        cols = [list(ci[3])]
    for col in cols:
        w = _apply(m, col, src, dst, p, ())
        if kind_j == ZERO:
            if any(w):
                return False
        elif not _cross_zero(w, cj[3], p):
            return False
    return True


def is_stable(chain: FFChain) -> bool:
    """Honest test: no proper nonzero phi-compatible sub-chain of slope >= mu."""
    spl = chain.splittings
    r = sum(len(s) for s in spl)
    d = sum(sum(s) for s in spl)
    mu = Fraction(d, r)
    n = len(spl)
    if n == 1:
        return len(spl[0]) == 1

    # Best possible contribution deg - mu * rank of each block, for line pruning.
    best = []
    for s in spl:
        cand = [Fraction(0), sum(s) - mu * len(s)]
        if len(s) == 2:
            cand.append(max(s) - mu)
        best.append(max(cand))

    options = []
    for i, s in enumerate(spl):
        opts = [(ZERO, 0, 0, None), (FULL, len(s), sum(s), None)]
        if len(s) == 2:
            a, b = s
            slack = sum(best) - best[i]
            e_min = math.ceil(mu - slack)
            for e in range(a, e_min - 1, -1):
                opts.extend((LINE, 1, e, line) for line in sub_lines(a, b, e, chain.p))
        elif len(s) > 2:
            raise CostGuardError("blocks of rank >= 3 are not supported")
        options.append(opts)

    for choice in itertools.product(*options):
        rank = sum(c[1] for c in choice)
        if rank == 0 or rank == r:
            continue
        if Fraction(sum(c[2] for c in choice), rank) < mu:
            continue
        if all(_compatible(chain, i, choice[i], choice[i + 1]) for i in range(n - 1)):
            return False
    return True


# -- counting ------------------------------------------------------------------

def _check_component(c: ChainComponent, q: int) -> None:
    if any(len(s) > 2 for s in c.splittings):
        raise CostGuardError("counting supports block ranks <= 2 only")
    if q < 2 or any(q % k == 0 for k in range(2, math.isqrt(q) + 1)):
        raise ValueError(f"{q} is not prime")


def _entry_spaces(spl):
    shapes = []
    for i in range(len(spl) - 1):
        for j, b in enumerate(spl[i + 1]):
            for k, a in enumerate(spl[i]):
                shapes.append((i, j, k, _h0(b - a + 2)))
    return shapes


def _assemble(spl, entries: dict) -> tuple:
    maps = []
    for i in range(len(spl) - 1):
        maps.append(tuple(tuple(entries.get((i, j, k), ()) for k in range(len(spl[i])))
                          for j in range(len(spl[i + 1]))))
    return tuple(maps)


def _orbits(c: ChainComponent, stable: int, q: int) -> int:
    aut = math.prod(aut_order(s, q) for s in c.splittings)
    num = stable * (q - 1)
    if num % aut:
        raise AssertionError(f"{c.key} at q={q}: {stable} stable chains do not form free orbits")
    return num // aut


def count_stable_brute(c: ChainComponent, q: int, limit: int = BRUTE_LIMIT) -> int:
    _check_component(c, q)
    spl = c.splittings
    shapes = _entry_spaces(spl)
    dim = sum(s[3] for s in shapes)
    if q ** dim > limit:
        raise CostGuardError(f"{q}^{dim} chain tuples exceed the brute-force limit {limit}")
    stable = 0
    for flat in itertools.product(range(q), repeat=dim):
        entries, pos = {}, 0
        for i, j, k, h in shapes:
            entries[(i, j, k)] = tuple(flat[pos:pos + h])
            pos += h
        if is_stable(FFChain(spl, _assemble(spl, entries), q)):
            stable += 1
    return _orbits(c, stable, q)


def _map_options(src, dst, q):
    """Stability-relevant classes of one map, as (tag, weight_without_lines)."""
    opts = [(("zero",), 1)]
    if len(src) == 1 and len(dst) == 1:
        h = _h0(dst[0] - src[0] + 2)
        if h:
            opts.append((("nz",), q ** h - 1))
    elif len(src) == 1:
        (c,), (a, b) = src, dst
        for e in range(c - 2, a + 1):
            opts.append((("img", e), q ** (e - c + 3) - 1))
    elif len(dst) == 1:
        (a, b), (c,) = src, dst
        for e in range(a + b - c - 2, a + 1):
            opts.append((("ker", e), q ** (e - (a + b - c - 2) + 1) - 1))
    else:
        return None
    return opts


def _line_reps(a, b, e, q, how_many):
    lines = sub_lines(a, b, e, q)
    return lines[:how_many]


def count_stable_grouped(c: ChainComponent, q: int) -> int:
    _check_component(c, q)
    spl = c.splittings
    n = len(spl)
    per_map = [_map_options(spl[i], spl[i + 1], q) for i in range(n - 1)]
    if any(o is None for o in per_map):
        return count_stable_brute(c, q)
    stable = 0
    for combo in itertools.product(*per_map):
        weight = math.prod(w for _, w in combo)
        # line data per rank-2 block: incoming image degree and outgoing kernel degree
        blocks = []
        for j, s in enumerate(spl):
            if len(s) != 2:
                blocks.append(None)
                continue
            img = combo[j - 1][0][1] if j > 0 and combo[j - 1][0][0] == "img" else None
            ker = combo[j][0][1] if j < n - 1 and combo[j][0][0] == "ker" else None
            blocks.append((img, ker))
        variants = [[]]
        for j, info in enumerate(blocks):
            if info is None or info == (None, None):
                variants = [v + [(j, None, None, 1)] for v in variants]
                continue
            a, b = spl[j]
            img, ker = info
            new = []
            if img is None or ker is None:
                e = img if img is not None else ker
                n_e = line_count(a, b, e, q)
                if n_e:
                    line = _line_reps(a, b, e, q, 1)[0]
                    new = [(line if img is not None else None,
                            line if ker is not None else None, n_e)]
            else:
                n_i, n_k = line_count(a, b, img, q), line_count(a, b, ker, q)
                if img == ker and n_i:
                    l1 = _line_reps(a, b, img, q, 2)
                    new.append((l1[0], l1[0], n_i))
                    if n_i >= 2:
                        new.append((l1[0], l1[1], n_i * (n_i - 1)))
                elif n_i and n_k:
                    new.append((_line_reps(a, b, img, q, 1)[0],
                                _line_reps(a, b, ker, q, 1)[0], n_i * n_k))
            variants = [v + [(j,) + x] for v in variants for x in new]
        for v in variants:
            w = weight * math.prod(x[3] for x in v)
            if w == 0:
                continue
            chain = _representative(spl, combo, {x[0]: (x[1], x[2]) for x in v}, q)
            if is_stable(chain):
                stable += w
    return _orbits(c, stable, q)


def _representative(spl, combo, lines, q) -> FFChain:
    entries = {}
    for i, (tag, _) in enumerate(combo):
        src, dst = spl[i], spl[i + 1]
        kind = tag[0]
        if kind == "zero":
            continue
        if kind == "nz":
            h = _h0(dst[0] - src[0] + 2)
            entries[(i, 0, 0)] = (1,) + (0,) * (h - 1)
        elif kind == "img":
            f, g = lines[i + 1][0]
            for j, part in enumerate((f, g)):
                entries[(i, j, 0)] = _pmul(part, (1,), q, _h0(dst[j] - src[0] + 2))
        else:
            f, g = lines[i][1]
            entries[(i, 0, 0)] = _pmul(tuple((-x) % q for x in g), (1,), q,
                                        _h0(dst[0] - src[0] + 2))
            entries[(i, 0, 1)] = _pmul(f, (1,), q, _h0(dst[0] - src[1] + 2))
    return FFChain(spl, _assemble(spl, entries), q)


def count_stable_chains(c: ChainComponent, q: int, method: str = "grouped") -> int:
    """Number of isomorphism classes of stable chains on the component over F_q."""
    if method == "grouped":
        return count_stable_grouped(c, q)
    if method == "brute":
        return count_stable_brute(c, q)
    raise ValueError(f"unknown counting method {method!r}")


# -- interpolation ---------------------------------------------------------------

def _solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over Q for a square nonsingular system."""
    n = len(rows)
    m = [list(r) + [v] for r, v in zip(rows, rhs)]
    for col in range(n):
        piv = next(k for k in range(col, n) if m[k][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        for k in range(n):
            if k != col and m[k][col] != 0:
                f = m[k][col] / m[col][col]
                m[k] = [x - f * y for x, y in zip(m[k], m[col])]
    return [m[k][n] / m[k][k] for k in range(n)]


def _basis(degree: int, palindromic: bool) -> list[list[int]]:
    """Coefficient vectors (in q) spanning the ansatz."""
    if not palindromic:
        return [[1 if k == j else 0 for k in range(degree + 1)] for j in range(degree + 1)]
    out = []
    for j in range(degree // 2 + 1):
        v = [0] * (degree + 1)
        v[j] += 1
        if degree - j != j:
            v[degree - j] += 1
        out.append(v)
    return out


def fit_q_polynomial(counts: Sequence[tuple[int, int]], degree: int,
                     palindromic: bool = False) -> list[int]:
    """Fit counts by a polynomial of the given degree; every extra point is held out."""
    basis = _basis(degree, palindromic)
    if len(counts) < len(basis) + 1:
        raise ValueError(f"need {len(basis) + 1} primes (one held out), got {len(counts)}")
    fit, held = counts[:len(basis)], counts[len(basis):]
    rows = [[Fraction(sum(v[k] * q ** k for k in range(degree + 1))) for v in basis]
            for q, _ in fit]
    lam = _solve(rows, [Fraction(n) for _, n in fit])
    coeffs = [sum(l * v[k] for l, v in zip(lam, basis)) for k in range(degree + 1)]
    if any(c.denominator != 1 for c in coeffs):
        raise FitError(f"non-integral interpolant {coeffs}")
    poly = [int(c) for c in coeffs]
    if any(c < 0 for c in poly):
        raise FitError(f"negative coefficient in {poly}")
    for q, n in held:
        value = sum(c * q ** k for k, c in enumerate(poly))
        if value != n:
            raise FitError(f"held-out prime {q}: fit gives {value}, count is {n}")
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


@dataclass(frozen=True)
class CountRecord:
    component: str
    counts: tuple[tuple[int, int], ...]
    q_poly: tuple[int, ...]
    poincare: PoincarePolynomial

    def to_json(self) -> dict:
        return {"component": self.component, "counts": [list(x) for x in self.counts],
                "q_poly": list(self.q_poly), "poincare": self.poincare.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> CountRecord:
        rec = cls(data["component"], tuple((int(q), int(n)) for q, n in data["counts"]),
                  tuple(int(x) for x in data["q_poly"]), PoincarePolynomial(data["poincare"]))
        if rec.poincare != PoincarePolynomial.from_q_poly(rec.q_poly):
            raise ValueError(f"record {rec.component}: poincare is not q_poly at q = x^2")
        return rec


def component_poincare_ff(c: ChainComponent, primes: Iterable[int] = DEFAULT_PRIMES,
                          ansatz: str = "auto", method: str = "grouped") -> CountRecord:
    """Count over each prime and fit a polynomial of degree dim(component) in q.

    ``ansatz`` is "general" (all coefficients free), "palindromic" (Poincare
    duality of the compact smooth component) or "auto" (general when enough
    primes are given for one held-out check, palindromic otherwise).
    """
    primes = list(primes)
    if len(set(primes)) != len(primes):
        raise ValueError("primes must be distinct")
    degree = c.dimension()
    if degree < 0:
        raise ValueError(f"{c.key} has negative expected dimension")
    if ansatz == "auto":
        palindromic = len(primes) < degree + 2
    elif ansatz in ("general", "palindromic"):
        palindromic = ansatz == "palindromic"
    else:
        raise ValueError(f"unknown ansatz {ansatz!r}")
    counts = tuple((q, count_stable_chains(c, q, method)) for q in primes)
    poly = fit_q_polynomial(counts, degree, palindromic)
    return CountRecord(c.key, counts, tuple(poly), PoincarePolynomial.from_q_poly(poly))


# -- oracle table ----------------------------------------------------------------

def load_records(path) -> list[CountRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(CountRecord.from_json(json.loads(line)))
    return out


def write_records(path, records: Iterable[CountRecord], append: bool = True) -> None:
    with open(path, "a" if append else "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json(), sort_keys=True) + "\n")


def load_oracle(path) -> dict[str, PoincarePolynomial]:
    table: dict[str, PoincarePolynomial] = {}
    for rec in load_records(path):
        prev = table.setdefault(rec.component, rec.poincare)
        if prev != rec.poincare:
            raise ValueError(f"conflicting oracle entries for {rec.component}")
    return table


def oracle_keys(path) -> set[str]:
    return set(load_oracle(path)) if Path(path).exists() else set()

"""Fixed-point components of the circle action: stable holomorphic chains.

A component is a chain U_1 -> U_2(2) -> ... -> U_n(2(n-1)) of split bundles on
P^1.  Its splitting data is written compactly as a key, e.g. ``"0|0,0|-1"``
for (O | O + O | O(-1)).  Stability uses the slope mu = d / r of the whole
chain; gcd(r, d) = 1 is assumed throughout, so semistable means stable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

MAX_RANK = 5


class UnsupportedError(ValueError):
    """Input outside the supported range (gcd(r, d) != 1, rank too large)."""


class MissingOracleError(LookupError):
    """A mixed-type component needs an externally computed Poincare polynomial."""


# -- polynomials ---------------------------------------------------------------

@dataclass(frozen=True, init=False)
class PoincarePolynomial:
    """Integer polynomial in x; ``coeffs[k]`` is the k-th Betti number."""

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Sequence[int] = ()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def one(cls) -> PoincarePolynomial:
        return cls((1,))

    @classmethod
    def projective_space(cls, m: int) -> PoincarePolynomial:
        """1 + x^2 + ... + x^(2m)."""
        return cls([1 if k % 2 == 0 else 0 for k in range(2 * m + 1)])

    @classmethod
    def from_q_poly(cls, q_coeffs: Sequence[int]) -> PoincarePolynomial:
        """Substitute q = x^2."""
        out = [0] * (2 * len(q_coeffs))
        for k, c in enumerate(q_coeffs):
            out[2 * k] = c
        return cls(out)

    def __add__(self, other: PoincarePolynomial) -> PoincarePolynomial:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return PoincarePolynomial([x + y for x, y in zip(a, b)])

    def __mul__(self, other: PoincarePolynomial) -> PoincarePolynomial:
        if not self.coeffs or not other.coeffs:
            return PoincarePolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return PoincarePolynomial(out)

    def shift(self, k: int) -> PoincarePolynomial:
        """Multiply by x^k."""
        return PoincarePolynomial((0,) * k + self.coeffs) if self.coeffs else self

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_palindromic(self) -> bool:
        return self.coeffs == tuple(reversed(self.coeffs))

    def __call__(self, x):
        return sum(c * x ** k for k, c in enumerate(self.coeffs))

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                mono = "x" if k == 1 else f"x^{k}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> list[int]:
        return list(self.coeffs)


# The published rank-5 value is a known answer only; nothing here derives it.
KNOWN_POINCARE = {
    (2, -1): PoincarePolynomial([1, 0, 1]),
    (3, -1): PoincarePolynomial([1, 0, 1, 0, 3, 0, 4, 0, 3]),
    (4, -1): PoincarePolynomial([1, 0, 1, 0, 3, 0, 5, 0, 9, 0, 13, 0, 18, 0, 22, 0, 20, 0, 10]),
    (5, -1): PoincarePolynomial.from_q_poly(
        [1, 1, 3, 5, 10, 15, 26, 38, 56, 77, 105, 131, 156, 165, 154, 103, 40]),
}


# -- shapes and components -----------------------------------------------------

@dataclass(frozen=True)
class ChainShape:
    rtype: tuple[int, ...]
    dvec: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "rtype", tuple(int(x) for x in self.rtype))
        object.__setattr__(self, "dvec", tuple(int(x) for x in self.dvec))
        if not self.rtype:
            raise ValueError("a chain needs at least one block")
        if len(self.rtype) != len(self.dvec):
            raise ValueError("rtype and dvec must have the same length")
        if any(k < 1 for k in self.rtype):
            raise ValueError("block ranks must be positive")

    @property
    def n(self) -> int:
        return len(self.rtype)

    @property
    def r(self) -> int:
        return sum(self.rtype)

    @property
    def d(self) -> int:
        return sum(self.dvec)


Splittings = tuple[tuple[int, ...], ...]


def _sorted_blocks(splittings) -> Splittings:
    return tuple(tuple(sorted((int(a) for a in s), reverse=True)) for s in splittings)


@dataclass(frozen=True)
class ChainComponent:
    """A fixed-point component, identified by its per-block splittings."""

    splittings: Splittings
    poincare: Optional[PoincarePolynomial] = field(default=None, compare=False)

    def __post_init__(self):
        spl = _sorted_blocks(self.splittings)
        if not spl or any(not s for s in spl):
            raise ValueError("every block needs at least one summand")
        object.__setattr__(self, "splittings", spl)

    @property
    def shape(self) -> ChainShape:
        return ChainShape(tuple(len(s) for s in self.splittings),
                          tuple(sum(s) for s in self.splittings))

    @property
    def morse_index(self) -> int:
        return morse_index(self.shape)

    @property
    def key(self) -> str:
        return "|".join(",".join(str(a) for a in s) for s in self.splittings)

    @classmethod
    def from_key(cls, key: str) -> ChainComponent:
        try:
            blocks = [tuple(int(a) for a in part.split(",")) for part in key.strip().split("|")]
        except ValueError:
            raise ValueError(f"malformed component key {key!r}") from None
        return cls(tuple(blocks))

    def is_line_type(self) -> bool:
        return all(len(s) == 1 for s in self.splittings)

    def chain_map_dimension(self) -> int:
        """dim of the space of maps U_i -> U_{i+1}(2), summed over i."""
        spl = self.splittings
        return sum(max(0, b - a + 3) for i in range(len(spl) - 1)
                   for a in spl[i] for b in spl[i + 1])

    def automorphism_dimension(self) -> int:
        return sum(max(0, y - x + 1) for s in self.splittings for x in s for y in s)

    def dimension(self) -> int:
        """Complex dimension of the component (stable chains modulo automorphisms)."""
        return self.chain_map_dimension() - self.automorphism_dimension() + 1

    def to_json(self) -> dict:
        sh = self.shape
        return {"rtype": list(sh.rtype), "dvec": list(sh.dvec),
                "splittings": [list(s) for s in self.splittings],
                "morse_index": self.morse_index,
                "poincare": self.poincare.to_json() if self.poincare is not None else "external"}

    @classmethod
    def from_json(cls, data: dict) -> ChainComponent:
        p = data.get("poincare", "external")
        comp = cls(tuple(tuple(s) for s in data["splittings"]),
                   None if p == "external" else PoincarePolynomial(p))
        sh = comp.shape
        if list(sh.rtype) != list(data["rtype"]) or list(sh.dvec) != list(data["dvec"]):
            raise ValueError("rtype/dvec disagree with the splittings")
        if "morse_index" in data and data["morse_index"] != comp.morse_index:
            raise ValueError("stored Morse index disagrees with the shape")
        return comp


# -- Morse indices -------------------------------------------------------------

def morse_index(shape: ChainShape) -> int:
    """Closed form in terms of ranks and degrees of the blocks."""
    r, d, n = shape.rtype, shape.dvec, shape.n
    beta = 0
    if n > 2:
        beta += 4 * sum(r[i] * r[j] for i in range(n) for j in range(i + 2, n))
    if n > 1:
        beta -= 2 * sum(-r[i + 1] * d[i] + r[i] * d[i + 1] + r[i] * r[i + 1]
                        for i in range(n - 1))
    return beta


def _h0(n: int) -> int:
    return max(0, n + 1)


def _h1(n: int) -> int:
    return max(0, -n - 1)


def _weight_piece(spl: Splittings, w: int, twist: int) -> list[int]:
    """Line-bundle degrees of (sum_i Hom(U_i, U_{i+w})) (twist)."""
    return [b - a + twist for i in range(len(spl) - w) for a in spl[i] for b in spl[i + w]]


def morse_index_cohomological(c: ChainComponent) -> int:
    """Index from the cohomology of the positive-weight parts of End E.

    beta = 2 * (h0_{>=2}(End E(2)) - h0_{>=1}(End E) + h1_{>=1}(End E) - h1_{>=2}(End E(2))),
    the factor 2 converting complex to real dimension.
    """
    spl = c.splittings
    n = len(spl)
    pos1 = [deg for w in range(1, n) for deg in _weight_piece(spl, w, 0)]
    pos2 = [deg for w in range(2, n) for deg in _weight_piece(spl, w, 2)]
    total = (sum(_h0(x) for x in pos2) - sum(_h0(x) for x in pos1)
             + sum(_h1(x) for x in pos1) - sum(_h1(x) for x in pos2))
    return 2 * total


# -- census ----------------------------------------------------------------------

def _check_rd(r: int, d: int, max_rank: int = MAX_RANK) -> None:
    if r < 1:
        raise UnsupportedError("rank must be positive")
    if r > max_rank:
        raise UnsupportedError(f"rank {r} exceeds the supported maximum {max_rank}")
    if math.gcd(r, d) != 1:
        raise UnsupportedError(f"gcd({r}, {d}) != 1: strictly semistable walls are unsupported")


def stable_degree_vectors_1n(r: int, d: int, margin: int = 0) -> list[tuple[int, ...]]:
    """Degree vectors of stable chains of line bundles L_1 -> ... -> L_r.

    Conditions: every map nonzero (d_{i+1} - d_i + 2 >= 0) and every trailing
    sub-chain L_k -> ... -> L_r has slope < d/r.  Window exhaustiveness: each
    trailing condition with k = r gives d_r < d/r, and the leading complement
    L_1 + ... + L_{k-1} then has slope > d/r; combined with steps of at most
    +2 rightwards this pins every d_i within 2(r - 1) of d/r.  ``margin``
    widens the window for the self-check.
    """
    _check_rd(r, d)
    mu = Fraction(d, r)
    lo = math.ceil(mu) - 2 * (r - 1) - margin
    hi = math.floor(mu) + 2 * (r - 1) + margin
    out = []
    for head in itertools.product(range(lo, hi + 1), repeat=r - 1):
        last = d - sum(head)
        if not lo <= last <= hi:
            continue
        v = head + (last,)
        if any(v[i + 1] - v[i] + 2 < 0 for i in range(r - 1)):
            continue
        if all(Fraction(sum(v[k:]), r - k) < mu for k in range(1, r)):
            out.append(v)
    return sorted(out, reverse=True)


def compositions(r: int):
    if r == 0:
        yield ()
        return
    for k in range(1, r + 1):
        for rest in compositions(r - k):
            yield (k,) + rest


def _block_splittings(rank: int, lo: int, hi: int, total: Optional[int] = None):
    for t in itertools.combinations_with_replacement(range(hi, lo - 1, -1), rank):
        if total is None or sum(t) == total:
            yield t


def _closed_subset_destabilizes(spl: Splittings, mu: Fraction) -> bool:
    """Some proper set of summands closed under every possible map has slope >= mu.

    O(a) in block i can map nontrivially to O(b)(2) in block i+1 iff b - a + 2 >= 0.
    """
    nodes = [(i, a) for i, s in enumerate(spl) for a in s]
    succ = [[k for k, (j, b) in enumerate(nodes) if j == i + 1 and b - a + 2 >= 0]
            for i, a in nodes]
    n = len(nodes)
    for mask in range(1, (1 << n) - 1):
        members = [k for k in range(n) if mask >> k & 1]
        if all(mask >> m & 1 for k in members for m in succ[k]):
            if Fraction(sum(nodes[k][1] for k in members), len(members)) >= mu:
                return True
    return False


def _line_forward_destabilizes(spl: Splittings, mu: Fraction) -> bool:
    """A summand O(a) generates an invariant sub-chain of lines that always destabilizes.

    The image of O(a) in the next block is a line of degree >= a - 2, its image
    in the following block has degree >= a - 4, and so on.  Each truncation of
    this sequence is a candidate sub-chain; the tuple is rejected when every
    possible truncation has slope >= mu.  Propagation stops when the map is
    forced to vanish or when the lower bound exceeds every summand ahead.
    """
    n = len(spl)
    r = sum(len(s) for s in spl)
    for i in range(n):
        for a in set(spl[i]):
            bounds = [a]
            j = i
            destabilizes = True
            while True:
                # the whole chain is not a proper sub-chain
                if len(bounds) == r or Fraction(sum(bounds), len(bounds)) < mu:
                    destabilizes = False
                    break
                if j == n - 1:
                    break
                if all(b + 2 < bounds[-1] for b in spl[j + 1]):
                    break
                nxt = bounds[-1] - 2
                if nxt > max(spl[j + 1]):
                    break
                bounds.append(nxt)
                j += 1
            if destabilizes:
                return True
    return False


def _kernel_destabilizes(spl: Splittings, mu: Fraction) -> bool:
    """A map from a block to a block of smaller rank has a destabilizing kernel.

    If the image has rank rho, the kernel K (rank k = r_i - rho) has degree at
    least deg U_i - (top rho summands of U_{i+1}) - 2 rho, so it contains a
    subsheaf of rank j and slope >= ceil(j D / k) / j; K, padded by zero
    blocks, is an invariant sub-chain.
    """
    for i in range(len(spl) - 1):
        ri, rn = len(spl[i]), len(spl[i + 1])
        if ri <= rn:
            continue
        deg = sum(spl[i])
        top = sorted(spl[i + 1], reverse=True)
        always = True
        for rho in range(rn + 1):
            k = ri - rho
            bound = deg - sum(top[:rho]) - 2 * rho
            best = max(Fraction(math.ceil(Fraction(j * bound, k)), j) for j in range(1, k + 1))
            if best < mu:
                always = False
                break
        if always:
            return True
    return False


_RULES = (_closed_subset_destabilizes, _line_forward_destabilizes, _kernel_destabilizes)


def dual_splittings(spl: Splittings) -> Splittings:
    """Dualize then twist by O(-1): O(a) -> O(-a-1), block order reversed."""
    return tuple(tuple(sorted((-a - 1 for a in s), reverse=True)) for s in reversed(spl))


def admits_stable_chain(spl: Splittings) -> bool:
    """Degree-forced test: False when every chain on this tuple is unstable.

    Each rule is also applied to the dual tuple, since stability is preserved
    under dualizing.
    """
    spl = _sorted_blocks(spl)
    r = sum(len(s) for s in spl)
    d = sum(sum(s) for s in spl)
    dual = dual_splittings(spl)
    for tup, mu in ((spl, Fraction(d, r)), (dual, Fraction(-d - r, r))):
        if any(rule(tup, mu) for rule in _RULES):
            return False
    return True


def _degree_vectors(rtype: Sequence[int], d: int, lo: int, hi: int):
    ranges = [range(k * lo, k * hi + 1) for k in rtype[:-1]]
    for head in itertools.product(*ranges):
        last = d - sum(head)
        if rtype[-1] * lo <= last <= rtype[-1] * hi:
            yield head + (last,)


def enumerate_components(r: int, d: int, max_rank: int = MAX_RANK,
                         margin: int = 0) -> list[ChainComponent]:
    """All tuples (U_1, ..., U_n) of split bundles that carry stable chains.

    Single-block tuples only occur for r = 1 (the zero Higgs field).  Summand
    degrees are searched in [ceil(d/r) - 2r, floor(d/r) + 2r], widened by
    ``margin`` for the exhaustiveness self-check.
    """
    _check_rd(r, d, max_rank)
    mu = Fraction(d, r)
    lo = math.ceil(mu) - 2 * r - margin
    hi = math.floor(mu) + 2 * r + margin
    out = []
    for rtype in compositions(r):
        if len(rtype) == 1 and r > 1:
            continue
        for dvec in _degree_vectors(rtype, d, lo, hi):
            blocks = [list(_block_splittings(k, lo, hi, dk)) for k, dk in zip(rtype, dvec)]
            for spl in itertools.product(*blocks):
                if admits_stable_chain(spl):
                    out.append(ChainComponent(spl))
    return sorted(out, key=_sort_key)


def _sort_key(c: ChainComponent):
    sh = c.shape
    return (sh.rtype, sh.dvec, c.splittings)


# -- Poincare polynomials --------------------------------------------------------

Oracle = Mapping[str, PoincarePolynomial]


def closed_form_poincare(c: ChainComponent) -> Optional[PoincarePolynomial]:
    """Known closed forms: chains of lines, and the rank-3 point with a rank-2 block."""
    if c.is_line_type():
        dv = c.shape.dvec
        p = PoincarePolynomial.one()
        for i in range(len(dv) - 1):
            p = p * PoincarePolynomial.projective_space(-dv[i] + dv[i + 1] + 2)
        return p
    # the single point (O + O -> O(-1)) and its dual (O -> O(-1) + O(-1))
    if ((0, 0), (-1,)) in (c.splittings, dual_splittings(c.splittings)):
        return PoincarePolynomial.one()
    return None


def component_poincare(c: ChainComponent, oracle: Optional[Oracle] = None) -> PoincarePolynomial:
    p = closed_form_poincare(c)
    if p is not None:
        return p
    if oracle is not None and c.key in oracle:
        return oracle[c.key]
    raise MissingOracleError(f"no Poincare polynomial for mixed component {c.key}")


def missing_oracle_keys(r: int, d: int, oracle: Optional[Oracle] = None) -> list[str]:
    return [c.key for c in enumerate_components(r, d)
            if closed_form_poincare(c) is None and (oracle is None or c.key not in oracle)]


def poincare_series(r: int, d: int, oracle: Optional[Oracle] = None,
                    components: Optional[Sequence[ChainComponent]] = None) -> PoincarePolynomial:
    """Sum over components of x^index times the component polynomial."""
    comps = enumerate_components(r, d) if components is None else components
    total = PoincarePolynomial()
    for c in comps:
        total = total + component_poincare(c, oracle).shift(c.morse_index)
    return total


def dualize(c: ChainComponent) -> ChainComponent:
    """Dual-and-twist: takes components for degree d to components for degree -d - r."""
    return ChainComponent(dual_splittings(c.splittings), c.poincare)

"""Homology product structure constants dual to a formal group law.

The degree-2k generator beta_k is dual to the k-th power of the orientation
class, so the product expands as

    beta_i * beta_j = sum_k c_ij^k beta_k,   c_ij^k = [x^i y^j] F(x,y)^k.

Two independent routes compute the same numbers: series powers (the table
builder below) and direct enumeration of k-part compositions of (i, j)
(composition_sum).  Their agreement, together with the closed form for the
law x + y + t*xy, is the backbone of the verification suite.

Elements of the free module on {beta_0, beta_1, ...} are plain dicts
index -> coefficient with zero entries omitted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial

from .exactalg import PolyRing
from .fgl import CutoffError, FormalGroupLaw
from .series import TruncatedSeries


@dataclass(frozen=True)
class PontryaginTable:
    """Structure constants c_ij^k for 0 <= i, j <= max_index, i + j <= cutoff."""

    fgl_name: str
    max_index: int
    cutoff: int
    ring: object
    entries: dict = field(repr=False)

    def entry(self, i: int, j: int, k: int):
        if i + j > self.cutoff or i > self.max_index or j > self.max_index:
            raise CutoffError(
                f"c_{i}{j}^{k} outside table (max_index={self.max_index}, cutoff={self.cutoff})"
            )
        return self.entries.get((i, j, k), self.ring.zero)

    def row(self, i: int, j: int) -> dict:
        """beta_i * beta_j as a module element."""
        out = {}
        for k in range(i + j + 1):
            c = self.entry(i, j, k)
            if not self.ring.is_zero(c):
                out[k] = c
        return out

    def product(self, left: dict, right: dict) -> dict:
        """Product of two module elements through the table."""
        ring = self.ring
        out = {}
        for i, a in left.items():
            for j, b in right.items():
                ab = a * b
                if ring.is_zero(ab):
                    continue
                for k, c in self.row(i, j).items():
                    acc = out.get(k, ring.zero) + ab * c
                    if ring.is_zero(acc):
                        out.pop(k, None)
                    else:
                        out[k] = acc
        return out

    def sorted_entries(self):
        return sorted(self.entries.items())


def structure_constants(law: FormalGroupLaw, max_index: int) -> PontryaginTable:
    """Table of c_ij^k = [x^i y^j] F^k via iterated series products.

    Entries are stored for i, j <= max_index with i + j <= the law's cutoff;
    k runs to i + j (beyond that every coefficient vanishes because F has no
    constant term).
    """
    if law.cutoff < max_index:
        raise CutoffError(
            f"law cutoff {law.cutoff} is too small for max_index {max_index}"
        )
    ring = law.ring
    f = law.series.aligned(("x", "y"))
    entries = {}
    # k = 0: F^0 = 1.
    entries[(0, 0, 0)] = ring.one
    power = TruncatedSeries.constant(ring, ring.one, ("x", "y"), law.cutoff)
    top = min(2 * max_index, law.cutoff)
    for k in range(1, top + 1):
        power = power * f
        for (i, j), coeff in power.terms.items():
            if i <= max_index and j <= max_index and k <= i + j:
                entries[(i, j, k)] = coeff
    return PontryaginTable(law.name, max_index, law.cutoff, ring, entries)


def composition_sum(law: FormalGroupLaw, i: int, j: int, k: int):
    """c_ij^k by enumerating k-part compositions of i and j.

    Sums the products alpha_{a_1 b_1} * ... * alpha_{a_k b_k} over all
    ordered tuples with sum(a) = i, sum(b) = j.  Pairs with alpha = 0 are
    pruned; shared suffixes are memoized, which changes nothing about what
    is enumerated, only how often.
    """
    ring = law.ring
    if i + j > law.cutoff:
        raise CutoffError("composition sum beyond the law cutoff")
    pairs = [
        ((a, b), coeff)
        for (a, b), coeff in sorted(law.alpha.items())
        if coeff and not ring.is_zero(coeff)
    ]
    memo = {}

    def rec(slots, ri, rj):
        if slots == 0:
            return ring.one if (ri == 0 and rj == 0) else ring.zero
        if ri + rj < slots:  # every slot contributes a + b >= 1
            return ring.zero
        key = (slots, ri, rj)
        if key in memo:
            return memo[key]
        total = ring.zero
        for (a, b), coeff in pairs:
            if a <= ri and b <= rj:
                tail = rec(slots - 1, ri - a, rj - b)
                if not ring.is_zero(tail):
                    total = total + coeff * tail
        memo[key] = total
        return total

    return rec(k, i, j)


def k_theory_closed_form(i: int, j: int) -> dict:
    """Product of the degree-2i and degree-2j K-homology generators.

    Returns {k: coefficient in Z[t]} with the coefficient of Y_k equal to
    t^(i+j) * C(k, 2k-(i+j)) * C(2k-(i+j), k-j), k = max(i,j) .. i+j.
    Matching beta_k <-> t^k Y_k, this must agree with the brute-force table
    of the law x + y + t*xy.
    """
    if i < 0 or j < 0:
        raise ValueError("indices must be nonnegative")
    ring = PolyRing(("t",), (2,))
    if i == 0 and j == 0:
        return {0: ring.one}
    out = {}
    for k in range(max(i, j), i + j + 1):
        m = 2 * k - (i + j)
        c = comb(k, m) * comb(m, k - j)
        if c:
            out[k] = ring.monomial((i + j,), c)
    return out


@dataclass(frozen=True)
class DualEndomorphism:
    """Homology action dual to the cohomology substitution c -> s(c).

    matrix[n][k] = [x^n] s(x)^k, so beta_n maps to sum_k matrix[n][k] beta_k.
    Lower-triangular because s has no constant term.
    """

    source: TruncatedSeries
    max_index: int
    matrix: tuple

    def image(self, n: int) -> dict:
        ring = self.source.ring
        return {
            k: c
            for k, c in enumerate(self.matrix[n])
            if not ring.is_zero(c)
        }


def dual_endomorphism(s: TruncatedSeries, max_index: int) -> DualEndomorphism:
    ring = s.ring
    if not ring.is_zero(s.constant_term()):
        raise ValueError("substitution series must vanish at 0")
    if s.cutoff < max_index:
        raise CutoffError("series cutoff too small for the requested index range")
    name = s.variables[0] if len(s.variables) == 1 else None
    if name is None:
        raise ValueError("substitution series must be one-variable")
    rows = [[ring.zero] * (max_index + 1) for _ in range(max_index + 1)]
    rows[0][0] = ring.one
    power = TruncatedSeries.constant(ring, ring.one, (name,), s.cutoff)
    for k in range(1, max_index + 1):
        power = power * s
        for (n,), coeff in power.terms.items():
            if n <= max_index:
                rows[n][k] = coeff
    return DualEndomorphism(s, max_index, tuple(tuple(r) for r in rows))


def beta1_power(table: PontryaginTable, n: int) -> dict:
    """n-fold product of beta_1 with itself; leading coefficient is n!."""
    if n < 1:
        raise ValueError("power must be >= 1")
    if table.max_index < n or table.cutoff < n:
        raise CutoffError("table too small to expand the n-th power")
    ring = table.ring
    vec = {1: ring.one}
    for _ in range(n - 1):
        vec = table.product(vec, {1: ring.one})
    return vec


def leading_factorial(table: PontryaginTable, n: int) -> bool:
    """Whether beta_1^n has leading coefficient exactly n! on beta_n."""
    vec = beta1_power(table, n)
    return vec.get(n, table.ring.zero) == table.ring.promote(factorial(n))

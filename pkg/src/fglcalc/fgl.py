"""Formal group laws, the universal law, and the Lazard ring as lattices.

A formal group law over a ring R is a two-variable series F with

    F(x,0) = F(0,x) = x,   F(x,y) = F(y,x),   F(x,F(y,z)) = F(F(x,y),z),

all up to the working cutoff.  The universal law is built from its logarithm
l(x) = x + m1*x^2 + m2*x^3 + ... over Q[m1,m2,...] (weight of m_i is 2i) as
F = l^{-1}(l(x) + l(y)); its coefficient of x^i y^j is homogeneous of weight
2(i+j-1).

The subring generated by those coefficients is a graded integer lattice
inside Q[m]: per weight 2k we span all products of coefficients of total
weight 2k, write them in the monomial basis, and take the Hermite normal
form.  Membership in the degree-2k lattice is then an exact coordinate
computation.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .exactalg import (
    QQ,
    GradedPoly,
    IntMatrix,
    NOT_IN_LATTICE,
    PolyRing,
    clear_denominators,
    hnf,
    rational_coords,
)
from .series import TruncatedSeries

CATALOG_NAMES = ("additive", "multiplicative", "multiplicative-t", "universal")

LOG_CONVENTION = "log"


class CutoffError(ValueError):
    """Requested data beyond the series cutoff."""


@dataclass(frozen=True)
class FormalGroupLaw:
    """A two-variable truncated series with its coefficient table."""

    name: str
    ring_tag: str
    cutoff: int
    series: TruncatedSeries
    alpha: dict = field(repr=False)

    @property
    def ring(self):
        return self.series.ring

    def coefficient(self, i: int, j: int):
        """alpha_ij, the coefficient of x^i y^j."""
        if i + j > self.cutoff:
            raise CutoffError(f"alpha_{i}{j} lies beyond cutoff {self.cutoff}")
        return self.alpha.get((i, j), self.ring.zero)

    def truncate(self, cutoff: int) -> "FormalGroupLaw":
        cutoff = min(cutoff, self.cutoff)
        return _law(self.name, self.ring_tag, self.series.truncate(cutoff))


def _alpha_table(series: TruncatedSeries):
    table = {}
    aligned = series.aligned(("x", "y"))
    for (i, j), coeff in aligned.terms.items():
        table[(i, j)] = coeff
    return table


def _law(name, ring_tag, series) -> FormalGroupLaw:
    return FormalGroupLaw(name, ring_tag, series.cutoff, series, _alpha_table(series))


def additive_fgl(cutoff: int) -> FormalGroupLaw:
    x = TruncatedSeries.variable(QQ, "x", cutoff)
    y = TruncatedSeries.variable(QQ, "y", cutoff)
    return _law("additive", "Q", x + y)


def multiplicative_fgl(cutoff: int) -> FormalGroupLaw:
    """x + y + xy with unit coefficient."""
    x = TruncatedSeries.variable(QQ, "x", cutoff)
    y = TruncatedSeries.variable(QQ, "y", cutoff)
    return _law("multiplicative", "Z", x + y + x * y)


def multiplicative_t_fgl(cutoff: int) -> FormalGroupLaw:
    """x + y + t*xy over Z[t] with t of weight 2."""
    ring = PolyRing(("t",), (2,))
    x = TruncatedSeries.variable(ring, "x", cutoff)
    y = TruncatedSeries.variable(ring, "y", cutoff)
    return _law("multiplicative-t", "Z[t]", x + y + (x * y).scale(ring.gen(0)))


def universal_ring(cutoff: int) -> PolyRing:
    n = max(cutoff - 1, 0)
    return PolyRing(
        tuple(f"m{i}" for i in range(1, n + 1)),
        tuple(2 * i for i in range(1, n + 1)),
    )


def universal_log(cutoff: int) -> TruncatedSeries:
    """l(x) = x + m1*x^2 + ... + m_{cutoff-1}*x^cutoff."""
    ring = universal_ring(cutoff)
    terms = {(1,): ring.one}
    for i in range(1, cutoff):
        terms[(i + 1,)] = ring.gen(i - 1)
    return TruncatedSeries(ring, ("x",), cutoff, terms)


def universal_fgl(cutoff: int) -> FormalGroupLaw:
    """The universal law F = l^{-1}(l(x) + l(y)) over Q[m1..m_{cutoff-1}]."""
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    log = universal_log(cutoff)
    log_inv = log.reversion()
    lx = log
    ly = log.rename_variable("x", "y")
    series = log_inv.substitute({"x": lx + ly})
    return _law("universal", universal_ring(cutoff).tag, series)


_BUILDERS = {
    "additive": additive_fgl,
    "multiplicative": multiplicative_fgl,
    "multiplicative-t": multiplicative_t_fgl,
    "universal": universal_fgl,
}


def catalog(name: str, cutoff: int) -> FormalGroupLaw:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown formal group law {name!r}; choose from {CATALOG_NAMES}")
    return builder(cutoff)


# ---------------------------------------------------------------------------
# Axiom checking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomCheck:
    name: str
    passed: bool
    first_failure: str | None = None


def _first_offender(diff: TruncatedSeries) -> str | None:
    if not diff.terms:
        return None
    exps, coeff = min(diff.sorted_terms(), key=lambda item: (sum(item[0]), item[0]))
    mono = "*".join(
        v if e == 1 else f"{v}^{e}" for v, e in zip(diff.variables, exps) if e
    ) or "1"
    return f"{mono}: {diff.ring.element_to_text(coeff)}"


def check_axioms(law: FormalGroupLaw) -> list[AxiomCheck]:
    """Unitality, commutativity, associativity up to the law's cutoff."""
    f = law.series.aligned(("x", "y"))
    ring = law.ring
    cutoff = law.cutoff
    x = TruncatedSeries.variable(ring, "x", cutoff)
    y = TruncatedSeries.variable(ring, "y", cutoff)
    zero_x = TruncatedSeries.zero(ring, ("x",), cutoff)
    zero_y = TruncatedSeries.zero(ring, ("y",), cutoff)

    checks = []

    diff = f.substitute({"y": zero_y.aligned(("y",))}) - x
    checks.append(AxiomCheck("left-unit", not diff.terms, _first_offender(diff)))

    diff = f.substitute({"x": zero_x}) - y
    checks.append(AxiomCheck("right-unit", not diff.terms, _first_offender(diff)))

    swapped = f.rename_variable("x", "z").rename_variable("y", "x").rename_variable("z", "y")
    diff = f - swapped
    checks.append(AxiomCheck("commutativity", not diff.terms, _first_offender(diff)))

    f_yz = f.rename_variable("y", "z").rename_variable("x", "y")
    lhs = f.substitute({"y": f_yz})
    z = TruncatedSeries.variable(ring, "z", cutoff)
    rhs = f.substitute({"x": f, "y": z})
    diff = lhs - rhs
    checks.append(AxiomCheck("associativity", not diff.terms, _first_offender(diff)))
    return checks


# ---------------------------------------------------------------------------
# Logarithms and the universality map
# ---------------------------------------------------------------------------


def logarithm(law: FormalGroupLaw) -> TruncatedSeries:
    """One-variable l with l(F(x,y)) = l(x) + l(y), via l'(x) = 1/F_y(x,0).

    Needs exact division by integers, so the coefficient ring must be a
    Q-algebra (all catalog rings are).
    """
    f = law.series.aligned(("x", "y"))
    ring = law.ring
    # dF/dy at y = 0: collect j * alpha_{i,1} ... only j = 1 survives y = 0.
    terms = {}
    for (i, j), coeff in f.terms.items():
        if j == 1:
            terms[(i,)] = coeff
    fy0 = TruncatedSeries(ring, ("x",), max(law.cutoff - 1, 0), terms)
    return fy0.inverse_unit().integral()


def log_images(law: FormalGroupLaw) -> dict:
    """Images m_i -> [x^{i+1}] logarithm(law), the universality assignment."""
    log = logarithm(law)
    return {
        f"m{i}": log.coefficient(x=i + 1) for i in range(1, law.cutoff)
    }


def specialize(universal: FormalGroupLaw, images: dict, target_ring, name="specialized") -> FormalGroupLaw:
    """Apply the ring map m_i -> images['m_i'] to every coefficient."""
    series = universal.series.map_coefficients(
        lambda c: c.evaluate(images, target_ring), ring=target_ring
    )
    return _law(name, target_ring.tag, series)


# ---------------------------------------------------------------------------
# Lazard lattices
# ---------------------------------------------------------------------------


def weight_monomials(ring: PolyRing, k: int):
    """Exponent tuples of weight-2k monomials (sum i*e_i = k), graded-lex order."""
    n = len(ring.names)

    def rec(idx, remaining):
        if idx == n:
            if remaining == 0:
                yield ()
            return
        w = (idx + 1)  # generator m_{idx+1} carries weight 2(idx+1)
        for e in range(remaining // w + 1):
            for rest in rec(idx + 1, remaining - e * w):
                yield (e,) + rest

    return sorted(rec(0, k))


def _alpha_generators(law: FormalGroupLaw, max_weight: int):
    """Nontrivial coefficients alpha_ij (i,j >= 1) of weight <= 2*max_weight."""
    out = []
    for i in range(1, law.cutoff):
        for j in range(1, law.cutoff):
            w = i + j - 1
            if w <= max_weight and i + j <= law.cutoff:
                coeff = law.alpha.get((i, j))
                if coeff is not None and coeff:
                    out.append(((i, j), w, coeff))
    out.sort(key=lambda item: (item[1], item[0]))
    return out


def _products_of_weight(generators, k):
    """All multiset products of generators with weights summing to k."""

    def rec(start, remaining):
        if remaining == 0:
            yield []
            return
        for idx in range(start, len(generators)):
            (_, w, _) = generators[idx]
            if w > remaining:
                continue
            for rest in rec(idx, remaining - w):
                yield [idx] + rest

    for combo in rec(0, k):
        yield combo


@dataclass(frozen=True)
class DegreeLattice:
    """Lattice of the weight-2k part: rows of basis/denominator in the
    monomial coordinates returned by weight_monomials."""

    k: int
    monomials: tuple
    denominator: int
    basis: IntMatrix | None  # None for the zero lattice

    @property
    def rank(self) -> int:
        return self.basis.nrows if self.basis is not None else 0

    def coords(self, poly: GradedPoly):
        """Lattice coordinates of a weight-2k polynomial, or NOT_IN_LATTICE."""
        vec = [poly.coefficient(m) for m in self.monomials]
        if self.basis is None:
            return () if not any(vec) else NOT_IN_LATTICE
        scaled = [Fraction(v) * self.denominator for v in vec]
        coords = rational_coords(self.basis, scaled)
        if coords is None or any(q.denominator != 1 for q in coords):
            return NOT_IN_LATTICE
        return tuple(int(q) for q in coords)

    def rational_coordinates(self, poly: GradedPoly):
        """Q-coordinates relative to the lattice basis (None if outside span)."""
        vec = [Fraction(poly.coefficient(m)) * self.denominator for m in self.monomials]
        if self.basis is None:
            return () if not any(vec) else None
        return rational_coords(self.basis, vec)

    def element(self, row: int, ring: PolyRing) -> GradedPoly:
        """The row-th basis vector as a polynomial."""
        terms = {}
        for mono, entry in zip(self.monomials, self.basis.rows[row]):
            if entry:
                terms[mono] = Fraction(entry, self.denominator)
        return GradedPoly(ring, terms)


@dataclass(frozen=True)
class LazardLattice:
    """Per-degree bases of the coefficient subring, up to weight 2*max_index."""

    convention: str
    max_index: int
    ring: PolyRing
    degrees: dict = field(repr=False)

    def degree(self, k: int) -> DegreeLattice:
        if k not in self.degrees:
            raise CutoffError(f"lattice only computed through k = {self.max_index}")
        return self.degrees[k]

    def ranks(self) -> dict:
        return {k: self.degrees[k].rank for k in sorted(self.degrees)}


def lazard_basis(max_index: int, law: FormalGroupLaw | None = None) -> LazardLattice:
    """Hermite bases of the degree-2k coefficient lattices for k <= max_index.

    Every product of law coefficients of total weight 2k is expanded in the
    weight-2k monomial basis; the integer row span (after clearing the common
    denominator) is reduced to Hermite normal form.
    """
    if law is None:
        law = universal_fgl(max_index + 1)
    if law.cutoff < max_index + 1:
        raise CutoffError("need the universal law at cutoff max_index + 1")
    ring = law.ring
    generators = _alpha_generators(law, max_index)
    degrees = {}
    unit_monos = weight_monomials(ring, 0)
    degrees[0] = DegreeLattice(0, tuple(unit_monos), 1, IntMatrix([[1]]))
    for k in range(1, max_index + 1):
        monomials = weight_monomials(ring, k)
        index = {m: pos for pos, m in enumerate(monomials)}
        vectors = []
        seen = set()
        for combo in _products_of_weight(generators, k):
            prod = ring.one
            for idx in combo:
                prod = prod * generators[idx][2]
            vec = [0] * len(monomials)
            for exps, coeff in prod.terms.items():
                vec[index[exps]] = coeff
            key = tuple(vec)
            if key not in seen and any(vec):
                seen.add(key)
                vectors.append(vec)
        if not vectors:
            degrees[k] = DegreeLattice(k, tuple(monomials), 1, None)
            continue
        denom, scaled = clear_denominators(vectors)
        h = hnf(IntMatrix(scaled)).h
        rows = [row for row in h.rows if any(row)]
        basis = IntMatrix(rows) if rows else None
        degrees[k] = DegreeLattice(k, tuple(monomials), denom, basis)
    return LazardLattice(LOG_CONVENTION, max_index, ring, degrees)


def membership(lattice: LazardLattice, poly: GradedPoly, k: int | None = None):
    """Coordinates of a homogeneous polynomial in its degree lattice.

    Returns a coordinate tuple or NOT_IN_LATTICE; raises on inhomogeneous
    input or a degree beyond the computed range.
    """
    if not poly.is_homogeneous():
        raise ValueError("membership needs a homogeneous polynomial")
    w = poly.weight()
    if w is None:
        if k is None:
            return ()
    else:
        if w % 2:
            raise ValueError("odd weight cannot occur in this grading")
        if k is not None and k != w // 2:
            raise ValueError(f"polynomial has weight {w}, not 2*{k}")
        k = w // 2
    return lattice.degree(k).coords(poly)


# ---------------------------------------------------------------------------
# Cache (fgl.json)
# ---------------------------------------------------------------------------

CACHE_ENV = "FGL_CACHE_DIR"
CACHE_FILENAME = "fgl.json"


def cache_dir() -> str | None:
    return os.environ.get(CACHE_ENV)


def save_cache(path, law: FormalGroupLaw, lattice: LazardLattice) -> None:
    ring = law.ring
    payload = {
        "convention": lattice.convention,
        "cutoff": law.cutoff,
        "max_index": lattice.max_index,
        "generators": list(ring.names),
        "weights": list(ring.weights),
        "alpha": {
            f"{i},{j}": law.alpha[(i, j)].to_json()
            for (i, j) in sorted(law.alpha)
        },
        "lattices": {
            str(k): {
                "monomials": [list(m) for m in d.monomials],
                "denominator": d.denominator,
                "basis": d.basis.to_json() if d.basis is not None else None,
            }
            for k, d in sorted(lattice.degrees.items())
        },
    }
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))


def load_cache(path):
    """(universal law, lattice) from fgl.json, or None if absent/unusable."""
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return None
    if payload.get("convention") != LOG_CONVENTION:
        return None
    cutoff = payload["cutoff"]
    ring = PolyRing(tuple(payload["generators"]), tuple(payload["weights"]))
    terms = {}
    for key, data in payload["alpha"].items():
        i, j = (int(p) for p in key.split(","))
        coeff = GradedPoly.from_json(ring, data)
        if coeff:
            terms[(i, j)] = coeff
    series = TruncatedSeries(ring, ("x", "y"), cutoff, terms)
    law = _law("universal", ring.tag, series)
    degrees = {}
    for key, data in payload["lattices"].items():
        k = int(key)
        basis = IntMatrix(data["basis"]) if data["basis"] is not None else None
        degrees[k] = DegreeLattice(
            k, tuple(tuple(m) for m in data["monomials"]), data["denominator"], basis
        )
    lattice = LazardLattice(LOG_CONVENTION, payload["max_index"], ring, degrees)
    return law, lattice


def cached_lazard(max_index: int, directory: str | None = None, refresh: bool = False):
    """Load (law, lattice) covering max_index from cache, else compute and save.

    The cache key is (convention, cutoff); a cached file with a larger cutoff
    serves smaller requests via truncation coherence.
    """
    directory = directory if directory is not None else cache_dir()
    path = os.path.join(directory, CACHE_FILENAME) if directory else None
    if path and not refresh:
        loaded = load_cache(path)
        if loaded is not None:
            law, lattice = loaded
            if lattice.max_index >= max_index and law.cutoff >= max_index + 1:
                return law, lattice, True
    law = universal_fgl(max_index + 1)
    lattice = lazard_basis(max_index, law)
    if path:
        save_cache(path, law, lattice)
    return law, lattice, False

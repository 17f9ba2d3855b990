"""Exact arithmetic foundation.

Arbitrary-precision integers and rationals, sparse multivariate polynomials
graded by generator weights, two-variable Laurent polynomials, and integer
matrices with Hermite normal form and lattice membership.

Every value is immutable after construction and all arithmetic is exact:
no floats, no rounding, no modular shortcuts anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import NamedTuple

# Scalars are python ints or Fractions (always reduced, positive denominator).
# Fractions with unit denominator are collapsed to int so that the hot paths
# stay on native integer arithmetic.
ExactInt = int
ExactRat = Fraction


def normalize_scalar(value):
    if isinstance(value, bool):
        raise TypeError("bool is not an exact scalar")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else value
    raise TypeError(f"not an exact scalar: {value!r}")


def as_fraction(value) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


def scalar_to_json(value):
    f = as_fraction(value)
    return {"numerator": f.numerator, "denominator": f.denominator}


def scalar_from_json(obj):
    return normalize_scalar(Fraction(obj["numerator"], obj["denominator"]))


def scalar_to_text(value) -> str:
    f = as_fraction(value)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


class RingMismatchError(ValueError):
    """Raised when operands live in different coefficient rings."""


class RationalRing:
    """The rationals as a coefficient ring (elements: int | Fraction)."""

    zero = 0
    one = 1
    tag = "Q"

    def promote(self, value):
        return normalize_scalar(value)

    def is_zero(self, element) -> bool:
        return element == 0

    def divide_exact(self, element, n: int):
        return normalize_scalar(as_fraction(element) / n)

    def element_to_json(self, element):
        return scalar_to_json(element)

    def element_from_json(self, obj):
        return scalar_from_json(obj)

    def element_to_text(self, element) -> str:
        return scalar_to_text(element)

    def __eq__(self, other):
        return isinstance(other, RationalRing)

    def __hash__(self):
        return hash("RationalRing")

    def __repr__(self):
        return "QQ"


QQ = RationalRing()


# ---------------------------------------------------------------------------
# Graded sparse polynomials
# ---------------------------------------------------------------------------


class PolyRing:
    """Polynomial ring over Q with weighted generators.

    Generator weights must be positive and even; the weighted degree of a
    monomial is sum(exponent * weight).  Serialization order is graded
    lexicographic by generator index, so text and JSON forms are byte-stable.
    """

    def __init__(self, names, weights):
        names = tuple(names)
        weights = tuple(int(w) for w in weights)
        if len(names) != len(weights):
            raise ValueError("one weight per generator required")
        if len(set(names)) != len(names):
            raise ValueError("generator names must be distinct")
        if any(w <= 0 or w % 2 for w in weights):
            raise ValueError("generator weights must be positive even integers")
        self.names = names
        self.weights = weights
        self.zero = GradedPoly(self, {})
        self.one = GradedPoly(self, {(0,) * len(names): 1})

    @property
    def tag(self) -> str:
        if not self.names:
            return "Q"
        return "Q[" + ",".join(self.names) + "]"

    def gen(self, index: int) -> "GradedPoly":
        exps = [0] * len(self.names)
        exps[index] = 1
        return GradedPoly(self, {tuple(exps): 1})

    def monomial(self, exps, coeff=1) -> "GradedPoly":
        return GradedPoly(self, {tuple(exps): normalize_scalar(coeff)})

    def constant(self, value) -> "GradedPoly":
        return GradedPoly(self, {(0,) * len(self.names): normalize_scalar(value)})

    def promote(self, value) -> "GradedPoly":
        if isinstance(value, GradedPoly):
            if value.ring != self:
                raise RingMismatchError("generator mismatch")
            return value
        return self.constant(value)

    def is_zero(self, element) -> bool:
        return not element.terms

    def divide_exact(self, element, n: int) -> "GradedPoly":
        return element * Fraction(1, n)

    def monomial_weight(self, exps) -> int:
        return sum(e * w for e, w in zip(exps, self.weights))

    def element_to_json(self, element):
        return element.to_json()

    def element_from_json(self, obj):
        return GradedPoly.from_json(self, obj)

    def element_to_text(self, element) -> str:
        return element.to_text()

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.names == other.names
            and self.weights == other.weights
        )

    def __hash__(self):
        return hash((self.names, self.weights))

    def __repr__(self):
        return f"PolyRing({self.tag})"


class GradedPoly:
    """Sparse polynomial: exponent tuple -> nonzero exact coefficient."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms):
        clean = {}
        for exps, coeff in terms.items():
            coeff = normalize_scalar(coeff)
            if coeff:
                clean[tuple(exps)] = coeff
        self.ring = ring
        self.terms = clean

    def _check(self, other) -> "GradedPoly":
        if not isinstance(other, GradedPoly):
            raise TypeError(f"expected GradedPoly, got {other!r}")
        if other.ring != self.ring:
            raise RingMismatchError("generator mismatch")
        return other

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        other = self._check(other)
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            terms[exps] = terms.get(exps, 0) + coeff
        return GradedPoly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return GradedPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = normalize_scalar(other)
            if not other:
                return self.ring.zero
            return GradedPoly(self.ring, {e: c * other for e, c in self.terms.items()})
        other = self._check(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                terms[key] = terms.get(key, 0) + c1 * c2
        return GradedPoly(self.ring, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = self.ring.one
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, GradedPoly) or other.ring != self.ring:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), 0)

    def is_homogeneous(self) -> bool:
        weights = {self.ring.monomial_weight(e) for e in self.terms}
        return len(weights) <= 1

    def weight(self):
        """Weighted degree of a homogeneous polynomial (None for 0)."""
        weights = {self.ring.monomial_weight(e) for e in self.terms}
        if not weights:
            return None
        if len(weights) > 1:
            raise ValueError("polynomial is not homogeneous")
        return weights.pop()

    def homogeneous_parts(self):
        parts = {}
        for exps, coeff in self.terms.items():
            w = self.ring.monomial_weight(exps)
            parts.setdefault(w, {})[exps] = coeff
        return {w: GradedPoly(self.ring, t) for w, t in sorted(parts.items())}

    def max_weight(self) -> int:
        return max((self.ring.monomial_weight(e) for e in self.terms), default=0)

    def evaluate(self, images: dict, target_ring):
        """Apply the ring map generator -> images[name] into target_ring."""
        missing = [n for n in self.ring.names if n not in images]
        if missing:
            raise ValueError(f"no image for generators {missing}")
        total = target_ring.zero
        for exps, coeff in sorted(self.terms.items()):
            term = target_ring.promote(coeff)
            for name, e in zip(self.ring.names, exps):
                if e:
                    img = target_ring.promote(images[name])
                    for _ in range(e):
                        term = term * img
            total = total + term
        return total

    def sorted_terms(self):
        return sorted(
            self.terms.items(),
            key=lambda item: (self.ring.monomial_weight(item[0]), item[0]),
        )

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for exps, coeff in self.sorted_terms():
            factors = [scalar_to_text(abs(coeff))]
            for name, e in zip(self.ring.names, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            term = "*".join(factors)
            if not chunks:
                chunks.append(term if coeff > 0 else f"-{term}")
            else:
                chunks.append(f"+ {term}" if coeff > 0 else f"- {term}")
        return " ".join(chunks)

    def to_json(self):
        return [
            {"exponents": list(exps), **scalar_to_json(coeff)}
            for exps, coeff in self.sorted_terms()
        ]

    @classmethod
    def from_json(cls, ring: PolyRing, data) -> "GradedPoly":
        terms = {}
        for item in data:
            exps = tuple(item["exponents"])
            terms[exps] = Fraction(item["numerator"], item["denominator"])
        return cls(ring, terms)

    def __repr__(self):
        return f"GradedPoly({self.to_text()})"


# ---------------------------------------------------------------------------
# Laurent polynomials in u, v
# ---------------------------------------------------------------------------


class LaurentUV:
    """Finitely supported Laurent polynomial in commuting u, v over Q."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        clean = {}
        for exps, coeff in terms.items():
            coeff = normalize_scalar(coeff)
            if coeff:
                a, b = exps
                clean[(int(a), int(b))] = coeff
        self.terms = clean

    @classmethod
    def monomial(cls, a: int, b: int, coeff=1) -> "LaurentUV":
        return cls({(a, b): coeff})

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentUV({(0, 0): other})
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            terms[exps] = terms.get(exps, 0) + coeff
        return LaurentUV(terms)

    __radd__ = __add__

    def __neg__(self):
        return LaurentUV({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentUV({(0, 0): other})
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = normalize_scalar(other)
            if not other:
                return LaurentUV({})
            return LaurentUV({e: c * other for e, c in self.terms.items()})
        terms = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (a1 + a2, b1 + b2)
                terms[key] = terms.get(key, 0) + c1 * c2
        return LaurentUV(terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentUV({(0, 0): other})
        if not isinstance(other, LaurentUV):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def coefficient(self, a: int, b: int):
        return self.terms.get((a, b), 0)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: (sum(item[0]), item[0]))

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for (a, b), coeff in self.sorted_terms():
            factors = [scalar_to_text(abs(coeff))]
            if a:
                factors.append("u" if a == 1 else f"u^{a}")
            if b:
                factors.append("v" if b == 1 else f"v^{b}")
            term = "*".join(factors)
            if not chunks:
                chunks.append(term if coeff > 0 else f"-{term}")
            else:
                chunks.append(f"+ {term}" if coeff > 0 else f"- {term}")
        return " ".join(chunks)

    def to_json(self):
        return [
            {"u": a, "v": b, **scalar_to_json(coeff)}
            for (a, b), coeff in self.sorted_terms()
        ]

    def __repr__(self):
        return f"LaurentUV({self.to_text()})"


LAURENT_U = LaurentUV.monomial(1, 0)
LAURENT_V = LaurentUV.monomial(0, 1)
# First co-operation element (v - u)/2, the degree-2 piece used by the
# coaction computation.
LAURENT_P1 = (LAURENT_V - LAURENT_U) * Fraction(1, 2)


# ---------------------------------------------------------------------------
# Integer matrices, Hermite normal form, lattice coordinates
# ---------------------------------------------------------------------------


class NotInLattice:
    """Sentinel returned when a vector lies outside the row lattice."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NotInLattice"

    def __bool__(self):
        return False


NOT_IN_LATTICE = NotInLattice()


class IntMatrix:
    """Dense rectangular matrix of exact integers."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(int(x) for x in row) for row in rows)
        if not rows:
            raise ValueError("matrix must be nonempty")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise ValueError("ragged rows")
        self.rows = rows

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError("dimension mismatch")
        cols = list(zip(*other.rows))
        return IntMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.rows]
        )

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self.rows]})"

    def to_json(self):
        return [list(r) for r in self.rows]


class HNFResult(NamedTuple):
    h: IntMatrix
    u: IntMatrix


def hnf(matrix: IntMatrix) -> HNFResult:
    """Row Hermite normal form: returns (H, U) with H = U * M, U unimodular.

    Classical exact row reduction; pivots positive, entries above each pivot
    reduced into [0, pivot).  Zero rows (if any) end up at the bottom.
    """
    m = [list(row) for row in matrix.rows]
    nrows, ncols = len(m), len(m[0])
    u = [[int(i == j) for j in range(nrows)] for i in range(nrows)]

    def row_sub(i, j, q):
        # row_i -= q * row_j in both m and u
        if q:
            m[i] = [a - q * b for a, b in zip(m[i], m[j])]
            u[i] = [a - q * b for a, b in zip(u[i], u[j])]

    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        while True:
            live = [i for i in range(row, nrows) if m[i][col]]
            if not live:
                break
            best = min(live, key=lambda i: abs(m[i][col]))
            if best != row:
                m[row], m[best] = m[best], m[row]
                u[row], u[best] = u[best], u[row]
            settled = True
            for i in range(row + 1, nrows):
                if m[i][col]:
                    row_sub(i, row, m[i][col] // m[row][col])
                    if m[i][col]:
                        settled = False
            if settled:
                break
        if not m[row][col]:
            continue
        if m[row][col] < 0:
            m[row] = [-x for x in m[row]]
            u[row] = [-x for x in u[row]]
        for i in range(row):
            row_sub(i, row, m[i][col] // m[row][col])
        row += 1
    return HNFResult(IntMatrix(m), IntMatrix(u))


def row_basis(matrix: IntMatrix) -> IntMatrix | None:
    """Nonzero rows of the HNF: an independent basis of the row lattice.

    Returns None for the zero matrix.
    """
    h = hnf(matrix).h
    rows = [row for row in h.rows if any(row)]
    return IntMatrix(rows) if rows else None


def det(matrix: IntMatrix) -> int:
    """Determinant by fraction-free Bareiss elimination."""
    n = matrix.nrows
    if n != matrix.ncols:
        raise ValueError("determinant needs a square matrix")
    m = [list(row) for row in matrix.rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if not m[k][k]:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def rational_coords(basis: IntMatrix, vector):
    """Solve x * basis = vector over Q; None when vector is outside the span.

    Requires the basis rows to be linearly independent (raises otherwise).
    Vector entries may be int or Fraction.
    """
    r, c = basis.nrows, basis.ncols
    if len(vector) != c:
        raise ValueError("dimension mismatch")
    aug = [
        [as_fraction(basis.rows[i][j]) for i in range(r)] + [as_fraction(vector[j])]
        for j in range(c)
    ]
    row = 0
    for x in range(r):
        pivot = next((e for e in range(row, c) if aug[e][x]), None)
        if pivot is None:
            raise ValueError("basis rows are linearly dependent")
        aug[row], aug[pivot] = aug[pivot], aug[row]
        pv = aug[row][x]
        aug[row] = [q / pv for q in aug[row]]
        for e in range(c):
            if e != row and aug[e][x]:
                f = aug[e][x]
                aug[e] = [a - f * b for a, b in zip(aug[e], aug[row])]
        row += 1
    for e in range(row, c):
        if aug[e][r]:
            return None
    return tuple(aug[i][r] for i in range(r))


def lattice_coords(basis: IntMatrix, vector):
    """Integer coordinates of vector in the row lattice, or NOT_IN_LATTICE."""
    coords = rational_coords(basis, vector)
    if coords is None:
        return NOT_IN_LATTICE
    if any(q.denominator != 1 for q in coords):
        return NOT_IN_LATTICE
    return tuple(int(q) for q in coords)


def clear_denominators(vectors):
    """Common denominator D and the integer matrix D * vectors."""
    denoms = [as_fraction(x).denominator for row in vectors for x in row]
    d = lcm(*denoms) if denoms else 1
    scaled = [[int(as_fraction(x) * d) for x in row] for row in vectors]
    return d, scaled

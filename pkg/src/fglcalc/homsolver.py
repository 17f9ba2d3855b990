"""Degree-by-degree solver for formal group law homomorphisms.

A homomorphism g between laws F and G is a one-variable series with
g(0) = 0 and g(F(x,y)) = G(g(x), g(y)).  Writing g = sum g_k x^k, the
coefficient of x^i y^j (i, j >= 1, i + j = n) of the defining equation is

    sum_{k <= n} g_k * c_ij^k  =  [x^i y^j] G(g(x), g(y)),

where c_ij^k are the structure constants of F.  The unknown g_n enters
through c_ij^n = C(n, i), so the equation at (1, n-1) determines g_n over
the rationals and the remaining positions become consistency constraints.

g_1 is the free seed.  It is either a concrete ring element (parameter
search) or a polynomial in integer parameters; in the graded lattice mode
g_k must be homogeneous of weight 2k and lie in the degree-2k lattice, in
the bounded-ungraded mode g_k ranges over the lattice part of weight at
most 2*weight_bound.  Lattice membership of a parameter polynomial turns
into integrality constraints on its coordinate polynomials; those plus the
equation residuals cut down the surviving parameter set.

The module also houses the two scalar obstructions used alongside the
solver: minimal witnesses for n! not dividing lambda^n, and the fixed
two-sided coaction computation in the Laurent ring whose equality forces
its integer parameter to vanish.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iter_product
from math import comb, factorial, lcm

from .exactalg import (
    NOT_IN_LATTICE,
    LAURENT_U,
    LAURENT_V,
    GradedPoly,
    LaurentUV,
    RingMismatchError,
    as_fraction,
    normalize_scalar,
    scalar_to_json,
    scalar_to_text,
)
from .fgl import CutoffError, FormalGroupLaw, LazardLattice
from .pontryagin import PontryaginTable, structure_constants
from .series import TruncatedSeries


class InconsistentAtDegreeError(ValueError):
    def __init__(self, degree, position, residual_text):
        self.degree = degree
        self.position = position
        self.residual_text = residual_text
        super().__init__(
            f"no solution at degree {degree}, position {position}: residual {residual_text}"
        )


# ---------------------------------------------------------------------------
# Polynomials in integer parameters over a base coefficient ring
# ---------------------------------------------------------------------------


class ParamRing:
    """Coefficient ring extended by commuting integer parameters."""

    def __init__(self, base, params):
        self.base = base
        self.params = tuple(params)
        self.zero = ParamPoly(self, {})
        self.one = ParamPoly(self, {(0,) * len(self.params): base.one})

    @property
    def tag(self):
        if not self.params:
            return self.base.tag
        return f"{self.base.tag}[{','.join(self.params)}]"

    def gen(self, index: int) -> "ParamPoly":
        exps = [0] * len(self.params)
        exps[index] = 1
        return ParamPoly(self, {tuple(exps): self.base.one})

    def promote(self, value) -> "ParamPoly":
        if isinstance(value, ParamPoly):
            if value.ring != self:
                raise RingMismatchError("parameter ring mismatch")
            return value
        return ParamPoly(self, {(0,) * len(self.params): self.base.promote(value)})

    def is_zero(self, element) -> bool:
        return not element.terms

    def divide_exact(self, element, n: int) -> "ParamPoly":
        return ParamPoly(
            self,
            {e: self.base.divide_exact(c, n) for e, c in element.terms.items()},
        )

    def element_to_json(self, element):
        return element.to_json()

    def element_from_json(self, obj):
        terms = {
            tuple(item["parameters"]): self.base.element_from_json(item["coefficient"])
            for item in obj
        }
        return ParamPoly(self, terms)

    def element_to_text(self, element):
        return element.to_text()

    def __eq__(self, other):
        return (
            isinstance(other, ParamRing)
            and self.base == other.base
            and self.params == other.params
        )

    def __hash__(self):
        return hash(("ParamRing", self.base, self.params))


class ParamPoly:
    """Sparse polynomial: parameter exponent tuple -> base ring element."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: ParamRing, terms):
        base = ring.base
        clean = {}
        for exps, coeff in terms.items():
            if not base.is_zero(coeff):
                clean[tuple(exps)] = coeff
        self.ring = ring
        self.terms = clean

    def __add__(self, other):
        other = self.ring.promote(other)
        terms = dict(self.terms)
        base = self.ring.base
        for exps, coeff in other.terms.items():
            if exps in terms:
                s = terms[exps] + coeff
                if base.is_zero(s):
                    del terms[exps]
                else:
                    terms[exps] = s
            else:
                terms[exps] = coeff
        return ParamPoly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self.ring.promote(other))

    def __mul__(self, other):
        other = self.ring.promote(other)
        terms = {}
        base = self.ring.base
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                if key in terms:
                    terms[key] = terms[key] + prod
                else:
                    terms[key] = prod
        return ParamPoly(self.ring, terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, ParamPoly):
            return self.ring == other.ring and self.terms == other.terms
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def constant_part(self):
        return self.terms.get((0,) * len(self.ring.params), self.ring.base.zero)

    def evaluate(self, values):
        """Base ring element at integer parameter values."""
        if len(values) != len(self.ring.params):
            raise ValueError("wrong number of parameter values")
        base = self.ring.base
        total = base.zero
        for exps, coeff in sorted(self.terms.items()):
            scale = 1
            for v, e in zip(values, exps):
                scale *= v**e
            if scale:
                total = total + coeff * scale
        return total

    def to_json(self):
        return [
            {"parameters": list(exps), "coefficient": self.ring.base.element_to_json(coeff)}
            for exps, coeff in sorted(self.terms.items())
        ]

    def to_text(self):
        if not self.terms:
            return "0"
        base = self.ring.base
        chunks = []
        for exps, coeff in sorted(self.terms.items()):
            mono = "*".join(
                p if e == 1 else f"{p}^{e}"
                for p, e in zip(self.ring.params, exps)
                if e
            )
            c = base.element_to_text(coeff)
            if mono:
                chunks.append(f"({c})*{mono}")
            else:
                chunks.append(f"({c})")
        return " + ".join(chunks)

    def __repr__(self):
        return f"ParamPoly({self.to_text()})"


# ---------------------------------------------------------------------------
# Integer-valuedness and root extraction for rational parameter polynomials
# ---------------------------------------------------------------------------


def _poly_evaluate(poly: dict, values) -> Fraction:
    total = Fraction(0)
    for exps, coeff in poly.items():
        term = as_fraction(coeff)
        for v, e in zip(values, exps):
            term *= Fraction(v) ** e
        total += term
    return total


def _poly_degrees(poly: dict, nparams: int):
    degs = [0] * nparams
    for exps in poly:
        for idx, e in enumerate(exps):
            degs[idx] = max(degs[idx], e)
    return degs


def is_integer_valued(poly: dict, nparams: int) -> bool:
    """Whether the polynomial takes integer values on all integer points.

    Checked exactly through the Newton forward-difference criterion: a
    polynomial of multidegree (d_1, ..., d_r) is integer-valued iff its
    values on the grid {0..d_1} x ... x {0..d_r} generate integer mixed
    differences, which happens iff all grid values are plain integers after
    differencing; differencing preserves integrality, so grid integrality
    of the difference tensor at the origin is what we compute.
    """
    if nparams == 0:
        return _poly_evaluate(poly, ()).denominator == 1
    degs = _poly_degrees(poly, nparams)
    grid = {}
    for point in iter_product(*(range(d + 1) for d in degs)):
        grid[point] = _poly_evaluate(poly, point)
    # mixed forward differences along each axis
    for axis, d in enumerate(degs):
        for _ in range(d):
            new = {}
            for point, value in grid.items():
                shifted = list(point)
                shifted[axis] += 1
                up = tuple(shifted)
                if up in grid:
                    new[point] = grid[up] - value
            grid = new or {(): Fraction(0)}
            if not new:
                break
    # after full differencing every remaining value is a Newton coefficient
    return all(v.denominator == 1 for v in grid.values())


def integrality_period(poly: dict) -> int:
    """Period of the map lambda -> (value mod 1) for a univariate polynomial."""
    denoms = [as_fraction(c).denominator for c in poly.values()]
    return lcm(*denoms) if denoms else 1


def integer_roots(poly: dict) -> set | None:
    """Integer roots of a univariate rational polynomial; None when it is 0."""
    coeffs = {}
    for exps, coeff in poly.items():
        e = exps[0] if exps else 0
        f = as_fraction(coeff)
        if f:
            coeffs[e] = coeffs.get(e, Fraction(0)) + f
    coeffs = {e: c for e, c in coeffs.items() if c}
    if not coeffs:
        return None
    if list(coeffs) == [0]:
        return set()
    # strip the power of lambda dividing the polynomial; 0 is then a root
    val = min(coeffs)
    shifted = {e - val: c for e, c in coeffs.items()}
    roots = {0} if val > 0 else set()
    denom = lcm(*(c.denominator for c in shifted.values()))
    ints = {e: int(c * denom) for e, c in shifted.items()}
    const = ints.get(0, 0)
    if const == 0:
        # cannot happen after stripping, but keep the guard
        return roots
    for cand in range(1, abs(const) + 1):
        if const % cand == 0:
            for r in (cand, -cand):
                if _poly_evaluate({(e,): c for e, c in shifted.items()}, (r,)) == 0:
                    roots.add(r)
    return roots


# ---------------------------------------------------------------------------
# Constraints and the surviving parameter set
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constraint:
    """A polynomial condition on the integer parameters.

    kind "equation": the polynomial must vanish (a consistency residual);
    kind "weight": a graded component outside the allowed range must vanish;
    kind "integrality": the polynomial must take an integer value (a lattice
    coordinate).
    """

    kind: str
    degree: int
    context: str
    poly: tuple  # sorted ((exps, Fraction), ...)

    def poly_dict(self) -> dict:
        return {exps: coeff for exps, coeff in self.poly}

    def satisfied_at(self, values) -> bool:
        value = _poly_evaluate(self.poly_dict(), values)
        if self.kind == "integrality":
            return value.denominator == 1
        return value == 0

    def to_json(self):
        return {
            "kind": self.kind,
            "degree": self.degree,
            "context": self.context,
            "poly": [
                {"exponents": list(exps), **scalar_to_json(coeff)}
                for exps, coeff in self.poly
            ],
        }


def _make_constraint(kind, degree, context, poly: dict) -> Constraint:
    items = tuple(sorted((tuple(e), as_fraction(c)) for e, c in poly.items() if c))
    return Constraint(kind, degree, context, items)


@dataclass(frozen=True)
class SurvivingSet:
    """Integer parameter assignments compatible with all constraints.

    kind "all": no constraints bite; "finite": the listed tuples; for one
    parameter "congruence": all residues mod modulus in the residue list;
    "unresolved": multi-parameter constraints were recorded but not solved.
    """

    kind: str
    values: tuple = ()
    modulus: int | None = None
    residues: tuple = ()

    def contains(self, point) -> bool:
        if isinstance(point, int):
            point = (point,)
        if self.kind == "all":
            return True
        if self.kind == "finite":
            return tuple(point) in self.values
        if self.kind == "congruence":
            return point[0] % self.modulus in self.residues
        raise ValueError("unresolved surviving set cannot answer membership")

    def to_json(self):
        out = {"kind": self.kind}
        if self.kind == "finite":
            out["values"] = [list(v) for v in self.values]
        if self.kind == "congruence":
            out["modulus"] = self.modulus
            out["residues"] = list(self.residues)
        return out


def resolve_surviving(constraints, nparams: int) -> SurvivingSet:
    """Best-effort exact description of the surviving integer set."""
    vanish = [c for c in constraints if c.kind in ("equation", "weight")]
    integral = [c for c in constraints if c.kind == "integrality"]
    if not vanish and not integral:
        return SurvivingSet("all")

    if nparams == 0:
        ok = all(c.satisfied_at(()) for c in constraints)
        return SurvivingSet("finite", values=((),) if ok else ())

    if nparams == 1:
        roots = None
        for c in vanish:
            r = integer_roots(c.poly_dict())
            if r is None:
                continue
            roots = r if roots is None else roots & r
        if roots is not None:
            values = tuple(
                (lam,)
                for lam in sorted(roots)
                if all(c.satisfied_at((lam,)) for c in constraints)
            )
            return SurvivingSet("finite", values=values)
        if not integral:
            return SurvivingSet("all")
        modulus = lcm(*(integrality_period(c.poly_dict()) for c in integral))
        residues = tuple(
            r
            for r in range(modulus)
            if all(c.satisfied_at((r,)) for c in integral)
        )
        return SurvivingSet("congruence", modulus=modulus, residues=residues)

    # several parameters: solve per-parameter univariate vanishing constraints,
    # fall back to an unresolved set when that leaves infinitely many points
    candidates = [None] * nparams
    for c in vanish:
        live = {idx for exps, _ in c.poly for idx, e in enumerate(exps) if e}
        if len(live) != 1:
            continue
        idx = live.pop()
        uni = {(exps[idx],): coeff for exps, coeff in c.poly}
        r = integer_roots(uni)
        if r is None:
            continue
        candidates[idx] = r if candidates[idx] is None else candidates[idx] & r
    if any(c is None for c in candidates):
        return SurvivingSet("unresolved")
    values = tuple(
        point
        for point in iter_product(*(sorted(c) for c in candidates))
        if all(c.satisfied_at(point) for c in constraints)
    )
    return SurvivingSet("finite", values=values)


# ---------------------------------------------------------------------------
# The solver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeathCertificate:
    degree: int
    reason: str  # "equation" | "weight" | "lattice"
    context: str

    def to_json(self):
        return {"degree": self.degree, "reason": self.reason, "context": self.context}


@dataclass
class HomSolution:
    source: str
    target: str
    mode: str
    cutoff: int
    params: tuple
    coefficients: dict  # k -> ParamPoly
    constraints: list
    surviving: SurvivingSet
    residuals_zero: bool
    died_at: DeathCertificate | None = None

    def certificate(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "mode": self.mode,
            "N": self.cutoff,
            "parameters": list(self.params),
            "coefficients": [
                {"index": k, "value": self.coefficients[k].to_json()}
                for k in sorted(self.coefficients)
            ],
            "constraints": [c.to_json() for c in self.constraints],
            "surviving": self.surviving.to_json(),
            "residuals_zero": self.residuals_zero,
            "died_at": self.died_at.to_json() if self.died_at else None,
        }


def _promote_series(series: TruncatedSeries, ring) -> TruncatedSeries:
    return series.map_coefficients(ring.promote, ring=ring)


def _param_buckets(element: ParamPoly, base):
    """Transpose a ParamPoly over polynomials into m-monomial -> param poly."""
    buckets = {}
    if isinstance(base, type(None)):
        return buckets
    for pexps, coeff in element.terms.items():
        if isinstance(coeff, GradedPoly):
            for mexps, c in coeff.terms.items():
                buckets.setdefault(mexps, {})[pexps] = as_fraction(c)
        else:
            buckets.setdefault(None, {})[pexps] = as_fraction(coeff)
    return buckets


def _seed(source, lattice, mode, weight_bound, g1):
    """Parameter names and the symbolic g_1 for the requested mode."""
    base = source.ring
    if g1 is not None:
        pring = ParamRing(base, ())
        return pring, pring.promote(g1)
    if lattice is None:
        pring = ParamRing(base, ("lam",))
        return pring, pring.gen(0)
    if mode == "graded":
        deg = lattice.degree(1)
        if deg.rank != 1:
            raise ValueError(
                "symbolic graded seed needs a rank-1 degree-2 lattice; pass g1"
            )
        pring = ParamRing(base, ("lam",))
        gen = deg.element(0, base)
        return pring, pring.gen(0) * gen
    # bounded-ungraded: one parameter per lattice coordinate of weight <= 2D
    names = []
    elements = []
    for w in range(0, weight_bound + 1):
        deg = lattice.degree(w)
        for idx in range(deg.rank):
            names.append(f"c{w}_{idx}" if deg.rank > 1 else f"c{w}")
            elements.append(deg.element(idx, base) if w else base.one)
    pring = ParamRing(base, tuple(names))
    g1 = pring.zero
    for idx, el in enumerate(elements):
        g1 = g1 + pring.gen(idx) * el
    return pring, g1


def solve(
    source: FormalGroupLaw,
    target: FormalGroupLaw,
    cutoff: int,
    mode: str = "graded",
    lattice: LazardLattice | None = None,
    weight_bound: int | None = None,
    g1=None,
    table: PontryaginTable | None = None,
) -> HomSolution:
    """Determine g_2..g_cutoff from g_1 and collect the obstructions.

    In graded mode with a lattice, g_k is required to be homogeneous of
    weight 2k and to lie in the degree-2k lattice; in ungraded mode with a
    weight bound D, g_k may mix weights up to 2D (higher graded parts must
    vanish).  Without a lattice no integrality is imposed and the modes
    coincide.

    A concrete g1 makes this a single-point check: the first violated
    condition is recorded as died_at instead of raising.
    """
    if mode not in ("graded", "ungraded"):
        raise ValueError("mode must be 'graded' or 'ungraded'")
    if source.cutoff < cutoff:
        raise CutoffError("source law cutoff too small")
    if target.cutoff < cutoff:
        raise CutoffError("target law cutoff too small")
    base = source.ring
    if mode == "ungraded":
        if lattice is not None and weight_bound is None:
            raise ValueError("ungraded mode needs a weight bound")
        if lattice is not None and weight_bound > lattice.max_index:
            raise CutoffError("weight bound exceeds the computed lattice range")
    if lattice is not None and mode == "graded" and lattice.max_index < cutoff:
        raise CutoffError("lattice must cover all degrees up to the cutoff")

    target_series = (
        target.series if target.ring == base else _promote_series(target.series, base)
    ).aligned(("x", "y"))
    if table is None:
        table = structure_constants(source, cutoff)
    pring, g1_poly = _seed(source, lattice, mode, weight_bound, g1)
    concrete = not pring.params
    target_p = _promote_series(target_series, pring)

    coeffs = {1: g1_poly}
    constraints: list[Constraint] = []
    died: DeathCertificate | None = None
    residuals_zero = True

    def record(kind, degree, context, poly_dict):
        nonlocal residuals_zero
        if kind == "equation":
            residuals_zero = False
        if concrete:
            reason = "lattice" if kind == "integrality" else kind
            return DeathCertificate(degree, reason, context)
        constraints.append(_make_constraint(kind, degree, context, poly_dict))
        if not poly_dict or all(not c for c in poly_dict.values()):
            return None
        if all(not any(e) for e in poly_dict):
            # constant nonzero condition: no parameter can fix it
            if kind != "integrality" or any(
                as_fraction(c).denominator != 1 for c in poly_dict.values()
            ):
                raise InconsistentAtDegreeError(
                    degree, context, scalar_to_text(sum(poly_dict.values()))
                )
        return None

    def check_element(degree, element: ParamPoly):
        """Grading and lattice conditions on a solved coefficient."""
        nonlocal died
        if lattice is None:
            return
        allowed_max = 2 * degree if mode == "graded" else 2 * weight_bound
        allowed_min = 2 * degree if mode == "graded" else 0
        # split by graded weight: weight -> param poly per monomial bucket
        by_weight: dict = {}
        for pexps, coeff in element.terms.items():
            for w, part in coeff.homogeneous_parts().items():
                slot = by_weight.setdefault(w, {})
                for mexps, c in part.terms.items():
                    slot.setdefault(pexps, {})[mexps] = c
        for w in sorted(by_weight):
            if w % 2 or w < allowed_min or w > allowed_max:
                # the coefficient of every monomial in this graded component
                # must vanish as a polynomial condition on the parameters
                per_mono: dict = {}
                for pexps, monos in by_weight[w].items():
                    for mexps, c in monos.items():
                        per_mono.setdefault(mexps, {})[pexps] = as_fraction(c)
                for mexps in sorted(per_mono):
                    d = record(
                        "weight",
                        degree,
                        f"weight-{w} component, monomial {list(mexps)}",
                        per_mono[mexps],
                    )
                    if d and died is None:
                        died = d
                if concrete and died:
                    return
                continue
            k = w // 2
            if k > lattice.max_index:
                raise CutoffError(
                    f"lattice range {lattice.max_index} too small for weight {w}"
                )
            deg_lattice = lattice.degree(k)
            # coordinates of each param-monomial component
            coord_polys: dict = {}
            for pexps, monos in by_weight[w].items():
                part = GradedPoly(base, monos)
                coords = deg_lattice.rational_coordinates(part)
                if coords is None:
                    d = record(
                        "weight",
                        degree,
                        f"weight-{w} component outside the lattice span",
                        {pexps: Fraction(1)},
                    )
                    if d and died is None:
                        died = d
                    continue
                for pos, q in enumerate(coords):
                    if q:
                        coord_polys.setdefault(pos, {})[pexps] = q
            for pos in sorted(coord_polys):
                poly = coord_polys[pos]
                if concrete:
                    value = _poly_evaluate(poly, ())
                    if value.denominator != 1:
                        if died is None:
                            died = DeathCertificate(
                                degree,
                                "lattice",
                                f"weight-{w} coordinate {pos} = {value}",
                            )
                        return
                elif not is_integer_valued(poly, len(pring.params)):
                    constraints.append(
                        _make_constraint(
                            "integrality",
                            degree,
                            f"weight-{w} lattice coordinate {pos}",
                            poly,
                        )
                    )

    check_element(1, g1_poly)

    for n in range(2, cutoff + 1):
        if died:
            break
        gx = TruncatedSeries(pring, ("x",), n, {(k,): v for k, v in coeffs.items()})
        gy = gx.rename_variable("x", "y")
        # Mixed coefficients (i, j >= 1) of G(g(x), g(y)) never involve g_n,
        # so the absent degree-n coefficient of the partial g is harmless.
        rhs = target_p.substitute({"x": gx, "y": gy})
        g_n = None
        for i in range(1, n):
            j = n - i
            rhs_ij = rhs.coefficient(x=i, y=j)
            known = pring.zero
            for k in range(1, n):
                c = table.entries.get((i, j, k))
                if c is not None:
                    known = known + coeffs[k] * pring.promote(c)
            if g_n is None:
                g_n = pring.divide_exact(rhs_ij - known, comb(n, i))
                coeffs[n] = g_n
            else:
                residual = known + g_n * comb(n, i) - rhs_ij
                if residual:
                    buckets = _param_buckets(residual, base)
                    for mexps, poly in sorted(
                        buckets.items(), key=lambda kv: (kv[0] is not None, kv[0])
                    ):
                        ctx = f"coefficient x^{i} y^{j}" + (
                            f", monomial {list(mexps)}" if mexps is not None else ""
                        )
                        d = record("equation", n, ctx, poly)
                        if d and died is None:
                            died = d
                    if concrete and died:
                        break
        if died:
            break
        check_element(n, g_n)

    if not concrete:
        surviving = resolve_surviving(constraints, len(pring.params))
    elif died:
        surviving = SurvivingSet("finite", values=())
    else:
        surviving = SurvivingSet("finite", values=((),))

    return HomSolution(
        source=source.name,
        target=target.name,
        mode=mode,
        cutoff=cutoff,
        params=pring.params,
        coefficients=coeffs,
        constraints=constraints,
        surviving=surviving,
        residuals_zero=residuals_zero,
        died_at=died,
    )


@dataclass
class ParamSearchResult:
    values: tuple
    surviving: tuple
    death_degree: dict  # lam -> degree (absent when it survives)
    outcomes: dict  # lam -> HomSolution

    def first_all_dead_degree(self):
        """Smallest N at which every listed nonzero parameter has died."""
        nonzero = [d for lam, d in self.death_degree.items() if lam != 0]
        if any(lam != 0 and lam in self.surviving for lam in self.values):
            return None
        return max(nonzero, default=None)


def param_search(
    source: FormalGroupLaw,
    target: FormalGroupLaw,
    cutoff: int,
    values,
    lattice: LazardLattice | None = None,
    mode: str = "graded",
    weight_bound: int | None = None,
    table: PontryaginTable | None = None,
) -> ParamSearchResult:
    """Run the solver with g_1 = lam * generator for each lam in values."""
    base = source.ring
    if lattice is not None:
        deg = lattice.degree(1)
        if deg.rank != 1:
            raise ValueError("parameter search needs a rank-1 degree-2 lattice")
        gen = deg.element(0, base)
    else:
        gen = base.one
    if table is None:
        table = structure_constants(source, cutoff)
    outcomes = {}
    deaths = {}
    surviving = []
    for lam in sorted(values):
        sol = solve(
            source,
            target,
            cutoff,
            mode=mode,
            lattice=lattice,
            weight_bound=weight_bound,
            g1=gen * lam,
            table=table,
        )
        outcomes[lam] = sol
        if sol.died_at is None:
            surviving.append(lam)
        else:
            deaths[lam] = sol.died_at.degree
    return ParamSearchResult(
        values=tuple(sorted(values)),
        surviving=tuple(surviving),
        death_degree=deaths,
        outcomes=outcomes,
    )


# ---------------------------------------------------------------------------
# Factorial divisibility obstruction
# ---------------------------------------------------------------------------


def factorial_divisibility(lam: int, bound: int):
    """Minimal n <= bound with n! not dividing lam^n, or None.

    None is returned for lam = 0 (every factorial divides 0) and when the
    bound is too small to reach a witness.
    """
    if bound < 2:
        raise ValueError("bound must be at least 2")
    if lam == 0:
        return None
    f = 1
    power = 1
    for n in range(2, bound + 1):
        f *= n
        power = lam**n
        if power % f:
            return n
    return None


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_witness(lam: int) -> int:
    """The smallest prime p > |lam|: then p! never divides lam^p.

    p divides p! exactly once but cannot divide lam^p at all, which proves a
    witness exists for every nonzero lam; the divisibility is re-checked
    exactly here rather than trusted.
    """
    if lam == 0:
        raise ValueError("zero has no witness")
    p = abs(lam) + 1
    while not is_prime(p):
        p += 1
    if lam**p % factorial(p) == 0:
        raise ArithmeticError(f"witness argument failed at p = {p}")
    return p


# ---------------------------------------------------------------------------
# The coaction obstruction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoactionInstance:
    """The fixed two-sided coaction computation as transcribed data.

    Both sides are Laurent polynomials in u, v depending on one integer
    parameter: the comodule side is (lam^2 v^2 - lam v u)/2, the algebra
    side is (lam^2 - lam) u^2 / 2.  The only integer making them equal is 0.
    """

    lam: int

    def comodule_side(self) -> LaurentUV:
        half = Fraction(1, 2)
        return (LAURENT_V * LAURENT_V * (self.lam**2) - LAURENT_V * LAURENT_U * self.lam) * half

    def algebra_side(self) -> LaurentUV:
        half = Fraction(1, 2)
        return LAURENT_U * LAURENT_U * ((self.lam**2 - self.lam)) * half


@dataclass(frozen=True)
class CoactionResult:
    lam: int
    equal: bool
    difference: LaurentUV


def coaction_check(lam: int) -> CoactionResult:
    inst = CoactionInstance(lam)
    diff = inst.comodule_side() - inst.algebra_side()
    return CoactionResult(lam, not diff.terms, diff)


def coaction_solve():
    """All integers where the two coaction sides agree, by comparing the
    lambda-polynomial of every u^a v^b monomial.

    Returns (surviving set, {monomial: polynomial}) where each polynomial is
    a coefficient list in lambda.
    """
    half = Fraction(1, 2)
    polys = {
        (0, 2): {(2,): half},             # v^2
        (1, 1): {(1,): -half},            # u v
        (2, 0): {(1,): half, (2,): -half},  # u^2
    }
    surviving = None
    for mono in sorted(polys):
        roots = integer_roots(polys[mono])
        if roots is None:
            continue
        surviving = roots if surviving is None else surviving & roots
    return sorted(surviving or set()), polys

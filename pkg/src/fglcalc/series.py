"""Truncated multivariate power series over a pluggable exact coefficient ring.

A series lives in a subset of the fixed variable universe {x, y, z}, keeps
only terms of total degree <= cutoff, and never stores zero coefficients.
Arithmetic results carry cutoff = min of the operand cutoffs, which keeps
every stored coefficient exact: a term of degree d only ever depends on
operand terms of degree <= d.

The coefficient ring is any object with zero/one, promote(), is_zero(),
divide_exact() and the element_to_json/text hooks (see exactalg.QQ and
exactalg.PolyRing).
"""

from __future__ import annotations

from fractions import Fraction

from .exactalg import RingMismatchError

VARIABLES = ("x", "y", "z")


class SubstitutionError(ValueError):
    """Substituted series must have zero constant term."""


class ReversionError(ValueError):
    """Reversion needs a one-variable series x + higher terms."""


def _canonical_vars(variables):
    variables = tuple(variables)
    bad = [v for v in variables if v not in VARIABLES]
    if bad:
        raise ValueError(f"unknown variables {bad}; universe is {VARIABLES}")
    if len(set(variables)) != len(variables):
        raise ValueError("repeated variable")
    return tuple(v for v in VARIABLES if v in variables)


class TruncatedSeries:
    """Sparse truncated power series: exponent tuple -> ring element."""

    __slots__ = ("ring", "variables", "cutoff", "terms")

    def __init__(self, ring, variables, cutoff: int, terms=None):
        if cutoff < 0:
            raise ValueError("cutoff must be nonnegative")
        variables = _canonical_vars(variables)
        clean = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(variables):
                raise ValueError("exponent arity does not match variables")
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            if sum(exps) > cutoff:
                continue
            coeff = ring.promote(coeff)
            if not ring.is_zero(coeff):
                clean[exps] = coeff
        self.ring = ring
        self.variables = variables
        self.cutoff = cutoff
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, ring, variables, cutoff):
        return cls(ring, variables, cutoff, {})

    @classmethod
    def constant(cls, ring, value, variables, cutoff):
        return cls(ring, variables, cutoff, {(0,) * len(tuple(variables)): value})

    @classmethod
    def variable(cls, ring, name, cutoff):
        return cls(ring, (name,), cutoff, {(1,): ring.one})

    # -- helpers ------------------------------------------------------------

    def _check_ring(self, other):
        if self.ring != other.ring:
            raise RingMismatchError("series live in different coefficient rings")

    def aligned(self, variables) -> "TruncatedSeries":
        """Re-key this series over a superset of its variables."""
        variables = _canonical_vars(variables)
        if variables == self.variables:
            return self
        if any(v not in variables for v in self.variables):
            raise ValueError("alignment target must contain all variables")
        positions = [variables.index(v) for v in self.variables]
        terms = {}
        for exps, coeff in self.terms.items():
            new = [0] * len(variables)
            for pos, e in zip(positions, exps):
                new[pos] = e
            terms[tuple(new)] = coeff
        return TruncatedSeries(self.ring, variables, self.cutoff, terms)

    def _union_vars(self, other):
        return _canonical_vars(set(self.variables) | set(other.variables))

    def coefficient(self, **exponents):
        """Coefficient of the monomial given as keyword exponents, e.g. x=2, y=1."""
        bad = [v for v in exponents if v not in self.variables]
        if bad and any(exponents[v] for v in bad):
            return self.ring.zero
        exps = tuple(exponents.get(v, 0) for v in self.variables)
        return self.terms.get(exps, self.ring.zero)

    def constant_term(self):
        return self.terms.get((0,) * len(self.variables), self.ring.zero)

    def truncate(self, cutoff: int) -> "TruncatedSeries":
        cutoff = min(cutoff, self.cutoff)
        return TruncatedSeries(self.ring, self.variables, cutoff, self.terms)

    def _assume_cutoff(self, cutoff: int) -> "TruncatedSeries":
        # Claim a larger cutoff without new data.  Only sound where the
        # caller can prove the missing top coefficients never contribute.
        if cutoff < self.cutoff:
            raise ValueError("use truncate() to lower the cutoff")
        return TruncatedSeries(self.ring, self.variables, cutoff, self.terms)

    def rename_variable(self, old: str, new: str) -> "TruncatedSeries":
        if old not in self.variables:
            raise ValueError(f"{old} is not a variable of this series")
        if new in self.variables and new != old:
            raise ValueError(f"{new} already occurs")
        names = tuple(new if v == old else v for v in self.variables)
        order = _canonical_vars(names)
        perm = [names.index(v) for v in order]
        terms = {tuple(exps[p] for p in perm): c for exps, c in self.terms.items()}
        return TruncatedSeries(self.ring, order, self.cutoff, terms)

    def map_coefficients(self, func, ring=None) -> "TruncatedSeries":
        ring = ring or self.ring
        return TruncatedSeries(
            ring, self.variables, self.cutoff, {e: func(c) for e, c in self.terms.items()}
        )

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        self._check_ring(other)
        variables = self._union_vars(other)
        a = self.aligned(variables)
        b = other.aligned(variables)
        cutoff = min(a.cutoff, b.cutoff)
        terms = dict(a.terms)
        for exps, coeff in b.terms.items():
            terms[exps] = terms.get(exps, self.ring.zero) + coeff
        return TruncatedSeries(self.ring, variables, cutoff, terms)

    def __neg__(self):
        return TruncatedSeries(
            self.ring, self.variables, self.cutoff, {e: -c for e, c in self.terms.items()}
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check_ring(other)
        variables = self._union_vars(other)
        a = self.aligned(variables)
        b = other.aligned(variables)
        cutoff = min(a.cutoff, b.cutoff)
        terms = {}
        zero = self.ring.zero
        for e1, c1 in a.terms.items():
            d1 = sum(e1)
            for e2, c2 in b.terms.items():
                if d1 + sum(e2) > cutoff:
                    continue
                key = tuple(i + j for i, j in zip(e1, e2))
                acc = terms.get(key, zero)
                terms[key] = acc + c1 * c2
        return TruncatedSeries(self.ring, variables, cutoff, terms)

    def scale(self, value) -> "TruncatedSeries":
        value = self.ring.promote(value)
        return TruncatedSeries(
            self.ring, self.variables, self.cutoff, {e: c * value for e, c in self.terms.items()}
        )

    def power(self, n: int) -> "TruncatedSeries":
        if n < 0:
            raise ValueError("negative power")
        out = TruncatedSeries.constant(self.ring, self.ring.one, self.variables, self.cutoff)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        """Term-wise equality (cutoffs are not compared)."""
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if self.ring != other.ring:
            return False
        variables = self._union_vars(other)
        return self.aligned(variables).terms == other.aligned(variables).terms

    def __bool__(self):
        return bool(self.terms)

    def __hash__(self):
        raise TypeError("TruncatedSeries is not hashable")

    # -- composition --------------------------------------------------------

    def substitute(self, assignment: dict) -> "TruncatedSeries":
        """Substitute series for variables; unlisted variables stay themselves.

        Every substituted series must have zero constant term, so only
        finitely many terms contribute below the cutoff and the result is
        exact up to cutoff = min over self and all substituted series.
        """
        cutoff = self.cutoff
        targets = {}
        for name in self.variables:
            if name in assignment:
                target = assignment[name]
                self._check_ring(target)
                if not self.ring.is_zero(target.constant_term()):
                    raise SubstitutionError(
                        f"series substituted for {name} has nonzero constant term"
                    )
                cutoff = min(cutoff, target.cutoff)
                targets[name] = target
            else:
                targets[name] = TruncatedSeries.variable(self.ring, name, cutoff)
        out_vars = _canonical_vars(set().union(*(t.variables for t in targets.values())))
        zero = TruncatedSeries.zero(self.ring, out_vars, cutoff)
        one = TruncatedSeries.constant(self.ring, self.ring.one, out_vars, cutoff)
        powers = {name: [one, targets[name].aligned(out_vars).truncate(cutoff)]
                  for name in self.variables}

        def power_of(name, e):
            cache = powers[name]
            while len(cache) <= e:
                cache.append(cache[-1] * cache[1])
            return cache[e]

        total = zero
        for exps, coeff in sorted(self.terms.items()):
            if sum(exps) > cutoff:
                continue
            term = one.scale(coeff)
            for name, e in zip(self.variables, exps):
                if e:
                    term = term * power_of(name, e)
            total = total + term
        return total

    # -- one-variable calculus ----------------------------------------------

    def _single_var(self) -> str:
        if len(self.variables) != 1:
            raise ValueError("operation needs a one-variable series")
        return self.variables[0]

    def derivative(self) -> "TruncatedSeries":
        """d/dx of a one-variable series; exact through cutoff - 1."""
        self._single_var()
        terms = {}
        for (e,), coeff in self.terms.items():
            if e:
                terms[(e - 1,)] = coeff * e
        return TruncatedSeries(self.ring, self.variables, max(self.cutoff - 1, 0), terms)

    def integral(self) -> "TruncatedSeries":
        """Antiderivative with zero constant term; needs exact division by k."""
        self._single_var()
        terms = {}
        for (e,), coeff in self.terms.items():
            terms[(e + 1,)] = self.ring.divide_exact(coeff, e + 1)
        return TruncatedSeries(self.ring, self.variables, self.cutoff + 1, terms)

    def inverse_unit(self) -> "TruncatedSeries":
        """Multiplicative inverse of a one-variable series with constant term 1."""
        self._single_var()
        if self.constant_term() != self.ring.one:
            raise ValueError("inverse_unit needs constant term 1")
        coeffs = {e: c for (e,), c in self.terms.items()}
        inv = {0: self.ring.one}
        zero = self.ring.zero
        for n in range(1, self.cutoff + 1):
            acc = zero
            for k in range(1, n + 1):
                a = coeffs.get(k)
                if a is not None:
                    acc = acc + a * inv[n - k]
            inv[n] = -acc
        return TruncatedSeries(
            self.ring, self.variables, self.cutoff, {(e,): c for e, c in inv.items()}
        )

    def reversion(self) -> "TruncatedSeries":
        """Compositional inverse of x + higher terms.

        Newton refinement on truncated series: each pass roughly doubles the
        number of correct coefficients, and all steps are exact.
        """
        name = self._single_var()
        if not self.ring.is_zero(self.constant_term()):
            raise ReversionError("series must have zero constant term")
        if self.terms.get((1,), self.ring.zero) != self.ring.one:
            raise ReversionError("linear coefficient must be the ring unit")
        n = self.cutoff
        x = TruncatedSeries.variable(self.ring, name, n)
        if n <= 1:
            return x
        r = x
        # The derivative is exact through degree n-1 only, but the Newton
        # update multiplies it into an error term of valuation >= 2, so its
        # absent degree-n coefficient can never reach degrees <= n.
        ds = self.derivative()._assume_cutoff(n)
        correct = 1
        while correct < n:
            err = self.substitute({name: r}) - x
            slope = ds.substitute({name: r})
            r = (r - err * slope.inverse_unit()).truncate(n)
            correct = min(2 * correct + 1, n)
        return r

    # -- serialization ------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: (sum(item[0]), item[0]))

    def to_json(self):
        return {
            "variables": list(self.variables),
            "cutoff": self.cutoff,
            "terms": [
                {"exponents": list(exps), "coefficient": self.ring.element_to_json(coeff)}
                for exps, coeff in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, ring, data) -> "TruncatedSeries":
        terms = {
            tuple(item["exponents"]): ring.element_from_json(item["coefficient"])
            for item in data["terms"]
        }
        return cls(ring, tuple(data["variables"]), data["cutoff"], terms)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for exps, coeff in self.sorted_terms():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}"
                for v, e in zip(self.variables, exps)
                if e
            )
            c = self.ring.element_to_text(coeff)
            if mono:
                chunks.append(f"({c})*{mono}" if ("+" in c or "-" in c[1:] or " " in c) else f"{c}*{mono}")
            else:
                chunks.append(f"({c})" if " " in c else c)
        return " + ".join(chunks)

    def __repr__(self):
        return f"TruncatedSeries({self.to_text()}; cutoff={self.cutoff})"


def geometric_like(ring, name, coeffs, cutoff):
    """Series sum(coeffs[k] * name^k) from a dense coefficient list."""
    return TruncatedSeries(
        ring, (name,), cutoff, {(k,): c for k, c in enumerate(coeffs)}
    )

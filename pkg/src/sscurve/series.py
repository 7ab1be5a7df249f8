"""Truncated power series with exact coefficients.

A TruncSeries holds a sparse map {exponent vector: RingValue} together with
a truncation order N: everything of total degree >= N is identically
discarded, so all arithmetic is exact statements about jets.  Arity is 1 or
2 in the public interface (formal coordinates z, or pairs z1, z2); an
internal arity of 3 is used for associativity scratch work.
"""

from __future__ import annotations

class SeriesError(Exception):
    pass


class TruncSeries:
    """A truncated power series over a Ring; immutable after construction."""

    __slots__ = ("ring", "arity", "order", "coeffs", "_hash")

    def __init__(self, ring, arity, order, coeffs):
        self.ring = ring
        self.arity = arity
        self.order = order
        clean = {}
        for exps, c in coeffs.items():
            if len(exps) != arity:
                raise SeriesError("exponent vector %r does not match arity %d" % (exps, arity))
            if sum(exps) < order and not c.is_zero():
                clean[tuple(exps)] = c
        self.coeffs = clean
        self._hash = None

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, ring, arity, order):
        return cls(ring, arity, order, {})

    @classmethod
    def variable(cls, ring, order, index=0, arity=1):
        exps = [0] * arity
        exps[index] = 1
        return cls(ring, arity, order, {tuple(exps): ring.one})

    @classmethod
    def from_terms(cls, ring, order, terms, arity=1):
        """terms: iterable of (exponent or exponent-tuple, coefficient)."""
        coeffs = {}
        for exps, c in terms:
            if isinstance(exps, int):
                exps = (exps,)
            if isinstance(c, int):
                c = ring.from_int(c)
            if exps in coeffs:
                c = coeffs[exps] + c
            coeffs[tuple(exps)] = c
        return cls(ring, arity, order, coeffs)

    # -- ring arithmetic -----------------------------------------------------

    def _check_compatible(self, other):
        if not isinstance(other, TruncSeries):
            raise SeriesError("expected a TruncSeries, got %r" % (other,))
        if other.ring != self.ring or other.arity != self.arity:
            raise SeriesError("incompatible series")

    def __add__(self, other):
        self._check_compatible(other)
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for exps, c in other.coeffs.items():
            out[exps] = out[exps] + c if exps in out else c
        return TruncSeries(self.ring, self.arity, order, out)

    def __sub__(self, other):
        self._check_compatible(other)
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for exps, c in other.coeffs.items():
            out[exps] = out[exps] - c if exps in out else -c
        return TruncSeries(self.ring, self.arity, order, out)

    def __neg__(self):
        return TruncSeries(self.ring, self.arity, self.order,
                           {e: -c for e, c in self.coeffs.items()})

    def __mul__(self, other):
        self._check_compatible(other)
        order = min(self.order, other.order)
        out = {}
        for e1, c1 in self.coeffs.items():
            d1 = sum(e1)
            for e2, c2 in other.coeffs.items():
                if d1 + sum(e2) >= order:
                    continue
                exps = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                out[exps] = out[exps] + prod if exps in out else prod
        return TruncSeries(self.ring, self.arity, order, out)

    def scale(self, value):
        """Multiply every coefficient by a ring element."""
        if isinstance(value, int):
            value = self.ring.from_int(value)
        return TruncSeries(self.ring, self.arity, self.order,
                           {e: c * value for e, c in self.coeffs.items()})

    def __pow__(self, n):
        if n < 0:
            raise SeriesError("negative powers of series are not defined")
        result = TruncSeries(self.ring, self.arity, self.order,
                             {(0,) * self.arity: self.ring.one})
        sq = self
        while n:
            if n & 1:
                result = result * sq
            n >>= 1
            if n:
                sq = sq * sq
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.ring == other.ring and self.arity == other.arity
                and self.order == other.order and self.coeffs == other.coeffs)

    def __hash__(self):
        if self._hash is None:
            items = tuple(sorted((e, c.canonical_key()) for e, c in self.coeffs.items()))
            self._hash = hash((self.ring, self.arity, self.order, items))
        return self._hash

    # -- views ----------------------------------------------------------------

    def coefficient(self, exps):
        if isinstance(exps, int):
            exps = (exps,)
        return self.coeffs.get(tuple(exps), self.ring.zero)

    def constant_term(self):
        return self.coefficient((0,) * self.arity)

    def is_zero(self):
        return not self.coeffs

    def valuation(self):
        """Least total degree of a nonzero term (= order when zero)."""
        if not self.coeffs:
            return self.order
        return min(sum(e) for e in self.coeffs)

    def truncate(self, order):
        if order > self.order:
            raise SeriesError("cannot raise precision from %d to %d" % (self.order, order))
        return TruncSeries(self.ring, self.arity, order, self.coeffs)

    def map_coefficients(self, fn, ring=None):
        return TruncSeries(ring or self.ring, self.arity, self.order,
                           {e: fn(c) for e, c in self.coeffs.items()})

    def derivative(self, index=0):
        out = {}
        for exps, c in self.coeffs.items():
            e = exps[index]
            if e:
                new = list(exps)
                new[index] = e - 1
                out[tuple(new)] = c * e
        return TruncSeries(self.ring, self.arity, self.order - 1, out)

    def sorted_terms(self):
        return sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def to_json(self):
        return {
            "ring": self.ring.descriptor(),
            "arity": self.arity,
            "order": self.order,
            "monomials": [[list(e), c.to_json()["monomials"]] for e, c in self.sorted_terms()],
        }

    def __repr__(self):
        if not self.coeffs:
            return "O(z^%d)" % self.order
        names = ["z"] if self.arity == 1 else ["z%d" % (i + 1) for i in range(self.arity)]
        parts = []
        for exps, c in self.sorted_terms():
            mono = "*".join(n if e == 1 else "%s^%d" % (n, e)
                            for n, e in zip(names, exps) if e)
            cs = repr(c)
            if " + " in cs:
                cs = "(%s)" % cs
            parts.append("%s*%s" % (cs, mono) if mono else cs)
        return " + ".join(parts) + " + O(^%d)" % self.order


# ---------------------------------------------------------------------------
# composition, inversion, reversion
# ---------------------------------------------------------------------------

def substitute(f, g):
    """f(g) for univariate f; g may have any arity but no constant term."""
    if f.arity != 1:
        raise SeriesError("outer series must be univariate")
    if not g.constant_term().is_zero():
        raise SeriesError("substitution needs a zero constant term")
    if f.ring != g.ring:
        raise SeriesError("incompatible series")
    order = min(f.order, g.order)
    # Horner from the top degree down
    acc = TruncSeries.zero(g.ring, g.arity, order)
    top = max((e[0] for e in f.coeffs), default=0)
    for d in range(min(top, order - 1), 0, -1):
        c = f.coefficient((d,))
        if not c.is_zero():
            acc = acc + TruncSeries(g.ring, g.arity, order, {(0,) * g.arity: c})
        acc = acc * g
    const = f.coefficient((0,))
    if not const.is_zero():
        acc = acc + TruncSeries(g.ring, g.arity, order, {(0,) * g.arity: const})
    return acc


def bivariate_substitute(F, g1, g2):
    """F(g1, g2) for bivariate F; g1, g2 of a common arity, no constant term."""
    if F.arity != 2:
        raise SeriesError("outer series must be bivariate")
    if g1.ring != F.ring or g2.ring != F.ring or g1.arity != g2.arity:
        raise SeriesError("incompatible series")
    for g in (g1, g2):
        if not g.constant_term().is_zero():
            raise SeriesError("substitution needs a zero constant term")
    order = min(F.order, g1.order, g2.order)
    arity = g1.arity
    ring = F.ring
    pow1 = {0: None}
    pow2 = {0: None}

    def power(cache, g, n):
        if n not in cache:
            p = power(cache, g, n - 1)
            cache[n] = g.truncate(order) if n == 1 else p * g
        return cache[n]

    acc = TruncSeries.zero(ring, arity, order)
    for (i, j), c in sorted(F.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0])):
        if i + j >= order:
            continue
        if i == 0 and j == 0:
            acc = acc + TruncSeries(ring, arity, order, {(0,) * arity: c})
            continue
        if i and j:
            term = power(pow1, g1, i) * power(pow2, g2, j)
        elif i:
            term = power(pow1, g1, i)
        else:
            term = power(pow2, g2, j)
        acc = acc + term.scale(c)
    return acc


def substitute_partial(F, g, slot):
    """Collapse a bivariate F to a univariate series F(g(z), z) or F(z, g(z)).

    slot 0 substitutes the first argument, slot 1 the second; the remaining
    argument becomes the series variable itself.
    """
    if F.arity != 2:
        raise SeriesError("outer series must be bivariate")
    if g.arity != 1 or g.ring != F.ring:
        raise SeriesError("inner series must be univariate over the same ring")
    if not g.constant_term().is_zero():
        raise SeriesError("substitution needs a zero constant term")
    order = min(F.order, g.order)
    ring = F.ring
    pows = {0: TruncSeries(ring, 1, order, {(0,): ring.one}), 1: g.truncate(order)}

    def power(n):
        if n not in pows:
            pows[n] = power(n - 1) * pows[1]
        return pows[n]

    acc = TruncSeries.zero(ring, 1, order)
    for (i, j), c in F.coeffs.items():
        gdeg, zdeg = (i, j) if slot == 0 else (j, i)
        if gdeg + zdeg >= order:
            continue
        term = power(gdeg)
        out = {}
        for (e,), cc in term.coeffs.items():
            if e + zdeg < order:
                out[(e + zdeg,)] = cc * c
        acc = acc + TruncSeries(ring, 1, order, out)
    return acc


def embed_arity(f, arity, positions):
    """View a series in a larger variable set; positions[i] is the new index
    of old variable i."""
    if len(positions) != f.arity:
        raise SeriesError("need one position per variable")
    out = {}
    for exps, c in f.coeffs.items():
        new = [0] * arity
        for i, e in enumerate(exps):
            new[positions[i]] = e
        out[tuple(new)] = c
    return TruncSeries(f.ring, arity, f.order, out)


def inverse_unit(f):
    """1/f for a series with unit constant term."""
    c0 = f.constant_term()
    g0 = c0.inv()
    one = TruncSeries(f.ring, f.arity, f.order, {(0,) * f.arity: f.ring.one})
    g = TruncSeries(f.ring, f.arity, f.order, {(0,) * f.arity: g0})
    # Newton: error has positive valuation, so this stabilizes quickly
    for _ in range(f.order.bit_length() + 2):
        err = one - f * g
        if err.is_zero():
            return g
        g = g + g * err
    raise SeriesError("series inversion did not converge")  # pragma: no cover


def reversion(f):
    """The compositional inverse g with f(g) = z = g(f), degree by degree."""
    if f.arity != 1:
        raise SeriesError("reversion needs a univariate series")
    if not f.coefficient((0,)).is_zero():
        raise SeriesError("reversion needs a zero constant term")
    c1 = f.coefficient((1,))
    if not c1.is_unit():
        raise SeriesError("reversion needs a unit linear coefficient")
    ring = f.ring
    order = f.order
    c1inv = c1.inv()
    z = TruncSeries.variable(ring, order)
    g = TruncSeries(ring, 1, order, {(1,): c1inv})
    for d in range(2, order):
        err = substitute(f, g) - z
        c = err.coefficient((d,))
        if not c.is_zero():
            g = g - TruncSeries(ring, 1, order, {(d,): c1inv * c})
    return g

"""Exact coefficient rings.

Everything downstream computes over one of these rings:

  * small finite fields F_{2^n} (n <= 8) and F_3,
  * the truncated Witt ring W_k(F4), presented as (Z/2^k)[w]/(w^2+w+1),
  * tower rings adjoining truncated power-series variables (say a1, dead
    beyond a1^m) and exact Laurent units (say u) to any of the above,
  * plain integers, for symbolic identity checks.

Elements are sparse sums of monomials ``coefficient * a1^i * u^j`` held in a
dict keyed by exponent vectors; there is one canonical form (no zero
coefficients, least nonnegative residues) so equality and serialization are
exact and deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass


class RingError(Exception):
    pass


class ConstructionError(RingError):
    pass


class NotAUnitError(RingError):
    pass


# ---------------------------------------------------------------------------
# scalar coefficient arithmetic (internal): Z, Z/m, and (Z/m)[w]/(modulus)
# ---------------------------------------------------------------------------

class IntScalars:
    """Plain integers; only +-1 are units."""

    kind = "Z"
    char = 0
    p = 0
    precision = 1
    degree = 1

    def key(self):
        return ("Z",)

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def from_int(self, n):
        return int(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a in (1, -1)

    def inv(self, a):
        if not self.is_unit(a):
            raise NotAUnitError("%r is not a unit in Z" % (a,))
        return a

    def elements(self):
        raise RingError("Z is not finite")

    def components(self, a):
        return (a,)

    def from_components(self, comps):
        return comps[0]

    def to_str(self, a):
        return str(a)

    def label(self):
        return "Z"


class ZmodScalars:
    """Z/m with canonical representatives in [0, m)."""

    kind = "Zmod"

    def __init__(self, m):
        if m < 2:
            raise ConstructionError("modulus must be >= 2")
        self.m = m
        self.char = m
        # p-adic shape, used by reductions and filtrations
        p = 2 if m % 2 == 0 else 3 if m % 3 == 0 else m
        k = 0
        n = m
        while n % p == 0:
            n //= p
            k += 1
        if n != 1:
            raise ConstructionError("only prime-power moduli are supported, got %d" % m)
        self.p = p
        self.precision = k
        self.degree = 1

    def key(self):
        return ("Zmod", self.m)

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1 % self.m

    def from_int(self, n):
        return n % self.m

    def add(self, a, b):
        return (a + b) % self.m

    def sub(self, a, b):
        return (a - b) % self.m

    def neg(self, a):
        return (-a) % self.m

    def mul(self, a, b):
        return (a * b) % self.m

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a % self.p != 0

    def inv(self, a):
        if not self.is_unit(a):
            raise NotAUnitError("%r is not a unit in Z/%d" % (a, self.m))
        return pow(a, -1, self.m)

    def pow_frobenius(self, a):
        # x -> x^p; the identity on a prime field, kept for uniformity
        return pow(a, self.p, self.m)

    def elements(self):
        return iter(range(self.m))

    def components(self, a):
        return (a,)

    def from_components(self, comps):
        return comps[0] % self.m

    def to_str(self, a):
        return str(a)

    def label(self):
        if self.m == self.p:
            return "F%d" % self.p
        return "Z/%d" % self.m


class ExtScalars:
    """(Z/m)[w]/(modulus) with elements stored as coefficient tuples.

    The modulus is monic with coefficients listed from degree 0 up.  With
    m = 2 this is the field F_{2^d}; with m = 2^k and modulus w^2+w+1 it is
    the truncated Witt ring W_k(F4) in its unramified-extension presentation.
    """

    kind = "Ext"

    def __init__(self, base, modulus, gen_name="w"):
        if modulus[-1] != 1:
            raise ConstructionError("modulus must be monic")
        self.base = base
        self.modulus = tuple(base.from_int(c) for c in modulus)
        self.degree = len(modulus) - 1
        if self.degree < 2:
            raise ConstructionError("extension degree must be >= 2")
        self.gen_name = gen_name
        self.char = base.char
        self.p = base.p
        self.precision = base.precision
        self.m = base.m
        # w^degree = -(lower part of modulus)
        self._wtop = tuple(base.neg(c) for c in self.modulus[: self.degree])
        self._residue = None

    def key(self):
        return ("Ext", self.base.key(), self.modulus, self.gen_name)

    @property
    def zero(self):
        return (0,) * self.degree

    @property
    def one(self):
        return (self.base.one,) + (0,) * (self.degree - 1)

    @property
    def gen(self):
        return (0, self.base.one) + (0,) * (self.degree - 2)

    def from_int(self, n):
        return (self.base.from_int(n),) + (0,) * (self.degree - 1)

    def add(self, a, b):
        return tuple((x + y) % self.m for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.m for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.m for x in a)

    def mul(self, a, b):
        d = self.degree
        work = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        work[i + j] += x * y
        for i in range(2 * d - 2, d - 1, -1):
            c = work[i] % self.m
            if c:
                work[i] = 0
                for j, t in enumerate(self._wtop):
                    if t:
                        work[i - d + j] += c * t
        return tuple(c % self.m for c in work[:d])

    def pow(self, a, n):
        result = self.one
        sq = a
        while n:
            if n & 1:
                result = self.mul(result, sq)
            sq = self.mul(sq, sq)
            n >>= 1
        return result

    def is_zero(self, a):
        return all(c == 0 for c in a)

    def is_unit(self, a):
        return any(c % self.p for c in a)

    def residue_scalars(self):
        if self._residue is None:
            if self.precision == 1:
                self._residue = self
            else:
                self._residue = ExtScalars(ZmodScalars(self.p), self.modulus, self.gen_name)
        return self._residue

    def residue(self, a):
        return tuple(c % self.p for c in a)

    def inv(self, a):
        if not self.is_unit(a):
            raise NotAUnitError("%s is not a unit in %s" % (self.to_str(a), self.label()))
        res = self.residue_scalars()
        # invert in the residue field by Fermat, then Newton-lift
        q = res.p ** res.degree
        b = res.pow(self.residue(a), q - 2)
        for _ in range(self.precision.bit_length() + 1):
            err = self.sub(self.one, self.mul(a, b))
            if self.is_zero(err):
                return b
            b = self.mul(b, self.add(self.one, err))
        raise RingError("inverse iteration failed to converge")  # pragma: no cover

    def pow_frobenius(self, a):
        # x -> x^p; a field automorphism when precision == 1
        return self.pow(a, self.p)

    def frobenius_lift(self, a):
        """The ring automorphism reducing to x -> x^p on the residue field."""
        if self.precision == 1:
            return self.pow_frobenius(a)
        if self.degree == 2 and self.modulus == (1, 1, 1):
            # w -> w^2 = -1 - w
            c0, c1 = a
            return ((c0 - c1) % self.m, (-c1) % self.m)
        raise RingError("Frobenius lift implemented only for w^2+w+1 extensions")

    def elements(self):
        # ordered by the integer encoding sum(c_i * m^i)
        for comps in itertools.product(range(self.m), repeat=self.degree):
            yield tuple(reversed(comps))

    def components(self, a):
        return tuple(a)

    def from_components(self, comps):
        return tuple(c % self.m for c in comps)

    def to_str(self, a):
        terms = []
        for i, c in enumerate(a):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(self.gen_name if i == 1 else "%s^%d" % (self.gen_name, i))
            else:
                terms.append("%d*%s" % (c, self.gen_name) if i == 1
                             else "%d*%s^%d" % (c, self.gen_name, i))
        return "+".join(terms) if terms else "0"

    def label(self):
        if self.precision == 1:
            return "F%d" % (self.p ** self.degree)
        return "W%d(F%d)" % (self.precision, self.p ** self.degree)


# ---------------------------------------------------------------------------
# field and Witt-ring specifications
# ---------------------------------------------------------------------------

def _poly_is_irreducible(modulus, p):
    """Exhaustive irreducibility test over F_p; returns (ok, factor)."""
    deg = len(modulus) - 1

    def poly_mod(f, g):
        f = list(f)
        dg = len(g) - 1
        for i in range(len(f) - 1, dg - 1, -1):
            c = f[i] % p
            if c:
                for j in range(dg + 1):
                    f[i - dg + j] = (f[i - dg + j] - c * g[j]) % p
        while len(f) > 1 and f[-1] % p == 0:
            f.pop()
        return [c % p for c in f]

    for d in range(1, deg // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            g = list(tail) + [1]
            r = poly_mod(modulus, g)
            if all(c == 0 for c in r):
                return False, tuple(g)
    return True, None


_DEFAULT_MODULI = {}


def _default_modulus(p, degree):
    """Least irreducible monic polynomial of the given degree over F_p."""
    if (p, degree) not in _DEFAULT_MODULI:
        if degree == 1:
            _DEFAULT_MODULI[(p, degree)] = (0, 1)
        else:
            for tail in itertools.product(range(p), repeat=degree):
                cand = tuple(tail) + (1,)
                if _poly_is_irreducible(cand, p)[0]:
                    _DEFAULT_MODULI[(p, degree)] = cand
                    break
    return _DEFAULT_MODULI[(p, degree)]


@dataclass(frozen=True)
class FieldSpec:
    characteristic: int
    degree: int = 1
    modulus: tuple = None  # monic, coefficients from degree 0 up; None = default

    def validate(self):
        p, n = self.characteristic, self.degree
        if p not in (2, 3):
            raise ConstructionError("characteristic must be 2 or 3, got %r" % (p,))
        if p == 3 and n != 1:
            raise ConstructionError("only the prime field is supported in characteristic 3")
        if p == 2 and not 1 <= n <= 8:
            raise ConstructionError("degree must be between 1 and 8, got %d" % n)
        modulus = self.modulus
        if modulus is None:
            modulus = _default_modulus(p, n)
        modulus = tuple(c % p for c in modulus[:-1]) + (modulus[-1],)
        if len(modulus) - 1 != n:
            raise ConstructionError("modulus degree %d does not match field degree %d"
                                    % (len(modulus) - 1, n))
        if modulus[-1] != 1:
            raise ConstructionError("modulus must be monic")
        if n == 2 and p == 2 and modulus != (1, 1, 1):
            raise ConstructionError("F4 must be presented as F2[w]/(w^2+w+1)")
        if n > 1:
            ok, factor = _poly_is_irreducible(modulus, p)
            if not ok:
                raise ConstructionError(
                    "modulus %s is reducible over F%d: divisible by %s"
                    % (_poly_str(modulus), p, _poly_str(factor)))
        return modulus


@dataclass(frozen=True)
class WittSpec:
    precision: int  # arithmetic is exact modulo 2^precision; residue field is F4

    def validate(self):
        if self.precision < 1:
            raise ConstructionError("precision must be >= 1")


def _poly_str(coeffs):
    terms = []
    for i, c in enumerate(coeffs):
        if not c:
            continue
        if i == 0:
            terms.append(str(c))
        else:
            base = "x" if i == 1 else "x^%d" % i
            terms.append(base if c == 1 else "%d*%s" % (c, base))
    return "+".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# rings with variables, and their elements
# ---------------------------------------------------------------------------

class Ring:
    """A scalar ring plus optional truncated-series and Laurent variables.

    Series variables carry a truncation order m (exponents live in [0, m));
    Laurent variables are exact with exponents in Z.  A Ring with no
    variables is just its scalar ring with the same element interface.
    """

    def __init__(self, scalars, series_vars=(), laurent_vars=(), spec=None):
        self.scalars = scalars
        self.series_vars = tuple((str(n), int(m)) for n, m in series_vars)
        self.laurent_vars = tuple(str(n) for n in laurent_vars)
        for _, m in self.series_vars:
            if m < 1:
                raise ConstructionError("series truncation order must be >= 1")
        names = [n for n, _ in self.series_vars] + list(self.laurent_vars)
        if len(set(names)) != len(names):
            raise ConstructionError("duplicate variable names: %r" % (names,))
        self.var_names = tuple(names)
        self.nseries = len(self.series_vars)
        self.nvars = len(names)
        self.spec = spec
        self._zero_exps = (0,) * self.nvars
        self._key = (scalars.key(), self.series_vars, self.laurent_vars)
        self._cache = {}

    def __eq__(self, other):
        return isinstance(other, Ring) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return "Ring(%s)" % self.label()

    def label(self):
        s = self.scalars.label()
        for n, m in self.series_vars:
            s += "[[%s]/%s^%d]" % (n, n, m)
        for n in self.laurent_vars:
            s += "[%s^+-1]" % n
        return s

    def descriptor(self):
        return {
            "base": self.scalars.label(),
            "series": [[n, m] for n, m in self.series_vars],
            "laurent": list(self.laurent_vars),
        }

    # -- construction -------------------------------------------------------

    def make(self, monomials):
        """Normalize a {exponent-vector: scalar} dict into a RingValue."""
        clean = {}
        for exps, c in monomials.items():
            if self.scalars.is_zero(c):
                continue
            keep = True
            for i in range(self.nseries):
                e = exps[i]
                if e < 0:
                    raise RingError("negative exponent for series variable")
                if e >= self.series_vars[i][1]:
                    keep = False
                    break
            if keep:
                clean[tuple(exps)] = c
        return RingValue(self, clean)

    @property
    def zero(self):
        return RingValue(self, {})

    @property
    def one(self):
        return RingValue(self, {self._zero_exps: self.scalars.one})

    def from_int(self, n):
        return self.make({self._zero_exps: self.scalars.from_int(n)})

    def scalar_value(self, c):
        return self.make({self._zero_exps: c})

    def gen(self, name):
        if name not in self.var_names:
            raise RingError("no variable %r in %s" % (name, self.label()))
        exps = [0] * self.nvars
        exps[self.var_names.index(name)] = 1
        return RingValue(self, {tuple(exps): self.scalars.one})

    def scalar_gen(self):
        """The scalar-ring generator (w) as a ring element, if any."""
        if not isinstance(self.scalars, ExtScalars):
            raise RingError("%s has no scalar generator" % self.label())
        return self.make({self._zero_exps: self.scalars.gen})

    def monomial(self, exps, scalar):
        return self.make({tuple(exps): scalar})

    def elements(self):
        if self.nvars:
            raise RingError("%s is infinite; cannot enumerate" % self.label())
        for c in self.scalars.elements():
            yield RingValue(self, {(): c} if not self.scalars.is_zero(c) else {})

    def random_element(self, rng, terms=3, laurent_span=2):
        monomials = {}
        scal = self.scalars
        for _ in range(terms):
            exps = []
            for _, m in self.series_vars:
                exps.append(rng.randrange(m))
            for _ in self.laurent_vars:
                exps.append(rng.randrange(-laurent_span, laurent_span + 1))
            if isinstance(scal, ExtScalars):
                c = tuple(rng.randrange(scal.m) for _ in range(scal.degree))
            elif isinstance(scal, ZmodScalars):
                c = rng.randrange(scal.m)
            else:
                c = rng.randrange(-9, 10)
            exps = tuple(exps)
            monomials[exps] = scal.add(monomials.get(exps, scal.zero), c)
        return self.make(monomials)

    # -- structural maps ----------------------------------------------------

    def residue_ring(self):
        """The quotient by the maximal filtration ideal (p and all series vars)."""
        ideal = []
        if self.scalars.precision > 1:
            ideal.append(self.scalars.p)
        ideal.extend(n for n, _ in self.series_vars)
        if not ideal:
            return self
        return self._quotient_ring(tuple(ideal))

    def _quotient_ring(self, ideal):
        if ("quot", ideal) in self._cache:
            return self._cache[("quot", ideal)]
        scalars = self.scalars
        kill_vars = []
        for g in ideal:
            if isinstance(g, int):
                if g != scalars.p or scalars.p == 0:
                    raise RingError("unsupported ideal generator %r in %s" % (g, self.label()))
                if isinstance(scalars, ExtScalars):
                    scalars = scalars.residue_scalars()
                elif isinstance(scalars, ZmodScalars):
                    scalars = ZmodScalars(scalars.p)
                else:
                    raise RingError("cannot reduce %s modulo %r" % (self.label(), g))
            else:
                if g not in [n for n, _ in self.series_vars]:
                    raise RingError("unsupported ideal generator %r in %s" % (g, self.label()))
                kill_vars.append(g)
        ring = Ring(scalars,
                    [(n, m) for n, m in self.series_vars if n not in kill_vars],
                    self.laurent_vars)
        self._cache[("quot", ideal)] = ring
        return ring


class RingValue:
    """An element of a Ring: immutable sparse sum of monomials."""

    __slots__ = ("ring", "monomials", "_hash")

    def __init__(self, ring, monomials):
        self.ring = ring
        self.monomials = monomials
        self._hash = None

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RingValue):
            if other.ring != self.ring:
                raise RingError("mixed rings: %s vs %s"
                                % (self.ring.label(), other.ring.label()))
            return other
        if isinstance(other, int):
            return self.ring.from_int(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        scal = self.ring.scalars
        out = dict(self.monomials)
        for exps, c in other.monomials.items():
            acc = scal.add(out.get(exps, scal.zero), c)
            if scal.is_zero(acc):
                out.pop(exps, None)
            else:
                out[exps] = acc
        return RingValue(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        scal = self.ring.scalars
        return RingValue(self.ring, {e: scal.neg(c) for e, c in self.monomials.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        ring = self.ring
        scal = ring.scalars
        ns = ring.nseries
        caps = [m for _, m in ring.series_vars]
        out = {}
        for e1, c1 in self.monomials.items():
            for e2, c2 in other.monomials.items():
                exps = tuple(a + b for a, b in zip(e1, e2)) if e1 else ()
                dead = False
                for i in range(ns):
                    if exps[i] >= caps[i]:
                        dead = True
                        break
                if dead:
                    continue
                c = scal.mul(c1, c2)
                acc = scal.add(out.get(exps, scal.zero), c)
                if scal.is_zero(acc):
                    out.pop(exps, None)
                else:
                    out[exps] = acc
        return RingValue(ring, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("exponent must be an integer")
        if n < 0:
            return self.inv() ** (-n)
        result = self.ring.one
        sq = self
        while n:
            if n & 1:
                result = result * sq
            sq = sq * sq
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.from_int(other)
        if not isinstance(other, RingValue):
            return NotImplemented
        return self.ring == other.ring and self.monomials == other.monomials

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.canonical_key()))
        return self._hash

    def __bool__(self):
        return bool(self.monomials)

    # -- predicates and inversion -------------------------------------------

    def is_zero(self):
        return not self.monomials

    def _residue_shape(self):
        """Image with series variables killed and scalars reduced mod p."""
        ring = self.ring
        scal = ring.scalars
        out = {}
        for exps, c in self.monomials.items():
            if any(exps[i] for i in range(ring.nseries)):
                continue
            if isinstance(scal, ExtScalars) and scal.precision > 1:
                c = scal.residue(c)
                if all(x == 0 for x in c):
                    continue
            elif isinstance(scal, ZmodScalars) and scal.precision > 1:
                c = c % scal.p
                if c == 0:
                    continue
            out[exps] = c
        return out

    def is_unit(self):
        red = self._residue_shape()
        if len(red) != 1:
            return False
        ((exps, c),) = red.items()
        scal = self.ring.scalars
        if isinstance(scal, ExtScalars) and scal.precision > 1:
            return scal.residue_scalars().is_unit(c)
        if isinstance(scal, ZmodScalars) and scal.precision > 1:
            return c % scal.p != 0
        return scal.is_unit(self.monomials[exps]) if exps in self.monomials else bool(c)

    def inv(self):
        ring = self.ring
        scal = ring.scalars
        red = self._residue_shape()
        if len(red) != 1:
            raise NotAUnitError("%s is not a unit in %s" % (self, ring.label()))
        ((exps, _),) = red.items()
        lead = self.monomials.get(exps)
        if lead is None or not scal.is_unit(lead):
            raise NotAUnitError("%s is not a unit in %s" % (self, ring.label()))
        g = ring.monomial(tuple(-e for e in exps), scal.inv(lead))
        one = ring.one
        nil_bound = scal.precision + sum(m for _, m in ring.series_vars) + 2
        for _ in range(nil_bound):
            err = one - self * g
            if err.is_zero():
                return g
            g = g + g * err
        raise NotAUnitError("%s is not a unit in %s" % (self, ring.label()))

    # -- views and maps -----------------------------------------------------

    def coefficient(self, exps):
        """The scalar at an exponent vector, as a ring element of the base."""
        c = self.monomials.get(tuple(exps))
        if c is None:
            c = self.ring.scalars.zero
        return c

    def constant_scalar(self):
        return self.coefficient(self.ring._zero_exps)

    def map_scalars(self, fn, target_ring=None):
        ring = target_ring or self.ring
        out = {}
        scal = ring.scalars
        for exps, c in self.monomials.items():
            v = fn(c)
            if not scal.is_zero(v):
                out[exps] = scal.add(out.get(exps, scal.zero), v) if exps in out else v
        return ring.make(out)

    def canonical_key(self):
        """A deterministic total ordering key (graded-lex on exponents)."""
        items = []
        for exps, c in self.monomials.items():
            items.append(((sum(exps), exps), self.ring.scalars.components(c)))
        items.sort()
        return tuple(items)

    def sorted_monomials(self):
        return sorted(self.monomials.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def to_json(self):
        return {
            "ring": self.ring.descriptor(),
            "monomials": [[list(exps), self.ring.scalars.to_str(c)]
                          for exps, c in self.sorted_monomials()],
        }

    def __repr__(self):
        if not self.monomials:
            return "0"
        parts = []
        for exps, c in self.sorted_monomials():
            factors = []
            cs = self.ring.scalars.to_str(c)
            for name, e in zip(self.ring.var_names, exps):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append("%s^%d" % (name, e))
            if not factors or cs != "1":
                factors.insert(0, "(%s)" % cs if "+" in cs else cs)
            parts.append("*".join(factors))
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# public constructors
# ---------------------------------------------------------------------------

_RING_CACHE = {}


def field_make(spec):
    """Construct a finite field from a FieldSpec.

    The handle supports add/mul/neg through its elements, inversion of
    nonzero elements, full enumeration, and Frobenius x -> x^p.
    """
    modulus = spec.validate()
    key = ("field", spec.characteristic, spec.degree, modulus)
    if key not in _RING_CACHE:
        if spec.degree == 1:
            scal = ZmodScalars(spec.characteristic)
        else:
            scal = ExtScalars(ZmodScalars(spec.characteristic), modulus)
        _RING_CACHE[key] = Ring(scal, spec=spec)
    return _RING_CACHE[key]


def GF(q):
    """Finite field of order q = 2^n (n <= 8) or 3."""
    if q == 3:
        return field_make(FieldSpec(3, 1))
    n = q.bit_length() - 1
    if 2 ** n != q:
        raise ConstructionError("order must be a power of 2 or equal to 3, got %d" % q)
    return field_make(FieldSpec(2, n))


def witt_make(spec):
    """The truncated Witt ring W_k(F4) = (Z/2^k)[w]/(w^2+w+1)."""
    spec.validate()
    key = ("witt", spec.precision)
    if key not in _RING_CACHE:
        if spec.precision == 1:
            _RING_CACHE[key] = GF(4)
        else:
            scal = ExtScalars(ZmodScalars(2 ** spec.precision), (1, 1, 1))
            _RING_CACHE[key] = Ring(scal, spec=spec)
    return _RING_CACHE[key]


def witt(k):
    return witt_make(WittSpec(k))


def integers():
    key = ("Z",)
    if key not in _RING_CACHE:
        _RING_CACHE[key] = Ring(IntScalars())
    return _RING_CACHE[key]


def tower(base, series_vars=(), laurent_vars=()):
    """Adjoin truncated series variables and Laurent units to a base ring."""
    if base.nvars:
        raise ConstructionError("tower base must have no variables")
    return Ring(base.scalars, series_vars, laurent_vars)


# ---------------------------------------------------------------------------
# Teichmuller lift
# ---------------------------------------------------------------------------

def teichmuller_lift(x, k):
    """The unique lift t of x in W_k(F4) with t^4 = t and t = x mod 2.

    Computed by iterating y -> y^4 from any lift until it stabilizes.
    """
    if k < 1:
        raise ConstructionError("precision must be >= 1")
    ring = x.ring
    if not isinstance(ring.scalars, ExtScalars) or ring.scalars.label() != "F4" or ring.nvars:
        raise RingError("Teichmuller lift is defined on F4 elements")
    W = witt(k)
    c = x.constant_scalar()
    y = W.make({(): tuple(int(v) for v in c)})
    for _ in range(k + 2):
        y4 = y ** 4
        if y4 == y:
            return y
        y = y4
    return y  # pragma: no cover


# ---------------------------------------------------------------------------
# reductions, truncations, embeddings
# ---------------------------------------------------------------------------

def reduce_value(value, ideal):
    """Canonical image of a value modulo the ideal (2) or (2, a1).

    Ideal generators are the integer p of the scalar ring and/or names of
    series variables; e.g. (2,), (2, "a1"), ("a1",).
    """
    ring = value.ring
    gens = tuple(ideal)
    target = ring._quotient_ring(gens)
    kill = [n for n in gens if isinstance(n, str)]
    kill_idx = [i for i, (n, _) in enumerate(ring.series_vars) if n in kill]
    keep_idx = [i for i in range(ring.nvars) if i not in kill_idx]
    drop_p = any(isinstance(g, int) for g in gens)
    scal = ring.scalars
    tscal = target.scalars
    out = {}
    for exps, c in value.monomials.items():
        if any(exps[i] for i in kill_idx):
            continue
        new_exps = tuple(exps[i] for i in keep_idx)
        if drop_p:
            if isinstance(scal, ExtScalars):
                c = tuple(x % scal.p for x in c)
            else:
                c = c % scal.p
        if tscal.is_zero(c):
            continue
        out[new_exps] = tscal.add(out.get(new_exps, tscal.zero), c)
    return target.make(out)


def truncate_value(value, target_ring):
    """Map to a lower-precision ring: smaller 2-adic modulus and/or shorter
    series truncation, same variable layout."""
    ring = value.ring
    if [n for n, _ in ring.series_vars] != [n for n, _ in target_ring.series_vars] \
            or ring.laurent_vars != target_ring.laurent_vars:
        raise RingError("incompatible variable layout")
    scal, tscal = ring.scalars, target_ring.scalars
    caps = [m for _, m in target_ring.series_vars]
    out = {}
    for exps, c in value.monomials.items():
        if any(exps[i] >= caps[i] for i in range(len(caps))):
            continue
        if isinstance(tscal, ExtScalars):
            c = tuple(x % tscal.m for x in c)
        elif isinstance(tscal, ZmodScalars):
            c = c % tscal.m
        if not tscal.is_zero(c):
            out[exps] = c
    return target_ring.make(out)


def substitute_laurent(value, name, replacement):
    """Evaluate a Laurent variable at a unit of the remaining ring."""
    ring = value.ring
    if name not in ring.laurent_vars:
        raise RingError("no Laurent variable %r" % name)
    idx = ring.var_names.index(name)
    target = Ring(ring.scalars, ring.series_vars,
                  tuple(n for n in ring.laurent_vars if n != name))
    if replacement.ring != target:
        raise RingError("replacement must live in %s" % target.label())
    if not replacement.is_unit():
        raise NotAUnitError("replacement for %s must be a unit" % name)
    rep_inv = replacement.inv()
    result = target.zero
    for exps, c in value.monomials.items():
        e = exps[idx]
        rest = tuple(x for i, x in enumerate(exps) if i != idx)
        term = target.monomial(rest, c)
        result = result + term * (replacement ** e if e >= 0 else rep_inv ** (-e))
    return result


def field_embedding(src, dst):
    """An embedding F_{2^n} -> F_{2^m} for n | m, as a function on values.

    The generator of the source is sent to the canonically least root of the
    source modulus in the destination, so the map is deterministic.
    """
    for ring in (src, dst):
        if ring.nvars or ring.scalars.precision != 1 or ring.scalars.p != 2:
            raise RingError("embeddings are defined between finite fields of characteristic 2")
    sdeg = src.scalars.degree
    ddeg = dst.scalars.degree
    if ddeg % sdeg != 0:
        raise RingError("F_{2^%d} does not embed in F_{2^%d}" % (sdeg, ddeg))
    if src == dst:
        return lambda v: v
    if sdeg == 1:
        def embed_prime(v):
            c = v.constant_scalar()
            return dst.from_int(int(c))
        return embed_prime
    modulus = src.scalars.modulus
    root = None
    for cand in dst.elements():
        acc = dst.zero
        for i, c in enumerate(modulus):
            if c:
                acc = acc + dst.from_int(c) * cand ** i
        if acc.is_zero() and not cand.is_zero():
            root = cand
            break
    if root is None:  # pragma: no cover - cannot happen for n | m
        raise RingError("no root of the source modulus found")
    powers = [dst.one]
    for _ in range(sdeg - 1):
        powers.append(powers[-1] * root)

    def embed(v):
        comps = src.scalars.components(v.constant_scalar())
        acc = dst.zero
        for c, p in zip(comps, powers):
            if c:
                acc = acc + p
        return acc

    return embed


def frobenius(value):
    """x -> x^p on a finite field (no variables)."""
    ring = value.ring
    if ring.nvars or ring.scalars.precision != 1:
        raise RingError("Frobenius x -> x^p is defined on finite fields")
    return value ** ring.scalars.p


# ---------------------------------------------------------------------------
# ring endomorphisms from generator images
# ---------------------------------------------------------------------------

class RingEndo:
    """A ring endomorphism given by images of the variables plus an
    automorphism ('identity' or 'frobenius') of the scalar coefficients."""

    def __init__(self, ring, images, base_auto="identity"):
        self.ring = ring
        self.base_auto = base_auto
        if base_auto not in ("identity", "frobenius"):
            raise RingError("unknown base automorphism %r" % (base_auto,))
        self.images = {}
        for name in ring.var_names:
            img = images.get(name)
            if img is None:
                img = ring.gen(name)
            if img.ring != ring:
                raise RingError("image of %s must live in %s" % (name, ring.label()))
            self.images[name] = img
        for name in ring.laurent_vars:
            if not self.images[name].is_unit():
                raise NotAUnitError("image of %s is not a unit" % name)
        for name, m in ring.series_vars:
            if not (self.images[name] ** m).is_zero():
                raise RingError("image of %s does not respect truncation %s^%d = 0"
                                % (name, name, m))
        self._inv_images = {n: self.images[n].inv() for n in ring.laurent_vars}

    def _apply_scalar(self, c):
        if self.base_auto == "identity":
            return c
        scal = self.ring.scalars
        if isinstance(scal, ExtScalars):
            return scal.frobenius_lift(c)
        return scal.pow_frobenius(c)

    def __call__(self, value):
        if value.ring != self.ring:
            raise RingError("value lives in %s, not %s"
                            % (value.ring.label(), self.ring.label()))
        ring = self.ring
        result = ring.zero
        for exps, c in value.monomials.items():
            term = ring.scalar_value(self._apply_scalar(c))
            for name, e in zip(ring.var_names, exps):
                if e > 0:
                    term = term * self.images[name] ** e
                elif e < 0:
                    term = term * self._inv_images[name] ** (-e)
            result = result + term
        return result

    def then(self, other):
        """The composite value -> other(self(value))."""
        if other.ring != self.ring:
            raise RingError("cannot compose endomorphisms of different rings")
        images = {n: other(self.images[n]) for n in self.ring.var_names}
        auto = "identity" if self.base_auto == other.base_auto else "frobenius"
        return RingEndo(self.ring, images, auto)

    def agrees_with(self, other):
        return (self.base_auto == other.base_auto
                and all(self.images[n] == other.images[n] for n in self.ring.var_names))

    def is_identity(self):
        return self.agrees_with(RingEndo(self.ring, {}))

    def __repr__(self):
        imgs = ", ".join("%s->%r" % (n, self.images[n]) for n in self.ring.var_names)
        return "RingEndo(%s; base=%s)" % (imgs, self.base_auto)


def ring_endomorphism(ring, images, base_auto="identity"):
    """Build a RingEndo; composite keys like 'ua1' assign the product u*a1.

    When a composite key '<laurent><series>' is given together with the
    Laurent image, the series image is derived, e.g. images for ('u', 'ua1')
    determine the image of a1 as image(ua1) * image(u)^-1.
    """
    resolved = {}
    pending = {}
    for key, img in images.items():
        if key in ring.var_names:
            resolved[key] = img
        else:
            for lname in ring.laurent_vars:
                for sname, _ in ring.series_vars:
                    if key == lname + sname:
                        pending[(lname, sname)] = img
                        break
                else:
                    continue
                break
            else:
                raise RingError("unknown generator %r" % key)
    for (lname, sname), img in pending.items():
        if lname not in resolved:
            raise RingError("image of %s required to interpret %s%s"
                            % (lname, lname, sname))
        resolved[sname] = img * resolved[lname].inv()
    return RingEndo(ring, resolved, base_auto)


# ---------------------------------------------------------------------------
# the (p, series-variables) filtration, used by the degree-by-degree solvers
# ---------------------------------------------------------------------------

def filtration_shape(ring):
    """(p, k, [caps]) describing the nilpotent ideal (p, series vars).

    k is the 2-adic precision (1 when p is already zero in the scalars);
    powers of the ideal vanish beyond level (k-1) + sum(cap-1).
    """
    scal = ring.scalars
    if scal.p not in (2, 3) and scal.p != 0:
        raise RingError("no filtration on %s" % ring.label())
    k = scal.precision if scal.p else 1
    caps = [m for _, m in ring.series_vars]
    return scal.p, k, caps


def filtration_top(ring):
    p, k, caps = filtration_shape(ring)
    return (k - 1) + sum(m - 1 for m in caps)


def filtration_reduce(value, j):
    """Canonical representative modulo the (j+1)-st power of the filtration
    ideal: the coefficient of a series monomial of total degree b survives
    modulo p^(j+1-b)."""
    ring = value.ring
    p, k, _ = filtration_shape(ring)
    ns = ring.nseries
    scal = ring.scalars
    out = {}
    for exps, c in value.monomials.items():
        b = sum(exps[:ns])
        if b > j:
            continue
        q = p ** min(k, j + 1 - b) if k > 1 else None
        if q is not None:
            if isinstance(scal, ExtScalars):
                c = tuple(x % q for x in c)
            else:
                c = c % q
        if not scal.is_zero(c):
            out[exps] = c
    return ring.make(out)


def in_filtration(value, j):
    """Whether the value lies in the j-th power of the filtration ideal."""
    ring = value.ring
    p, k, _ = filtration_shape(ring)
    ns = ring.nseries
    for exps, c in value.monomials.items():
        b = sum(exps[:ns])
        if b >= j:
            continue
        q = p ** min(k, j - b) if k > 1 else 0
        if q == 0:
            return False
        comps = ring.scalars.components(c)
        if any(x % q for x in comps):
            return False
    return True


def graded_coords(value, j):
    """F2-coordinates of a value in gr_j = m^j / m^(j+1), m the filtration
    ideal.  Keys are (exponent-vector, scalar-component-index); requires the
    scalar characteristic to be a power of 2."""
    ring = value.ring
    p, k, _ = filtration_shape(ring)
    if p != 2:
        raise RingError("graded coordinates need characteristic 2^k scalars")
    ns = ring.nseries
    coords = {}
    for exps, c in value.monomials.items():
        b = sum(exps[:ns])
        a = j - b
        if a < 0 or a >= k:
            continue
        for ci, comp in enumerate(ring.scalars.components(c)):
            if (comp >> a) & 1:
                coords[(exps, ci)] = 1
    return coords


def graded_basis_scalars(ring, a):
    """Scalars 2^a * e_i for each F2-component of the scalar ring."""
    scal = ring.scalars
    out = []
    if isinstance(scal, ExtScalars):
        for i in range(scal.degree):
            comps = [0] * scal.degree
            comps[i] = (1 << a) % scal.m
            out.append(scal.from_components(comps))
    else:
        out.append(scal.from_int(1 << a))
    return [c for c in out if not scal.is_zero(c)]

"""Weierstrass curves y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.

Everything here is exact: standard b/c/Delta invariants, coordinate changes
(u, r, s, t) with their composition law, the chord-tangent group law on
points over finite fields, torsion enumeration through field extensions,
exhaustive automorphism and isomorphism search, and a degree-by-degree
elimination solver for isomorphisms over truncated tower rings.

Coordinate-change convention: phi = (u, r, s, t) substitutes

    x = u^2 x' + r,    y = u^3 y' + s u^2 x' + t,

mapping a curve C in (x, y) to the curve apply_iso(C, phi) in (x', y').
Under a pure scaling the canonical invariant differential picks up the
factor u; equivalently the formal coordinate z = -x/y of the target pulls
back to u * z + O(z^2).
"""

from __future__ import annotations

from dataclasses import dataclass

from .lifting import CoordIndex, solve_gf2
from .rings import (
    GF, NotAUnitError, RingValue, field_embedding, filtration_reduce,
    filtration_top, graded_basis_scalars, graded_coords, in_filtration,
)
from .series import TruncSeries, inverse_unit


class CurveError(Exception):
    pass


class SingularCurveError(CurveError):
    pass


class TorsionBoundError(CurveError):
    pass


# ---------------------------------------------------------------------------
# curves and their invariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WCurve:
    a1: RingValue
    a2: RingValue
    a3: RingValue
    a4: RingValue
    a6: RingValue

    def __post_init__(self):
        ring = self.a1.ring
        for c in (self.a2, self.a3, self.a4, self.a6):
            if c.ring != ring:
                raise CurveError("curve coefficients must share a ring")

    @classmethod
    def from_coefficients(cls, ring, a1=0, a2=0, a3=0, a4=0, a6=0):
        def conv(c):
            return ring.from_int(c) if isinstance(c, int) else c
        return cls(conv(a1), conv(a2), conv(a3), conv(a4), conv(a6))

    @classmethod
    def with_order3_point(cls, ring, a1, a3):
        """The family y^2 + a1 xy + a3 y = x^3 carrying (0,0) of order 3."""
        return cls.from_coefficients(ring, a1=a1, a3=a3)

    @property
    def ring(self):
        return self.a1.ring

    def coefficients(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.coefficients()
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    def c_invariants(self):
        b2, b4, b6, _ = self.b_invariants()
        c4 = b2 * b2 - 24 * b4
        c6 = -(b2 ** 3) + 36 * b2 * b4 - 216 * b6
        return c4, c6

    def discriminant(self):
        b2, b4, b6, b8 = self.b_invariants()
        return -(b2 * b2 * b8) - 8 * (b4 ** 3) - 27 * (b6 * b6) + 9 * b2 * b4 * b6

    def is_smooth(self):
        return self.discriminant().is_unit()

    def j_invariant(self):
        delta = self.discriminant()
        if not delta.is_unit():
            raise SingularCurveError("singular curve: discriminant %r is not a unit" % delta)
        c4, _ = self.c_invariants()
        return c4 ** 3 * delta.inv()

    def invariants(self):
        """(b2, b4, b6, b8, c4, delta, j-or-None)."""
        b2, b4, b6, b8 = self.b_invariants()
        c4, _ = self.c_invariants()
        delta = self.discriminant()
        j = self.j_invariant() if delta.is_unit() else None
        return b2, b4, b6, b8, c4, delta, j

    def equation_value(self, x, y):
        return (y * y + self.a1 * x * y + self.a3 * y
                - x ** 3 - self.a2 * x * x - self.a4 * x - self.a6)

    def division_polynomial_3(self):
        """Coefficients (low to high) of psi_3 = 3x^4 + b2 x^3 + 3 b4 x^2 + 3 b6 x + b8."""
        b2, b4, b6, b8 = self.b_invariants()
        ring = self.ring
        return (b8, 3 * b6, 3 * b4, b2, ring.from_int(3))

    def sort_key(self):
        return tuple(c.canonical_key() for c in self.coefficients())

    def to_json(self):
        names = ("a1", "a2", "a3", "a4", "a6")
        return {n: c.to_json()["monomials"] for n, c in zip(names, self.coefficients())}

    def __repr__(self):
        return "WCurve(a1=%r, a2=%r, a3=%r, a4=%r, a6=%r)" % self.coefficients()


# ---------------------------------------------------------------------------
# coordinate changes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WIso:
    u: RingValue
    r: RingValue
    s: RingValue
    t: RingValue

    @classmethod
    def identity(cls, ring):
        return cls(ring.one, ring.zero, ring.zero, ring.zero)

    @classmethod
    def scaling(cls, u):
        ring = u.ring
        return cls(u, ring.zero, ring.zero, ring.zero)

    @property
    def ring(self):
        return self.u.ring

    def is_identity(self):
        ring = self.ring
        return (self.u == ring.one and self.r.is_zero()
                and self.s.is_zero() and self.t.is_zero())

    def compose(self, other):
        """First apply self, then other."""
        u1, r1, s1, t1 = self.u, self.r, self.s, self.t
        u2, r2, s2, t2 = other.u, other.r, other.s, other.t
        return WIso(u1 * u2,
                    r1 + u1 * u1 * r2,
                    s1 + u1 * s2,
                    t1 + u1 ** 3 * t2 + u1 * u1 * s1 * r2)

    def inverse(self):
        ui = self.u.inv()
        return WIso(ui,
                    -self.r * ui * ui,
                    -self.s * ui,
                    (self.r * self.s - self.t) * ui ** 3)

    def sort_key(self):
        return (self.u.canonical_key(), self.r.canonical_key(),
                self.s.canonical_key(), self.t.canonical_key())

    def to_json(self):
        return {n: getattr(self, n).to_json()["monomials"] for n in ("u", "r", "s", "t")}

    def __repr__(self):
        return "WIso(u=%r, r=%r, s=%r, t=%r)" % (self.u, self.r, self.s, self.t)


def apply_iso(curve, phi, check=True):
    """The transformed curve; checks Delta' = u^-12 Delta and c4' = u^-4 c4."""
    if not phi.u.is_unit():
        raise NotAUnitError("scaling component %r is not a unit" % phi.u)
    a1, a2, a3, a4, a6 = curve.coefficients()
    u, r, s, t = phi.u, phi.r, phi.s, phi.t
    ui = u.inv()
    ui2 = ui * ui
    ui3 = ui2 * ui
    b1 = (a1 + 2 * s) * ui
    b2 = (a2 - s * a1 + 3 * r - s * s) * ui2
    b3 = (a3 + r * a1 + 2 * t) * ui3
    b4 = (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) * ui2 * ui2
    b6 = (a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1) * ui3 * ui3
    image = WCurve(b1, b2, b3, b4, b6)
    if check:
        if image.discriminant() != curve.discriminant() * ui ** 12:
            raise CurveError("coordinate change broke the discriminant law")
        if image.c_invariants()[0] != curve.c_invariants()[0] * ui ** 4:
            raise CurveError("coordinate change broke the c4 law")
    return image


def transport_point(curve, phi, point):
    """Where a point of `curve` lands on apply_iso(curve, phi)."""
    if point.is_infinity():
        return point
    ui2 = (phi.u.inv()) ** 2
    ui3 = ui2 * phi.u.inv()
    x, y = point.x, point.y
    xp = (x - phi.r) * ui2
    yp = (y - phi.s * (x - phi.r) - phi.t) * ui3
    return CurvePoint.affine(xp, yp)


# ---------------------------------------------------------------------------
# points and the group law
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurvePoint:
    x: RingValue = None
    y: RingValue = None

    @classmethod
    def infinity(cls):
        return cls(None, None)

    @classmethod
    def affine(cls, x, y):
        return cls(x, y)

    def is_infinity(self):
        return self.x is None

    def sort_key(self):
        if self.is_infinity():
            return (0,)
        return (1, self.x.canonical_key(), self.y.canonical_key())

    def __repr__(self):
        if self.is_infinity():
            return "O"
        return "(%r, %r)" % (self.x, self.y)


def on_curve(curve, point):
    if point.is_infinity():
        return True
    return curve.equation_value(point.x, point.y).is_zero()


def point_neg(curve, point):
    if point.is_infinity():
        return point
    return CurvePoint.affine(point.x, -point.y - curve.a1 * point.x - curve.a3)


def point_add(curve, p, q):
    """Chord-tangent sum; the point at infinity is the identity."""
    for pt in (p, q):
        if not on_curve(curve, pt):
            raise CurveError("point %r is not on the curve" % (pt,))
    return _add_unchecked(curve, p, q)


def _add_unchecked(curve, p, q):
    if p.is_infinity():
        return q
    if q.is_infinity():
        return p
    a1, a2, a3, a4, a6 = curve.coefficients()
    x1, y1 = p.x, p.y
    x2, y2 = q.x, q.y
    if x1 == x2:
        if y2 == -y1 - a1 * x1 - a3:
            return CurvePoint.infinity()
        den = (2 * y1 + a1 * x1 + a3).inv()
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) * den
        nu = (-(x1 ** 3) + a4 * x1 + 2 * a6 - a3 * y1) * den
    else:
        den = (x2 - x1).inv()
        lam = (y2 - y1) * den
        nu = (y1 * x2 - y2 * x1) * den
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return CurvePoint.affine(x3, y3)


def point_mul(curve, n, point):
    if not on_curve(curve, point):
        raise CurveError("point %r is not on the curve" % (point,))
    if n < 0:
        return point_mul(curve, -n, point_neg(curve, point))
    acc = CurvePoint.infinity()
    step = point
    while n:
        if n & 1:
            acc = _add_unchecked(curve, acc, step)
        n >>= 1
        if n:
            step = _add_unchecked(curve, step, step)
    return acc


def point_order(curve, point, bound=32):
    if not on_curve(curve, point):
        raise CurveError("point %r is not on the curve" % (point,))
    acc = point
    for n in range(1, bound + 1):
        if acc.is_infinity():
            return n
        acc = _add_unchecked(curve, acc, point)
    raise CurveError("order exceeds bound %d" % bound)


def enumerate_points(curve):
    """All points over the (finite field) base ring, infinity first."""
    ring = curve.ring
    points = [CurvePoint.infinity()]
    affine = []
    for x in ring.elements():
        for y in ring.elements():
            if curve.equation_value(x, y).is_zero():
                affine.append(CurvePoint.affine(x, y))
    affine.sort(key=lambda p: p.sort_key())
    return points + affine


def base_change(curve, target_ring, embed=None):
    if embed is None:
        if curve.ring == target_ring:
            return curve
        embed = field_embedding(curve.ring, target_ring)
    return WCurve(*[embed(c) for c in curve.coefficients()])


def _element_degree(value):
    """Degree over F2 of a finite-field element: least e with x^(2^e) = x."""
    n = value.ring.scalars.degree
    for e in range(1, n + 1):
        if n % e:
            continue
        if value ** (2 ** e) == value:
            return e
    return n  # pragma: no cover


@dataclass(frozen=True)
class TorsionData:
    curve: WCurve
    points: tuple
    field: object
    extension_degree: int  # least m with all coordinates in F_{2^m}

    def nonzero_points(self):
        return tuple(p for p in self.points if not p.is_infinity())


def torsion_points(curve, n_torsion, search_bound=6):
    """All points of order dividing N over the smallest extension containing
    the full N-torsion (N^2 points), scanning extension degrees up to the
    bound."""
    ring = curve.ring
    if ring.nvars or ring.scalars.precision != 1 or ring.scalars.p != 2:
        raise CurveError("torsion search needs a curve over a finite field F_{2^n}")
    p = ring.scalars.p
    if n_torsion < 1 or n_torsion % p == 0:
        raise CurveError("torsion level must be coprime to the characteristic %d" % p)
    if not curve.is_smooth():
        raise SingularCurveError("singular curve")
    base_degree = ring.scalars.degree
    for m_search in range(base_degree, search_bound + 1, base_degree):
        field = GF(p ** m_search)
        ext_curve = base_change(curve, field)
        pts = [pt for pt in enumerate_points(ext_curve)
               if point_mul(ext_curve, n_torsion, pt).is_infinity()]
        if len(pts) == n_torsion ** 2:
            degrees = [1]
            for pt in pts:
                if not pt.is_infinity():
                    degrees.append(_element_degree(pt.x))
                    degrees.append(_element_degree(pt.y))
            m = 1
            for d in degrees:
                m = m * d // _gcd(m, d)
            return TorsionData(ext_curve, tuple(pts), field, m)
    raise TorsionBoundError(
        "full %d-torsion not found over F_%d^m for m <= %d"
        % (n_torsion, p, search_bound))


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# automorphisms and isomorphism search
# ---------------------------------------------------------------------------

def automorphisms(curve):
    """Exhaustive list of coordinate changes fixing the curve, over a finite
    field; canonically ordered."""
    ring = curve.ring
    if ring.nvars or ring.scalars.precision != 1:
        raise CurveError("automorphism search needs a curve over a finite field")
    found = []
    elements = list(ring.elements())
    units = [x for x in elements if not x.is_zero()]
    for u in units:
        for r in elements:
            for s in elements:
                for t in elements:
                    phi = WIso(u, r, s, t)
                    if apply_iso(curve, phi, check=False) == curve:
                        found.append(phi)
    found.sort(key=lambda phi: phi.sort_key())
    return found


@dataclass(frozen=True)
class IsoSearchResult:
    iso: WIso = None
    mode: str = ""
    certificate: dict = None

    @property
    def found(self):
        return self.iso is not None


def iso_search(curve1, curve2, mode="auto"):
    """Find phi with apply_iso(curve1, phi) == curve2.

    Over a finite field the search is exhaustive and the failure certificate
    records the number of candidates ruled out.  Over a truncated tower the
    transformation equations are solved degree by degree along the
    (2, series-variable) filtration, and failure reports the first
    obstructed step and coefficient.
    """
    if curve1.ring != curve2.ring:
        raise CurveError("curves must live over a common ring")
    ring = curve1.ring
    if mode == "auto":
        if not ring.nvars and ring.scalars.precision == 1 and ring.scalars.p:
            mode = "exhaustive"
        else:
            mode = "elimination"
    if mode == "exhaustive":
        return _iso_search_exhaustive(curve1, curve2)
    if mode == "elimination":
        return _iso_search_elimination(curve1, curve2)
    raise CurveError("unknown search mode %r" % (mode,))


def _iso_search_exhaustive(curve1, curve2):
    ring = curve1.ring
    if ring.nvars or ring.scalars.precision != 1:
        raise CurveError("exhaustive search needs a finite field")
    elements = list(ring.elements())
    units = [x for x in elements if not x.is_zero()]
    count = 0
    for u in units:
        for r in elements:
            for s in elements:
                for t in elements:
                    count += 1
                    phi = WIso(u, r, s, t)
                    if apply_iso(curve1, phi, check=False) == curve2:
                        return IsoSearchResult(phi, "exhaustive",
                                               {"candidates_tried": count})
    return IsoSearchResult(None, "exhaustive",
                           {"candidates_tried": count, "exhausted": True})


def _transformation_residual(curve1, curve2, u, r, s, t):
    """Source-side minus target-side of the five coordinate-change equations;
    all five vanish iff apply_iso(curve1, (u,r,s,t)) == curve2 for unit u."""
    a1, a2, a3, a4, a6 = curve1.coefficients()
    b1, b2, b3, b4, b6 = curve2.coefficients()
    return (
        a1 + 2 * s - b1 * u,
        a2 - s * a1 + 3 * r - s * s - b2 * u ** 2,
        a3 + r * a1 + 2 * t - b3 * u ** 3,
        a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t - b4 * u ** 4,
        a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1 - b6 * u ** 6,
    )


def _laurent_weight(curves):
    """The common u-homogeneity weight d with deg_u(a_i) = i*d, or None when
    the ring has no Laurent variable.  Raises if the curves are not
    homogeneous."""
    ring = curves[0].ring
    if not ring.laurent_vars:
        return None
    if len(ring.laurent_vars) != 1 or ring.nseries > 1:
        raise CurveError("elimination expects at most one Laurent and one series variable")
    uidx = ring.var_names.index(ring.laurent_vars[0])
    d = None
    for curve in curves:
        for slot, coeff in zip((1, 2, 3, 4, 6), curve.coefficients()):
            degs = {exps[uidx] for exps in coeff.monomials}
            if not degs:
                continue
            if len(degs) != 1:
                raise CurveError("curve coefficients are not u-homogeneous")
            (deg,) = degs
            if deg % slot:
                raise CurveError("curve coefficients are not u-homogeneous")
            if d is None:
                d = deg // slot
            elif d != deg // slot:
                raise CurveError("curve coefficients are not u-homogeneous")
    return 0 if d is None else d


def _residue_iso_candidates(ring0, weight):
    """Homogeneous residue candidates (u0, r0, s0, t0) in canonical order."""
    scalars = [ring0.scalar_value(c) for c in ring0.scalars.elements()]
    if weight is None:
        monos = {0: ring0.one, 1: ring0.one, 2: ring0.one, 3: ring0.one}
    else:
        uval = ring0.gen(ring0.laurent_vars[0])
        monos = {w: uval ** (w * weight) for w in (0, 1, 2, 3)}
    units = [c for c in scalars if c.is_unit()]
    for u0 in units:
        for r0 in scalars:
            for s0 in scalars:
                for t0 in scalars:
                    yield (u0 * monos[0], r0 * monos[2], s0 * monos[1], t0 * monos[3])


def _scalar_lift(value, ring):
    """Coefficient-wise canonical section of the residue map into `ring`."""
    ring0 = value.ring
    keep = [ring.var_names.index(n) for n in ring0.var_names]
    out = {}
    for exps, c in value.monomials.items():
        comps = ring0.scalars.components(c)
        full = [0] * ring.nvars
        for i, e in zip(keep, exps):
            full[i] = e
        out[tuple(full)] = ring.scalars.from_components(comps)
    return ring.make(out)


def _iso_search_elimination(curve1, curve2):
    ring = curve1.ring
    if ring.nseries == 0 and ring.scalars.precision == 1:
        raise CurveError("elimination mode needs a (2, series-variable) filtration")
    if ring.scalars.p != 2:
        raise CurveError("elimination mode needs characteristic-2^k scalars")
    if ring.nseries > 1:
        raise CurveError("elimination expects at most one series variable")
    weight = _laurent_weight((curve1, curve2))
    ring0 = ring.residue_ring()
    from .rings import reduce_value
    ideal = ([2] if ring.scalars.precision > 1 else []) + [n for n, _ in ring.series_vars]
    red1 = WCurve(*[reduce_value(c, tuple(ideal)) for c in curve1.coefficients()])
    red2 = WCurve(*[reduce_value(c, tuple(ideal)) for c in curve2.coefficients()])

    residue_solutions = []
    for cand in _residue_iso_candidates(ring0, weight):
        if all(e.is_zero() for e in _transformation_residual(red1, red2, *cand)):
            residue_solutions.append(cand)
    if not residue_solutions:
        return IsoSearchResult(None, "elimination", {
            "obstruction_step": 0,
            "detail": "no residue solution over %s" % ring0.label(),
        })

    first_obstruction = None
    slot_weights = (0, 2, 1, 3)  # u, r, s, t
    top = filtration_top(ring)
    for cand in residue_solutions:
        state = [_scalar_lift(v, ring) for v in cand]
        obstruction = None
        for j in range(1, top + 1):
            errs = [filtration_reduce(e, j) for e in
                    _transformation_residual(curve1, curve2, *state)]
            if all(e.is_zero() for e in errs):
                continue
            coords = CoordIndex()
            rhs = {}
            for eq, e in enumerate(errs):
                if not in_filtration(e, j):  # pragma: no cover - lifting invariant
                    raise CurveError("internal error: residual escaped the filtration")
                for key, bit in graded_coords(e, j).items():
                    rhs[coords((eq, key))] = bit
            columns = []
            p, k, caps = _filtration_params(ring)
            for slot in range(4):
                for a in range(k):
                    b = j - a
                    if b < 0 or (caps and b >= caps[0]) or (not caps and b > 0):
                        continue
                    for scal in graded_basis_scalars(ring, a):
                        exps = [0] * ring.nvars
                        if b:
                            exps[0] = b
                        if weight is not None and slot_weights[slot] * weight:
                            uidx = ring.var_names.index(ring.laurent_vars[0])
                            exps[uidx] = slot_weights[slot] * weight
                        delta = ring.monomial(tuple(exps), scal)
                        new_state = list(state)
                        new_state[slot] = new_state[slot] + delta
                        col = {}
                        for eq, (e_new, e_old) in enumerate(zip(
                                _transformation_residual(curve1, curve2, *new_state),
                                _transformation_residual(curve1, curve2, *state))):
                            diff = filtration_reduce(e_new - e_old, j)
                            for key, bit in graded_coords(diff, j).items():
                                col[coords((eq, key))] = bit
                        columns.append(((slot, delta), col))
            rows = []
            for ci in range(len(coords)):
                mask = 0
                for uidx2, (_, col) in enumerate(columns):
                    if col.get(ci):
                        mask |= 1 << uidx2
                rows.append((mask, rhs.get(ci, 0)))
            sol, bad = solve_gf2(rows)
            if sol is None:
                obstruction = {
                    "obstruction_step": j,
                    "failing_coordinate": repr(coords.labels[bad]),
                    "equations": len(rows),
                    "unknowns": len(columns),
                }
                break
            for uidx2, (slot_delta, _) in enumerate(columns):
                if (sol >> uidx2) & 1:
                    slot, delta = slot_delta
                    state[slot] = state[slot] + delta
        if obstruction is None:
            phi = WIso(*state)
            if apply_iso(curve1, phi, check=False) == curve2:
                return IsoSearchResult(phi, "elimination",
                                       {"residue_branches": len(residue_solutions)})
            obstruction = {"obstruction_step": top + 1,
                           "detail": "lift verification failed"}  # pragma: no cover
        if first_obstruction is None:
            first_obstruction = obstruction
    return IsoSearchResult(None, "elimination", first_obstruction)


def _filtration_params(ring):
    from .rings import filtration_shape
    return filtration_shape(ring)


# ---------------------------------------------------------------------------
# the formal coordinate z = -x/y and the differential convention
# ---------------------------------------------------------------------------

def w_series(curve, order):
    """w(z) with (z, w) = (-x/y, -1/y): the unique series solution of
    w = z^3 + a1 z w + a2 z^2 w + a3 w^2 + a4 z w^2 + a6 w^3."""
    ring = curve.ring
    a1, a2, a3, a4, a6 = curve.coefficients()
    z = TruncSeries.variable(ring, order)
    z2 = z * z
    z3 = z2 * z
    w = z3
    for _ in range(order):
        new = (z3 + z.scale(a1) * w + z2.scale(a2) * w
               + (w * w).scale(a3) + (z * w * w).scale(a4) + (w ** 3).scale(a6))
        if new == w:
            break
        w = new
    return w


def coordinate_series(curve, phi, order):
    """The target formal coordinate as a series in the source coordinate:
    points of `curve` at parameter z map to apply_iso(curve, phi) at z'(z)."""
    ring = curve.ring
    z = TruncSeries.variable(ring, order)
    w = w_series(curve, order + 2).truncate(order)
    num = z - w.scale(phi.r)
    one = TruncSeries.from_terms(ring, order, [((0,), ring.one)])
    den = one + num.scale(phi.s) + w.scale(phi.t)
    return num.scale(phi.u) * inverse_unit(den)


def differential_scaling(curve, phi):
    """The unit lambda with psi* eta' = lambda * eta for psi: C -> C',
    computed from the formal expansion of dx/(2y + a1 x + a3)."""
    zc = coordinate_series(curve, phi, 4)
    lam = zc.coefficient((1,))
    if not lam.is_unit():
        raise CurveError("coordinate change has non-unit differential scaling")
    return lam

"""Formal group laws and the star-isomorphism solver.

The formal group law of a Weierstrass curve is expanded at infinity in the
coordinate z = -x/y (with w = -1/y) by solving the curve relation
w = z^3 + a1 z w + a2 z^2 w + a3 w^2 + a4 z w^2 + a6 w^3 and intersecting
chords; n-series, formal inverses, and height detection follow.  The solver
lifts an automorphism of the common special fiber to an isomorphism between
two deformations of it, one graded step of the (2, series-variable)
filtration at a time, reporting the first inconsistent linear system when
the lift is obstructed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lifting import CoordIndex, GF2Span
from .rings import (
    filtration_reduce, filtration_shape, filtration_top,
    graded_basis_scalars, graded_coords, in_filtration, reduce_value,
)
from .series import (
    TruncSeries, bivariate_substitute, embed_arity, inverse_unit, substitute,
    substitute_partial,
)
from .weierstrass import SingularCurveError, enumerate_points, w_series

DEFAULT_ORDER = 10


class FormalGroupError(Exception):
    pass


# ---------------------------------------------------------------------------
# formal group laws
# ---------------------------------------------------------------------------

class FGL:
    """A commutative one-dimensional formal group law F(z1, z2), with the
    unit, commutativity, and associativity axioms verified to its truncation
    order at construction."""

    def __init__(self, series, source=None, _trusted=False):
        if series.arity != 2:
            raise FormalGroupError("a formal group law is a bivariate series")
        self.series = series
        self.ring = series.ring
        self.order = series.order
        self.source = source
        self._cache = {}
        if not _trusted:
            self._verify_axioms()

    def _verify_axioms(self):
        F = self.series
        ring = self.ring
        order = self.order
        z = TruncSeries.variable(ring, order)
        zero = TruncSeries.zero(ring, 1, order)
        if bivariate_substitute(F, z, zero) != z or bivariate_substitute(F, zero, z) != z:
            raise FormalGroupError("unit axiom fails")
        flipped = TruncSeries(ring, 2, order,
                              {(j, i): c for (i, j), c in F.coeffs.items()})
        if flipped != F:
            raise FormalGroupError("commutativity fails")
        lhs, rhs = self._associativity_sides()
        if lhs != rhs:
            raise FormalGroupError("associativity fails")

    def _associativity_sides(self):
        """(F(F(x,y),w), F(x,F(y,w))) expanded in a trivariate scratch ring."""
        F = self.series
        order = self.order
        x = TruncSeries.variable(self.ring, order, index=0, arity=3)
        w = TruncSeries.variable(self.ring, order, index=2, arity=3)
        f_xy = embed_arity(F, 3, (0, 1))
        f_yw = embed_arity(F, 3, (1, 2))
        return (bivariate_substitute(F, f_xy, w),
                bivariate_substitute(F, x, f_yw))

    def coefficient(self, i, j):
        return self.series.coefficient((i, j))

    def inverse_series(self):
        """The series i(z) with F(z, i(z)) = 0, solved degree by degree."""
        if "inv" not in self._cache:
            ring = self.ring
            order = self.order
            inv = TruncSeries(ring, 1, order, {(1,): -ring.one})
            for d in range(2, order):
                err = substitute_partial(self.series, inv, 1)
                c = err.coefficient((d,))
                if not c.is_zero():
                    inv = inv - TruncSeries(ring, 1, order, {(d,): c})
            self._cache["inv"] = inv
        return self._cache["inv"]

    def n_series(self, n):
        """[n](z): [0] = 0, [1] = z, [n] = F([n-1], z), [-n] = i([n])."""
        if n < 0:
            return substitute(self.inverse_series(), self.n_series(-n))
        key = ("n", n)
        if key not in self._cache:
            if n == 0:
                out = TruncSeries.zero(self.ring, 1, self.order)
            elif n == 1:
                out = TruncSeries.variable(self.ring, self.order)
            else:
                out = substitute_partial(self.series, self.n_series(n - 1), 0)
            self._cache[key] = out
        return self._cache[key]

    def two_series(self):
        return self.n_series(2)

    def to_json(self):
        blob = {"series": self.series.to_json()}
        if self.source is not None:
            blob["source_curve"] = self.source.to_json()
        return blob

    def __repr__(self):
        return "FGL(%r)" % (self.series,)


def fgl_from_series(series, source=None):
    return FGL(series, source=source)


def fgl_from_curve(curve, order=DEFAULT_ORDER, allow_singular=False):
    """The formal group law of a smooth curve in the coordinate z = -x/y.

    The expansion at infinity makes sense for any coefficient quintuple
    (infinity is always a smooth point), so symbolic identity checks may opt
    out of the smoothness gate with allow_singular.
    """
    if not allow_singular and not curve.is_smooth():
        raise SingularCurveError("singular curve has no formal group law")
    ring = curve.ring
    a1, a2, a3, a4, a6 = curve.coefficients()
    w = w_series(curve, order + 3)

    # lambda(z1, z2) = (w(z2) - w(z1)) / (z2 - z1) via divided differences
    lam_coeffs = {}
    for (n,), c in w.coeffs.items():
        for i in range(n):
            key = (i, n - 1 - i)
            if i + (n - 1 - i) < order:
                lam_coeffs[key] = lam_coeffs[key] + c if key in lam_coeffs else c
    lam = TruncSeries(ring, 2, order, lam_coeffs)
    w1 = embed_arity(w.truncate(order), 2, (0,))
    z1 = TruncSeries.variable(ring, order, index=0, arity=2)
    nu = w1 - lam * z1

    # substituting the chord w = lam z + nu into the curve relation gives a
    # cubic in z with roots z1, z2, z3: z3 = -z1 - z2 - B/A
    one = TruncSeries(ring, 2, order, {(0, 0): ring.one})
    A = one + lam.scale(a2) + (lam * lam).scale(a4) + (lam ** 3).scale(a6)
    B = (lam.scale(a1) + (lam * lam).scale(a3) + nu.scale(a2)
         + (lam * nu).scale(2 * a4) + (lam * lam * nu).scale(3 * a6))
    z2 = TruncSeries.variable(ring, order, index=1, arity=2)
    z3 = -z1 - z2 - B * inverse_unit(A)

    # the group law inverts the third chord point: F = i(z3), where the
    # curve negation gives i(z) = z / (a1 z + a3 w(z) - 1)
    z = TruncSeries.variable(ring, order)
    den = z.scale(a1) + w.truncate(order).scale(a3) \
        - TruncSeries(ring, 1, order, {(0,): ring.one})
    iota = z * inverse_unit(den)
    F = substitute(iota, z3)
    return FGL(F, source=curve)


# ---------------------------------------------------------------------------
# height and v-proxies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeightResult:
    value: int = None      # the height, when detected
    at_least: int = None   # lower bound when [2] vanishes to the order

    @property
    def finite(self):
        return self.value is not None

    def __repr__(self):
        return "height %d" % self.value if self.finite else "height >= %d" % self.at_least


def height(fgl):
    """Least h with a nonzero z^(2^h) coefficient in [2], over a char-2 field."""
    ring = fgl.ring
    if ring.scalars.p != 2 or ring.scalars.precision != 1 or ring.nseries:
        raise FormalGroupError("height is defined over fields of characteristic 2")
    two = fgl.two_series()
    if two.is_zero():
        bound = 1
        while 2 ** (bound + 1) < fgl.order:
            bound += 1
        return HeightResult(at_least=bound + 1)
    val = two.valuation()
    h = val.bit_length() - 1
    if 2 ** h != val:
        raise FormalGroupError(
            "leading [2] term at degree %d is not a power of 2" % val)
    return HeightResult(value=h)


@dataclass(frozen=True)
class VProxies:
    """z^2 and z^4 coefficients of [2], with their u-weight normalizers."""
    c2: object
    c4: object
    u_weight_c2: int = 1
    u_weight_c4: int = 3

    def normalized(self, u):
        return (self.c2 * u ** self.u_weight_c2, self.c4 * u ** self.u_weight_c4)


def v_proxies(fgl):
    if fgl.source is None:
        raise FormalGroupError("v-proxies are defined for curve formal group laws")
    if fgl.order <= 4:
        raise FormalGroupError("need series order > 4 to read off the z^4 coefficient")
    two = fgl.two_series()
    return VProxies(two.coefficient((2,)), two.coefficient((4,)))


def is_supersingular(curve):
    """Height-2 test, cross-checked against point-count parity when cheap."""
    if not curve.is_smooth():
        raise SingularCurveError("singular curve")
    h = height(fgl_from_curve(curve, order=6))
    answer = h.finite and h.value == 2
    ring = curve.ring
    if ring.scalars.degree <= 4:
        parity = len(enumerate_points(curve)) % 2
        if (parity == 1) != answer:  # pragma: no cover - consistency guard
            raise FormalGroupError("height and point-count criteria disagree")
    return answer


# ---------------------------------------------------------------------------
# star-isomorphisms between deformations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StarIsoProblem:
    """Lift residue_part (an automorphism of the common reduction of F and G
    modulo the filtration ideal) to phi with phi(F(x,y)) = G(phi x, phi y)."""
    F: FGL
    G: FGL
    residue_part: TruncSeries


@dataclass(frozen=True)
class StarIsoResult:
    phi: TruncSeries = None
    obstruction: dict = None
    steps: int = 0

    @property
    def found(self):
        return self.phi is not None

    def to_json(self):
        if self.found:
            return {"status": "found", "steps": self.steps,
                    "phi": self.phi.to_json()}
        return {"status": "obstructed", "obstruction": self.obstruction}


def _series_u_weight(series_list, ring):
    """The integer e with deg_u(coefficient of z^I) = (|I| - 1) * e for every
    term of every series, or None when the ring has no Laurent variable."""
    if not ring.laurent_vars:
        return None
    if len(ring.laurent_vars) != 1:
        raise FormalGroupError("expected a single Laurent variable")
    uidx = ring.var_names.index(ring.laurent_vars[0])
    e = None
    pending = []
    for s in series_list:
        for exps, c in s.coeffs.items():
            degs = {m[uidx] for m in c.monomials}
            if not degs:
                continue
            if len(degs) != 1:
                raise FormalGroupError("coefficients are not u-homogeneous")
            (deg,) = degs
            total = sum(exps) - 1
            if total == 0:
                if deg != 0:
                    raise FormalGroupError("linear coefficients must have u-weight 0")
                continue
            pending.append((total, deg))
    for total, deg in pending:
        if deg % total:
            raise FormalGroupError("coefficients are not u-homogeneous")
        if e is None:
            e = deg // total
        elif e != deg // total:
            raise FormalGroupError("coefficients are not u-homogeneous")
    return 0 if e is None else e


def _lift_series(series, ring):
    """Coefficient-wise canonical lift from the residue ring into `ring`."""
    ring0 = series.ring
    keep = [ring.var_names.index(n) for n in ring0.var_names]
    out = {}
    for exps, c in series.coeffs.items():
        monos = {}
        for m, coeff in c.monomials.items():
            full = [0] * ring.nvars
            for i, e in zip(keep, m):
                full[i] = e
            monos[tuple(full)] = ring.scalars.from_components(
                ring0.scalars.components(coeff))
        out[exps] = ring.make(monos)
    return TruncSeries(ring, series.arity, series.order, out)


def _residue_series(series, ideal):
    return series.map_coefficients(lambda c: reduce_value(c, ideal),
                                   ring=series.ring._quotient_ring(tuple(ideal)))


def _filtration_ideal(ring):
    gens = []
    if ring.scalars.precision > 1:
        gens.append(2)
    gens.extend(n for n, _ in ring.series_vars)
    return tuple(gens)


def star_iso_solve(problem, weight_window=0):
    """Solve for the star-isomorphism, or report the first obstruction.

    Works one graded level of the (2, series-variable) filtration at a
    time; each level is a linear system over F2 whose undetermined kernel
    directions are carried into the following levels as extra unknowns, so
    the canonical solution (free variables zero) is only fixed once every
    level has had its say.  A found lift is re-substituted into the
    defining equation at full precision; an inconsistency at the first
    level is a choice-free obstruction and is reported together with the
    failing linear system.
    """
    F, G = problem.F, problem.G
    ring = F.ring
    if G.ring != ring:
        raise FormalGroupError("both laws must live over a common ring")
    if ring.scalars.p != 2:
        raise FormalGroupError("the solver needs characteristic-2^k scalars")
    if ring.nseries > 1:
        raise FormalGroupError("the solver expects at most one series variable")
    ideal = _filtration_ideal(ring)
    if not ideal:
        raise FormalGroupError("no filtration: the ring has no 2-adic or series direction")
    order = min(F.order, G.order)
    Fs = F.series.truncate(order)
    Gs = G.series.truncate(order)

    F0 = _residue_series(Fs, ideal)
    G0 = _residue_series(Gs, ideal)
    if F0 != G0:
        raise FormalGroupError("the two laws do not deform a common special fiber")
    r0 = problem.residue_part
    if r0.ring != F0.ring:
        raise FormalGroupError("residue part must live over %s" % F0.ring.label())
    if r0.order < order:
        raise FormalGroupError("residue part must be given to order %d" % order)
    r0 = r0.truncate(order)
    if not r0.coefficient((1,)).is_unit():
        raise FormalGroupError("residue part must have a unit linear coefficient")
    lhs = substitute(r0, F0)
    rhs = bivariate_substitute(F0, embed_arity(r0, 2, (0,)),
                               embed_arity(r0, 2, (1,)))
    if lhs != rhs:
        raise FormalGroupError("residue part is not an endomorphism of the special fiber")

    weight = _series_u_weight([Fs, Gs], ring)
    uidx = ring.var_names.index(ring.laurent_vars[0]) if weight is not None else None

    phi = _lift_series(r0, ring)

    # F^d once at full precision; phi o F is then a linear combination
    fpow = [None, Fs]
    for d in range(2, order):
        fpow.append(fpow[-1] * Fs)

    p, k, caps = filtration_shape(ring)
    cap = caps[0] if caps else 1
    top = filtration_top(ring)

    def defect(cur):
        acc = TruncSeries.zero(ring, 2, order)
        for (d,), c in cur.coeffs.items():
            acc = acc + fpow[d].scale(c)
        gsub = bivariate_substitute(Gs, embed_arity(cur, 2, (0,)),
                                    embed_arity(cur, 2, (1,)))
        return acc - gsub

    # partials of the common reduction, evaluated along the residue part;
    # corrections in m^j only feel these modulo m
    P1 = bivariate_substitute(F0.derivative(0), embed_arity(r0, 2, (0,)),
                              embed_arity(r0, 2, (1,)))
    P2 = bivariate_substitute(F0.derivative(1), embed_arity(r0, 2, (0,)),
                              embed_arity(r0, 2, (1,)))
    P1L = _lift_series(P1, ring)
    P2L = _lift_series(P2, ring)

    # The linearized operator on a correction c*z^d is c * linop[d].  The
    # partials are only known one order short, but shifting by z^d (d >= 1)
    # makes the product complete at the full order, so shift by hand instead
    # of letting series multiplication clamp the precision.
    def _shifted(P, dx, dy):
        out = {}
        for (i, j), c in P.coeffs.items():
            if i + dx + j + dy < order:
                out[(i + dx, j + dy)] = c
        return TruncSeries(ring, 2, order, out)

    linop = [None]
    for d in range(1, order):
        linop.append(fpow[d] - _shifted(P1L, d, 0) - _shifted(P2L, 0, d))

    # Each graded level is a linear system over F2.  Its kernel consists of
    # infinitesimal endomorphisms of the special fiber (supported at
    # z-degrees 2^i); whether such a direction is needed only becomes
    # visible at later levels, so free kernel combinations are carried
    # forward as extra unknowns of the later systems instead of being fixed
    # greedily.  Fresh level-j unknowns act through the linearized operator
    # (exact modulo the next level); carried unknowns act through their
    # exact toggle difference at the current lift, which keeps char-2
    # square contributions.  A found lift is re-verified exactly.
    reduced_cache = {}

    def reduced_level(j):
        if j not in reduced_cache:
            def red(c):
                return filtration_reduce(c, j)
            pows = [None] + [f.map_coefficients(red) for f in fpow[1:]]
            reduced_cache[j] = (pows, Gs.map_coefficients(red))
        return reduced_cache[j]

    def defect_reduced(cur, j):
        pows, gred = reduced_level(j)

        def red(c):
            return filtration_reduce(c, j)
        cur_red = cur.map_coefficients(red)
        acc = TruncSeries.zero(ring, 2, order)
        for (d,), c in cur_red.coeffs.items():
            acc = acc + pows[d].scale(c)
        gsub = bivariate_substitute(gred, embed_arity(cur_red, 2, (0,)),
                                    embed_arity(cur_red, 2, (1,)))
        return acc - gsub

    def series_coords(ser, j, coords, grow):
        """Level-j coordinates of a bivariate series as a bitmask; when grow
        is false, an unindexed nonzero coordinate aborts with its label."""
        vec = 0
        for exps2, c in ser.coeffs.items():
            red = filtration_reduce(c, j)
            for key, bit in graded_coords(red, j).items():
                if bit:
                    if grow:
                        vec |= 1 << coords((exps2, key))
                    else:
                        ci = coords.get((exps2, key))
                        if ci is None:
                            return None, (exps2, key)
                        vec |= 1 << ci
        return vec, None

    def apply_updates(cur, updates):
        if not updates:
            return cur
        coeffs = dict(cur.coeffs)
        for key, dv in updates.items():
            nv = coeffs.get(key, ring.zero) + dv
            if nv.is_zero():
                coeffs.pop(key, None)
            else:
                coeffs[key] = nv
        return TruncSeries(ring, 1, order, coeffs)

    def merge_updates(bundles, sel):
        updates = {}
        for ti, upd in enumerate(bundles):
            if (sel >> ti) & 1:
                for key, dv in upd.items():
                    updates[key] = updates.get(key, ring.zero) + dv
        return updates

    pendings = []
    obstruction = None
    for j in range(1, top + 1):
        base_defect = defect_reduced(phi, j)
        for exps2, c in base_defect.coeffs.items():
            if not in_filtration(filtration_reduce(c, j), j):  # pragma: no cover
                raise FormalGroupError("defect escaped the filtration at step %d" % j)
        bundles = []
        images = []
        offsets = range(-weight_window, weight_window + 1) if weight is not None else (0,)
        for d in range(1, order):
            for a in range(k):
                b = j - a
                if b < 0 or (caps and b >= cap) or (not caps and b > 0):
                    continue
                for scal in graded_basis_scalars(ring, a):
                    for off in offsets:
                        exps = [0] * ring.nvars
                        if b:
                            exps[0] = b
                        if weight is not None and (weight * (d - 1) + off):
                            exps[uidx] = weight * (d - 1) + off
                        delta = ring.monomial(tuple(exps), scal)
                        bundles.append({(d,): delta})
                        images.append(linop[d].scale(delta))
        for upd in pendings:
            bundles.append(upd)
            images.append(defect_reduced(apply_updates(phi, upd), j) - base_defect)
        coords = CoordIndex()
        span = GF2Span()
        col_vecs = []
        for img in images:
            cvec, _ = series_coords(img, j, coords, grow=True)
            col_vecs.append(cvec)
            span.add(cvec)
        vec, bad_label = series_coords(base_defect, j, coords, grow=False)
        residual = 0
        if bad_label is None:
            residual, combo = span.reduce(vec)
        if bad_label is not None or residual:
            label = bad_label if bad_label is not None \
                else coords.labels[residual.bit_length() - 1]
            obstruction = {
                "step": j,
                "choice_free": j == 1,
                "failing_coordinate": repr(label),
                "system": {
                    "coordinates": [repr(lbl) for lbl in coords.labels],
                    "columns": [format(cvec, "b") for cvec in col_vecs],
                    "rhs": format(vec, "b") if vec is not None else None,
                },
            }
            break
        phi = apply_updates(phi, merge_updates(bundles, combo))
        pendings = [merge_updates(bundles, kc) for kc in span.kernel]

    if obstruction is not None:
        return StarIsoResult(obstruction=obstruction, steps=obstruction["step"])
    final = defect(phi)
    if not final.is_zero():  # pragma: no cover - nonlinear pending interaction
        raise FormalGroupError(
            "carried kernel freedom interacted nonlinearly; lift verification failed")
    return StarIsoResult(phi=phi, steps=top)

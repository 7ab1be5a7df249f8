"""Level-3 data on curves over finite fields and the actions on it.

A level point is a point of exact order 3, a level subgroup is the order-3
subgroup it generates, and a full level is an ordered basis of the
9-element 3-torsion.  Curve automorphisms act through coordinate
transport, the field Frobenius acts coordinate-wise, and orbits come with
stabilizer subgroups identified against the group catalog.
"""

from __future__ import annotations

from dataclasses import dataclass

from .groups import group_from_automorphisms, structure_id
from .rings import frobenius
from .weierstrass import (
    CurvePoint, WIso, apply_iso, on_curve, point_add, point_mul, point_neg,
    torsion_points, transport_point,
)


class LevelError(Exception):
    pass


@dataclass(frozen=True)
class LevelPoint:
    curve: object
    point: CurvePoint

    def __post_init__(self):
        if self.point.is_infinity() or not on_curve(self.curve, self.point):
            raise LevelError("level point must be an affine point of the curve")
        if not point_mul(self.curve, 3, self.point).is_infinity():
            raise LevelError("level point must have order dividing 3")

    def negate(self):
        return LevelPoint(self.curve, point_neg(self.curve, self.point))

    def sort_key(self):
        return self.point.sort_key()


@dataclass(frozen=True)
class LevelSubgroup:
    curve: object
    generator: LevelPoint

    def __post_init__(self):
        # normalize the generator so {O, P, -P} has one canonical name
        neg = self.generator.negate()
        if neg.sort_key() < self.generator.sort_key():
            object.__setattr__(self, "generator", neg)
        pts = self.points()
        for p in pts:
            for q in pts:
                if point_add(self.curve, p, q).sort_key() not in {x.sort_key() for x in pts}:
                    raise LevelError("subgroup is not closed")  # pragma: no cover

    def points(self):
        P = self.generator.point
        return (CurvePoint.infinity(), P, point_neg(self.curve, P))

    def contains(self, lp):
        return lp.sort_key() in {p.sort_key() for p in self.points()}

    def sort_key(self):
        return self.generator.sort_key()


@dataclass(frozen=True)
class FullLevel:
    curve: object
    first: LevelPoint
    second: LevelPoint

    def __post_init__(self):
        if LevelSubgroup(self.curve, self.first).contains(self.second):
            raise LevelError("basis points must generate the full 3-torsion")

    def sort_key(self):
        return (self.first.sort_key(), self.second.sort_key())


@dataclass(frozen=True)
class Level3Data:
    curve: object
    points: tuple
    subgroups: tuple
    bases: tuple


def enumerate_level3(curve):
    """All order-3 points, subgroups, and ordered bases; the 3-torsion must
    be rational over the curve's own field."""
    degree = curve.ring.scalars.degree
    data = torsion_points(curve, 3)
    if data.extension_degree > degree:
        raise LevelError(
            "3-torsion is rational only over the degree-%d extension"
            % data.extension_degree)
    points = tuple(sorted((LevelPoint(curve, p) for p in data.points
                           if not p.is_infinity()),
                          key=lambda lp: lp.sort_key()))
    subgroup_keys = {}
    for lp in points:
        sg = LevelSubgroup(curve, lp)
        subgroup_keys[sg.sort_key()] = sg
    subgroups = tuple(subgroup_keys[k] for k in sorted(subgroup_keys))
    bases = []
    for p in points:
        for q in points:
            if not LevelSubgroup(curve, p).contains(q):
                bases.append(FullLevel(curve, p, q))
    bases.sort(key=lambda b: b.sort_key())
    return Level3Data(curve, points, tuple(subgroups), tuple(bases))


# ---------------------------------------------------------------------------
# actions
# ---------------------------------------------------------------------------

class GaloisFrobenius:
    """The field Frobenius x -> x^2, acting coordinate-wise on points of a
    curve with prime-field coefficients."""

    def __repr__(self):
        return "Frobenius"


FROBENIUS = GaloisFrobenius()


def _act_point(g, curve, point):
    if isinstance(g, WIso):
        if apply_iso(curve, g, check=False) != curve:
            raise LevelError("coordinate change is not an automorphism of the curve")
        return transport_point(curve, g, point)
    if isinstance(g, GaloisFrobenius):
        for c in curve.coefficients():
            if frobenius(c) != c:
                raise LevelError("Frobenius acts only on curves with prime-field coefficients")
        if point.is_infinity():
            return point
        return CurvePoint.affine(frobenius(point.x), frobenius(point.y))
    raise LevelError("unsupported action %r" % (g,))


def act(g, datum):
    """Apply an automorphism or the Frobenius to a level datum."""
    if isinstance(datum, LevelPoint):
        return LevelPoint(datum.curve, _act_point(g, datum.curve, datum.point))
    if isinstance(datum, LevelSubgroup):
        return LevelSubgroup(datum.curve, act(g, datum.generator))
    if isinstance(datum, FullLevel):
        return FullLevel(datum.curve, act(g, datum.first), act(g, datum.second))
    raise LevelError("unsupported level datum %r" % (datum,))


# ---------------------------------------------------------------------------
# orbits and stabilizers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Orbit:
    representative: object
    elements: tuple
    stabilizer: object          # GroupTable
    stabilizer_structure: object

    def to_json(self):
        return {
            "size": len(self.elements),
            "stabilizer_order": len(self.stabilizer),
            "stabilizer": self.stabilizer_structure.name,
            "stabilizer_aliases": list(self.stabilizer_structure.aliases),
        }


@dataclass(frozen=True)
class OrbitReport:
    group: object               # GroupTable of the acting automorphisms
    orbits: tuple

    def orbit_sizes(self):
        return tuple(sorted(len(o.elements) for o in self.orbits))

    def to_json(self):
        return {"group_order": len(self.group),
                "orbits": [o.to_json() for o in self.orbits]}


def orbits_stabilizers(autos, data):
    """Orbit partition of level data under a closed automorphism list, with
    stabilizers identified; checks |orbit| * |stabilizer| = |group|."""
    group = group_from_automorphisms(autos)
    remaining = {d.sort_key(): d for d in data}
    orbits = []
    while remaining:
        rep_key = min(remaining)
        rep = remaining.pop(rep_key)
        seen = {rep_key: rep}
        stab = []
        for idx, phi in enumerate(autos):
            img = act(phi, rep)
            key = img.sort_key()
            if key == rep_key:
                stab.append(idx)
            if key not in seen:
                seen[key] = img
                remaining.pop(key, None)
        # close the orbit (the list of automorphisms is a group, so one
        # sweep from the representative suffices; remove all members)
        for key in list(seen):
            remaining.pop(key, None)
        sub = group.subgroup(stab)
        if len(seen) * len(sub) != len(group):
            raise LevelError("orbit-stabilizer count failed")  # pragma: no cover
        orbits.append(Orbit(rep, tuple(seen.values()), sub, structure_id(sub)))
    return OrbitReport(group, tuple(orbits))


def frobenius_orbit_sizes(data):
    """Orbit sizes of the Frobenius acting on a list of level data."""
    remaining = {d.sort_key(): d for d in data}
    sizes = []
    while remaining:
        key = min(remaining)
        d = remaining.pop(key)
        size = 1
        img = act(FROBENIUS, d)
        while img.sort_key() != key:
            remaining.pop(img.sort_key(), None)
            size += 1
            img = act(FROBENIUS, img)
        sizes.append(size)
    return tuple(sorted(sizes))

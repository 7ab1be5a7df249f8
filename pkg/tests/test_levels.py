"""Level-3 structure tests: enumeration, actions, orbits and stabilizers."""

import pytest

from sscurve.groups import gl23, structure_id
from sscurve.levels import (
    FROBENIUS, FullLevel, LevelError, LevelPoint, LevelSubgroup, Level3Data,
    act, enumerate_level3, frobenius_orbit_sizes, orbits_stabilizers,
)
from sscurve.rings import GF
from sscurve.formal import fgl_from_curve
from sscurve.weierstrass import (
    CurvePoint, WCurve, WIso, automorphisms, coordinate_series,
    differential_scaling, point_neg,
)


def supersingular_f4():
    return WCurve.from_coefficients(GF(4), a3=1)


def level3():
    return enumerate_level3(supersingular_f4())


def test_enumerate_level3_counts():
    data = level3()
    assert len(data.points) == 8
    assert len(data.subgroups) == 4
    assert len(data.bases) == 48
    # the basis count equals |GL(2,3)|
    assert len(data.bases) == len(gl23().table)
    # (0,0) is among the order-3 points
    F4 = GF(4)
    keys = {lp.point.sort_key() for lp in data.points}
    assert CurvePoint.affine(F4.zero, F4.zero).sort_key() in keys


def test_enumerate_level3_requires_rational_torsion():
    C2 = WCurve.from_coefficients(GF(2), a3=1)
    with pytest.raises(LevelError) as err:
        enumerate_level3(C2)
    assert "degree-2" in str(err.value)


def test_level_point_validation():
    C = supersingular_f4()
    F4 = GF(4)
    with pytest.raises(LevelError):
        LevelPoint(C, CurvePoint.infinity())
    # a point of order 3 works; subgroup generator is canonicalized
    P = CurvePoint.affine(F4.zero, F4.zero)
    lp = LevelPoint(C, P)
    sg1 = LevelSubgroup(C, lp)
    sg2 = LevelSubgroup(C, lp.negate())
    assert sg1.sort_key() == sg2.sort_key()


def test_involution_negates_points_and_fixes_subgroups():
    C = supersingular_f4()
    data = level3()
    inv = WIso(-C.ring.one, C.ring.zero, -C.a1, -C.a3)
    for lp in data.points:
        assert act(inv, lp).point == point_neg(C, lp.point)
    for sg in data.subgroups:
        assert act(inv, sg).sort_key() == sg.sort_key()
    for b in data.bases:
        img = act(inv, b)
        assert isinstance(img, FullLevel)


def test_identity_fixes_everything():
    data = level3()
    ident = WIso.identity(GF(4))
    for kind in (data.points, data.subgroups, data.bases):
        for d in kind:
            assert act(ident, d).sort_key() == d.sort_key()


def test_act_rejects_non_automorphism():
    data = level3()
    F4 = GF(4)
    not_auto = WIso(F4.one, F4.one, F4.zero, F4.zero)  # x-translation moves a2
    with pytest.raises(LevelError):
        act(not_auto, data.points[0])


def test_frobenius_orbits_on_points():
    data = level3()
    sizes = frobenius_orbit_sizes(data.points)
    # (0,0) and (0,1) are rational, the other six points pair up
    assert sizes == (1, 1, 2, 2, 2)


def test_orbits_and_stabilizers():
    C = supersingular_f4()
    autos = automorphisms(C)
    data = level3()

    pts = orbits_stabilizers(autos, data.points)
    assert len(pts.orbits) == 1
    orbit = pts.orbits[0]
    assert len(orbit.elements) == 8
    assert len(orbit.stabilizer) == 3
    assert orbit.stabilizer_structure.name == "C3"

    sgs = orbits_stabilizers(autos, data.subgroups)
    assert len(sgs.orbits) == 1
    orbit = sgs.orbits[0]
    assert len(orbit.elements) == 4
    assert len(orbit.stabilizer) == 6
    assert orbit.stabilizer_structure.matches("C2xC3")

    bases = orbits_stabilizers(autos, data.bases)
    assert bases.orbit_sizes() == (24, 24)
    for orbit in bases.orbits:
        assert len(orbit.stabilizer) == 1


def test_point_stabilizer_inside_subgroup_stabilizer_with_index_two():
    C = supersingular_f4()
    autos = automorphisms(C)
    data = level3()
    P = data.points[0]
    sg = LevelSubgroup(C, P)
    stab_p = [phi for phi in autos if act(phi, P).sort_key() == P.sort_key()]
    stab_s = [phi for phi in autos if act(phi, sg).sort_key() == sg.sort_key()]
    keys_s = {phi.sort_key() for phi in stab_s}
    assert all(phi.sort_key() in keys_s for phi in stab_p)
    assert len(stab_s) == 2 * len(stab_p)


def test_subgroup_stabilizer_c2_is_central_involution_inducing_formal_inverse():
    C = supersingular_f4()
    autos = automorphisms(C)
    data = level3()
    sg = data.subgroups[0]
    stab = [phi for phi in autos if act(phi, sg).sort_key() == sg.sort_key()]
    # the order-2 element of the stabilizer
    invs = [phi for phi in stab
            if not phi.is_identity() and phi.compose(phi).is_identity()]
    assert len(invs) == 1
    inv = invs[0]
    # central in the full automorphism group
    for phi in autos:
        assert inv.compose(phi).sort_key() == phi.compose(inv).sort_key()
    # induces the formal inverse on the formal coordinate
    F = fgl_from_curve(C, order=8)
    assert coordinate_series(C, inv, 8) == F.n_series(-1)
    assert differential_scaling(C, inv) == -C.ring.one


def test_tower_degrees_from_counts_match_gl23():
    data = level3()
    lvl = gl23()
    n_bases, n_points, n_subs = len(data.bases), len(data.points), len(data.subgroups)
    assert n_bases // n_points == 6 == len(lvl.gamma1)
    assert n_points // n_subs == 2 == len(lvl.gamma0) // len(lvl.gamma1)
    assert n_subs == 4 == len(lvl.table) // len(lvl.gamma0)


def test_trivial_group_acting():
    data = level3()
    report = orbits_stabilizers([WIso.identity(GF(4))], data.subgroups)
    assert len(report.orbits) == 4
    for orbit in report.orbits:
        assert len(orbit.elements) == 1
        assert len(orbit.stabilizer) == 1

"""Coefficient ring tests: finite fields, Witt rings, towers, endomorphisms."""

import random

import pytest

from sscurve.rings import (
    GF, ConstructionError, FieldSpec, NotAUnitError, RingError, WittSpec,
    field_embedding, field_make, filtration_reduce, filtration_top, frobenius,
    graded_coords, in_filtration, integers, reduce_value, ring_endomorphism,
    substitute_laurent, teichmuller_lift, tower, truncate_value, witt,
    witt_make,
)


def test_f4_defining_relation():
    F4 = GF(4)
    w = F4.scalar_gen()
    assert w * w == w + 1
    assert frobenius(w) == w + 1


def test_f4_enumeration_and_units():
    F4 = GF(4)
    elems = list(F4.elements())
    assert len(elems) == 4
    units = [x for x in elems if not x.is_zero()]
    # multiplicative group is cyclic of order 3
    w = F4.scalar_gen()
    assert {w, w ** 2, w ** 3} == set(units)
    assert w ** 3 == F4.one
    for x in units:
        assert x * x.inv() == F4.one


def test_field_make_rejects_reducible_modulus():
    with pytest.raises(ConstructionError) as err:
        field_make(FieldSpec(2, 3, (1, 1, 1, 1)))  # x^3+x^2+x+1 = (x+1)(x^2+1)
    assert "reducible" in str(err.value)


def test_field_make_f4_presentation_is_fixed():
    spec = FieldSpec(2, 2)
    assert spec.validate() == (1, 1, 1)
    with pytest.raises(ConstructionError):
        FieldSpec(2, 2, (1, 0, 1)).validate()


def test_frobenius_order_on_extensions():
    for n in (1, 2, 3, 4):
        F = GF(2 ** n)
        for x in F.elements():
            y = x
            for _ in range(n):
                y = frobenius(y)
            assert y == x
        if n > 1:
            w = F.scalar_gen()
            orbit = {w}
            y = frobenius(w)
            steps = 1
            while y != w:
                orbit.add(y)
                y = frobenius(y)
                steps += 1
            assert steps == n


def test_ring_axioms_randomized():
    rng = random.Random(20260810)
    F4 = GF(4)
    W3 = witt(3)
    T = tower(W3, series_vars=[("a1", 4)], laurent_vars=["u"])
    Z = integers()
    ZT = tower(Z, series_vars=[("a1", 3), ("a3", 3)])
    for ring in (GF(2), GF(3), GF(8), F4, W3, witt(1), T, ZT):
        for _ in range(25):
            x = ring.random_element(rng)
            y = ring.random_element(rng)
            z = ring.random_element(rng)
            assert (x + y) + z == x + (y + z)
            assert (x * y) * z == x * (y * z)
            assert x * (y + z) == x * y + x * z
            assert x * ring.one == x
            assert x + ring.zero == x
            assert x - x == ring.zero
            assert x * y == y * x


def test_unit_detection_and_inverse_in_tower():
    W2 = witt(2)
    T = tower(W2, series_vars=[("a1", 3)], laurent_vars=["u"])
    u = T.gen("u")
    a1 = T.gen("a1")
    v = u ** -1 * 3 + a1 * u + 2 * a1
    assert v.is_unit()
    assert v * v.inv() == T.one
    assert not (u + 1).is_unit()
    assert not a1.is_unit()
    with pytest.raises(NotAUnitError):
        (T.from_int(2)).inv()


def test_teichmuller_lift_basics():
    F4 = GF(4)
    w = F4.scalar_gen()
    for k in (1, 2, 4, 8):
        W = witt(k)
        assert teichmuller_lift(F4.zero, k) == W.zero
        assert teichmuller_lift(F4.one, k) == W.one
        t = teichmuller_lift(w, k)
        assert t ** 4 == t
        assert reduce_value(t, (2,)) == w
    t = teichmuller_lift(w, 4)
    assert t ** 3 == witt(4).one


def test_teichmuller_multiplicative():
    F4 = GF(4)
    for k in (2, 3, 8):
        for x in F4.elements():
            for y in F4.elements():
                lhs = teichmuller_lift(x, k) * teichmuller_lift(y, k)
                assert lhs == teichmuller_lift(x * y, k)
    w = F4.scalar_gen()
    assert teichmuller_lift(w, 4) * teichmuller_lift(w * w, 4) == witt(4).one


def test_reduce_examples():
    W3 = witt(3)
    T = tower(W3, series_vars=[("a1", 4)], laurent_vars=["u"])
    u, a1 = T.gen("u"), T.gen("a1")
    v = 2 + a1 * u
    red = reduce_value(v, (2,))
    assert red == reduce_value(a1 * u, (2,))
    assert red.ring.scalars.label() == "F4"
    v2 = a1 * u + u ** 3
    red2 = reduce_value(v2, (2, "a1"))
    assert repr(red2) == "u^3"


def test_reduce_unsupported_ideal():
    F4 = GF(4)
    with pytest.raises(RingError):
        reduce_value(F4.one, (3,))


def test_ring_endomorphism_c3_and_c2_shapes():
    k = 3
    W = witt(k)
    T = tower(W, series_vars=[("a1", 5)], laurent_vars=["u"])
    F4 = GF(4)
    w = F4.scalar_gen()
    tw = T.scalar_value(teichmuller_lift(w, k).constant_scalar())
    tw2 = T.scalar_value(teichmuller_lift(w * w, k).constant_scalar())
    u, a1 = T.gen("u"), T.gen("a1")

    g = ring_endomorphism(T, {"u": tw * u, "ua1": tw2 * u * a1})
    # derived image of a1 and order three on generators
    assert g.images["a1"] == tw * a1
    ggg = g.then(g).then(g)
    assert ggg.is_identity()
    assert not g.then(g).is_identity()

    sigma = ring_endomorphism(T, {"u": -u, "ua1": u * a1})
    assert sigma.images["a1"] == -a1
    assert sigma.then(sigma).is_identity()
    assert sigma(a1) == -a1

    ident = ring_endomorphism(T, {})
    rng = random.Random(7)
    x = T.random_element(rng)
    assert ident(x) == x


def test_endomorphism_is_ring_hom_randomized():
    W = witt(2)
    T = tower(W, series_vars=[("a1", 4)], laurent_vars=["u"])
    u, a1 = T.gen("u"), T.gen("a1")
    g = ring_endomorphism(T, {"u": -u, "a1": a1 + a1 * a1})
    rng = random.Random(11)
    for _ in range(20):
        x = T.random_element(rng)
        y = T.random_element(rng)
        assert g(x * y) == g(x) * g(y)
        assert g(x + y) == g(x) + g(y)


def test_endomorphism_rejects_non_unit_laurent_image():
    T = tower(witt(2), series_vars=[("a1", 3)], laurent_vars=["u"])
    with pytest.raises(NotAUnitError):
        ring_endomorphism(T, {"u": T.gen("a1")})
    with pytest.raises(RingError):
        ring_endomorphism(T, {"a1": T.one})  # 1^m != 0 breaks truncation


def test_truncation_commutes_with_arithmetic():
    rng = random.Random(3)
    big = tower(witt(4), series_vars=[("a1", 8)], laurent_vars=["u"])
    small = tower(witt(2), series_vars=[("a1", 4)], laurent_vars=["u"])
    for _ in range(20):
        x = big.random_element(rng)
        y = big.random_element(rng)
        assert truncate_value(x * y, small) == truncate_value(x, small) * truncate_value(y, small)
        assert truncate_value(x + y, small) == truncate_value(x, small) + truncate_value(y, small)


def test_substitute_laurent_at_one():
    T = tower(GF(4), series_vars=[("a1", 3)], laurent_vars=["u"])
    target = tower(GF(4), series_vars=[("a1", 3)])
    u, a1 = T.gen("u"), T.gen("a1")
    v = u ** 3 + a1 * u + u ** -2
    res = substitute_laurent(v, "u", target.one)
    assert res == target.one + target.gen("a1") + target.one


def test_field_embedding_f4_into_f16():
    F4, F16 = GF(4), GF(16)
    emb = field_embedding(F4, F16)
    w = F4.scalar_gen()
    img = emb(w)
    assert img * img == emb(w * w)
    assert img * img + img + F16.one == F16.zero
    for x in F4.elements():
        for y in F4.elements():
            assert emb(x * y) == emb(x) * emb(y)
            assert emb(x + y) == emb(x) + emb(y)


def test_filtration_helpers():
    T = tower(witt(3), series_vars=[("a1", 4)], laurent_vars=["u"])
    a1, u = T.gen("a1"), T.gen("u")
    assert filtration_top(T) == 2 + 3
    v = 2 * a1 * u + a1 ** 3
    assert in_filtration(v, 2)
    assert not in_filtration(v, 3)
    assert filtration_reduce(v, 1) == T.zero
    assert filtration_reduce(v, 2) == 2 * a1 * u
    coords = graded_coords(2 * a1 * u, 2)
    assert coords == {((1, 1), 0): 1}


def test_witt_spec_and_serialization():
    with pytest.raises(ConstructionError):
        witt_make(WittSpec(0))
    W = witt(2)
    T = tower(W, series_vars=[("a1", 3)], laurent_vars=["u"])
    v = 3 * T.gen("a1") ** 2 * T.gen("u") ** -1 + T.one
    blob = v.to_json()
    assert blob["ring"]["base"] == "W2(F4)"
    assert blob["monomials"] == [[[0, 0], "1"], [[2, -1], "3"]]

"""Finite group tables: construction, isomorphism search, identification.

Groups are stored as labeled elements with a full multiplication table;
associativity, identity, and inverses are checked exhaustively at
construction (orders here never exceed 48).  Includes GL(2,3) with its
upper-triangular and unipotent-first-row subgroups, the 24 Hurwitz
quaternion units, and the bridge from curve automorphism lists.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass


class GroupError(Exception):
    pass


class GroupTable:
    """A finite group as labels plus a multiplication table of indices."""

    def __init__(self, elements, table, check=True):
        self.elements = tuple(elements)
        self.table = tuple(tuple(row) for row in table)
        n = len(self.elements)
        if len(set(self.elements)) != n:
            raise GroupError("duplicate element labels")
        if check:
            self._check_axioms()
        self.identity = self._find_identity()
        self._inverse = [next(j for j in range(n) if self.table[i][j] == self.identity)
                         for i in range(n)]

    def _check_axioms(self):
        n = len(self.elements)
        rng = range(n)
        for row in self.table:
            if sorted(row) != list(rng):
                raise GroupError("multiplication table rows must be permutations")
        for i in rng:
            col = [self.table[j][i] for j in rng]
            if sorted(col) != list(rng):
                raise GroupError("multiplication table columns must be permutations")
        for i in rng:
            for j in rng:
                ij = self.table[i][j]
                for k in rng:
                    if self.table[ij][k] != self.table[i][self.table[j][k]]:
                        raise GroupError("associativity fails at (%d, %d, %d)" % (i, j, k))

    def _find_identity(self):
        n = len(self.elements)
        for e in range(n):
            if all(self.table[e][i] == i and self.table[i][e] == i for i in range(n)):
                return e
        raise GroupError("no identity element")

    def __len__(self):
        return len(self.elements)

    def mul(self, i, j):
        return self.table[i][j]

    def inv(self, i):
        return self._inverse[i]

    def order_of(self, i):
        n = 1
        acc = i
        while acc != self.identity:
            acc = self.mul(acc, i)
            n += 1
        return n

    def order_histogram(self):
        hist = {}
        for i in range(len(self)):
            d = self.order_of(i)
            hist[d] = hist.get(d, 0) + 1
        return tuple(sorted(hist.items()))

    def center(self):
        n = range(len(self))
        return tuple(i for i in n
                     if all(self.mul(i, j) == self.mul(j, i) for j in n))

    def is_abelian(self):
        return len(self.center()) == len(self)

    def closure(self, seed):
        seen = set(seed) | {self.identity}
        frontier = list(seen)
        while frontier:
            nxt = []
            for i in frontier:
                for j in list(seen):
                    for p in (self.mul(i, j), self.mul(j, i)):
                        if p not in seen:
                            seen.add(p)
                            nxt.append(p)
            frontier = nxt
        return tuple(sorted(seen))

    def generating_set(self):
        """A small generating set, found greedily over elements by
        decreasing order (deterministic)."""
        by_order = sorted(range(len(self)),
                          key=lambda i: (-self.order_of(i), i))
        gens = []
        span = (self.identity,)
        for i in by_order:
            if i in span:
                continue
            gens.append(i)
            span = self.closure(gens)
            if len(span) == len(self):
                return tuple(gens)
        return tuple(gens)

    def subgroup(self, indices):
        """The subgroup on the given indices as its own GroupTable."""
        idx = sorted(set(indices))
        pos = {g: p for p, g in enumerate(idx)}
        for i in idx:
            for j in idx:
                if self.mul(i, j) not in pos:
                    raise GroupError("subset is not closed under multiplication")
        table = [[pos[self.mul(i, j)] for j in idx] for i in idx]
        return GroupTable([self.elements[i] for i in idx], table, check=False)

    def is_normal(self, indices):
        sub = set(indices)
        for g in range(len(self)):
            gi = self.inv(g)
            for h in sub:
                if self.mul(self.mul(g, h), gi) not in sub:
                    return False
        return True

    def quotient(self, indices):
        """The quotient by a normal subgroup, with coset labels."""
        if not self.is_normal(indices):
            raise GroupError("subgroup is not normal")
        sub = sorted(set(indices))
        cosets = []
        seen = set()
        for g in range(len(self)):
            if g in seen:
                continue
            coset = tuple(sorted(self.mul(g, h) for h in sub))
            cosets.append(coset)
            seen.update(coset)
        pos = {c: i for i, c in enumerate(cosets)}
        rep = [c[0] for c in cosets]
        table = []
        for a in rep:
            row = []
            for b in rep:
                prod = self.mul(a, b)
                target = next(c for c in cosets if prod in c)
                row.append(pos[target])
            table.append(row)
        labels = ["{%s}" % ",".join(str(self.elements[i]) for i in c) for c in cosets]
        return GroupTable(labels, table, check=False)

    def to_json(self):
        return {"elements": [str(e) for e in self.elements],
                "mul": [list(row) for row in self.table]}

    @classmethod
    def from_elements(cls, items, compose, label=None, check=True):
        """Build a table from a closed list of items and a product function."""
        label = label or str
        labels = [label(x) for x in items]
        pos = {l: i for i, l in enumerate(labels)}
        if len(pos) != len(items):
            raise GroupError("labeling is not injective")
        table = []
        for x in items:
            row = []
            for y in items:
                key = label(compose(x, y))
                if key not in pos:
                    raise GroupError("list is not closed under composition")
                row.append(pos[key])
            table.append(row)
        return cls(labels, table, check=check)

    @classmethod
    def generate(cls, gens, compose, identity, label=None):
        """Close a generating set under composition, then tabulate."""
        label = label or str
        items = [identity]
        seen = {label(identity)}
        frontier = [identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    for prod in (compose(x, g), compose(g, x)):
                        key = label(prod)
                        if key not in seen:
                            seen.add(key)
                            items.append(prod)
                            nxt.append(prod)
            frontier = nxt
            if len(items) > 200:
                raise GroupError("closure exceeded supported size")
        items.sort(key=label)
        return cls.from_elements(items, compose, label=label), items


# ---------------------------------------------------------------------------
# isomorphism search
# ---------------------------------------------------------------------------

def iso_search(A, B):
    """A multiplicative bijection A -> B (as an index map), or None.

    Backtracks over images of a generating set of A, pruning candidates by
    element order; each full assignment is expanded through the
    multiplication table and verified.
    """
    if len(A) != len(B):
        return None
    if len(A) > 48:
        raise GroupError("isomorphism search is limited to order <= 48")
    if A.order_histogram() != B.order_histogram():
        return None
    gens = A.generating_set()
    words = _word_expressions(A, gens)
    by_order = {}
    for j in range(len(B)):
        by_order.setdefault(B.order_of(j), []).append(j)

    def extend(k, images):
        if k == len(gens):
            return _close_homomorphism(A, B, gens, images, words)
        for j in by_order.get(A.order_of(gens[k]), []):
            result = extend(k + 1, images + (j,))
            if result is not None:
                return result
        return None

    return extend(0, ())


def _word_expressions(A, gens):
    """For each element of A, a product expression over the generators:
    words[i] = (j, g) with i = words-chain mul(j-element, gens[g])."""
    words = {A.identity: None}
    frontier = [A.identity]
    while frontier:
        nxt = []
        for i in frontier:
            for gpos, g in enumerate(gens):
                t = A.mul(i, g)
                if t not in words:
                    words[t] = (i, gpos)
                    nxt.append(t)
        frontier = nxt
    if len(words) != len(A):
        raise GroupError("generating set does not generate")  # pragma: no cover
    return words


def _close_homomorphism(A, B, gens, images, words):
    phi = {A.identity: B.identity}
    # expand so word prefixes are always available before they are used
    pending = [i for i in range(len(A)) if i != A.identity]
    progress = True
    while pending and progress:
        progress = False
        rest = []
        for i in pending:
            j, gpos = words[i]
            if j in phi:
                phi[i] = B.mul(phi[j], images[gpos])
                progress = True
            else:
                rest.append(i)
        pending = rest
    if pending:
        return None  # pragma: no cover
    if len(set(phi.values())) != len(A):
        return None
    for x in range(len(A)):
        for y in range(len(A)):
            if phi[A.mul(x, y)] != B.mul(phi[x], phi[y]):
                return None
    return phi


def is_isomorphic(A, B):
    return iso_search(A, B) is not None


# ---------------------------------------------------------------------------
# catalog and structure identification
# ---------------------------------------------------------------------------

def cyclic(n):
    return GroupTable(["g%d" % i for i in range(n)],
                      [[(i + j) % n for j in range(n)] for i in range(n)],
                      check=False)


def dihedral(n):
    """Order 2n: rotations r^i and reflections s r^i."""
    labels = ["r%d" % i for i in range(n)] + ["sr%d" % i for i in range(n)]

    def mul(a, b):
        fa, ia = divmod(a, n)
        fb, ib = divmod(b, n)
        if fa == 0:
            return fb * n + (ia + ib) % n if fb == 0 else fb * n + (ib - ia) % n
        return (1 - fb) * n + ((ia + ib) % n if fb == 0 else (ib - ia) % n)

    table = [[mul(a, b) for b in range(2 * n)] for a in range(2 * n)]
    return GroupTable(labels, table, check=False)


def quaternion8():
    units = sorted((q for q in _hurwitz_unit_elements() if q.is_lipschitz_unit()),
                   key=str)
    return GroupTable.from_elements(units, lambda a, b: a * b, label=str)


def direct_product(A, B):
    na, nb = len(A), len(B)
    labels = ["(%s,%s)" % (A.elements[i], B.elements[j])
              for i in range(na) for j in range(nb)]
    table = []
    for i in range(na):
        for j in range(nb):
            row = []
            for k in range(na):
                for l in range(nb):
                    row.append(A.mul(i, k) * nb + B.mul(j, l))
            table.append(row)
    return GroupTable(labels, table, check=False)


@dataclass(frozen=True)
class StructureId:
    name: str
    aliases: tuple
    certificate: dict = None       # label map into the catalog model
    fingerprint: tuple = None

    def matches(self, name):
        return name == self.name or name in self.aliases


def _catalog():
    entries = [
        ("C1", ("trivial",), cyclic(1)),
        ("C2", (), cyclic(2)),
        ("C3", (), cyclic(3)),
        ("C4", (), cyclic(4)),
        ("C2xC2", ("V4",), direct_product(cyclic(2), cyclic(2))),
        ("C6", ("C2xC3", "C3xC2"), cyclic(6)),
        ("S3", ("C3:C2", "D3"), dihedral(3)),
        ("C8", (), cyclic(8)),
        ("Q8", (), quaternion8()),
        ("D4", (), dihedral(4)),
        ("C12", (), cyclic(12)),
        ("D6", ("C6:C2", "S3xC2"), dihedral(6)),
        ("Dic3", ("C3:C4",), _dicyclic3()),
        ("C24", (), cyclic(24)),
        ("Q8:C3", ("binary-tetrahedral", "2T", "SL(2,3)"), None),  # built lazily
    ]
    return entries


def _dicyclic3():
    # presentation a^6 = 1, b^2 = a^3, b a b^-1 = a^-1, order 12
    elems = [(i, e) for e in (0, 1) for i in range(6)]
    pos = {x: n for n, x in enumerate(elems)}

    def mul2(x, y):
        i, e = x
        j, f = y
        if e == 0 and f == 0:
            return ((i + j) % 6, 0)
        if e == 0 and f == 1:
            return ((j - i) % 6, 1)
        if e == 1 and f == 0:
            return ((i + j) % 6, 1)
        return ((j - i + 3) % 6, 0)

    table = [[pos[mul2(x, y)] for y in elems] for x in elems]
    return GroupTable([str(x) for x in elems], table)


def structure_id(G):
    """Identify a group of order <= 48 against the built-in catalog.

    Returns the canonical name with aliases and an isomorphism certificate;
    an unidentified group gets a fingerprint (order histogram, center size,
    abelianization invariants) instead.
    """
    if len(G) > 48:
        raise GroupError("identification is limited to order <= 48")
    for name, aliases, model in _catalog():
        if model is None:
            model = hurwitz_units().table
        if len(model) != len(G):
            continue
        phi = iso_search(G, model)
        if phi is not None:
            cert = {str(G.elements[i]): str(model.elements[j]) for i, j in phi.items()}
            return StructureId(name, tuple(aliases), certificate=cert)
    return StructureId("unidentified", (), fingerprint=_fingerprint(G))


def _fingerprint(G):
    derived = _derived_subgroup(G)
    ab = G.quotient(derived)
    return (("order", len(G)),
            ("order_histogram", G.order_histogram()),
            ("center", len(G.center())),
            ("abelianization", ab.order_histogram()))


def _derived_subgroup(G):
    commutators = set()
    for i in range(len(G)):
        for j in range(len(G)):
            c = G.mul(G.mul(i, j), G.mul(G.inv(i), G.inv(j)))
            commutators.add(c)
    return G.closure(commutators)


# ---------------------------------------------------------------------------
# GL(2, 3) with its level subgroups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mat2Z3:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for v in (self.a, self.b, self.c, self.d):
            if not 0 <= v < 3:
                raise GroupError("entries live in Z/3")

    def det(self):
        return (self.a * self.d - self.b * self.c) % 3

    def __mul__(self, other):
        return Mat2Z3((self.a * other.a + self.b * other.c) % 3,
                      (self.a * other.b + self.b * other.d) % 3,
                      (self.c * other.a + self.d * other.c) % 3,
                      (self.c * other.b + self.d * other.d) % 3)

    def __str__(self):
        return "[%d%d;%d%d]" % (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class LevelGroups:
    table: GroupTable
    matrices: tuple
    gamma0: tuple   # indices of upper-triangular matrices
    gamma1: tuple   # indices of (1 *; 0 *) matrices

    def gamma0_table(self):
        return self.table.subgroup(self.gamma0)

    def gamma1_table(self):
        return self.table.subgroup(self.gamma1)


def gl23():
    """GL(2,3) as a GroupTable with its upper-triangular subgroup (12
    elements) and unipotent-first-row subgroup (6 elements) marked."""
    mats = []
    for a, b, c, d in itertools.product(range(3), repeat=4):
        m = Mat2Z3(a, b, c, d)
        if m.det() != 0:
            mats.append(m)
    mats.sort(key=str)
    table = GroupTable.from_elements(mats, lambda x, y: x * y, label=str)
    gamma0 = tuple(i for i, m in enumerate(mats) if m.c == 0)
    gamma1 = tuple(i for i, m in enumerate(mats) if m.c == 0 and m.a == 1)
    return LevelGroups(table, tuple(mats), gamma0, gamma1)


# ---------------------------------------------------------------------------
# Hurwitz quaternion units
# ---------------------------------------------------------------------------

class HurwitzQuat:
    """A quaternion (a + bi + cj + dk)/2 with integer doubled coordinates
    of a common parity."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        if len({v % 2 for v in (a, b, c, d)}) != 1:
            raise GroupError("doubled coordinates must share parity")
        self.a, self.b, self.c, self.d = a, b, c, d

    def __mul__(self, other):
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = other.a, other.b, other.c, other.d
        # doubled coordinates multiply to 4x the true product; halve once
        quad = (a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2)
        if any(v % 2 for v in quad):  # pragma: no cover - parity is preserved
            raise GroupError("product is not a half-integer quaternion")
        return HurwitzQuat(*[v // 2 for v in quad])

    def __neg__(self):
        return HurwitzQuat(-self.a, -self.b, -self.c, -self.d)

    def __eq__(self, other):
        return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def norm4(self):
        """Four times the reduced norm."""
        return self.a ** 2 + self.b ** 2 + self.c ** 2 + self.d ** 2

    def is_lipschitz_unit(self):
        return self.norm4() == 4 and all(v % 2 == 0 for v in (self.a, self.b, self.c, self.d))

    def __str__(self):
        names = ("", "i", "j", "k")
        if self.a % 2 == 0:
            parts = []
            for v, n in zip((self.a, self.b, self.c, self.d), names):
                h = v // 2
                if h == 0:
                    continue
                s = n if abs(h) == 1 and n else str(abs(h)) + n
                parts.append(("-" if h < 0 else "+") + (s or "1"))
            if not parts:
                return "0"
            out = "".join(parts)
            return out[1:] if out.startswith("+") else out
        body = "".join(("-" if v < 0 else "+") + (n or "1")
                       for v, n in zip((self.a, self.b, self.c, self.d), names)
                       if abs(v) == 1)
        return "(%s)/2" % (body[1:] if body.startswith("+") else body)

    __repr__ = __str__


def _hurwitz_unit_elements():
    units = []
    for axis in range(4):
        for sign in (2, -2):
            coords = [0, 0, 0, 0]
            coords[axis] = sign
            units.append(HurwitzQuat(*coords))
    for signs in itertools.product((1, -1), repeat=4):
        units.append(HurwitzQuat(*signs))
    return units


@dataclass(frozen=True)
class HurwitzUnits:
    table: GroupTable
    quaternions: tuple
    q8_indices: tuple

    def q8_table(self):
        return self.table.subgroup(self.q8_indices)


def hurwitz_units():
    """The 24 unit quaternions: 8 Lipschitz units and 16 halves
    (+-1 +- i +- j +- k)/2, with the quaternion subgroup marked."""
    units = _hurwitz_unit_elements()
    assert len(units) == 24
    units.sort(key=str)
    table = GroupTable.from_elements(units, lambda x, y: x * y, label=str)
    q8 = tuple(i for i, q in enumerate(units) if q.is_lipschitz_unit())
    return HurwitzUnits(table, tuple(units), q8)


# ---------------------------------------------------------------------------
# curve automorphisms as a group
# ---------------------------------------------------------------------------

def group_from_automorphisms(autos):
    """A GroupTable from a list of coordinate changes closed under
    composition (multiplication is composition)."""
    def label(phi):
        return str(phi.sort_key())
    return GroupTable.from_elements(list(autos),
                                    lambda f, g: f.compose(g), label=label)


def semidirect_certificate(G, normal_indices):
    """Certify G = N : H for the given normal subgroup: finds a complement
    of order |G|/|N| and checks nontrivial conjugation action."""
    if not G.is_normal(normal_indices):
        raise GroupError("subgroup is not normal")
    nset = set(normal_indices)
    want = len(G) // len(nset)
    complement = None
    for comb in itertools.combinations([i for i in range(len(G)) if i not in nset
                                        or i == G.identity], want):
        if G.identity not in comb:
            continue
        if len({c for c in comb}) != want:
            continue
        try:
            sub = set(comb)
            ok = all(G.mul(a, b) in sub for a in comb for b in comb)
        except GroupError:  # pragma: no cover
            ok = False
        if ok and len(sub & nset) == 1:
            complement = comb
            break
    if complement is None:
        return None
    action_nontrivial = any(
        G.mul(G.mul(h, n), G.inv(h)) != n
        for h in complement for n in nset)
    return {"normal": tuple(sorted(nset)), "complement": complement,
            "action_nontrivial": action_nontrivial}

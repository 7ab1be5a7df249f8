"""GF(2) linear algebra on bitmask rows.

The degree-by-degree solvers (curve isomorphism elimination and the
star-isomorphism lift) reduce each filtration step to a linear system over
F2; rows are stored as Python integers so elimination is just XOR.
"""

from __future__ import annotations


def solve_gf2(rows):
    """Solve a linear system over GF(2).

    rows: list of (mask, rhs) with mask an int whose bits select unknowns.
    Returns (solution_mask, None) with free variables set to zero, or
    (None, index_of_inconsistent_row).
    """
    pivots = {}
    for idx, (mask, rhs) in enumerate(rows):
        while mask:
            col = mask.bit_length() - 1
            if col in pivots:
                pmask, prhs = pivots[col]
                mask ^= pmask
                rhs ^= prhs
            else:
                pivots[col] = (mask, rhs)
                break
        else:
            if rhs:
                return None, idx
    sol = 0
    for col in sorted(pivots):
        mask, rhs = pivots[col]
        v = rhs
        rest = mask & ~(1 << col)
        while rest:
            b = rest.bit_length() - 1
            if (sol >> b) & 1:
                v ^= 1
            rest ^= 1 << b
        if v:
            sol |= 1 << col
    return sol, None


class CoordIndex:
    """Assigns stable integer indices to hashable coordinate labels."""

    def __init__(self):
        self.index = {}
        self.labels = []

    def __call__(self, label):
        if label not in self.index:
            self.index[label] = len(self.labels)
            self.labels.append(label)
        return self.index[label]

    def get(self, label):
        return self.index.get(label)

    def __len__(self):
        return len(self.labels)


class GF2Span:
    """Incremental span of GF(2) vectors (int bitmasks) with combination
    tracking, supporting membership solves and a kernel basis.

    Vectors are added with consecutive tags 0, 1, ...; reduce(v) returns
    (residual, combo) where combo is a bitmask over tags with
    v = residual + sum of tagged vectors.
    """

    def __init__(self):
        self.pivots = {}   # pivot bit -> (vector, combo)
        self.kernel = []   # combos of vectors summing to zero
        self.ntags = 0

    def add(self, vec):
        combo = 1 << self.ntags
        self.ntags += 1
        vec, combo = self._reduce(vec, combo)
        if vec:
            self.pivots[vec.bit_length() - 1] = (vec, combo)
        else:
            self.kernel.append(combo)

    def _reduce(self, vec, combo):
        while vec:
            col = vec.bit_length() - 1
            if col not in self.pivots:
                break
            pvec, pcombo = self.pivots[col]
            vec ^= pvec
            combo ^= pcombo
        return vec, combo

    def reduce(self, vec):
        return self._reduce(vec, 0)

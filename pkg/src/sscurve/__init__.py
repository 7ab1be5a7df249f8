"""Exact computer algebra for supersingular Weierstrass curves at p = 2.

Subpackages cover exact coefficient rings (finite fields, truncated Witt
rings, series/Laurent towers), truncated power series, Weierstrass curves
and their isomorphisms, formal group laws with a star-isomorphism solver,
finite group tables, level-3 structures, and the universal deformation with
its C3 and C2 actions.  The ``sscurve`` CLI runs the verification checks.
"""

__version__ = "0.1.0"

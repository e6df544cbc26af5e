"""Canonical string keys for heterogeneous values.

Terms, finite subsets and weighted distributions all need a stable,
deterministic ordering and a printable identity (used as carrier
element names and memoization keys).  Objects participate by exposing
a ``canon()`` method; primitives are handled here.
"""

from __future__ import annotations

from fractions import Fraction

from .quantale import is_inf


def canon_key(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return "T" if x else "F"
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(Fraction(x))
    if is_inf(x):
        return "inf"
    if isinstance(x, tuple):
        return "(" + ",".join(canon_key(i) for i in x) + ")"
    canon = getattr(x, "canon", None)
    if canon is not None:
        return canon()
    raise TypeError(f"no canonical key for {x!r}")

"""Subsumption, reduction, least common subsumers and differences (empty TBox)."""
from __future__ import annotations

from functools import lru_cache, reduce as _fold
from typing import Iterable

from .errors import BottomError
from .syntax import BOTTOM, TOP, Concept, conjoin, size, sort_key

_CACHE = 1 << 20


@lru_cache(maxsize=_CACHE)
def subsumes(c: Concept, d: Concept) -> bool:
    """True iff ``c`` is subsumed by ``d`` w.r.t. the empty TBox."""
    if c is d or c.is_bottom:
        return True
    if d.is_bottom:
        return False
    if not d.names <= c.names:
        return False
    for r, f in d.exists:
        if not any(subsumes(e, f) for e in c.succ(r)):
            return False
    return True


def equiv(c: Concept, d: Concept) -> bool:
    return c is d or (subsumes(c, d) and subsumes(d, c))


def strictly(c: Concept, d: Concept) -> bool:
    return subsumes(c, d) and not subsumes(d, c)


def incomparable(c: Concept, d: Concept) -> bool:
    return not subsumes(c, d) and not subsumes(d, c)


def _minimal_fillers(fillers: Iterable[Concept]) -> list:
    # keep fillers with no strictly more specific sibling; fillers are reduced,
    # so equivalent ones are already identical and the set removes duplicates.
    # Bigger concepts first: they are the likely survivors.
    kept: list = []
    for f in sorted(set(fillers), key=size, reverse=True):
        if any(subsumes(g, f) for g in kept):
            continue
        kept = [g for g in kept if not subsumes(f, g)]
        kept.append(f)
    return kept


@lru_cache(maxsize=_CACHE)
def reduce(c: Concept) -> Concept:
    """Canonical reduced form: equivalent inputs give the identical object."""
    if c.is_bottom or not c.exists:
        return c
    ex = []
    for r in c.roles():
        for f in _minimal_fillers(reduce(f) for f in c.succ(r)):
            ex.append((r, f))
    return Concept(c.names, ex)


def is_reduced(c: Concept) -> bool:
    return reduce(c) is c


@lru_cache(maxsize=_CACHE)
def _lcs2(c: Concept, d: Concept) -> Concept:
    # both arguments reduced and satisfiable
    if subsumes(c, d):
        return d
    if subsumes(d, c):
        return c
    ex = []
    for r in c.roles():
        dr = d.succ(r)
        if not dr:
            continue
        fillers = [_lcs2(e, f) for e in c.succ(r) for f in dr]
        ex.extend((r, f) for f in _minimal_fillers(fillers))
    return Concept(c.names & d.names, ex)


def lcs(cs: Iterable[Concept]) -> Concept:
    """Least common subsumer of a non-empty collection (bottom is neutral)."""
    items = list(cs)
    if not items:
        raise ValueError("lcs of an empty collection")
    items = sorted({reduce(c) for c in items if not c.is_bottom}, key=sort_key)
    if not items:
        return BOTTOM
    return _fold(_lcs2, items)


def lcs2(c: Concept, d: Concept) -> Concept:
    return lcs((c, d))


def meet(c: Concept, d: Concept) -> Concept:
    """Reduced conjunction."""
    return reduce(conjoin(c, d))


def orthogonal(c: Concept, d: Concept) -> bool:
    return lcs((c, d)).is_top


def syntactic_difference(c: Concept, d: Concept) -> Concept:
    """Conjuncts of reduce(c) that are not implied by d."""
    atoms = [a for a in reduce(c).conj() if not subsumes(d, a)]
    return reduce(conjoin(*atoms)) if atoms else TOP


def mgd(c: Concept, d: Concept) -> Concept:
    """Most general difference of ``c`` with respect to ``d``."""
    if c.is_bottom or d.is_bottom:
        raise BottomError("most general differences do not exist for the bottom concept")
    if not subsumes(c, d):
        d = lcs((c, d))
    return syntactic_difference(c, d)


def strongly_not_subsumed(c: Concept, d: Concept) -> bool:
    return all(not subsumes(c, e) for e in d.conj())


def clear_caches() -> None:
    for fn in (subsumes, reduce, _lcs2):
        fn.cache_clear()

"""Upper and lower neighbors, with and without a cycle-restricted TBox.

Neighbor sets are returned as lists of reduced concepts in canonical order.
Since reduced forms are canonical, deduplication modulo equivalence is plain
set deduplication.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .errors import BottomError, BudgetExceeded
from .order import _lcs2, _minimal_fillers, reduce, subsumes
from .syntax import BOTTOM, Concept, Signature, conjoin, exists, name, role_depth, signature_of, sort_key

_CACHE = 1 << 18


def _sorted(cs) -> list:
    return sorted(set(cs), key=sort_key)


# ------------------------------------------------------------------ upper

@lru_cache(maxsize=_CACHE)
def _upper(c: Concept) -> tuple:
    out = []
    for a in sorted(c.names):
        out.append(Concept(c.names - {a}, c.exists))
    for r, d in c.exists:
        rest = set(c.exists)
        rest.discard((r, d))
        rest.update((r, e) for e in _upper(d))
        out.append(reduce(Concept(c.names, rest)))
    return tuple(_sorted(out))


@lru_cache(maxsize=_CACHE)
def join_of_uppers(c: Concept) -> Concept:
    """The lcs of all upper neighbors of the reduced, non-top concept ``c``.

    Same value as ``lcs(upper(c))``, computed without the product blow-up of
    the generic fold.  With at least two atoms no name survives, and the
    r-fillers are the minimal members of Upper(G) over the r-fillers G of c
    together with the pairwise lcs of distinct r-fillers.
    """
    atoms = len(c.names) + len(c.exists)
    if atoms == 1:
        return _upper(c)[0]
    ex = []
    for r in c.roles():
        fs = c.succ(r)
        cands = [u for g in fs for u in _upper(g)]
        cands += [_lcs2(g, h) for g, h in itertools.combinations(fs, 2)]
        ex.extend((r, f) for f in _minimal_fillers(cands))
    return Concept((), ex)


def upper(c: Concept) -> list:
    """All upper neighbors of ``c`` (reduced, one per equivalence class)."""
    if c.is_bottom:
        raise BottomError("the bottom concept has no upper neighbors")
    return list(_upper(reduce(c)))


# ------------------------------------------------------------------ lower

@dataclass(frozen=True)
class ChoiceProblem:
    """One role ``role`` of ``base`` together with a subset of its successors.

    ``choices[i]`` lists the atoms allowed for ``subset[i]``: atoms X such that
    ``subset[i] & X`` is a lower neighbor of ``subset[i]`` and every other
    member of the subset is subsumed by X.
    """
    base: Concept
    role: str
    subset: tuple
    choices: tuple
    others: tuple  # successors of the role outside the subset

    def functions(self):
        """All choice functions, as tuples aligned with ``subset``."""
        return itertools.product(*self.choices)

    def admissible(self):
        """Choice functions whose range conjunction avoids every outside successor."""
        for chi in self.functions():
            ran = reduce(conjoin(*chi))
            if not any(subsumes(f, ran) for f in self.others):
                yield chi


def choice_problems(c: Concept, role: str, sig: Signature, prune: bool = True):
    """Choice problems of ``c`` for ``role``, subsets in increasing size.

    With ``prune`` the problems that have an empty choice set are skipped.
    """
    c = reduce(c)
    succ = c.succ(role)
    for k in range(len(succ) + 1):
        for idx in itertools.combinations(range(len(succ)), k):
            subset = tuple(succ[i] for i in idx)
            others = tuple(succ[i] for i in range(len(succ)) if i not in idx)
            choices = []
            for f in subset:
                allowed = tuple(x for x in _lower_atoms(f, sig)
                                if all(subsumes(g, x) for g in subset if g is not f))
                choices.append(allowed)
            if prune and not all(choices):
                continue
            yield ChoiceProblem(c, role, subset, tuple(choices), others)


@lru_cache(maxsize=_CACHE)
def _lower_atoms(c: Concept, sig: Signature) -> tuple:
    # atoms X with c & X a lower neighbor of the reduced concept c
    out = [name(a) for a in sig.concept_names if a not in c.names]
    for r in sig.role_names:
        for problem in choice_problems(c, r, sig):
            for chi in problem.admissible():
                out.append(exists(r, reduce(conjoin(*chi))))
    return tuple(_sorted(out))


def lower(c: Concept, sig: Signature | None = None) -> list:
    """All lower neighbors of ``c`` over ``sig`` (default: the signature of ``c``)."""
    if c.is_bottom:
        raise BottomError("lower neighbors of the bottom concept are not defined")
    c = reduce(c)
    if sig is None:
        sig = signature_of(c)
    return _sorted(reduce(conjoin(c, x)) for x in _lower_atoms(c, sig))


def is_lower_neighbor(c: Concept, d: Concept) -> bool:
    """True iff ``c`` is a lower neighbor of ``d``."""
    if c.is_bottom or d.is_bottom:
        return False
    c, d = reduce(c), reduce(d)
    if role_depth(c) - role_depth(d) not in (0, 1):
        return False
    return any(u is d for u in _upper(c))


# ------------------------------------------------------------------ with a TBox

def _tbox_sig(t, *cs) -> Signature:
    return t.signature().union(signature_of(*(c for c in cs if not c.is_bottom)))


def _dedupe_modulo(cs, t) -> list:
    # keep the canonically first member of each T-equivalence class
    from .models import tbox_equiv
    out: list = []
    for c in _sorted(cs):
        if not any(tbox_equiv(c, d, t) for d in out):
            out.append(c)
    return out


def _class_region(c: Concept, t, max_nodes: int) -> tuple:
    # all reduced concepts T-equivalent to c, found by searching upwards from
    # the most specific consequence; the region is convex, so upper-neighbor
    # steps that stay inside it reach every member
    from .models import msc, tbox_entails
    start = msc(c, t)
    if start.is_bottom:
        raise BottomError("the concept is unsatisfiable w.r.t. the TBox")
    seen = {start}
    queue = deque([start])
    maximal = []
    exits = set()
    while queue:
        x = queue.popleft()
        top_of_region = True
        for y in _upper(x):
            if y in seen:
                top_of_region = False
            elif tbox_entails(y, c, t):
                top_of_region = False
                if len(seen) >= max_nodes:
                    raise BudgetExceeded(f"more than {max_nodes} concepts in the class")
                seen.add(y)
                queue.append(y)
            else:
                exits.add(y)
        if top_of_region:
            maximal.append(x)
    return seen, maximal, exits


def max_generalizations(c: Concept, t, max_nodes: int = 100_000) -> list:
    """The most general concepts (w.r.t. the empty TBox) equivalent to ``c`` under ``t``."""
    return _sorted(_class_region(c, t, max_nodes)[1])


def upper_wrt_tbox(c: Concept, t, max_nodes: int = 100_000) -> list:
    """Upper neighbors of ``c`` w.r.t. a cycle-restricted TBox, one per class.

    These are the most specific concepts that leave the class of ``c`` in one
    upper-neighbor step from some member of that class.  Stepping only from
    the most general members misses neighbors: with A below B, the class of A
    has the single maximal member A, whose only upper neighbor is TOP, yet B
    lies strictly between A and TOP.
    """
    if c.is_bottom:
        raise BottomError("the bottom concept has no upper neighbors")
    cands = _class_region(c, t, max_nodes)[2]
    minimal = [u for u in cands if not any(v is not u and subsumes(v, u) for v in cands)]
    return _dedupe_modulo(minimal, t)


def lower_wrt_tbox(c: Concept, t, sig: Signature | None = None) -> list:
    """Lower neighbors of ``c`` w.r.t. a cycle-restricted TBox, one per class.

    ``sig`` defaults to the signature of ``c`` and ``t`` together.
    """
    from .models import msc, tbox_entails
    if c.is_bottom:
        raise BottomError("lower neighbors of the bottom concept are not defined")
    if sig is None:
        sig = _tbox_sig(t, c)
    start = msc(c, t)
    if start.is_bottom:
        return []
    cands = [x for x in lower(start, sig) if not tbox_entails(x, BOTTOM, t)]
    # most general w.r.t. t
    best = [x for x in cands
            if not any(tbox_entails(x, y, t) and not tbox_entails(y, x, t) for y in cands)]
    return _dedupe_modulo(best, t)


def is_neighbor_wrt_tbox(c: Concept, d: Concept, t, sig: Signature | None = None) -> bool:
    """True iff ``c`` is a lower neighbor of ``d`` w.r.t. a cycle-restricted TBox."""
    from .models import _require_cycle_restricted, msc, tbox_entails, tbox_equiv
    _require_cycle_restricted(t)
    if c.is_bottom or d.is_bottom:
        return False
    if not tbox_entails(c, d, t) or tbox_entails(d, c, t):
        return False
    if sig is None:
        sig = _tbox_sig(t, c, d)
    top = msc(d, t)
    return all(tbox_equiv(c, x, t) for x in lower(top, sig) if tbox_entails(c, x, t))

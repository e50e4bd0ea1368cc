"""Brute-force reference implementations for testing.

Everything here is deliberately naive and shares no code with the fast
procedures it is used to check: the universe of all concepts up to a role
depth is enumerated level by level, subsumption between its members is
decided by a bitmask encoding of the structural rule, and the neighbor
relation is read off as the transitive reduction of that order.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import EllatError
from .models import Interpretation, TBox, extension, is_model, tbox_entails
from .syntax import Concept, Signature, exists, sort_key


class CapExceeded(EllatError):
    pass


@dataclass
class Universe:
    """All equivalence classes of concepts over ``signature`` up to ``depth``.

    ``leq[i, j]`` says classes[i] is subsumed by classes[j]; ``cover[i, j]``
    says classes[i] is a lower neighbor of classes[j].
    """
    signature: Signature
    depth: int
    classes: list
    leq: np.ndarray
    cover: np.ndarray = field(default=None, repr=False)
    index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.index = {c: i for i, c in enumerate(self.classes)}
        if self.cover is None:
            strict = self.leq & ~np.eye(len(self.classes), dtype=bool)
            s = strict.astype(np.float32)
            self.cover = strict & ~((s @ s) > 0)

    def __len__(self) -> int:
        return len(self.classes)

    def find(self, c: Concept) -> int:
        """Index of the class of ``c``."""
        i = self.index.get(c)
        if i is not None:
            return i
        for j, d in enumerate(self.classes):
            if tree_subsumes(c, d) and tree_subsumes(d, c):
                return j
        raise KeyError(f"no class for {c}")

    def uppers(self, i: int) -> list:
        return [int(j) for j in np.flatnonzero(self.cover[i])]

    def lowers(self, i: int) -> list:
        return [int(j) for j in np.flatnonzero(self.cover[:, i])]

    def top(self) -> int:
        return self.find(Concept())


def _antichains(n: int, comparable: list, cap: int) -> list:
    # all antichains of a poset on range(n), as sorted index tuples
    out: list = []

    def rec(i: int, cur: list, blocked: int) -> None:
        if i == n:
            out.append(tuple(cur))
            if len(out) > cap:
                raise CapExceeded(f"more than {cap} antichains")
            return
        rec(i + 1, cur, blocked)
        if not (blocked >> i) & 1:
            cur.append(i)
            rec(i + 1, cur, blocked | comparable[i])
            cur.pop()

    rec(0, [], 0)
    return out


def enumerate_universe(sig: Signature, depth: int, max_classes: int = 100_000) -> Universe:
    """Enumerate one reduced representative per class, level by level."""
    names = sig.concept_names
    roles = sig.role_names
    subsets = [frozenset(s) for k in range(len(names) + 1) for s in itertools.combinations(names, k)]
    concepts = [Concept(s) for s in subsets]
    name_sets = list(subsets)
    fills = [{r: () for r in roles} for _ in concepts]
    leq = np.array([[b <= a for b in name_sets] for a in name_sets], dtype=bool)
    for _ in range(depth):
        prev, prev_leq = concepts, leq
        n = len(prev)
        up = [_mask(np.flatnonzero(prev_leq[i])) for i in range(n)]
        comparable = [_mask(np.flatnonzero(prev_leq[i] | prev_leq[:, i])) for i in range(n)]
        chains = _antichains(n, comparable, max_classes)
        combos = list(itertools.product(subsets, *([chains] * len(roles))))
        if len(combos) > max_classes:
            raise CapExceeded(f"{len(combos)} classes exceed the cap of {max_classes}")
        concepts, name_sets, fills = [], [], []
        for combo in combos:
            s, per_role = combo[0], combo[1:]
            concepts.append(Concept(s, ((r, prev[i]) for r, ac in zip(roles, per_role) for i in ac)))
            name_sets.append(s)
            fills.append(dict(zip(roles, per_role)))
        leq = _leq_matrix(name_sets, fills, roles, up)
    order = sorted(range(len(concepts)), key=lambda i: sort_key(concepts[i]))
    classes = [concepts[i] for i in order]
    leq = leq[np.ix_(order, order)]
    return Universe(sig, depth, classes, leq)


def _mask(idxs) -> int:
    m = 0
    for i in idxs:
        m |= 1 << int(i)
    return m


def _leq_matrix(name_sets, fills, roles, up) -> np.ndarray:
    # x below y iff y's names are x's names and each y-filler is above some x-filler
    n = len(name_sets)
    fill_mask = {r: [_mask(f[r]) for f in fills] for r in roles}
    reach = {r: [_or(up[i] for i in f[r]) for f in fills] for r in roles}
    out = np.zeros((n, n), dtype=bool)
    for x in range(n):
        nx_ = name_sets[x]
        row = out[x]
        for y in range(n):
            if not name_sets[y] <= nx_:
                continue
            if all(fill_mask[r][y] & ~reach[r][x] == 0 for r in roles):
                row[y] = True
    return out


def _or(ms) -> int:
    out = 0
    for m in ms:
        out |= m
    return out


def tree_subsumes(c: Concept, d: Concept) -> bool:
    """Subsumption by evaluating ``d`` on the tree-shaped model of ``c``."""
    if c.is_bottom:
        return True
    if d.is_bottom:
        return False
    dom: list = []
    cext: dict = {}
    rext: dict = {}

    def build(x: Concept) -> int:
        me = len(dom)
        dom.append(me)
        for a in x.names:
            cext.setdefault(a, set()).add(me)
        for r, f in x.exists:
            child = build(f)
            rext.setdefault(r, set()).add((me, child))
        return me

    root = build(c)
    return root in extension(d, Interpretation(dom, cext, rext), strict=False)


# ---------------------------------------------------------------- queries

def brute_neighbors(u: Universe, c: Concept) -> tuple:
    """(upper neighbors, lower neighbors) of ``c`` in the universe."""
    i = u.find(c)
    ups = sorted((u.classes[j] for j in u.uppers(i)), key=sort_key)
    lows = sorted((u.classes[j] for j in u.lowers(i)), key=sort_key)
    return ups, lows


def _height_to_top(u: Universe, i: int, longest: bool = True) -> int:
    memo: dict = {}
    pick = max if longest else min

    def go(x: int) -> int:
        if x not in memo:
            ups = u.uppers(x)
            memo[x] = 0 if not ups else 1 + pick(go(y) for y in ups)
        return memo[x]

    return go(i)


def brute_rank_distance(u: Universe, c: Concept, d: Concept) -> tuple:
    """(longest cover path from c to top, shortest undirected cover path c to d)."""
    i, j = u.find(c), u.find(d)
    r = _height_to_top(u, i)
    seen = {i: 0}
    queue = deque([i])
    while queue:
        x = queue.popleft()
        if x == j:
            break
        for y in itertools.chain(u.uppers(x), u.lowers(x)):
            if y not in seen:
                seen[y] = seen[x] + 1
                queue.append(y)
    return r, seen.get(j)


def is_graded(u: Universe) -> bool:
    """Longest and shortest cover paths to top agree for every class."""
    memo_max: dict = {}
    memo_min: dict = {}
    order = sorted(range(len(u)), key=lambda x: int(u.leq[x].sum()))
    for x in order:
        ups = u.uppers(x)
        memo_max[x] = 0 if not ups else 1 + max(memo_max[y] for y in ups)
        memo_min[x] = 0 if not ups else 1 + min(memo_min[y] for y in ups)
    return all(memo_max[x] == memo_min[x] for x in range(len(u)))


def dump(u: Universe) -> str:
    return "".join(str(c) + "\n" for c in u.classes)


# ---------------------------------------------------------------- TBox oracles

def tbox_classes(u: Universe, t: TBox) -> list:
    """Partition of the universe into equivalence classes w.r.t. ``t``."""
    groups: list = []
    for c in u.classes:
        for g in groups:
            if tbox_entails(c, g[0], t) and tbox_entails(g[0], c, t):
                g.append(c)
                break
        else:
            groups.append([c])
    return groups


@dataclass
class TBoxQuotient:
    """The universe modulo equivalence w.r.t. a TBox, with its cover relation."""
    groups: list
    cover: np.ndarray

    def find(self, c: Concept, t: TBox) -> int:
        return next(k for k, g in enumerate(self.groups)
                    if tbox_entails(c, g[0], t) and tbox_entails(g[0], c, t))


def tbox_quotient(u: Universe, t: TBox) -> TBoxQuotient:
    groups = tbox_classes(u, t)
    reps = [g[0] for g in groups]
    le = np.array([[tbox_entails(a, b, t) for b in reps] for a in reps], dtype=bool)
    strict = le & ~le.T
    s = strict.astype(np.float32)
    return TBoxQuotient(groups, strict & ~((s @ s) > 0))


def brute_tbox_neighbors(u: Universe, c: Concept, t: TBox, quotient: TBoxQuotient | None = None) -> tuple:
    """(upper, lower) neighbor classes of ``c`` w.r.t. ``t`` inside the universe.

    Each class is returned as its list of universe members.  Classes whose
    members all lie deeper than the universe are invisible, so the answer is
    only exact when the universe has enough depth margin around ``c``.
    """
    q = quotient or tbox_quotient(u, t)
    mine = q.find(c, t)
    ups = [q.groups[k] for k in np.flatnonzero(q.cover[mine])]
    lows = [q.groups[k] for k in np.flatnonzero(q.cover[:, mine])]
    return ups, lows


def interpretations(sig: Signature, size: int):
    """Every interpretation of ``sig`` over the domain 0..size-1."""
    dom = list(range(size))
    pairs = [(a, b) for a in dom for b in dom]
    name_choices = itertools.product(range(1 << size), repeat=len(sig.concept_names))
    name_choices = list(name_choices)
    for rmasks in itertools.product(range(1 << len(pairs)), repeat=len(sig.role_names)):
        rext = {r: [pairs[b] for b in range(len(pairs)) if (m >> b) & 1]
                for r, m in zip(sig.role_names, rmasks)}
        for nmasks in name_choices:
            cext = {a: [x for x in dom if (m >> x) & 1] for a, m in zip(sig.concept_names, nmasks)}
            yield Interpretation(dom, cext, rext)


def brute_entails(c: Concept, d: Concept, t: TBox, sig: Signature, max_size: int = 2) -> bool:
    """False iff some model of ``t`` with at most ``max_size`` elements separates c from d."""
    for size in range(1, max_size + 1):
        for i in interpretations(sig, size):
            if is_model(i, t) and not extension(c, i, strict=False) <= extension(d, i, strict=False):
                return False
    return True


def brute_cycle_witness(t: TBox, u: Universe, max_word: int = 2):
    """A pair (C, word) with C below Eword.C w.r.t. ``t``, or None."""
    roles = u.signature.role_names
    for c in u.classes:
        for n in range(1, max_word + 1):
            for word in itertools.product(roles, repeat=n):
                target = c
                for r in reversed(word):
                    target = exists(r, target)
                if tbox_entails(c, target, t):
                    return c, word
    return None

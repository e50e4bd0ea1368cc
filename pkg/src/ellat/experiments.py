"""Towers of ideal lattices and the rank growth of nested existentials.

Level 0 of a tower is an antichain of ``k`` concept names, level 1 is its
powerset, and every further level is the lattice of ideals (down-closed
subsets) of the level below.  Nested existential restrictions over ``k``
names are order-isomorphic (reversed) to these levels, which yields lower
bounds on their ranks.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
import time
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from networkx.algorithms import bipartite

from .errors import BudgetExceeded
from .metric import Budget, rank
from .order import reduce
from .syntax import Concept, TOP, conjoin, exists


def names_for(k: int) -> tuple:
    return tuple(f"A{i}" for i in range(1, k + 1))


class Poset:
    """Finite partial order given by a boolean ``leq`` matrix over ``elements``."""

    def __init__(self, elements, leq, check: bool = True):
        self.elements = tuple(elements)
        self.leq = np.asarray(leq, dtype=bool)
        n = len(self.elements)
        if self.leq.shape != (n, n):
            raise ValueError("relation matrix does not match the element count")
        self.index = {e: i for i, e in enumerate(self.elements)}
        if check:
            self._check()

    def _check(self) -> None:
        m = self.leq
        if not m.diagonal().all():
            raise ValueError("relation is not reflexive")
        if (m & m.T & ~np.eye(len(m), dtype=bool)).any():
            raise ValueError("relation is not antisymmetric")
        mi = m.astype(np.int32)
        if ((mi @ mi > 0) & ~m).any():
            raise ValueError("relation is not transitive")

    def __len__(self) -> int:
        return len(self.elements)

    def le(self, p, q) -> bool:
        return bool(self.leq[self.index[p], self.index[q]])

    def strict(self) -> np.ndarray:
        return self.leq & ~np.eye(len(self), dtype=bool)

    def linear_extension(self) -> list:
        # x < y implies x has strictly fewer elements below it
        below = self.leq.sum(axis=0)
        return sorted(range(len(self)), key=lambda i: (below[i], i))

    def down_masks(self) -> list:
        """Bitmask of the principal ideal of each element (bit i = element i)."""
        out = []
        for j in range(len(self)):
            mask = 0
            for i in np.flatnonzero(self.leq[:, j]):
                mask |= 1 << int(i)
            out.append(mask)
        return out

    def is_antichain(self, idxs) -> bool:
        return all(not self.leq[a, b] and not self.leq[b, a] for a, b in itertools.combinations(idxs, 2))


def antichain_poset(items) -> Poset:
    items = tuple(items)
    return Poset(items, np.eye(len(items), dtype=bool))


def ideals(p: Poset, budget: Budget | None = None) -> list:
    """All ideals as bitmasks, by extending down-closed sets along a linear extension."""
    budget = budget or Budget()
    order = p.linear_extension()
    down = p.down_masks()
    out: list = []

    def rec(pos: int, mask: int) -> None:
        if pos == len(order):
            budget.tick()
            out.append(mask)
            return
        i = order[pos]
        rec(pos + 1, mask)
        # every element strictly below i comes earlier in the order
        if down[i] & ~(1 << i) & ~mask == 0:
            rec(pos + 1, mask | (1 << i))

    rec(0, 0)
    return sorted(out, key=lambda m: (bin(m).count("1"), m))


def count_ideals(p: Poset, budget: Budget | None = None) -> int:
    return len(ideals(p, budget))


def ideal_poset(p: Poset, budget: Budget | None = None) -> Poset:
    """Ideals of ``p`` ordered by inclusion; elements are frozensets of ``p``'s elements."""
    masks = ideals(p, budget)
    n = len(p)
    member = np.array([[(m >> i) & 1 for i in range(n)] for m in masks], dtype=np.int32).reshape(len(masks), n)
    # a <= b iff a has no member outside b
    leq = (member @ (1 - member).T) == 0
    elems = [frozenset(p.elements[i] for i in range(n) if (m >> i) & 1) for m in masks]
    return Poset(elems, leq, check=len(elems) <= 2000)


@dataclass
class PosetTower:
    k: int
    levels: list
    _embed: dict = field(default_factory=dict, repr=False)


def build_tower(k: int, n: int, budget: Budget | None = None) -> PosetTower:
    """Levels 0..n for ``k`` generators."""
    if k < 1:
        raise ValueError("a tower needs at least one generator")
    budget = budget or Budget()
    levels = [antichain_poset(names_for(k))]
    for _ in range(n):
        levels.append(ideal_poset(levels[-1], budget))
    return PosetTower(k, levels)


# ---------------------------------------------------------------- statistics

def height(p: Poset) -> int:
    """Number of elements in a longest chain."""
    h = [0] * len(p)
    strict = p.strict()
    for j in p.linear_extension():
        below = np.flatnonzero(strict[:, j])
        h[j] = 1 + max((h[i] for i in below), default=0)
    return max(h, default=0)


def width(p: Poset) -> int:
    """Size of a largest antichain, via a maximum matching in the split graph."""
    n = len(p)
    if n == 0:
        return 0
    g = nx.Graph()
    left = [("l", i) for i in range(n)]
    g.add_nodes_from(left)
    g.add_nodes_from(("r", i) for i in range(n))
    xs, ys = np.nonzero(p.strict())
    g.add_edges_from((("l", int(a)), ("r", int(b))) for a, b in zip(xs, ys))
    matching = bipartite.hopcroft_karp_matching(g, top_nodes=left)
    return n - len(matching) // 2


def width_brute(p: Poset) -> int:
    """Largest antichain by exhaustive search; only for tiny posets."""
    n = len(p)
    if n > 20:
        raise ValueError("brute-force width is limited to 20 elements")
    for size in range(n, 0, -1):
        for sub in itertools.combinations(range(n), size):
            if p.is_antichain(sub):
                return size
    return 0


def poset_stats(p: Poset, budget: Budget | None = None) -> tuple:
    """(height, width, ideal count)."""
    return height(p), width(p), count_ideals(p, budget)


def doubling_bound(w: int) -> int:
    """Antichain size obtained one level up from an antichain of size ``w``."""
    half = w // 2
    return math.comb(2 * half, half)


def lift_antichain(lower: Poset, upper: Poset, antichain) -> list:
    """Principal-ideal unions of the half-size subsets of an even antichain.

    From an antichain of size 2l in ``lower`` this gives C(2l, l) pairwise
    incomparable ideals, i.e. elements of ``upper`` (the ideal lattice of
    ``lower``).
    """
    items = list(antichain)
    if len(items) % 2:
        raise ValueError("antichain size must be even")
    out = []
    for sub in itertools.combinations(items, len(items) // 2):
        ideal = frozenset(lower.elements[i] for i in range(len(lower))
                          if any(lower.leq[i, lower.index[s]] for s in sub))
        out.append(ideal)
    return out


# ---------------------------------------------------------------- embedding

def embed(tower: PosetTower, level: int, element) -> Concept:
    """The concept of an element of ``level`` (1 or more)."""
    if level < 1 or level >= len(tower.levels):
        raise ValueError(f"level {level} not built")
    p = tower.levels[level]
    if element not in p.index:
        raise ValueError("element not in level")
    key = (level, element)
    hit = tower._embed.get(key)
    if hit is not None:
        return hit
    if level == 1:
        out = Concept(element)
    else:
        below = tower.levels[level - 1]
        idx = [below.index[x] for x in element]
        maximal = [i for i in idx if not any(j != i and below.leq[i, j] for j in idx)]
        out = reduce(conjoin(TOP, *(exists("r", embed(tower, level - 1, below.elements[i]))
                                    for i in maximal)))
    tower._embed[key] = out
    return out


def nested(k: int, n: int, role: str = "r") -> Concept:
    c = Concept(names_for(k))
    for _ in range(n):
        c = exists(role, c)
    return c


# ---------------------------------------------------------------- rank table

def table41_row(k: int, n: int, budget: Budget | None = None, tower_budget: int = 5_000):
    """(rank or "budget", width lower bound or None) for the nested concept."""
    try:
        r = rank(nested(k, n), budget or Budget())
    except BudgetExceeded:
        r = "budget"
    bound = None
    if k >= 1:
        try:
            bound = width(build_tower(k, n, Budget(tower_budget)).levels[n])
        except BudgetExceeded:
            bound = None
    return r, bound


def table41(cells, budget_steps: int | None = None) -> list:
    """Rows (k, n, rank, bound, seconds) for each (k, n) in ``cells``."""
    rows = []
    for k, n in cells:
        t0 = time.perf_counter()
        r, bound = table41_row(k, n, Budget(budget_steps))
        rows.append((k, n, r, bound, time.perf_counter() - t0))
    return rows


HEADER = ("k", "n", "rank", "width_lower_bound", "seconds")


def _notes(rows) -> list:
    notes = []
    for k, n, _, bound, _ in rows:
        if k >= 1 and n >= 2 and bound is not None:
            prev = width(build_tower(k, n - 1).levels[n - 1])
            lifted = doubling_bound(prev)
            if lifted < bound and lifted <= prev:
                notes.append(f"k={k} n={n}: width {bound} is not explained by lifting the "
                             f"width-{prev} antichain one level (that only gives {lifted})")
    return notes


def report_text(rows) -> str:
    lines = ["{:>3} {:>3} {:>10} {:>18} {:>9}".format(*HEADER)]
    for k, n, r, bound, secs in rows:
        lines.append(f"{k:>3} {n:>3} {str(r):>10} {str(bound if bound is not None else '-'):>18} {secs:>9.3f}")
    lines.extend("# " + note for note in _notes(rows))
    return "\n".join(lines) + "\n"


def report_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for k, n, r, bound, secs in rows:
        w.writerow((k, n, r, "" if bound is None else bound, f"{secs:.3f}"))
    return buf.getvalue()

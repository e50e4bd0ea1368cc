"""Interpretations, simulations, canonical models and reasoning with TBoxes.

Reasoning w.r.t. a TBox goes through a saturated canonical model.  Its domain
is fixed up front (the seed concepts plus every existential filler occurring
in them or in the TBox), and labels and edges are added by applying the
inclusions until nothing changes.  On the result, an element belongs to the
extension of a concept exactly when it is subsumed by that concept w.r.t. the
TBox.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import networkx as nx

from .errors import (BottomError, CyclicDefinitionError, EllatError,
                     NotCycleRestrictedError, ParseError, UnknownNameError)
from .order import reduce
from .syntax import BOTTOM, TOP, Concept, Signature, conjoin, parse, signature_of, sort_key, subconcepts


# ---------------------------------------------------------------- interpretations

class Interpretation:
    """A finite interpretation: a domain plus name and role extensions."""

    def __init__(self, domain: Iterable, concept_ext: dict | None = None, role_ext: dict | None = None):
        self.domain = tuple(domain)
        if not self.domain:
            raise ValueError("the domain of an interpretation must be non-empty")
        dom = set(self.domain)
        self.concept_ext = {a: frozenset(xs) for a, xs in (concept_ext or {}).items()}
        self.role_ext = {r: frozenset(tuple(p) for p in ps) for r, ps in (role_ext or {}).items()}
        for a, xs in self.concept_ext.items():
            if not xs <= dom:
                raise ValueError(f"extension of {a} leaves the domain")
        for r, ps in self.role_ext.items():
            if any(x not in dom or y not in dom for x, y in ps):
                raise ValueError(f"extension of {r} leaves the domain")
        self._succ: dict = {}
        for r, ps in self.role_ext.items():
            m: dict = {}
            for x, y in ps:
                m.setdefault(x, []).append(y)
            self._succ[r] = m

    def successors(self, role: str, x) -> list:
        return self._succ.get(role, {}).get(x, [])

    def labels(self, x) -> frozenset:
        return frozenset(a for a, xs in self.concept_ext.items() if x in xs)

    def signature(self) -> Signature:
        return Signature(tuple(self.concept_ext), tuple(self.role_ext))

    def __repr__(self) -> str:
        return f"Interpretation(domain={list(self.domain)!r})"


@dataclass(frozen=True)
class PointedInterpretation:
    interp: Interpretation
    point: object

    def __post_init__(self):
        if self.point not in set(self.interp.domain):
            raise ValueError("point is not a domain element")


def extension(c: Concept, i: Interpretation, strict: bool = True) -> frozenset:
    """Set of domain elements in the extension of ``c``.

    With ``strict`` a name or role missing from the interpretation is an error,
    otherwise it is read as empty.
    """
    memo: dict = {}

    def ev(x: Concept) -> frozenset:
        if x in memo:
            return memo[x]
        if x.is_bottom:
            out = frozenset()
        else:
            out = set(i.domain)
            for a in x.names:
                if a not in i.concept_ext:
                    if strict:
                        raise UnknownNameError(f"concept name {a} not interpreted")
                    out = set()
                else:
                    out &= i.concept_ext[a]
            for r, f in x.exists:
                if r not in i.role_ext and strict:
                    raise UnknownNameError(f"role name {r} not interpreted")
                fx = ev(f)
                out = {d for d in out if any(y in fx for y in i.successors(r, d))}
            out = frozenset(out)
        memo[x] = out
        return out

    return ev(c)


def simulates(src: PointedInterpretation, dst: PointedInterpretation, gamma: Signature | None = None) -> bool:
    """Decide whether a ``gamma``-simulation from ``src`` to ``dst`` exists."""
    i, j = src.interp, dst.interp
    if gamma is None:
        gamma = i.signature()
    names = gamma.concept_names
    roles = gamma.role_names
    jlab = {y: j.labels(y) for y in j.domain}
    rel = {}
    for x in i.domain:
        need = {a for a in names if x in i.concept_ext.get(a, ())}
        rel[x] = {y for y in j.domain if need <= jlab[y]}
    changed = True
    while changed:
        changed = False
        for x in i.domain:
            keep = set()
            for y in rel[x]:
                ok = all(any(y2 in rel[x2] for y2 in j.successors(r, y))
                         for r in roles for x2 in i.successors(r, x))
                if ok:
                    keep.add(y)
            if keep != rel[x]:
                rel[x] = keep
                changed = True
    return dst.point in rel[src.point]


def characteristic(p: PointedInterpretation, n: int) -> Concept:
    """The depth-``n`` characteristic concept of a pointed interpretation."""
    i = p.interp
    memo: dict = {}

    def go(x, k: int) -> Concept:
        key = (x, k)
        if key not in memo:
            ex = []
            if k > 0:
                for r in sorted(i.role_ext):
                    ex.extend((r, go(y, k - 1)) for y in i.successors(r, x))
            memo[key] = reduce(Concept(i.labels(x), ex))
        return memo[key]

    return go(p.point, n)


# ---------------------------------------------------------------- TBoxes

@dataclass(frozen=True)
class TBox:
    """Finite set of concept inclusions ``(premise, conclusion)``."""
    inclusions: tuple = ()

    def __post_init__(self):
        pairs = {(p, q) for p, q in self.inclusions}
        object.__setattr__(self, "inclusions",
                           tuple(sorted(pairs, key=lambda pq: (sort_key(pq[0]), sort_key(pq[1])))))

    @classmethod
    def of(cls, *items) -> "TBox":
        """Build from strings ``"C <= D"`` / ``"C == D"`` or concept pairs."""
        pairs = []
        for it in items:
            if isinstance(it, str):
                pairs.extend(parse_tbox(it).inclusions)
            else:
                pairs.append(tuple(it))
        return cls(tuple(pairs))

    def subconcepts(self) -> set:
        out: set = set()
        for p, q in self.inclusions:
            out |= subconcepts(p)
            out |= subconcepts(q)
        return out

    def signature(self) -> Signature:
        return signature_of(*(c for pq in self.inclusions for c in pq))

    def __len__(self) -> int:
        return len(self.inclusions)

    def __str__(self) -> str:
        return "\n".join(f"{p} <= {q}" for p, q in self.inclusions)


EMPTY_TBOX = TBox()


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_tbox(text: str) -> TBox:
    """Lines ``C <= D`` or ``C == D``; ``#`` starts a comment."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        for op in ("==", "<="):
            if op in line:
                lhs, rhs = line.split(op, 1)
                break
        else:
            raise ParseError(f"line {lineno}: expected '<=' or '=='")
        try:
            c, d = parse(lhs), parse(rhs)
        except ParseError as e:
            raise ParseError(f"line {lineno}: {e}") from None
        pairs.append((c, d))
        if op == "==":
            pairs.append((d, c))
    return TBox(tuple(pairs))


@dataclass(frozen=True)
class AcyclicTBox:
    """Concept definitions ``A := C`` with an acyclic dependency graph."""
    definitions: tuple = ()
    _defs: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        defs: dict = {}
        for a, c in self.definitions:
            if a in defs:
                raise ValueError(f"{a} is defined twice")
            defs[a] = c
        object.__setattr__(self, "definitions", tuple(sorted(defs.items())))
        object.__setattr__(self, "_defs", defs)
        g = nx.DiGraph()
        g.add_nodes_from(defs)
        for a, c in defs.items():
            g.add_edges_from((a, b) for b in signature_of(c).concept_names)
        if not nx.is_directed_acyclic_graph(g):
            cycle = nx.find_cycle(g)
            raise CyclicDefinitionError("cyclic definitions: " + " -> ".join(u for u, _ in cycle))

    def as_tbox(self) -> TBox:
        pairs = []
        for a, c in self.definitions:
            pairs += [(Concept((a,)), c), (c, Concept((a,)))]
        return TBox(tuple(pairs))


def parse_acyclic_tbox(text: str) -> AcyclicTBox:
    defs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        lhs, sep, rhs = line.partition(":=")
        if not sep:
            raise ParseError(f"line {lineno}: expected ':='")
        a = parse(lhs)
        if len(a.names) != 1 or a.exists:
            raise ParseError(f"line {lineno}: left-hand side must be a concept name")
        defs.append((next(iter(a.names)), parse(rhs)))
    return AcyclicTBox(tuple(defs))


def expand_acyclic(c: Concept, t: AcyclicTBox) -> Concept:
    """Replace defined names by their definitions until none is left."""
    defs = t._defs
    memo: dict = {}

    def go(x: Concept) -> Concept:
        if x in memo:
            return memo[x]
        if x.is_bottom:
            return x
        parts = [Concept((a for a in x.names if a not in defs),
                         ((r, go(f)) for r, f in x.exists))]
        parts.extend(go(defs[a]) for a in x.names if a in defs)
        memo[x] = out = conjoin(*parts)
        return out

    return go(c)


def parse_interpretation(text: str) -> Interpretation:
    """Lines ``element <id>``, ``concept <NAME>: <id> ...``, ``role <r>: <a>-><b> ...``."""
    domain: list = []
    cext: dict = {}
    rext: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        kind, _, rest = line.partition(" ")
        rest = rest.strip()
        if kind == "element":
            domain.extend(rest.split())
        elif kind in ("concept", "role"):
            key, sep, items = rest.partition(":")
            if not sep:
                raise ParseError(f"line {lineno}: expected ':'")
            key = key.strip()
            if kind == "concept":
                cext.setdefault(key, set()).update(items.split())
            else:
                pairs = rext.setdefault(key, set())
                for tok in items.split():
                    a, arrow, b = tok.partition("->")
                    if not arrow:
                        raise ParseError(f"line {lineno}: bad edge {tok!r}")
                    pairs.add((a, b))
        else:
            raise ParseError(f"line {lineno}: unknown directive {kind!r}")
    seen = dict.fromkeys(domain)
    for xs in cext.values():
        for x in xs:
            if x not in seen:
                raise ParseError(f"undeclared element {x!r}")
    for ps in rext.values():
        for a, b in ps:
            if a not in seen or b not in seen:
                raise ParseError(f"undeclared element in edge {a}->{b}")
    return Interpretation(list(seen), cext, rext)


# ---------------------------------------------------------------- saturation

class _Saturation:
    """Canonical model over a fixed domain, closed under the TBox."""

    def __init__(self, t: TBox, seeds: Iterable[Concept]):
        self.tbox = t
        sub_t = t.subconcepts()
        dom: set = set()
        for s in seeds:
            if not s.is_bottom:
                dom.add(s)
                sub_t |= subconcepts(s)
        for s in sub_t:
            for _, f in s.exists:
                dom.add(f)
        self.domain = sorted(dom, key=sort_key)
        self.labels = {x: set(x.names) for x in self.domain}
        self.edges = {x: set(x.exists) for x in self.domain}
        self.unsat: set = set()
        self._saturate()
        self._ext: dict = {}
        # edges towards the T-fillers implied by subsumption
        t_exists = sorted({p for s in t.subconcepts() if not s.is_bottom for p in s.exists},
                          key=lambda p: (p[0], sort_key(p[1])))
        for r, e in t_exists:
            members = self.ext(Concept((), ((r, e),)))
            for x in members:
                self.edges[x].add((r, e))
        self._ext = {}

    def _eval(self, c: Concept) -> set:
        if c.is_bottom:
            return set(self.unsat)
        out = set(self.domain)
        for a in c.names:
            out = {x for x in out if a in self.labels[x]}
        for r, f in c.exists:
            fx = self._eval(f)
            out = {x for x in out if any(rr == r and y in fx for rr, y in self.edges[x])}
        return out

    def _saturate(self) -> None:
        changed = True
        while changed:
            changed = False
            for p, q in self.tbox.inclusions:
                for x in self._eval(p):
                    if q.is_bottom:
                        if x not in self.unsat:
                            self.unsat.add(x)
                            changed = True
                        continue
                    if not q.names <= self.labels[x]:
                        self.labels[x] |= q.names
                        changed = True
                    if not q.exists <= self.edges[x]:
                        self.edges[x] |= q.exists
                        changed = True
            # unsatisfiability travels backwards along edges
            grew = True
            while grew:
                grew = False
                for x in self.domain:
                    if x not in self.unsat and any(y in self.unsat for _, y in self.edges[x]):
                        self.unsat.add(x)
                        grew = changed = True

    def ext(self, c: Concept) -> frozenset:
        out = self._ext.get(c)
        if out is None:
            out = self._ext[c] = frozenset(self._eval(c))
        return out

    def entails(self, x: Concept, d: Concept) -> bool:
        if x in self.unsat:
            return True
        return x in self.ext(d)

    def interpretation(self) -> Interpretation:
        names = sorted({a for x in self.domain for a in self.labels[x]})
        roles = sorted({r for x in self.domain for r, _ in self.edges[x]})
        cext = {a: [x for x in self.domain if a in self.labels[x]] for a in names}
        rext = {r: [(x, y) for x in self.domain for rr, y in self.edges[x] if rr == r] for r in roles}
        return Interpretation(self.domain, cext, rext)


@lru_cache(maxsize=4096)
def _saturation(t: TBox, seed: Concept) -> _Saturation:
    return _Saturation(t, (seed,))


def canonical_model(c: Concept, t: TBox = EMPTY_TBOX) -> tuple:
    """The canonical model of ``c`` w.r.t. ``t`` and its distinguished element ``c``."""
    if c.is_bottom:
        raise BottomError("the bottom concept has no canonical model")
    return _saturation(t, c).interpretation(), c


def tbox_entails(c: Concept, d: Concept, t: TBox = EMPTY_TBOX) -> bool:
    """True iff ``c`` is subsumed by ``d`` w.r.t. ``t``."""
    if c.is_bottom:
        return True
    sat = _saturation(t, c)
    if c in sat.unsat:
        return True
    if d.is_bottom:
        return False
    return c in sat.ext(d)


def tbox_equiv(c: Concept, d: Concept, t: TBox = EMPTY_TBOX) -> bool:
    return tbox_entails(c, d, t) and tbox_entails(d, c, t)


def is_unsatisfiable(c: Concept, t: TBox = EMPTY_TBOX) -> bool:
    return tbox_entails(c, BOTTOM, t)


@lru_cache(maxsize=256)
def is_cycle_restricted(t: TBox) -> bool:
    """True iff no concept C and non-empty role word w satisfy C below Ew.C.

    Checked on the TBox's own subconcepts (plus top) modulo equivalence: an
    edge D -> E whenever D is below Er.E for some role r, and the TBox is
    cycle-restricted iff that graph has no cycle.
    """
    nodes = [x for x in t.subconcepts() | {TOP} if not x.is_bottom]
    sat = _Saturation(t, nodes)
    nodes = sorted((x for x in nodes if x not in sat.unsat), key=sort_key)
    rep: dict = {}
    for x in nodes:
        for y in nodes:
            if y in rep and rep[y] is y and x in sat.ext(y) and y in sat.ext(x):
                rep[x] = y
                break
        else:
            rep[x] = x
    classes = sorted(set(rep.values()), key=sort_key)
    roles = t.signature().role_names
    g = nx.DiGraph()
    g.add_nodes_from(classes)
    for r in roles:
        for e in classes:
            for d in sat.ext(Concept((), ((r, e),))):
                if d in rep:
                    g.add_edge(rep[d], e)
    return nx.is_directed_acyclic_graph(g)


def _require_cycle_restricted(t: TBox) -> None:
    if not is_cycle_restricted(t):
        raise NotCycleRestrictedError("the TBox is not cycle-restricted")


def msc(c: Concept, t: TBox = EMPTY_TBOX) -> Concept:
    """Most specific consequence of ``c`` w.r.t. a cycle-restricted TBox."""
    if c.is_bottom:
        raise BottomError("most specific consequence of the bottom concept")
    _require_cycle_restricted(t)
    sat = _saturation(t, c)
    if c in sat.unsat:
        return BOTTOM
    memo: dict = {}
    active: set = set()

    def unravel(x: Concept) -> Concept:
        if x in memo:
            return memo[x]
        if x in active:
            raise NotCycleRestrictedError("canonical model is not tree-shaped")
        active.add(x)
        out = reduce(Concept(sat.labels[x], ((r, unravel(y)) for r, y in sat.edges[x])))
        active.discard(x)
        memo[x] = out
        return out

    return unravel(c)


def is_model(i: Interpretation, t: TBox) -> bool:
    return all(extension(p, i, strict=False) <= extension(q, i, strict=False) for p, q in t.inclusions)


__all__ = [
    "AcyclicTBox", "EMPTY_TBOX", "EllatError", "Interpretation", "PointedInterpretation", "TBox",
    "canonical_model", "characteristic", "expand_acyclic", "extension", "is_cycle_restricted",
    "is_model", "is_unsatisfiable", "msc", "parse_acyclic_tbox", "parse_interpretation", "parse_tbox",
    "simulates", "tbox_entails", "tbox_equiv",
]

"""Twin-plant construction and on-the-fly diagnosability checking.

The twin of a net pairs a fault-free copy (side 1) with the original
(side 2), synchronized on observable labels. A fault is diagnosable when no
infinite run of that product contains a fault, i.e. every faulty run ends
in a deadlock; non-Zeno behaviour is assumed, not checked.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import NoObservables, TruncatedGraph
from .net import EPSILON, ProductNet, TimePetriNet, make_product
from .netio import rename
from .scg import (NO_LIMITS, ClassGraph, ExploreLimits, initial_class, realize_path,
                  successors)


@dataclass(frozen=True)
class TwinSpec:
    fault_labels: frozenset
    observable_labels: frozenset

    def __post_init__(self):
        object.__setattr__(self, "fault_labels", frozenset(self.fault_labels))
        object.__setattr__(self, "observable_labels", frozenset(self.observable_labels))
        if not self.fault_labels:
            raise ValueError("at least one fault label is required")
        both = self.fault_labels & self.observable_labels
        if both:
            raise ValueError(f"fault labels must be unobservable: {sorted(both)}")


def _relabel(net: TimePetriNet, keep: frozenset, drop_labels=frozenset(), suffix=None,
             avoid=frozenset()) -> TimePetriNet:
    trans = [t for t in net.transitions if net.labels[t] not in drop_labels]
    pmap, tmap = {}, {}
    if suffix is not None:
        taken = set(avoid)

        def fresh(x):
            cand, k = f"{x}{suffix}", 2
            while cand in taken:
                cand, k = f"{x}{suffix}{k}", k + 1
            taken.add(cand)
            return cand

        pmap = {p: fresh(p) for p in net.places}
        tmap = {t: fresh(t) for t in trans}
    sub = TimePetriNet(
        net.places, trans,
        pre={t: net.pre[t] for t in trans},
        post={t: net.post[t] for t in trans},
        initial_marking=net.initial_marking,
        intervals={t: net.intervals[t] for t in trans},
        labels={t: net.labels[t] if net.labels[t] in keep else EPSILON for t in trans},
        name=net.name,
    )
    return rename(sub, pmap, tmap, name=f"{net.name}{suffix or ''}")


def build_twin(net: TimePetriNet, spec: TwinSpec) -> ProductNet:
    """``N_o x N_f``: side 1 is the fault-free copy, side 2 the original.

    Labels outside ``observable_labels | fault_labels`` become silent in
    both copies so that they never synchronize.
    """
    labels = set(net.labels.values())
    missing = (spec.fault_labels | spec.observable_labels) - labels
    if missing:
        warnings.warn(f"labels not used by {net.name}: {sorted(missing)}", stacklevel=2)
    if not any(net.labels[t] in spec.observable_labels for t in net.transitions):
        raise NoObservables(f"no transition of {net.name} carries an observable label")
    keep = spec.observable_labels | spec.fault_labels
    faulty = _relabel(net, keep)
    nominal = _relabel(net, keep, drop_labels=spec.fault_labels, suffix="_o",
                       avoid=frozenset(net.places) | frozenset(net.transitions))
    return make_product(nominal, faulty, name=f"{net.name}_twin")


class DeadClasses(NamedTuple):
    quiescent: frozenset  # nothing enabled any more
    time_dead: frozenset  # something enabled, nothing can fire

    @property
    def all(self) -> frozenset:
        return self.quiescent | self.time_dead


def dead_classes(graph: ClassGraph) -> DeadClasses:
    if graph.truncated:
        raise TruncatedGraph("dead classes of a truncated graph are unknown")
    quiet, stuck = set(), set()
    for i, c in enumerate(graph.classes):
        if not graph.out[i]:
            (stuck if c.domain.vars else quiet).add(i)
    return DeadClasses(frozenset(quiet), frozenset(stuck))


DIAGNOSABLE = "diagnosable"
NOT_DIAGNOSABLE = "not-diagnosable"
TRUNCATED = "truncated"

ZENO_NOTE = "assumes no Zeno runs and no infinitely unobservable runs (not checked)"


@dataclass
class Verdict:
    kind: str
    graph: ClassGraph
    prefix: tuple = ()
    cycle: tuple = ()
    witness_run: list = field(default_factory=list)  # earliest timed run of the prefix
    lasso_run: list = field(default_factory=list)  # prefix followed by one turn of the cycle

    @property
    def diagnosable(self) -> bool:
        return self.kind == DIAGNOSABLE

    def to_record(self) -> dict:
        def edges(path):
            return [{"edge": e, "src": self.graph.edges[e][0], "dst": self.graph.edges[e][2],
                     "label": self.graph.edges[e][1].label,
                     "transitions": list(self.graph.edges[e][1].transitions)} for e in path]

        def run(r):
            return [{"delay": str(d), "label": f.label, "transitions": list(f.transitions)} for d, f in r]

        return {
            "verdict": self.kind,
            "classes": self.graph.num_classes,
            "edges": self.graph.num_edges,
            "prefix": edges(self.prefix),
            "cycle": edges(self.cycle),
            "witness_run": run(self.witness_run),
            "lasso_run": run(self.lasso_run),
            "assumptions": ZENO_NOTE,
        }

    def report(self) -> str:
        if self.kind == DIAGNOSABLE:
            return f"Diagnosable ({ZENO_NOTE})"
        if self.kind == TRUNCATED:
            return "Truncated: exploration limit reached before a verdict"
        lines = ["Not diagnosable: a faulty run never reaches a deadlock"]

        def fmt(path):
            return " ".join(f"{self.graph.edges[e][0]}-{self.graph.edges[e][1]}->{self.graph.edges[e][2]}"
                            for e in path)

        lines.append(f"  prefix: {fmt(self.prefix)}")
        lines.append(f"  cycle:  {fmt(self.cycle)}")
        lines.append("  witness: " + " ".join(f"{d} {f}" for d, f in self.lasso_run))
        lines.append(f"  ({ZENO_NOTE})")
        return "\n".join(lines)


class _LimitHit(Exception):
    pass


def validate_lasso(graph: ClassGraph, prefix, cycle, fault_labels) -> bool:
    """Walk the edges: connected from class 0, cycle closes, fault in prefix."""
    cur = 0
    for e in prefix:
        src, _, dst = graph.edges[e]
        if src != cur:
            return False
        cur = dst
    if not cycle:
        return False
    start = cur
    for e in cycle:
        src, _, dst = graph.edges[e]
        if src != cur:
            return False
        cur = dst
    return cur == start and any(graph.edges[e][1].label in fault_labels for e in prefix)


def check_diagnosability(pnet: ProductNet, fault_labels, limits: ExploreLimits = NO_LIMITS) -> Verdict:
    """Depth-first search for a reachable cycle after a fault.

    The class graph is built on demand; the search stops at the first
    lasso. Nodes are ``(class, fault_seen)`` pairs.
    """
    fault_labels = frozenset(fault_labels)
    graph = ClassGraph()
    graph.add_class(initial_class(pnet))
    expanded = set()

    def out_edges(i):
        if i not in expanded:
            expanded.add(i)
            for firing, c2 in successors(graph.classes[i], pnet):
                j = graph.find(c2)
                if j is None:
                    if limits.max_classes is not None and graph.num_classes >= limits.max_classes:
                        raise _LimitHit
                    j, _ = graph.add_class(c2)
                graph.add_edge(i, firing, j)
        return list(graph.out[i])

    grey, black = 1, 2
    color = {}
    depth = {}
    path = []
    truncated = False
    root = (0, False)
    try:
        color[root] = grey
        depth[root] = 0
        stack = [(root, iter(out_edges(0)))]
        while stack:
            node, it = stack[-1]
            e = next(it, None)
            if e is None:
                color[node] = black
                stack.pop()
                if path:
                    path.pop()
                continue
            _, firing, dst = graph.edges[e]
            nxt = (dst, node[1] or firing.label in fault_labels)
            state = color.get(nxt)
            if state == grey:
                if nxt[1]:
                    k = depth[nxt]
                    prefix, cycle = tuple(path[:k]), tuple(path[k:]) + (e,)
                    return Verdict(NOT_DIAGNOSABLE, graph, prefix, cycle,
                                   realize_path(graph, pnet, prefix),
                                   realize_path(graph, pnet, prefix + cycle))
            elif state is None:
                if limits.max_depth is not None and len(path) >= limits.max_depth:
                    truncated = True
                    continue
                color[nxt] = grey
                path.append(e)
                depth[nxt] = len(path)
                stack.append((nxt, iter(out_edges(dst))))
    except _LimitHit:
        truncated = True
    if truncated:
        graph.truncated = True
        return Verdict(TRUNCATED, graph)
    return Verdict(DIAGNOSABLE, graph)

"""Linear state class graphs for Time Petri nets and product nets.

A class pairs a marking with a closed DBM over the firing delays of the
transitions enabled by that marking (one variable per enabled transition,
named by the transition). Firing a single transition or a synchronized
pair shifts the time origin to the firing date and re-closes the domain.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Union

from .bounds import INF
from .dbm import X0, Dbm, Inconsistent, add_constraint, close, shift_and_introduce
from .errors import InvalidPath, NotEnabled, NotFirable, NotSynchronizable
from .net import EPSILON, Marking, ProductNet, TimePetriNet, enabled, fire_marking

Model = Union[TimePetriNet, ProductNet]


def split_model(model: Model):
    """Return ``(net, product_or_None)``."""
    if isinstance(model, ProductNet):
        return model.net, model
    return model, None


@dataclass(frozen=True)
class StateClass:
    marking: Marking
    domain: Dbm

    @property
    def enabled(self) -> tuple:
        return self.domain.vars


@dataclass(frozen=True)
class Firing:
    """Edge label: one transition, or a synchronized pair (side 1, side 2)."""

    transitions: tuple
    label: Optional[str] = EPSILON

    @property
    def is_sync(self) -> bool:
        return len(self.transitions) == 2

    def __str__(self):
        name = "i" if self.label is EPSILON else self.label
        return f"{name}({'|'.join(self.transitions)})"


@dataclass(frozen=True)
class ExploreLimits:
    max_classes: Optional[int] = None
    max_depth: Optional[int] = None

    def __post_init__(self):
        for name in ("max_classes", "max_depth"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be positive")


NO_LIMITS = ExploreLimits()


@dataclass(eq=False)
class ClassGraph:
    """Deduplicated class store plus labelled edges; class 0 is initial."""

    classes: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    truncated: bool = False
    _index: dict = field(default_factory=dict, repr=False)
    out: list = field(default_factory=list, repr=False)

    def add_class(self, c: StateClass) -> tuple[int, bool]:
        idx = self._index.get(c)
        if idx is not None:
            return idx, False
        idx = len(self.classes)
        self._index[c] = idx
        self.classes.append(c)
        self.out.append([])
        return idx, True

    def find(self, c: StateClass) -> Optional[int]:
        return self._index.get(c)

    def add_edge(self, src: int, firing: Firing, dst: int) -> int:
        self.edges.append((src, firing, dst))
        self.out[src].append(len(self.edges) - 1)
        return len(self.edges) - 1

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def num_edges(self) -> int:
        return len(self.edges)


def initial_class(model: Model) -> StateClass:
    net, _ = split_model(model)
    m0 = net.initial_marking
    dom = Dbm.from_intervals((t, net.intervals[t]) for t in enabled(net, m0))
    return StateClass(m0, dom)


def _check_enabled(c: StateClass, t):
    if t not in c.domain._index:
        raise NotEnabled(f"{t!r} is not enabled in this class")


def firable_single(c: StateClass, t) -> bool:
    """Can ``t`` be the next transition to fire from ``c``?

    On a closed domain this is ``entry(k, t) >= 0`` for every other enabled
    ``k``: some solution has ``x_t`` no later than ``x_k``.
    """
    _check_enabled(c, t)
    d = c.domain
    n = d.dim
    ti = d.index(t)
    cells = d.cells
    for k in range(1, n):
        if k != ti:
            v = cells[k * n + ti]
            if v is not None and v < 0:
                return False
    return True


def _successor(net: TimePetriNet, c: StateClass, fired: tuple, constrained: Dbm) -> StateClass:
    m2, persistent, newly = fire_marking(net, c.marking, fired)
    order = enabled(net, m2)
    dom = shift_and_introduce(
        constrained, fired[0],
        [(k, k) for k in persistent],
        [(k, net.intervals[k]) for k in newly],
        order=order,
    )
    if isinstance(dom, Inconsistent):  # pragma: no cover - guarded by firability
        raise AssertionError(f"empty successor domain after firing {fired}")
    return StateClass(m2, dom)


def fire_single(c: StateClass, t, model: Model) -> StateClass:
    net, _ = split_model(model)
    if not firable_single(c, t):
        raise NotFirable(f"{t!r} cannot fire first from this class")
    d = c.domain
    for k in d.vars:
        if k != t:
            d = add_constraint(d, t, k, 0)
    d = close(d)
    return _successor(net, c, (t,), d)


def _check_pair(c: StateClass, ti, tj, pnet: ProductNet):
    _check_enabled(c, ti)
    _check_enabled(c, tj)
    net = pnet.net
    if pnet.side[ti] != 1 or pnet.side[tj] != 2:
        raise NotSynchronizable(f"{ti!r} must be on side 1 and {tj!r} on side 2")
    a = net.labels[ti]
    if a is EPSILON or a != net.labels[tj] or a not in pnet.shared_labels:
        raise NotSynchronizable(f"labels of {ti!r} and {tj!r} do not match on a shared symbol")


def _sync_domain(c: StateClass, ti, tj):
    d = c.domain
    n = d.dim
    cells = d.cells
    # necessary condition: each of ti, tj could come first on its own
    for t in (ti, tj):
        col = d.index(t)
        for k in range(1, n):
            if k != col:
                v = cells[k * n + col]
                if v is not None and v < 0:
                    return None
    d = add_constraint(add_constraint(d, ti, tj, 0), tj, ti, 0)
    for k in c.domain.vars:
        if k != ti and k != tj:
            d = add_constraint(d, ti, k, 0)
    d = close(d)
    return None if isinstance(d, Inconsistent) else d


def sync_firable(c: StateClass, ti, tj, pnet: ProductNet) -> bool:
    _check_pair(c, ti, tj, pnet)
    return _sync_domain(c, ti, tj) is not None


def fire_sync(c: StateClass, ti, tj, pnet: ProductNet) -> StateClass:
    _check_pair(c, ti, tj, pnet)
    d = _sync_domain(c, ti, tj)
    if d is None:
        raise NotFirable(f"({ti!r}, {tj!r}) cannot fire together from this class")
    return _successor(pnet.net, c, (ti, tj), d)


def successors(c: StateClass, model: Model) -> Iterator[tuple[Firing, StateClass]]:
    """All successors in deterministic order: singles (net order), then pairs."""
    net, pnet = split_model(model)
    shared = pnet.shared_labels if pnet is not None else frozenset()
    en = c.domain.vars
    for t in en:
        label = net.labels[t]
        if label in shared:
            continue
        if firable_single(c, t):
            yield Firing((t,), label), fire_single(c, t, net)
    if pnet is None or not shared:
        return
    left = [t for t in en if pnet.side[t] == 1 and net.labels[t] in shared]
    right = [t for t in en if pnet.side[t] == 2 and net.labels[t] in shared]
    for ti in left:
        for tj in right:
            if net.labels[ti] != net.labels[tj]:
                continue
            d = _sync_domain(c, ti, tj)
            if d is not None:
                yield Firing((ti, tj), net.labels[ti]), _successor(net, c, (ti, tj), d)


def explore(model: Model, limits: ExploreLimits = NO_LIMITS, threads: int = 1) -> ClassGraph:
    """Breadth-first construction of the class graph.

    Levels are expanded (optionally on ``threads`` workers) and merged in
    frontier order, so class indices do not depend on scheduling. Hitting a
    limit returns the partial graph with ``truncated`` set.
    """
    graph = ClassGraph()
    graph.add_class(initial_class(model))
    frontier = [0]
    depth = 0
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None

    def expand(i):
        return list(successors(graph.classes[i], model))

    try:
        while frontier:
            if limits.max_depth is not None and depth >= limits.max_depth:
                if any(graph.classes[i].domain.vars and next(iter(successors(graph.classes[i], model)), None)
                       for i in frontier):
                    graph.truncated = True
                break
            results = pool.map(expand, frontier) if pool else map(expand, frontier)
            nxt = []
            for i, succ in zip(frontier, results):
                for firing, c2 in succ:
                    j = graph.find(c2)
                    if j is None:
                        if limits.max_classes is not None and graph.num_classes >= limits.max_classes:
                            graph.truncated = True
                            return graph
                        j, _ = graph.add_class(c2)
                        nxt.append(j)
                    graph.add_edge(i, firing, j)
            frontier = nxt
            depth += 1
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)
    return graph


# timed runs ----------------------------------------------------------------

def path_constraints(graph: ClassGraph, model: Model, path) -> tuple[int, list]:
    """Firing-date constraints of an edge path.

    Returns ``(n, constraints)`` where date variables are ``1..n`` (absolute
    date of the k-th firing) and each constraint ``(i, j, b)`` reads
    ``d_i - d_j <= b`` with ``X0`` standing for date 0.
    """
    net, _ = split_model(model)
    path = list(path)
    cur = 0
    for e in path:
        if not 0 <= e < len(graph.edges):
            raise InvalidPath(f"no edge {e}")
        src, _, dst = graph.edges[e]
        if src != cur:
            raise InvalidPath(f"edge {e} does not leave class {cur}")
        cur = dst
    m = net.initial_marking
    since = {t: X0 for t in enabled(net, m)}
    cons = []
    prev = X0
    for step, e in enumerate(path, 1):
        fired = graph.edges[e][1].transitions
        cons.append((prev, step, 0))
        for t in fired:
            iv = net.intervals[t]
            cons.append((since[t], step, -iv.low))
        for k, origin in since.items():
            hi = net.intervals[k].high
            if hi is not INF:
                cons.append((step, origin, hi))
        m, persistent, newly = fire_marking(net, m, fired)
        since = {**{k: since[k] for k in persistent}, **{k: step for k in newly}}
        prev = step
    return len(path), cons


def realize_path(graph: ClassGraph, model: Model, path) -> list[tuple[Fraction, Firing]]:
    """Earliest concrete delays realizing ``path`` (list of edge indices).

    The difference system over firing dates has a pointwise-least solution,
    which is also the lexicographically smallest delay sequence.
    """
    n, cons = path_constraints(graph, model, path)
    if n == 0:
        return []
    d = close(Dbm.from_constraints(range(1, n + 1), cons))
    if isinstance(d, Inconsistent):
        raise InvalidPath("path has no timed realization")
    dates = d.least_solution()
    run, prev = [], Fraction(0)
    for step, e in enumerate(path, 1):
        run.append((dates[step] - prev, graph.edges[e][1]))
        prev = dates[step]
    return run


@dataclass(frozen=True)
class ConcreteState:
    marking: Marking
    windows: dict  # enabled transition -> (earliest, latest) remaining delay


def concrete_initial(model: Model) -> ConcreteState:
    net, _ = split_model(model)
    m0 = net.initial_marking
    return ConcreteState(m0, {t: (net.intervals[t].low, net.intervals[t].high)
                              for t in enabled(net, m0)})


def replay(model: Model, run) -> ConcreteState:
    """Execute ``[(delay, Firing), ...]`` on the concrete state semantics.

    Raises :class:`InvalidPath` at the first illegal delay or firing.
    """
    net, pnet = split_model(model)
    state = concrete_initial(model)
    for pos, (delay, firing) in enumerate(run):
        delay = Fraction(delay)
        if delay < 0:
            raise InvalidPath(f"step {pos}: negative delay")
        for k, (lo, hi) in state.windows.items():
            if delay > hi:
                raise InvalidPath(f"step {pos}: waiting {delay} overshoots {k!r}")
        windows = {k: (max(Fraction(0), lo - delay), hi - delay if hi is not INF else INF)
                   for k, (lo, hi) in state.windows.items()}
        fired = tuple(firing.transitions)
        for t in fired:
            if t not in windows:
                raise InvalidPath(f"step {pos}: {t!r} not enabled")
            if windows[t][0] != 0:
                raise InvalidPath(f"step {pos}: {t!r} fired too early")
        if pnet is not None:
            labels = [net.labels[t] for t in fired]
            if len(fired) == 1 and labels[0] in pnet.shared_labels:
                raise InvalidPath(f"step {pos}: {fired[0]!r} must synchronize")
            if len(fired) == 2 and not (
                    pnet.side[fired[0]] == 1 and pnet.side[fired[1]] == 2
                    and labels[0] == labels[1] and labels[0] in pnet.shared_labels):
                raise InvalidPath(f"step {pos}: {fired} is not a valid synchronization")
        elif len(fired) != 1:
            raise InvalidPath(f"step {pos}: plain nets fire one transition at a time")
        m2, persistent, newly = fire_marking(net, state.marking, fired)
        new_windows = {k: windows[k] for k in persistent}
        for k in newly:
            new_windows[k] = (net.intervals[k].low, net.intervals[k].high)
        state = ConcreteState(m2, {k: new_windows[k] for k in enabled(net, m2)})
    return state

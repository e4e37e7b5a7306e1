"""Helpers for checking the fast path against the Fourier-Motzkin oracle.

Also holds the random net generators used by the property tests.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import oracle
from .bounds import INF, TimeInterval
from .dbm import X0, Dbm
from .net import ProductNet, TimePetriNet, enabled, fire_marking, make_product
from .scg import (ExploreLimits, explore, fire_single, fire_sync, firable_single,
                  split_model, sync_firable)


def dbm_to_system(d: Dbm) -> oracle.IneqSystem:
    def name(v):
        return oracle.ZERO if v is X0 else v

    diffs = [(name(i), name(j), b) for i, j, b in d.items()]
    # firing delays are non-negative even when the matrix omits it
    diffs += [(oracle.ZERO, v, 0) for v in d.vars]
    return oracle.IneqSystem.from_differences(d.vars, diffs)


def random_difference_system(rng: random.Random, max_vars=5, lo=-5, hi=5, max_constraints=8):
    """``(vars, [(i, j, b), ...])`` with integer bounds in ``[lo, hi]``.

    ``X0`` may appear on either side, so plain variable bounds show up too.
    """
    vars_ = [f"x{i}" for i in range(1, rng.randint(1, max_vars) + 1)]
    names = [X0] + vars_
    cons = []
    for _ in range(rng.randint(0, max_constraints)):
        i, j = rng.sample(names, 2)
        cons.append((i, j, Fraction(rng.randint(lo, hi))))
    return vars_, cons


def system_of(vars_, constraints) -> oracle.IneqSystem:
    """The oracle's view of :meth:`Dbm.from_constraints` input (delays are >= 0)."""
    def name(v):
        return oracle.ZERO if v is X0 else v

    diffs = [(name(i), name(j), b) for i, j, b in constraints]
    diffs += [(oracle.ZERO, v, 0) for v in vars_]
    return oracle.IneqSystem.from_differences(vars_, diffs)


def dbm_bounds(d: Dbm) -> dict:
    """DBM entries keyed like :func:`oracle.tightest_bounds`."""
    names = (X0,) + d.vars
    out = {}
    for i in names:
        for j in names:
            if i is j:
                continue
            b = d.entry(i, j)
            key = (oracle.ZERO if i is X0 else i, oracle.ZERO if j is X0 else j)
            out[key] = None if b is INF else b
    return out


def random_net(rng: random.Random, prefix="", max_places=4, max_transitions=4,
               labels=(None,), max_endpoint=5, p_inf=0.25, name=None) -> TimePetriNet:
    """Small random net with integer interval endpoints in ``[0, max_endpoint]``."""
    np_ = rng.randint(1, max_places)
    nt = rng.randint(1, max_transitions)
    places = [f"{prefix}p{i}" for i in range(np_)]
    trans = [f"{prefix}t{i}" for i in range(nt)]
    pre, post, intervals, labs = {}, {}, {}, {}
    for t in trans:
        pre[t] = {p: rng.choice((1, 1, 1, 2)) for p in rng.sample(places, rng.randint(1, min(2, np_)))}
        post[t] = {p: 1 for p in rng.sample(places, rng.randint(0, min(2, np_)))}
        lo = rng.randint(0, max_endpoint)
        hi = INF if rng.random() < p_inf else rng.randint(lo, max_endpoint)
        intervals[t] = TimeInterval(Fraction(lo), hi)
        labs[t] = rng.choice(labels)
    m0 = {p: rng.choice((0, 1, 1, 2)) for p in places}
    return TimePetriNet(places, trans, pre, post, m0, intervals, labs, name=name or f"{prefix}rand")


def random_conservative_net(rng: random.Random, prefix="", labels=(None,), max_places=4,
                            max_transitions=4, max_endpoint=5, p_inf=0.25) -> TimePetriNet:
    """Random net where every transition moves one token: always bounded."""
    np_ = rng.randint(1, max_places)
    nt = rng.randint(1, max_transitions)
    places = [f"{prefix}p{i}" for i in range(np_)]
    trans = [f"{prefix}t{i}" for i in range(nt)]
    pre = {t: {rng.choice(places): 1} for t in trans}
    post = {t: {rng.choice(places): 1} for t in trans}
    intervals = {}
    for t in trans:
        lo = rng.randint(0, max_endpoint)
        hi = INF if rng.random() < p_inf else rng.randint(lo, max_endpoint)
        intervals[t] = TimeInterval(Fraction(lo), hi)
    labs = {t: rng.choice(labels) for t in trans}
    m0 = {p: rng.choice((0, 1, 1)) for p in places}
    m0[places[0]] = 1
    return TimePetriNet(places, trans, pre, post, m0, intervals, labs, name=f"{prefix}cons")


def random_product(rng: random.Random, labels=("a", "b", None), **kw) -> ProductNet:
    return make_product(random_net(rng, "l", labels=labels, **kw),
                        random_net(rng, "r", labels=labels, **kw))


def candidate_firings(c, model):
    """Every single transition and every matching cross-side pair."""
    net, pnet = split_model(model)
    en = c.domain.vars
    out = [(t,) for t in en]
    if pnet is not None:
        for ti in en:
            for tj in en:
                if (pnet.side[ti] == 1 and pnet.side[tj] == 2
                        and net.labels[ti] is not None and net.labels[ti] == net.labels[tj]
                        and net.labels[ti] in pnet.shared_labels):
                    out.append((ti, tj))
    return out


def check_against_oracle(model, max_depth=6, max_classes=40):
    """Compare every firability verdict and successor domain with the oracle.

    Returns ``(checked_firings, mismatches)`` where each mismatch is a
    human-readable string.
    """
    net, pnet = split_model(model)
    graph = explore(model, ExploreLimits(max_classes=max_classes, max_depth=max_depth))
    checked, bad = 0, []
    for c in graph.classes:
        sys_ = dbm_to_system(c.domain)
        for fired in candidate_firings(c, model):
            checked += 1
            if len(fired) == 1:
                fast = firable_single(c, fired[0])
            else:
                fast = sync_firable(c, fired[0], fired[1], pnet)
            slow = oracle.oracle_firable(sys_, fired)
            if fast != slow:
                bad.append(f"{net.name} {c.marking!r} {fired}: fast={fast} oracle={slow}")
                continue
            if not fast:
                continue
            if len(fired) == 1:
                succ = fire_single(c, fired[0], model)
            else:
                succ = fire_sync(c, fired[0], fired[1], pnet)
            m2, osys = oracle.oracle_successor(sys_, fired, net, dict(c.marking))
            if succ.marking != m2:
                bad.append(f"{net.name} {fired}: marking {succ.marking!r} != {m2}")
                continue
            if tuple(osys.vars) != succ.domain.vars:
                bad.append(f"{net.name} {fired}: vars {succ.domain.vars} != {osys.vars}")
                continue
            want = oracle.tightest_bounds(osys)
            got = dbm_bounds(succ.domain)
            if want != got:
                diff = {k: (got[k], want[k]) for k in want if got[k] != want[k]}
                bad.append(f"{net.name} {c.marking!r} {fired}: entries differ {diff}")
    return checked, bad


def integer_time_markings(model, max_states=20000):
    """Reachable markings under integer-delay semantics, or ``None`` past ``max_states``.

    With closed intervals and integer endpoints, integer delays reach every
    reachable marking, so this gives a class-free cross-check. Clocks are
    capped once they can no longer matter.
    """
    net, pnet = split_model(model)
    shared = pnet.shared_labels if pnet is not None else frozenset()

    def cap(t):
        iv = net.intervals[t]
        return int(iv.low) if iv.high is INF else int(iv.high)

    def state_of(m, clocks):
        return m, tuple(sorted((t, min(c, cap(t))) for t, c in clocks.items()))

    def ready(clocks, t):
        return clocks[t] >= net.intervals[t].low

    start = state_of(net.initial_marking, {t: 0 for t in enabled(net, net.initial_marking)})
    seen = {start}
    todo = [start]
    while todo:
        m, cl = todo.pop()
        clocks = dict(cl)
        moves = []
        for t in clocks:
            if net.labels[t] not in shared and ready(clocks, t):
                moves.append((t,))
        if pnet is not None:
            for ti in clocks:
                for tj in clocks:
                    if (pnet.side[ti] == 1 and pnet.side[tj] == 2 and net.labels[ti] in shared
                            and net.labels[ti] == net.labels[tj] and ready(clocks, ti) and ready(clocks, tj)):
                        moves.append((ti, tj))
        succ = []
        for fired in moves:
            m2, persistent, newly = fire_marking(net, m, fired)
            succ.append(state_of(m2, {**{k: clocks[k] for k in persistent}, **{k: 0 for k in newly}}))
        if all(net.intervals[t].high is INF or clocks[t] + 1 <= net.intervals[t].high for t in clocks):
            succ.append(state_of(m, {t: c + 1 for t, c in clocks.items()}))
        for s in succ:
            if s not in seen:
                if len(seen) >= max_states:
                    return None
                seen.add(s)
                todo.append(s)
    return {m for m, _ in seen}

"""Time Petri nets, markings, firing bookkeeping and two-component products."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Optional

from .bounds import ANY_TIME, TimeInterval
from .errors import IdentifierCollision, NotEnabled

EPSILON = None  # label of silent transitions


class Marking(Mapping):
    """Immutable sparse marking; absent places hold zero tokens.

    Only positive counts are stored, so two markings are equal exactly when
    their stored items are.
    """

    __slots__ = ("_tokens", "_hash")

    def __init__(self, tokens=()):
        items = tokens.items() if isinstance(tokens, Mapping) else tokens
        stored = {}
        for place, count in items:
            if not isinstance(count, int) or count < 0:
                raise ValueError(f"bad token count {count!r} for place {place!r}")
            if count:
                stored[place] = count
        self._tokens = stored
        self._hash = None

    def __getitem__(self, place):
        return self._tokens.get(place, 0)

    def __contains__(self, place):
        return place in self._tokens

    def __iter__(self):
        return iter(self._tokens)

    def __len__(self):
        return len(self._tokens)

    def __eq__(self, other):
        if isinstance(other, Marking):
            return self._tokens == other._tokens
        if isinstance(other, Mapping):
            return self._tokens == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._tokens.items()))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{p}:{n}" for p, n in sorted(self._tokens.items(), key=lambda kv: str(kv[0])))
        return "Marking({" + body + "})"

    def covers(self, arcs: Iterable[tuple[str, int]]) -> bool:
        tokens = self._tokens
        return all(tokens.get(p, 0) >= w for p, w in arcs)

    def shifted(self, minus=(), plus=()) -> "Marking":
        """Return ``self - minus + plus``; ``minus`` and ``plus`` are arc lists."""
        tokens = dict(self._tokens)
        for p, w in minus:
            left = tokens.get(p, 0) - w
            if left < 0:
                raise ValueError(f"place {p!r} would go negative")
            tokens[p] = left
        for p, w in plus:
            tokens[p] = tokens.get(p, 0) + w
        return Marking(tokens)

    def restrict(self, places) -> "Marking":
        places = set(places)
        return Marking({p: n for p, n in self._tokens.items() if p in places})


def _arcs(mapping) -> dict:
    out = {}
    for p, w in (mapping or {}).items():
        if not isinstance(w, int) or w < 0:
            raise ValueError(f"bad arc weight {w!r} on place {p!r}")
        if w:
            out[p] = w
    return out


class TimePetriNet:
    """A labelled Time Petri net.

    ``pre`` and ``post`` map each transition to a ``{place: weight}`` dict,
    ``intervals`` gives static firing intervals (default ``[0,w[``) and
    ``labels`` the observable symbol or ``None`` for silent transitions.
    Place and transition lists fix the iteration order used everywhere.
    """

    def __init__(self, places, transitions, pre=None, post=None,
                 initial_marking=None, intervals=None, labels=None, name="net"):
        self.name = name
        self.places = tuple(places)
        self.transitions = tuple(transitions)
        if len(set(self.places)) != len(self.places):
            raise ValueError("duplicate place identifiers")
        if len(set(self.transitions)) != len(self.transitions):
            raise ValueError("duplicate transition identifiers")
        pre = pre or {}
        post = post or {}
        intervals = intervals or {}
        labels = labels or {}
        known = set(self.places)
        trans = set(self.transitions)
        for table in (pre, post, intervals, labels):
            extra = set(table) - trans
            if extra:
                raise ValueError(f"unknown transitions {sorted(extra)}")
        self.pre = MappingProxyType({t: _arcs(pre.get(t)) for t in self.transitions})
        self.post = MappingProxyType({t: _arcs(post.get(t)) for t in self.transitions})
        for t in self.transitions:
            for p in (*self.pre[t], *self.post[t]):
                if p not in known:
                    raise ValueError(f"transition {t!r} uses undeclared place {p!r}")
        self.intervals = MappingProxyType(
            {t: intervals.get(t, ANY_TIME) for t in self.transitions})
        for t, iv in self.intervals.items():
            if not isinstance(iv, TimeInterval):
                raise TypeError(f"interval of {t!r} is not a TimeInterval")
        self.labels = MappingProxyType({t: labels.get(t, EPSILON) for t in self.transitions})
        m0 = Marking(initial_marking or {})
        if set(m0) - known:
            raise ValueError(f"initial marking uses undeclared places {sorted(set(m0) - known)}")
        self.initial_marking = m0
        self._pre_arcs = {t: tuple(self.pre[t].items()) for t in self.transitions}
        self._post_arcs = {t: tuple(self.post[t].items()) for t in self.transitions}
        self._order = {t: i for i, t in enumerate(self.transitions)}

    def __repr__(self):
        return (f"TimePetriNet({self.name!r}, {len(self.places)} places, "
                f"{len(self.transitions)} transitions)")

    def __eq__(self, other):
        if not isinstance(other, TimePetriNet):
            return NotImplemented
        return (self.places == other.places and self.transitions == other.transitions
                and dict(self.pre) == dict(other.pre) and dict(self.post) == dict(other.post)
                and self.initial_marking == other.initial_marking
                and dict(self.intervals) == dict(other.intervals)
                and dict(self.labels) == dict(other.labels))

    __hash__ = object.__hash__

    @property
    def alphabet(self) -> frozenset:
        return frozenset(l for l in self.labels.values() if l is not EPSILON)

    def order(self, t) -> int:
        return self._order[t]


def enabled(net: TimePetriNet, m: Marking) -> tuple:
    """Transitions enabled at ``m``, in net order."""
    return tuple(t for t in net.transitions if m.covers(net._pre_arcs[t]))


def fire_marking(net: TimePetriNet, m: Marking, fired):
    """Fire the transitions in ``fired`` simultaneously from ``m``.

    Returns ``(m', persistent, newly_enabled)``. Persistence is judged on the
    intermediate marking where every fired transition has consumed its
    input tokens; fired transitions are never persistent.
    """
    fired = tuple(fired)
    consumed = [arc for t in fired for arc in net._pre_arcs[t]]
    produced = [arc for t in fired for arc in net._post_arcs[t]]
    for t in fired:
        if not m.covers(net._pre_arcs[t]):
            raise NotEnabled(f"{t!r} not enabled at {m!r}")
    try:
        middle = m.shifted(minus=consumed)
    except ValueError:
        raise NotEnabled(f"{fired} compete for the same tokens at {m!r}") from None
    after = middle.shifted(plus=produced)
    persistent, newly = [], []
    for k in enabled(net, after):
        if k not in fired and middle.covers(net._pre_arcs[k]):
            persistent.append(k)
        else:
            newly.append(k)
    return after, tuple(persistent), tuple(newly)


def discrete_successor(net: TimePetriNet, m: Marking, t):
    """``(m - Pre(t) + Post(t), persistent, newly_enabled)``."""
    return fire_marking(net, m, (t,))


@dataclass(frozen=True, eq=False)
class ProductNet:
    """A net split into two non-interconnected sides (1 and 2)."""

    net: TimePetriNet
    side: Mapping
    shared_labels: frozenset = field(init=False)

    def __post_init__(self):
        net = self.net
        side = dict(self.side)
        for x in (*net.places, *net.transitions):
            if side.get(x) not in (1, 2):
                raise ValueError(f"{x!r} has no side")
        for t in net.transitions:
            for p in (*net.pre[t], *net.post[t]):
                if side[p] != side[t]:
                    raise ValueError(f"transition {t!r} crosses sides through {p!r}")
        object.__setattr__(self, "side", MappingProxyType(side))
        alph = [frozenset(net.labels[t] for t in net.transitions if side[t] == i) for i in (1, 2)]
        object.__setattr__(self, "shared_labels", (alph[0] & alph[1]) - {EPSILON})

    def transitions_of(self, i: int) -> tuple:
        return tuple(t for t in self.net.transitions if self.side[t] == i)

    def places_of(self, i: int) -> tuple:
        return tuple(p for p in self.net.places if self.side[p] == i)

    def project(self, i: int) -> TimePetriNet:
        """Component ``i`` as a standalone net (identifiers preserved)."""
        net = self.net
        ts = self.transitions_of(i)
        ps = self.places_of(i)
        return TimePetriNet(
            ps, ts,
            pre={t: net.pre[t] for t in ts},
            post={t: net.post[t] for t in ts},
            initial_marking=net.initial_marking.restrict(ps),
            intervals={t: net.intervals[t] for t in ts},
            labels={t: net.labels[t] for t in ts},
            name=f"{net.name}.{i}",
        )


def make_product(n1: TimePetriNet, n2: TimePetriNet, name: Optional[str] = None) -> ProductNet:
    """Juxtapose two disjoint nets, keeping labels; n1 is side 1, n2 side 2."""
    clashes = (set(n1.places) & set(n2.places)) | (set(n1.transitions) & set(n2.transitions))
    if clashes:
        raise IdentifierCollision(map(str, clashes))
    net = TimePetriNet(
        n1.places + n2.places,
        n1.transitions + n2.transitions,
        pre={**n1.pre, **n2.pre},
        post={**n1.post, **n2.post},
        initial_marking={**n1.initial_marking, **n2.initial_marking},
        intervals={**n1.intervals, **n2.intervals},
        labels={**n1.labels, **n2.labels},
        name=name or f"{n1.name}*{n2.name}",
    )
    side = {x: 1 for x in (*n1.places, *n1.transitions)}
    side.update({x: 2 for x in (*n2.places, *n2.transitions)})
    return ProductNet(net, side)

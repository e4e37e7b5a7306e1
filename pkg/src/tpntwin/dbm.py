"""Difference Bound Matrices over exact rationals.

A :class:`Dbm` over variables ``x1..xn`` stores, for every ordered pair, the
tightest known upper bound on ``xi - xj``. Index 0 is the reference ``x0``
which is always 0, so ``entry(x, X0)`` bounds ``x`` from above and
``entry(X0, x)`` bounds ``-x``.

Entries are kept as Python ints sharing one positive denominator
(``scale``); ``None`` encodes +infinity. The closure itself is delegated to
:mod:`tpntwin.kernel`. All variables denote firing delays, hence the
``entry(X0, x) <= 0`` clamp applied when a DBM is built.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from . import kernel
from .bounds import INF, Bound, TimeInterval, as_bound
from .errors import NotCanonical, UnknownVariable


class _Reference:
    __slots__ = ()

    def __repr__(self):
        return "X0"

    def __str__(self):
        return "0"

    def __reduce__(self):
        return "X0"


X0 = _Reference()


def _lcm(a, b):
    return a * b // gcd(a, b)


def _normalize(cells, scale):
    g = scale
    for v in cells:
        if v is not None and v:
            g = gcd(g, v)
            if g == 1:
                return cells, scale
    if g == 1:
        return cells, scale
    return [None if v is None else v // g for v in cells], scale // g


def _rescale(cells, factor):
    if factor == 1:
        return list(cells)
    return [None if v is None else v * factor for v in cells]


class Dbm:
    """Immutable difference bound matrix. Build with the class methods."""

    __slots__ = ("vars", "_index", "cells", "scale", "canonical", "_hash")

    def __init__(self, vars: Sequence, cells: Sequence, scale: int = 1, canonical: bool = False):
        self.vars = tuple(vars)
        n = len(self.vars) + 1
        if len(cells) != n * n:
            raise ValueError("cell count does not match variables")
        if len(set(self.vars)) != len(self.vars) or X0 in self.vars:
            raise ValueError("variables must be distinct and differ from X0")
        self._index = {v: i + 1 for i, v in enumerate(self.vars)}
        self._index[X0] = 0
        self.cells = tuple(cells)
        self.scale = scale
        self.canonical = canonical
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def top(cls, vars: Sequence) -> "Dbm":
        """All variables non-negative, otherwise unconstrained (canonical)."""
        n = len(vars) + 1
        cells = [None] * (n * n)
        for i in range(n):
            cells[i * n + i] = 0
            cells[i] = 0  # entry(X0, xi) <= 0
        return cls(vars, cells, 1, True)

    @classmethod
    def from_intervals(cls, items: Iterable[tuple[object, TimeInterval]]) -> "Dbm":
        """Box ``low <= x <= high`` per variable, closed."""
        items = list(items)
        d = cls.top([v for v, _ in items])
        for v, iv in items:
            d = d.add_constraint(X0, v, -iv.low).add_constraint(v, X0, iv.high)
        return close(d)

    @classmethod
    def from_constraints(cls, vars: Sequence, constraints: Iterable[tuple]) -> "Dbm":
        """Start from :meth:`top` and add ``(i, j, b)`` meaning ``xi - xj <= b``.

        The result is not closed.
        """
        d = cls.top(vars)
        for i, j, b in constraints:
            d = d.add_constraint(i, j, b)
        return d

    # access -------------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.vars) + 1

    def index(self, v) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise UnknownVariable(v) from None

    def raw(self, i: int, j: int):
        return self.cells[i * self.dim + j]

    def entry(self, i, j) -> Bound:
        """Upper bound on ``xi - xj`` (``X0`` names the reference)."""
        v = self.cells[self.index(i) * self.dim + self.index(j)]
        return INF if v is None else Fraction(v, self.scale)

    def bounds(self, v) -> tuple:
        """``(low, high)`` of a single variable."""
        return -self.entry(X0, v), self.entry(v, X0)

    def items(self):
        """Yield ``(vi, vj, bound)`` for every finite off-diagonal entry."""
        names = (X0,) + self.vars
        n = self.dim
        for i in range(n):
            for j in range(n):
                if i != j:
                    v = self.cells[i * n + j]
                    if v is not None:
                        yield names[i], names[j], Fraction(v, self.scale)

    def __eq__(self, other):
        if not isinstance(other, Dbm):
            return NotImplemented
        return (self.vars == other.vars and self.scale == other.scale
                and self.cells == other.cells)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, self.scale, self.cells))
        return self._hash

    def __repr__(self):
        return f"Dbm(vars={list(self.vars)!r}, canonical={self.canonical})"

    def dump(self) -> str:
        return dump(self)

    # updates ------------------------------------------------------------

    def _scaled(self, b):
        """Express ``b`` on this matrix's denominator, rescaling if needed."""
        f = b.denominator
        if self.scale % f == 0:
            return self.cells, self.scale, b.numerator * (self.scale // f)
        new_scale = _lcm(self.scale, f)
        cells = _rescale(self.cells, new_scale // self.scale)
        return cells, new_scale, b.numerator * (new_scale // f)

    def add_constraint(self, i, j, b) -> "Dbm":
        return add_constraint(self, i, j, b)

    def reorder(self, order: Sequence) -> "Dbm":
        """Same matrix with variables permuted into ``order``."""
        order = tuple(order)
        if set(order) != set(self.vars) or len(order) != len(self.vars):
            raise ValueError("order must be a permutation of the variables")
        if order == self.vars:
            return self
        idx = [0] + [self.index(v) for v in order]
        n = self.dim
        cells = [self.cells[a * n + b] for a in idx for b in idx]
        return Dbm(order, cells, self.scale, self.canonical)

    def least_solution(self) -> dict:
        """Pointwise-minimal solution of a canonical consistent DBM.

        Difference systems are closed under pointwise minimum, so every
        variable sits at its tightest lower bound simultaneously.
        """
        if not self.canonical:
            raise NotCanonical("least_solution needs a closed DBM")
        return {v: -self.entry(X0, v) for v in self.vars}


class Inconsistent:
    """Result of closing an empty system.

    ``witness`` is a cycle ``[v0, ..., vk]`` of variables whose bounds
    ``entry(v0, v1) + ... + entry(vk, v0)`` add up to a negative number in
    the matrix that was being closed.
    """

    __slots__ = ("source", "_witness")

    def __init__(self, source: Dbm):
        self.source = source
        self._witness = None

    def __bool__(self):
        return False

    def __repr__(self):
        return f"Inconsistent(witness={self.witness!r})"

    @property
    def witness(self) -> list:
        if self._witness is None:
            self._witness = _negative_cycle(self.source)
        return self._witness


def _negative_cycle(d: Dbm) -> list:
    # Bellman-Ford where step u -> v costs entry(u, v).
    n = d.dim
    cells = d.cells
    dist = [0] * n
    pred = [None] * n
    last = None
    for _ in range(n + 1):
        last = None
        for u in range(n):
            du = dist[u]
            for v in range(n):
                w = cells[u * n + v]
                if w is None or u == v and w >= 0:
                    continue
                if du + w < dist[v]:
                    dist[v] = du + w
                    pred[v] = u
                    last = v
        if last is None:
            return []
    v = last
    for _ in range(n):
        v = pred[v]
    cycle = [v]
    u = pred[v]
    while u != v:
        cycle.append(u)
        u = pred[u]
    cycle.reverse()
    names = (X0,) + d.vars
    return [names[i] for i in cycle]


def close(d: Dbm):
    """Tightest equivalent DBM, or :class:`Inconsistent` if the system is empty."""
    if d.canonical:
        return d
    cells, ok = kernel.close_flat(list(d.cells), d.dim)
    if not ok:
        return Inconsistent(d)
    cells, scale = _normalize(cells, d.scale)
    return Dbm(d.vars, cells, scale, True)


def add_constraint(d: Dbm, i, j, b) -> Dbm:
    """Intersect with ``xi - xj <= b``; the result is flagged non-canonical."""
    ii, jj = d.index(i), d.index(j)
    b = as_bound(b)
    if b is INF:
        return d
    cells, scale, v = d._scaled(b)
    k = ii * d.dim + jj
    old = cells[k]
    if old is not None and old <= v:
        if cells is d.cells:
            return d
        return Dbm(d.vars, cells, scale, d.canonical)
    cells = list(cells)
    cells[k] = v
    return Dbm(d.vars, cells, scale, False)


def project_out(d: Dbm, kill) -> Dbm:
    """Eliminate the variables in ``kill`` from a canonical DBM.

    On a closed matrix every implied bound is already explicit, so dropping
    rows and columns is an exact projection.
    """
    if not d.canonical:
        raise NotCanonical("project_out needs a closed DBM")
    kill = set(kill)
    for v in kill:
        d.index(v)
    if not kill:
        return d
    keep = [v for v in d.vars if v not in kill]
    idx = [0] + [d.index(v) for v in keep]
    n = d.dim
    cells = [d.cells[a * n + b] for a in idx for b in idx]
    cells, scale = _normalize(cells, d.scale)
    return Dbm(keep, cells, scale, True)


def shift_and_introduce(d: Dbm, pivot, persistent: Sequence[tuple], fresh: Sequence[tuple],
                        order: Sequence | None = None):
    """Move the time origin to the firing date ``pivot``.

    ``persistent`` lists ``(old, new)`` pairs with ``new = old - pivot``;
    ``fresh`` lists ``(new, interval)`` for newly enabled transitions, which
    get their static interval and no relation to anything else. Every old
    variable disappears. ``d`` must be closed and already constrain
    ``pivot`` to be minimal. Returns the closed successor (variables in
    ``order`` when given), or :class:`Inconsistent`.
    """
    if not d.canonical:
        raise NotCanonical("shift_and_introduce needs a closed DBM")
    p = d.index(pivot)
    n = d.dim
    src = d.cells
    scale = d.scale
    for _, iv in fresh:
        for b in (iv.low, iv.high):
            if b is not INF:
                scale = _lcm(scale, b.denominator)
    factor = scale // d.scale

    def sc(v):
        return None if v is None else v * factor

    new_vars = [nv for _, nv in persistent] + [nv for nv, _ in fresh]
    if order is not None:
        order = list(order)
        if set(order) != set(new_vars) or len(order) != len(new_vars):
            raise ValueError("order must list exactly the new variables")
        new_vars = order
    origin = {nv: ("p", d.index(ov)) for ov, nv in persistent}
    origin.update({nv: ("f", iv) for nv, iv in fresh})
    m = len(new_vars) + 1
    cells = [None] * (m * m)
    for a in range(m):
        cells[a * m + a] = 0
    for a, va in enumerate(new_vars, 1):
        kind, what = origin[va]
        if kind == "p":
            cells[a * m] = sc(src[what * n + p])
            low = src[p * n + what]
            cells[a] = 0 if low is None or low > 0 else sc(low)
            for b, vb in enumerate(new_vars, 1):
                kb, wb = origin[vb]
                if kb == "p" and b != a:
                    cells[a * m + b] = sc(src[what * n + wb])
        else:
            cells[a * m] = None if what.high is INF else what.high.numerator * (scale // what.high.denominator)
            cells[a] = -what.low.numerator * (scale // what.low.denominator)
    return close(Dbm(new_vars, cells, scale, False))


def dbm_equal(d1: Dbm, d2: Dbm) -> bool:
    if not (d1.canonical and d2.canonical):
        raise NotCanonical("dbm_equal compares closed DBMs only")
    return d1 == d2


def dump(d: Dbm) -> str:
    """One ``xi - xj <= p/q`` line per finite off-diagonal entry."""
    return "\n".join(f"{i} - {j} <= {b}" for i, j, b in d.items())

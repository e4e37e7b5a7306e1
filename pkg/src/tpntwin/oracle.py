"""Brute-force reference for class domains, by Fourier-Motzkin elimination.

Domains are plain lists of linear inequalities ``sum(c_v * x_v) <= b`` with
:class:`fractions.Fraction` coefficients; ``None`` plays +infinity. Nothing
here touches :mod:`tpntwin.dbm`, so a bug there cannot hide behind a
shared helper. Speed is not a goal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .bounds import INF
from .errors import InconsistentSystem

ZERO = "<zero>"  # stands for the constant 0 in (i, j) difference keys


def _key(v):
    return repr(v)


def _frac(x):
    return x if type(x) is Fraction else Fraction(x)


@dataclass(frozen=True)
class Ineq:
    """``sum(coef * var) <= bound`` with non-zero coefficients."""

    coeffs: tuple  # ((var, Fraction), ...) sorted by repr(var)
    bound: Fraction

    @staticmethod
    def make(coeffs: dict, bound) -> Optional["Ineq"]:
        """Normalized inequality; ``None`` when trivially true.

        A trivially false inequality comes back with empty ``coeffs``.
        """
        items = sorted(((v, _frac(c)) for v, c in coeffs.items() if c), key=lambda vc: _key(vc[0]))
        bound = _frac(bound)
        if not items:
            return None if bound >= 0 else Ineq((), Fraction(-1))
        scale = abs(items[0][1])
        if scale == 1:
            return Ineq(tuple(items), bound)
        return Ineq(tuple((v, c / scale) for v, c in items), bound / scale)

    def coef(self, v) -> Fraction:
        for w, c in self.coeffs:
            if w == v:
                return c
        return Fraction(0)

    @property
    def is_false(self) -> bool:
        return not self.coeffs


@dataclass(frozen=True)
class IneqSystem:
    vars: tuple
    constraints: tuple

    @property
    def infeasible(self) -> bool:
        return any(c.is_false for c in self.constraints)

    @classmethod
    def build(cls, vars, ineqs: Iterable[Optional[Ineq]]) -> "IneqSystem":
        best = {}
        for q in ineqs:
            if q is None:
                continue
            if q.is_false:
                return cls(tuple(vars), (q,))
            old = best.get(q.coeffs)
            if old is None or q.bound < old:
                best[q.coeffs] = q.bound
        return cls(tuple(vars), tuple(Ineq(k, b) for k, b in best.items()))

    @classmethod
    def from_differences(cls, vars, diffs) -> "IneqSystem":
        """``diffs`` holds ``(i, j, b)`` for ``x_i - x_j <= b``; ``ZERO`` is 0.

        An infinite bound (``None``) adds nothing.
        """
        vars = tuple(vars)
        qs = []
        for i, j, b in diffs:
            if b is None:
                continue
            coeffs = {}
            if i != ZERO:
                coeffs[i] = coeffs.get(i, 0) + 1
            if j != ZERO:
                coeffs[j] = coeffs.get(j, 0) - 1
            for v in coeffs:
                if v not in vars:
                    raise KeyError(v)
            qs.append(Ineq.make(coeffs, b))
        return cls.build(vars, qs)

    def with_constraints(self, ineqs, extra_vars=()) -> "IneqSystem":
        return IneqSystem.build(self.vars + tuple(extra_vars), list(self.constraints) + list(ineqs))

    def is_difference_system(self) -> bool:
        for q in self.constraints:
            if len(q.coeffs) > 2 or any(abs(c) != 1 for _, c in q.coeffs):
                return False
            if len(q.coeffs) == 2 and q.coeffs[0][1] == q.coeffs[1][1]:
                return False
        return True

    def satisfied_by(self, point: dict) -> bool:
        return all(sum(c * point[v] for v, c in q.coeffs) <= q.bound for q in self.constraints)


def diff(i, j, b) -> Optional[Ineq]:
    """``x_i - x_j <= b`` (``ZERO`` on either side means the constant 0)."""
    coeffs = {}
    if i != ZERO:
        coeffs[i] = Fraction(1)
    if j != ZERO:
        coeffs[j] = coeffs.get(j, 0) - 1
    return Ineq.make(coeffs, b)


def fm_eliminate(sys: IneqSystem, kill) -> IneqSystem:
    """Project ``kill`` away: every upper bound meets every lower bound."""
    if kill not in sys.vars:
        raise KeyError(kill)
    keep = tuple(v for v in sys.vars if v != kill)
    if sys.infeasible:
        return IneqSystem(keep, sys.constraints)
    pos, neg, rest = [], [], []
    for q in sys.constraints:
        c = q.coef(kill)
        (pos if c > 0 else neg if c < 0 else rest).append((c, q))
    out = [q for _, q in rest]
    for cp, qp in pos:
        for cn, qn in neg:
            # qp * |cn| + qn * cp cancels kill
            coeffs = {}
            for v, c in qp.coeffs:
                coeffs[v] = coeffs.get(v, 0) + c * -cn
            for v, c in qn.coeffs:
                coeffs[v] = coeffs.get(v, 0) + c * cp
            coeffs.pop(kill, None)
            out.append(Ineq.make(coeffs, qp.bound * -cn + qn.bound * cp))
    return IneqSystem.build(keep, out)


def _cost(sys, v):
    p = n = 0
    for q in sys.constraints:
        c = q.coef(v)
        if c > 0:
            p += 1
        elif c < 0:
            n += 1
    return p * n - p - n


def eliminate_all(sys: IneqSystem, kill) -> IneqSystem:
    """Eliminate several variables, cheapest pairing first."""
    todo = [v for v in sys.vars if v in set(kill)]
    while todo:
        if sys.infeasible:
            return IneqSystem(tuple(v for v in sys.vars if v not in todo), sys.constraints)
        v = min(todo, key=lambda w: (_cost(sys, w), _key(w)))
        sys = fm_eliminate(sys, v)
        todo.remove(v)
    return sys


def is_consistent(sys: IneqSystem) -> bool:
    return not eliminate_all(sys, sys.vars).infeasible


def supremum(sys: IneqSystem, objective: dict):
    """``sup`` of a linear objective over the solution set (``None`` = +inf)."""
    y = ("<objective>",)
    link = dict(objective)
    link = {v: -c for v, c in link.items()}
    link[y] = Fraction(1)
    full = sys.with_constraints([Ineq.make(link, 0), Ineq.make({v: -c for v, c in link.items()}, 0)],
                                extra_vars=(y,))
    proj = eliminate_all(full, sys.vars)
    if proj.infeasible:
        raise InconsistentSystem("empty inequality system")
    best = None
    for q in proj.constraints:
        c = q.coef(y)
        if c > 0:
            b = q.bound / c
            if best is None or b < best:
                best = b
    return best


def tightest_bounds(sys: IneqSystem) -> dict:
    """Map ``(i, j)`` to ``sup(x_i - x_j)`` for all ordered pairs.

    Keys range over ``vars`` plus ``ZERO``, so ``(v, ZERO)`` is the upper
    bound of ``v`` and ``(ZERO, v)`` the negated lower bound. Each pair is
    read off the exact projection of the system onto those two variables.
    """
    if not is_consistent(sys):
        raise InconsistentSystem("empty inequality system")
    vars_ = tuple(sys.vars)
    out = {}

    def objective(i, j):
        obj = {}
        if i != ZERO:
            obj[i] = Fraction(1)
        if j != ZERO:
            obj[j] = Fraction(-1)
        return obj

    if len(vars_) == 1:
        (v,) = vars_
        out[(v, ZERO)] = supremum(sys, objective(v, ZERO))
        out[(ZERO, v)] = supremum(sys, objective(ZERO, v))
    for a, v in enumerate(vars_):
        for w in vars_[a + 1:]:
            both = eliminate_all(sys, [u for u in vars_ if u not in (v, w)])
            out[(v, w)] = supremum(both, objective(v, w))
            out[(w, v)] = supremum(both, objective(w, v))
            for x, y in ((v, w), (w, v)):
                if (x, ZERO) not in out:
                    single = fm_eliminate(both, y)
                    out[(x, ZERO)] = supremum(single, objective(x, ZERO))
                    out[(ZERO, x)] = supremum(single, objective(ZERO, x))
    return out


# successor of a class ------------------------------------------------------

def _covers(marking: dict, arcs: dict) -> bool:
    return all(marking.get(p, 0) >= w for p, w in arcs.items())


def _enabled(net, marking: dict) -> list:
    return [t for t in net.transitions if _covers(marking, net.pre[t])]


def firing_system(class_sys: IneqSystem, fired: tuple) -> IneqSystem:
    """The class domain with ``fired`` forced to happen together, first."""
    pivot = fired[0]
    extra = []
    for t in fired[1:]:
        extra += [diff(pivot, t, 0), diff(t, pivot, 0)]
    for k in class_sys.vars:
        if k not in fired:
            extra.append(diff(pivot, k, 0))
    return class_sys.with_constraints(extra)


def oracle_firable(class_sys: IneqSystem, fired: tuple) -> bool:
    return is_consistent(firing_system(class_sys, fired))


def oracle_successor(class_sys: IneqSystem, fired: tuple, net, marking) -> tuple:
    """Successor ``(marking', system)`` of firing ``fired`` together.

    ``system`` is over the transitions enabled in ``marking'`` and is
    infeasible when the firing cannot happen.
    """
    fired = tuple(fired)
    pivot = fired[0]
    middle = dict(marking)
    for t in fired:
        for p, w in net.pre[t].items():
            middle[p] = middle.get(p, 0) - w
    after = dict(middle)
    for t in fired:
        for p, w in net.post[t].items():
            after[p] = after.get(p, 0) + w
    after = {p: n for p, n in after.items() if n}
    base = firing_system(class_sys, fired)
    primed = {}
    extra = []
    for k in _enabled(net, after):
        nk = ("'", k)
        primed[nk] = k
        if k not in fired and _covers(middle, net.pre[k]):
            link = {nk: 1, k: -1, pivot: 1}
            extra += [Ineq.make(link, 0), Ineq.make({v: -c for v, c in link.items()}, 0)]
        else:
            iv = net.intervals[k]
            extra.append(diff(ZERO, nk, -Fraction(iv.low)))
            if iv.high is not INF:
                extra.append(diff(nk, ZERO, Fraction(iv.high)))
    full = base.with_constraints(extra, extra_vars=tuple(primed))
    proj = eliminate_all(full, class_sys.vars)
    renamed = []
    for q in proj.constraints:
        if q.is_false:
            renamed.append(q)
        else:
            renamed.append(Ineq.make({primed[v]: c for v, c in q.coeffs}, q.bound))
    return after, IneqSystem.build(tuple(primed[v] for v in primed), renamed)

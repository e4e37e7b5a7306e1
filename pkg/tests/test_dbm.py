import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tpntwin import kernel, oracle
from tpntwin.bounds import INF
from tpntwin.dbm import (X0, Dbm, Inconsistent, add_constraint, close, dbm_equal, project_out,
                         shift_and_introduce)
from tpntwin.errors import NotCanonical, UnknownVariable
from tpntwin.testing import dbm_bounds, random_difference_system, system_of

from conftest import iv

seeds = st.integers(0, 2**32 - 1)


def e2_domain():
    return Dbm.from_intervals([("x1", iv(1, 2)), ("x2", iv(0, 3))])


def cycle_sum(d, cycle):
    return sum(d.entry(a, b) for a, b in zip(cycle, cycle[1:] + cycle[:1]))


# closure -------------------------------------------------------------------

def test_close_single_variable_is_identity():
    d = Dbm.from_intervals([("x1", iv(1, 2))])
    assert close(d) is d
    assert d.bounds("x1") == (1, 2)


def test_close_detects_negative_cycle():
    d = Dbm.from_intervals([("x1", iv(3, 4)), ("x2", iv(0, 2))])
    r = close(add_constraint(d, "x1", "x2", 0))
    assert isinstance(r, Inconsistent) and not r
    assert cycle_sum(r.source, r.witness) == -1


def test_close_routes_through_reference():
    d = Dbm.from_constraints(["x1", "x2"], [(X0, "x1", -1), ("x1", X0, 2), ("x2", X0, 3), ("x2", "x1", 1)])
    c = close(d)
    assert c.entry("x1", "x2") == 2
    assert c.entry("x2", "x1") == 1


def test_entry_zero_diagonal_and_clamp():
    d = Dbm.top(["a", "b"])
    assert d.entry("a", "a") == 0
    assert d.entry(X0, "a") == 0
    assert d.entry("a", X0) is INF


# add_constraint ------------------------------------------------------------

def test_add_constraint_idempotent():
    d = e2_domain()
    once = add_constraint(d, "x1", "x2", 0)
    assert add_constraint(once, "x1", "x2", 0) == once


def test_add_negative_self_loop():
    d = add_constraint(Dbm.top(["x1"]), "x1", "x1", -1)
    assert not close(d)


def test_add_constraint_tightens_lower_bound():
    d = close(add_constraint(e2_domain(), "x1", "x2", 0))
    assert d.entry(X0, "x2") == -1


def test_add_constraint_unknown_variable():
    with pytest.raises(UnknownVariable):
        add_constraint(e2_domain(), "x9", X0, 1)


def test_add_constraint_marks_non_canonical():
    assert not add_constraint(e2_domain(), "x1", "x2", 0).canonical


def test_rational_bounds_stay_exact():
    d = close(Dbm.from_constraints(["x"], [("x", X0, Fraction(1, 3)), (X0, "x", Fraction(-1, 7))]))
    assert d.bounds("x") == (Fraction(1, 7), Fraction(1, 3))


# project_out ---------------------------------------------------------------

def test_project_out_nothing():
    d = e2_domain()
    assert project_out(d, set()) is d


def test_project_out_e2():
    assert project_out(e2_domain(), {"x1"}).bounds("x2") == (0, 3)


def test_project_out_after_tightening():
    d = close(add_constraint(e2_domain(), "x1", "x2", 0))
    assert project_out(d, {"x1"}).bounds("x2") == (1, 3)


def test_project_out_needs_canonical():
    with pytest.raises(NotCanonical):
        project_out(add_constraint(e2_domain(), "x1", "x2", 0), {"x1"})


# shift_and_introduce ---------------------------------------------------------

def fire_first(d, pivot, others):
    for k in others:
        d = add_constraint(d, pivot, k, 0)
    return close(d)


def test_shift_e2():
    d = fire_first(e2_domain(), "x1", ["x2"])
    r = shift_and_introduce(d, "x1", [("x2", "y2")], [])
    assert r.vars == ("y2",) and r.bounds("y2") == (0, 2)


def test_shift_fresh_only():
    d = Dbm.from_intervals([("x1", iv(0, 1))])
    r = shift_and_introduce(d, "x1", [], [("y3", iv(1, 2))])
    assert r == Dbm.from_intervals([("y3", iv(1, 2))])


def test_shift_pinned_pivot():
    d = fire_first(Dbm.from_intervals([("x1", iv(2, 2)), ("x2", iv(2, 3))]), "x1", ["x2"])
    assert shift_and_introduce(d, "x1", [("x2", "y2")], []).bounds("y2") == (0, 1)


def test_shift_keeps_cross_constraints_and_order():
    d = fire_first(Dbm.from_intervals([("a", iv(0, 1)), ("b", iv(2, 4)), ("c", iv(3, 5))]), "a", ["b", "c"])
    d = close(add_constraint(d, "b", "c", -1))
    r = shift_and_introduce(d, "a", [("b", "b'"), ("c", "c'")], [("n", iv(1))], order=["n", "c'", "b'"])
    assert r.vars == ("n", "c'", "b'")
    assert r.entry("b'", "c'") == -1
    assert r.bounds("n") == (1, INF)


def test_shift_needs_canonical():
    with pytest.raises(NotCanonical):
        shift_and_introduce(add_constraint(e2_domain(), "x1", "x2", 0), "x1", [], [])


# equality --------------------------------------------------------------------

def test_equal_closed():
    d = e2_domain()
    assert dbm_equal(d, close(d))


def test_equal_redundant_constraint():
    a = Dbm.from_intervals([("x", iv(1, 2))])
    b = close(add_constraint(a, "x", "x", 5))
    assert dbm_equal(a, b)


def test_not_equal_after_tightening():
    a = e2_domain()
    b = close(add_constraint(a, "x1", "x2", 0))
    assert not dbm_equal(a, b)
    assert (a.entry(X0, "x2"), b.entry(X0, "x2")) == (0, -1)


def test_equal_requires_canonical():
    with pytest.raises(NotCanonical):
        dbm_equal(e2_domain(), add_constraint(e2_domain(), "x1", "x2", 0))


def test_dump_format():
    d = Dbm.from_intervals([("x", iv(Fraction(1, 2), 2))])
    assert d.dump().splitlines() == ["0 - x <= -1/2", "x - 0 <= 2"]


def test_least_solution():
    d = close(add_constraint(e2_domain(), "x1", "x2", 0))
    assert d.least_solution() == {"x1": 1, "x2": 1}


# properties against the oracle ----------------------------------------------

def _random(seed):
    vars_, cons = random_difference_system(random.Random(seed))
    return vars_, cons, Dbm.from_constraints(vars_, cons)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_close_idempotent(seed):
    _, _, d = _random(seed)
    c = close(d)
    if c:
        assert close(Dbm(c.vars, c.cells, c.scale, False)) == c


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_triangle_inequality(seed):
    _, _, d = _random(seed)
    c = close(d)
    if not c:
        return
    names = (X0,) + c.vars
    for i in names:
        assert c.entry(i, i) == 0
        assert c.entry(X0, i) <= 0
        for j in names:
            for k in names:
                assert c.entry(i, j) <= c.entry(i, k) + c.entry(k, j)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_emptiness_matches_oracle(seed):
    vars_, cons, d = _random(seed)
    c = close(d)
    assert bool(c) == oracle.is_consistent(system_of(vars_, cons))
    if not c:
        assert cycle_sum(c.source, c.witness) < 0


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_entries_are_tight(seed):
    vars_, cons, d = _random(seed)
    c = close(d)
    if c:
        assert dbm_bounds(c) == oracle.tightest_bounds(system_of(vars_, cons))


@settings(max_examples=150, deadline=None)
@given(seeds, st.data())
def test_project_out_matches_elimination(seed, data):
    vars_, cons, d = _random(seed)
    c = close(d)
    if not c:
        return
    kill = data.draw(st.sets(st.sampled_from(vars_)))
    p = project_out(c, kill)
    sys_ = oracle.eliminate_all(system_of(vars_, cons), kill)
    assert dbm_bounds(p) == oracle.tightest_bounds(sys_)


# kernels -------------------------------------------------------------------

@pytest.mark.skipif(kernel.close_flat_native is None, reason="compiled kernel not built")
@settings(max_examples=300, deadline=None)
@given(seeds)
def test_native_kernel_matches_python(seed):
    _, _, d = _random(seed)
    a = kernel.close_flat_native(list(d.cells), d.dim)
    b = kernel.close_flat_py(list(d.cells), d.dim)
    assert a[1] == b[1]
    if a[1]:
        assert a[0] == b[0]


@pytest.mark.skipif(kernel.close_flat_native is None, reason="compiled kernel not built")
def test_native_kernel_overflow_falls_back():
    big = 2**62
    cells = [0, None, None, big, 0, None, None, big, 0]
    assert kernel.close_flat_native(list(cells), 3) is None
    out, ok = kernel.close_flat(list(cells), 3)
    assert ok and out[2 * 3 + 0] == 2 * big
    assert kernel.close_flat_native([0, 2**70, 0, 0], 2) is None


def test_huge_bounds_stay_exact():
    d = close(Dbm.from_constraints(["x", "y"], [("x", X0, 2**80), ("y", "x", 2**80)]))
    assert d.entry("y", X0) == 2**81


def test_pure_python_backend_selected_by_env():
    import os
    import subprocess
    import sys
    code = ("import tpntwin, tpntwin.kernel as k; from tpntwin import *; "
            "g = explore(make_product(load_net('nets/F1.net'), load_net('nets/F2.net'))); "
            "print(k.BACKEND, k.close_flat_native, g.num_classes, g.num_edges)")
    env = dict(os.environ, TPNTWIN_PURE_PYTHON="1")
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    out = subprocess.run([sys.executable, "-c", code], env=env, cwd=root, capture_output=True, text=True)
    assert out.stdout.split() == ["python", "None", "3", "2"]

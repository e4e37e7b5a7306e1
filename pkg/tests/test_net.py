import random

import pytest
from hypothesis import given, settings, strategies as st

from tpntwin import Marking, discrete_successor, enabled, make_product
from tpntwin.errors import IdentifierCollision, NotEnabled
from tpntwin.net import fire_marking
from tpntwin.netio import rename_disjoint
from tpntwin.testing import random_net

from conftest import chain_net, iv


def test_enabled_single_arc(E1):
    assert set(enabled(E1, E1.initial_marking)) == {"t"}
    assert enabled(E1, Marking()) == ()


def test_enabled_concurrent(F2):
    assert set(enabled(F2, F2.initial_marking)) == {"u_a", "u_b"}


def test_marking_is_sparse():
    assert Marking({"p": 0, "q": 2}) == Marking({"q": 2})
    assert hash(Marking({"p": 0, "q": 2})) == hash(Marking({"q": 2}))
    assert Marking({"q": 2})["p"] == 0
    assert "p" not in Marking({"p": 0})
    with pytest.raises(ValueError):
        Marking({"p": -1})


def test_fire_consumes_token(E1):
    m, pers, new = discrete_successor(E1, E1.initial_marking, "t")
    assert m == Marking() and pers == () and new == ()


def test_fire_keeps_concurrent_persistent(F2):
    m, pers, new = discrete_successor(F2, F2.initial_marking, "u_a")
    assert m == Marking({"q1": 1, "q2": 1})
    assert pers == ("u_b",) and new == ()


def test_self_loop_is_newly_enabled():
    net = chain_net("loop", {"t": (["p"], ["p"], iv(0, 1), None)}, {"p": 1})
    m, pers, new = discrete_successor(net, net.initial_marking, "t")
    assert m == Marking({"p": 1}) and pers == () and new == ("t",)


def test_conflict_partner_is_newly_enabled_when_refed():
    # t and k share p; t puts a token back, so k is enabled again but not persistent
    net = chain_net("c", {"t": (["p"], ["p"], iv(0), None), "k": (["p"], [], iv(0), None)}, {"p": 1})
    _, pers, new = discrete_successor(net, net.initial_marking, "t")
    assert pers == () and set(new) == {"t", "k"}


def test_not_enabled(E1):
    with pytest.raises(NotEnabled):
        discrete_successor(E1, Marking(), "t")


def test_weighted_arcs():
    from tpntwin import TimePetriNet
    net = TimePetriNet(["p", "q"], ["t"], pre={"t": {"p": 2}}, post={"t": {"q": 3}},
                       initial_marking={"p": 3})
    assert enabled(net, Marking({"p": 1})) == ()
    m, _, new = discrete_successor(net, net.initial_marking, "t")
    assert m == Marking({"p": 1, "q": 3}) and new == ()


def test_product_of_fig1_nets(F1, F2):
    P = make_product(F1, F2)
    assert len(P.net.places) == 7 and len(P.net.transitions) == 4
    assert P.shared_labels == {"a", "b"}
    assert P.side["t_a"] == 1 and P.side["u_b"] == 2


def test_product_disjoint_alphabets(E1):
    from tpntwin.netio import rename
    other = rename(E1, {"p": "p2"}, {"t": "t2"})
    a = rename(E1, {}, {}, name="a")
    a = type(a)(a.places, a.transitions, a.pre, a.post, a.initial_marking, a.intervals, {"t": "a"})
    c = type(other)(other.places, other.transitions, other.pre, other.post, other.initial_marking,
                    other.intervals, {"t2": "c"})
    assert make_product(a, c).shared_labels == frozenset()


def test_product_collision(F1):
    with pytest.raises(IdentifierCollision) as exc:
        make_product(F1, F1)
    assert {"p0", "p1", "p2", "t_a", "t_b"} <= set(exc.value.clashes)


def test_product_rejects_crossing_arcs(F1, F2):
    from tpntwin import ProductNet
    P = make_product(F1, F2)
    side = dict(P.side)
    side["p1"] = 2
    with pytest.raises(ValueError):
        ProductNet(P.net, side)


def test_projection_round_trip(F1, F2):
    P = make_product(F1, F2)
    assert P.project(1) == F1
    assert P.project(2) == F2


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_projection_round_trip_random(seed):
    rng = random.Random(seed)
    a, b = rename_disjoint(random_net(rng, "x", labels=("a", None)), random_net(rng, "x", labels=("a", "b")))
    P = make_product(a, b)
    assert P.project(1) == a and P.project(2) == b


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_enabled_after_firing_is_partitioned(seed):
    rng = random.Random(seed)
    net = random_net(rng)
    m = net.initial_marking
    for _ in range(6):
        en = enabled(net, m)
        if not en:
            break
        t = rng.choice(en)
        m2, pers, new = fire_marking(net, m, (t,))
        assert set(pers).isdisjoint(new)
        assert set(pers) | set(new) == set(enabled(net, m2))
        m = m2

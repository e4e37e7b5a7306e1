import json
import random
import warnings

import pytest
from hypothesis import given, settings, strategies as st

from tpntwin import (ExploreLimits, TwinSpec, build_twin, check_diagnosability, dead_classes,
                     explore, make_product, replay)
from tpntwin.diagnose import validate_lasso
from tpntwin.errors import NoObservables, TruncatedGraph
from tpntwin.net import TimePetriNet
from tpntwin.netio import load_net, rename
from tpntwin.scg import realize_path
from tpntwin.testing import random_net

from conftest import NETS, chain_net, iv

seeds = st.integers(0, 2**32 - 1)
F5_SPEC = TwinSpec({"f"}, {"a", "b"})


def test_twin_spec_validation():
    with pytest.raises(ValueError):
        TwinSpec(set(), {"a"})
    with pytest.raises(ValueError):
        TwinSpec({"f"}, {"f", "a"})


def test_twin_structure(F5):
    P = build_twin(F5, F5_SPEC)
    side1 = P.transitions_of(1)
    side2 = P.transitions_of(2)
    assert "t4" in side2
    assert all(P.net.labels[t] != "f" for t in side1)
    assert len(side1) == 3 and len(side2) == 4
    assert P.shared_labels == {"a", "b"}
    assert P.project(2) == F5


def test_twin_without_faults(F1):
    with pytest.warns(UserWarning):
        P = build_twin(F1, TwinSpec({"f"}, {"a", "b"}))
    n_o, n_f = P.project(1), P.project(2)
    assert n_f == F1
    assert len(n_o.transitions) == len(n_f.transitions)
    assert sorted(n_o.labels.values()) == sorted(n_f.labels.values())


def test_twin_all_observable(F5):
    P = build_twin(F5, F5_SPEC)
    assert P.project(2).labels == F5.labels


def test_twin_silences_other_labels(F5):
    P = build_twin(load_net(NETS / "F5_loop.net"), F5_SPEC)
    assert P.net.labels["t6"] is None and P.net.labels["t6_o"] is None
    assert "c" not in P.shared_labels


def test_twin_needs_observables(F5):
    with pytest.raises(NoObservables):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            build_twin(F5, TwinSpec({"f"}, {"zzz"}))


def test_f5_fault_leads_to_time_deadlock(F5):
    P = build_twin(F5, F5_SPEC)
    g = explore(P)
    dead = dead_classes(g)
    fault_dst = [dst for _, f, dst in g.edges if f.label == "f"]
    assert fault_dst
    for start in fault_dst:
        seen, todo = set(), [start]
        while todo:
            i = todo.pop()
            if i in seen:
                continue
            seen.add(i)
            if not g.out[i]:
                assert i in dead.time_dead
            todo += [g.edges[e][2] for e in g.out[i]]


def test_f5_diagnosable(F5):
    v = check_diagnosability(build_twin(F5, F5_SPEC), {"f"})
    assert v.kind == "diagnosable" and v.diagnosable
    assert v.report().startswith("Diagnosable")


def test_loop_not_diagnosable():
    net = load_net(NETS / "F5_loop.net")
    P = build_twin(net, TwinSpec({"f"}, {"a", "b", "c"}))
    v = check_diagnosability(P, {"f"})
    assert v.kind == "not-diagnosable"
    assert validate_lasso(v.graph, v.prefix, v.cycle, {"f"})
    assert [v.graph.edges[e][1].label for e in v.prefix] == ["a", "f", "b"]
    assert [v.graph.edges[e][1].label for e in v.cycle] == ["c"]
    replay(P, v.witness_run)
    replay(P, v.lasso_run)
    assert [d for d, _ in v.lasso_run] == [0, 0, 3, 1]
    rec = json.loads(json.dumps(v.to_record()))
    assert rec["verdict"] == "not-diagnosable" and rec["witness_run"][2]["delay"] == "3"
    assert "prefix:" in v.report()


def test_no_fault_transitions_is_vacuous(F1):
    with pytest.warns(UserWarning):
        P = build_twin(F1, TwinSpec({"f"}, {"a", "b"}))
    assert check_diagnosability(P, {"f"}).diagnosable


def test_truncated_verdict():
    # one fault, then an ever growing place: no lasso, no fixpoint
    net = chain_net("grow", {"x": (["p"], ["p", "q"], iv(1, 1), "a"),
                             "y": (["r"], [], iv(0, 0), "f")}, {"p": 1, "r": 1})
    P = build_twin(net, TwinSpec({"f"}, {"a"}))
    v = check_diagnosability(P, {"f"}, ExploreLimits(max_classes=3))
    assert v.kind == "truncated" and not v.diagnosable


def test_dead_classes_f1(F1):
    d = dead_classes(explore(F1))
    assert d.quiescent == {2} and d.time_dead == frozenset()


def test_dead_classes_product(F1, F2):
    g = explore(make_product(F1, F2))
    d = dead_classes(g)
    assert d.all == {2} and d.quiescent == {2}
    assert g.classes[2].enabled == ()


def test_dead_classes_f5(F5):
    g = explore(build_twin(F5, F5_SPEC))
    d = dead_classes(g)
    (after_f,) = [dst for _, f, dst in g.edges if f.label == "f"]
    assert after_f in d.time_dead
    c = g.classes[after_f]
    assert c.domain.bounds("t5_o") == (0, 2) and c.domain.bounds("t1")[0] == 3


def test_dead_classes_truncated():
    net = chain_net("grow", {"t": (["p"], ["p", "q"], iv(1, 1), None)}, {"p": 1})
    with pytest.raises(TruncatedGraph):
        dead_classes(explore(net, ExploreLimits(max_classes=2)))


# properties ------------------------------------------------------------------

def _acyclic_net(rng):
    """Tokens only ever move to higher-numbered places, so every run is finite."""
    places = [f"p{i}" for i in range(4)]
    trans = [f"t{i}" for i in range(rng.randint(1, 4))]
    pre, post, ivs, labs = {}, {}, {}, {}
    for t in trans:
        src = rng.randrange(3)
        pre[t] = {places[src]: 1}
        post[t] = {places[rng.randint(src + 1, 3)]: 1}
        lo = rng.randint(0, 3)
        ivs[t] = iv(lo, rng.randint(lo, 4))
        labs[t] = rng.choice(("a", "b", "f"))
    if "f" not in labs.values():
        labs[trans[0]] = "f"
    if set(labs.values()) == {"f"}:
        labs[trans[-1]] = "a"
    return TimePetriNet(places, trans, pre, post, {"p0": 1, "p1": 1}, ivs, labs, name="dag")


def _faulty_net(rng):
    net = random_net(rng, labels=("a", "b", "f"))
    if not any(l in ("a", "b") for l in net.labels.values()):
        labs = dict(net.labels)
        labs[net.transitions[0]] = "a"
        net = TimePetriNet(net.places, net.transitions, net.pre, net.post, net.initial_marking,
                           net.intervals, labs, name=net.name)
    return net


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_acyclic_products_never_report_lassos(seed):
    net = _acyclic_net(random.Random(seed))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        P = build_twin(net, TwinSpec({"f"}, {"a", "b"}))
    assert check_diagnosability(P, {"f"}).diagnosable


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_lassos_validate_and_replay(seed):
    net = _faulty_net(random.Random(seed))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        P = build_twin(net, TwinSpec({"f"}, {"a", "b"}))
    v = check_diagnosability(P, {"f"}, ExploreLimits(max_classes=300))
    if v.kind == "not-diagnosable":
        assert validate_lasso(v.graph, v.prefix, v.cycle, {"f"})
        replay(P, v.witness_run)
        replay(P, v.lasso_run)
        assert v.witness_run == realize_path(v.graph, P, v.prefix)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_verdict_ignores_identifier_names(seed):
    net = _faulty_net(random.Random(seed))
    other = rename(net, {p: f"P_{p}" for p in net.places}, {t: f"T_{t}" for t in net.transitions})
    kinds = []
    for n in (net, other):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            P = build_twin(n, TwinSpec({"f"}, {"a", "b"}))
        kinds.append(check_diagnosability(P, {"f"}, ExploreLimits(max_classes=300)).kind)
    assert kinds[0] == kinds[1]

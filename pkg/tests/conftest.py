from fractions import Fraction
from pathlib import Path

import pytest

from tpntwin import TimeInterval, TimePetriNet, load_net
from tpntwin.bounds import INF

NETS = Path(__file__).resolve().parent.parent / "nets"


def iv(lo, hi=INF):
    return TimeInterval(Fraction(lo), hi if hi is INF else Fraction(hi))


def chain_net(name, spec, m0):
    """Build a net from ``{t: (pre, post, interval, label)}``."""
    places = []
    for pre, post, _, _ in spec.values():
        for p in (*pre, *post):
            if p not in places:
                places.append(p)
    for p in m0:
        if p not in places:
            places.append(p)
    return TimePetriNet(
        places, list(spec),
        pre={t: dict.fromkeys(s[0], 1) for t, s in spec.items()},
        post={t: dict.fromkeys(s[1], 1) for t, s in spec.items()},
        initial_marking=m0,
        intervals={t: s[2] for t, s in spec.items()},
        labels={t: s[3] for t, s in spec.items()},
        name=name,
    )


@pytest.fixture
def nets_dir():
    return NETS


@pytest.fixture
def F1():
    return load_net(NETS / "F1.net")


@pytest.fixture
def F2():
    return load_net(NETS / "F2.net")


@pytest.fixture
def F5():
    return load_net(NETS / "F5.net")


@pytest.fixture
def E1():
    return load_net(NETS / "E1.net")


@pytest.fixture
def E2():
    return load_net(NETS / "E2.net")


# acceptance report -------------------------------------------------------------

_ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """``criterion(n, ok, detail)`` records one line of the acceptance report."""
    def record(n, ok, detail):
        status = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
        _ACCEPTANCE[n] = f"criterion {n}: {status} - {detail}"
        print(_ACCEPTANCE[n])
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])

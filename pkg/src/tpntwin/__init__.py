"""Linear state class graphs for Time Petri nets and their synchronous products.

Quick tour::

    from tpntwin import load_net, make_product, explore
    graph = explore(make_product(load_net("F1.net"), load_net("F2.net")))
"""

__version__ = "0.1.0"

from .bounds import INF, TimeInterval
from .dbm import X0, Dbm, Inconsistent
from .diagnose import TwinSpec, build_twin, check_diagnosability, dead_classes
from .kernel import BACKEND
from .net import EPSILON, Marking, ProductNet, TimePetriNet, discrete_successor, enabled, make_product
from .netio import emit_aut, emit_dot, format_net, load_net, parse_net, rename_disjoint
from .scg import (ClassGraph, ExploreLimits, Firing, StateClass, explore, fire_single, fire_sync,
                  firable_single, initial_class, realize_path, replay, sync_firable)

__all__ = [
    "INF", "TimeInterval", "X0", "Dbm", "Inconsistent", "TwinSpec", "build_twin",
    "check_diagnosability", "dead_classes", "BACKEND", "EPSILON", "Marking", "ProductNet",
    "TimePetriNet", "discrete_successor", "enabled", "make_product", "emit_aut", "emit_dot",
    "format_net", "load_net", "parse_net", "rename_disjoint", "ClassGraph", "ExploreLimits",
    "Firing", "StateClass", "explore", "fire_single", "fire_sync", "firable_single",
    "initial_class", "realize_path", "replay", "sync_firable",
]

"""Command line front end: ``tpn-twin {lscg,product,twin,diag}``.

The single-dash options of the original tool are accepted as aliases for
the subcommands: ``-W`` (lscg), ``-I`` (product), ``-twin`` and ``-diag``.

Exit codes: 0 success / diagnosable, 1 not diagnosable, 2 truncated
exploration, 3 unreadable or malformed input, 4 bad command line.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .diagnose import TwinSpec, build_twin, check_diagnosability, dead_classes
from .errors import NetFormatError, NoObservables, TpnError
from .net import make_product
from .netio import emit_aut, emit_dot, load_net, rename_disjoint
from .scg import ExploreLimits, explore

log = logging.getLogger("tpntwin")

EXIT_OK = 0
EXIT_NOT_DIAGNOSABLE = 1
EXIT_TRUNCATED = 2
EXIT_INPUT = 3
EXIT_USAGE = 4

DEFAULT_MAX_CLASSES = 1_000_000
ALIASES = {"-W": "lscg", "-I": "product", "-twin": "twin", "-diag": "diag"}


@dataclass
class CliConfig:
    mode: str
    inputs: list
    fault_labels: list = field(default_factory=list)
    observable_labels: Optional[list] = None
    output: Optional[str] = None
    format: str = "summary"
    limits: ExploreLimits = ExploreLimits(max_classes=DEFAULT_MAX_CLASSES)
    threads: int = 1
    json: bool = False

    def __post_init__(self):
        want = {"lscg": 1, "product": 2, "twin": 1, "diag": 1}[self.mode]
        if len(self.inputs) != want:
            raise ValueError(f"{self.mode} takes exactly {want} net file(s)")
        if self.mode in ("twin", "diag") and not self.fault_labels:
            raise ValueError(f"{self.mode} needs --fault")
        if self.threads < 1:
            raise ValueError("--threads must be positive")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _labels(text):
    return [s for s in (x.strip() for x in text.split(",")) if s]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tpn-twin", description="State class graphs of Time Petri nets and their products.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="mode", required=True, parser_class=_Parser)

    def common(p, with_format=True):
        if with_format:
            p.add_argument("--format", choices=("aut", "dot", "summary"), default="summary",
                           help="what to write (default: summary only)")
            p.add_argument("-o", "--output", help="write the graph here instead of stdout")
        p.add_argument("--max-classes", type=int, default=DEFAULT_MAX_CLASSES,
                       help=f"stop after this many classes (default {DEFAULT_MAX_CLASSES})")
        p.add_argument("--no-limit", action="store_true", help="no class limit (may not terminate)")
        p.add_argument("--max-depth", type=int, default=None, help="stop exploring below this depth")
        p.add_argument("--threads", type=int, default=1, help="parallel exploration workers")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("lscg", help="class graph of one net (-W)")
    p.add_argument("net")
    common(p)
    p = sub.add_parser("product", help="class graph of the product of two nets (-I)")
    p.add_argument("net1")
    p.add_argument("net2")
    common(p)
    for name, help_ in (("twin", "class graph of the twin plant (-twin)"),
                        ("diag", "on-the-fly diagnosability check (-diag)")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("net")
        p.add_argument("--fault", type=_labels, required=True, help="comma separated fault labels")
        p.add_argument("--obs", type=_labels, default=None,
                       help="comma separated observable labels (default: every other label)")
        common(p, with_format=(name == "twin"))
        if name == "diag":
            p.add_argument("--json", action="store_true", help="print a machine-readable verdict")
    return parser


def config_from_args(ns) -> CliConfig:
    inputs = [ns.net1, ns.net2] if ns.mode == "product" else [ns.net]
    limits = ExploreLimits(max_classes=None if ns.no_limit else ns.max_classes, max_depth=ns.max_depth)
    return CliConfig(
        mode=ns.mode, inputs=inputs,
        fault_labels=getattr(ns, "fault", None) or [],
        observable_labels=getattr(ns, "obs", None),
        output=getattr(ns, "output", None),
        format=getattr(ns, "format", "summary"),
        limits=limits, threads=ns.threads,
        json=getattr(ns, "json", False),
    )


def _color(text, code, stream):
    if os.environ.get("TPN_TWIN_COLOR", "1") == "0" or not stream.isatty():
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def summary_line(graph, seconds) -> str:
    parts = [f"{graph.num_classes} classes", f"{graph.num_edges} edges"]
    if graph.truncated:
        parts.append("dead: n/a (truncated)")
    else:
        dead = dead_classes(graph)
        parts.append(f"{len(dead.all)} dead ({len(dead.quiescent)} quiescent, {len(dead.time_dead)} time-dead)")
    parts.append(f"{seconds:.3f}s")
    return ", ".join(parts)


def _twin_spec(cfg: CliConfig, net) -> TwinSpec:
    faults = frozenset(cfg.fault_labels)
    if cfg.observable_labels is None:
        obs = frozenset(l for l in net.labels.values() if l is not None) - faults
    else:
        obs = frozenset(cfg.observable_labels)
    return TwinSpec(faults, obs)


def run(cfg: CliConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    start = time.perf_counter()
    try:
        nets = [load_net(p) for p in cfg.inputs]
    except OSError as exc:
        print(f"tpn-twin: cannot read input: {exc}", file=err)
        return EXIT_INPUT
    except NetFormatError as exc:
        print(f"tpn-twin: {exc}", file=err)
        return EXIT_INPUT
    try:
        if cfg.mode == "lscg":
            model = nets[0]
        elif cfg.mode == "product":
            model = make_product(*rename_disjoint(nets[0], nets[1]))
        else:
            model = build_twin(nets[0], _twin_spec(cfg, nets[0]))
    except (NoObservables, ValueError, TpnError) as exc:
        print(f"tpn-twin: {exc}", file=err)
        return EXIT_INPUT

    if cfg.mode == "diag":
        if cfg.threads > 1:
            log.info("diagnosability search is single-threaded; ignoring --threads")
        verdict = check_diagnosability(model, cfg.fault_labels, cfg.limits)
        elapsed = time.perf_counter() - start
        if cfg.json:
            print(json.dumps(verdict.to_record(), indent=2), file=out)
        else:
            code = {"diagnosable": "32", "not-diagnosable": "31"}.get(verdict.kind, "33")
            print(_color(verdict.report(), code, out), file=out)
        print(f"{verdict.graph.num_classes} classes, {verdict.graph.num_edges} edges explored, "
              f"{elapsed:.3f}s", file=out if not cfg.json else err)
        return {"diagnosable": EXIT_OK, "not-diagnosable": EXIT_NOT_DIAGNOSABLE}.get(verdict.kind, EXIT_TRUNCATED)

    graph = explore(model, cfg.limits, threads=cfg.threads)
    elapsed = time.perf_counter() - start
    summary = summary_line(graph, elapsed)
    if cfg.format != "summary":
        if cfg.format == "aut":
            if graph.truncated:
                print("tpn-twin: exploration truncated; not writing .aut", file=err)
                print(summary, file=err)
                return EXIT_TRUNCATED
            text = emit_aut(graph)
        else:
            text = emit_dot(graph, model.net if hasattr(model, "net") else model)
        if cfg.output:
            Path(cfg.output).write_text(text, encoding="utf-8")
            print(summary, file=out)
        else:
            out.write(text)
            print(summary, file=err)
    else:
        print(_color(summary, "1", out), file=out)
    return EXIT_TRUNCATED if graph.truncated else EXIT_OK


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] in ALIASES:
        argv[0] = ALIASES[argv[0]]
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = config_from_args(ns)
    except ValueError as exc:
        print(f"tpn-twin: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

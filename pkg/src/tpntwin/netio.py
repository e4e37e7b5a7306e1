"""Reading Tina-style ``.net`` files and writing class graphs.

Supported ``.net`` subset, one directive per line, ``#`` to end of line is a
comment::

    net <name>
    tr <name> [: <label>] [<interval>] <place>[*<w>] ... -> <place>[*<w>] ...
    pl <name> (<tokens>)

Intervals are ``[a,b]`` or ``[a,w[`` with decimal or ``p/q`` endpoints; a
missing interval means ``[0,w[`` and a missing label a silent transition.
Places may be used before (or without) a ``pl`` line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .bounds import INF, TimeInterval
from .errors import NetSemanticError, NetSyntaxError, TruncatedGraph, UnsupportedFeature
from .net import EPSILON, TimePetriNet
from .scg import ClassGraph

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<interval>[\[\]][^\[\]]*[\[\]])
  | (?P<paren>\([^)]*\))
  | (?P<brace>\{[^}]*\})
  | (?P<ident>[A-Za-z0-9_'.$]+)
  | (?P<star>\*)
  | (?P<colon>:)
  | (?P<query>\?-?)
  | (?P<other>.)
""", re.VERBOSE)

_PLAIN_IDENT = re.compile(r"[A-Za-z0-9_'.$]+\Z")
_NUMBER = re.compile(r"-?(\d+(\.\d+)?|\d+/\d+)\Z")
_UNSUPPORTED_DIRECTIVES = {
    "lb": "label directives (lb)",
    "pr": "priorities (pr)",
    "nt": "note directives (nt)",
    "note": "note directives",
}


@dataclass(frozen=True)
class NetSource:
    text: str
    name: str = "<string>"

    @classmethod
    def from_path(cls, path) -> "NetSource":
        path = Path(path)
        return cls(path.read_text(encoding="utf-8"), str(path))


@dataclass
class _Tok:
    kind: str
    text: str
    col: int  # 1-based


def _tokenize(line, lineno, fname):
    toks = []
    for mo in _TOKEN.finditer(line):
        kind = mo.lastgroup
        if kind == "ws":
            continue
        if kind == "other":
            raise NetSyntaxError(f"unexpected character {mo.group()!r}", fname, lineno, mo.start() + 1)
        toks.append(_Tok(kind, mo.group(), mo.start() + 1))
    return toks


class _Parser:
    def __init__(self, src: NetSource):
        self.src = src
        self.name = None
        self.places = []
        self.declared = set()
        self.marking = {}
        self.transitions = []
        self.pre, self.post, self.intervals, self.labels = {}, {}, {}, {}

    def err(self, cls, msg, lineno, tok=None, col=None):
        if col is None:
            col = tok.col if tok is not None else None
        return cls(msg, self.src.name, lineno, col)

    def use_place(self, name):
        if name not in self.marking:
            self.places.append(name)
            self.marking[name] = 0

    def parse(self) -> TimePetriNet:
        for lineno, raw in enumerate(self.src.text.splitlines(), 1):
            line = raw.split("#", 1)[0]
            word = re.match(r"\s*(\w+)", line)
            if word and word.group(1) in _UNSUPPORTED_DIRECTIVES:
                raise self.err(UnsupportedFeature, f"{_UNSUPPORTED_DIRECTIVES[word.group(1)]} are not supported",
                               lineno, col=word.start(1) + 1)
            toks = _tokenize(line, lineno, self.src.name)
            if not toks:
                continue
            head = toks[0]
            if head.kind != "ident":
                raise self.err(NetSyntaxError, "expected a directive (net, tr or pl)", lineno, head)
            if head.text == "net":
                self.parse_net(toks, lineno)
            elif head.text == "tr":
                self.parse_tr(toks, lineno)
            elif head.text == "pl":
                self.parse_pl(toks, lineno)
            else:
                raise self.err(NetSyntaxError, f"unknown directive {head.text!r}; expected net, tr or pl",
                               lineno, head)
        return TimePetriNet(self.places, self.transitions, self.pre, self.post, self.marking,
                            self.intervals, self.labels, name=self.name or Path(self.src.name).stem)

    def ident(self, tok, lineno, what):
        if tok is None:
            raise self.err(NetSyntaxError, f"expected {what}", lineno, col=None)
        if tok.kind == "ident":
            return tok.text
        if tok.kind == "brace":
            return tok.text[1:-1]
        raise self.err(NetSyntaxError, f"expected {what}, got {tok.text!r}", lineno, tok)

    def parse_net(self, toks, lineno):
        if len(toks) != 2:
            raise self.err(NetSyntaxError, "expected 'net <name>'", lineno, toks[-1] if len(toks) > 2 else toks[0])
        if self.name is not None:
            raise self.err(NetSemanticError, "net name given twice", lineno, toks[0])
        self.name = self.ident(toks[1], lineno, "net name")

    def parse_pl(self, toks, lineno):
        if len(toks) < 2:
            raise self.err(NetSyntaxError, "expected place name after 'pl'", lineno, toks[0])
        name = self.ident(toks[1], lineno, "place name")
        rest = toks[2:]
        if rest and rest[0].kind == "colon":
            raise self.err(UnsupportedFeature, "place labels are not supported", lineno, rest[0])
        if len(rest) != 1 or rest[0].kind != "paren":
            tok = rest[0] if rest else toks[1]
            raise self.err(NetSyntaxError, "expected '(<tokens>)' after place name", lineno, tok)
        body = rest[0].text[1:-1].strip()
        if re.fullmatch(r"-\d+", body):
            raise self.err(NetSemanticError, f"negative marking {body}", lineno, rest[0])
        if not body.isdigit():
            raise self.err(NetSyntaxError, f"expected a natural number, got {body!r}", lineno, rest[0])
        if name in self.declared:
            raise self.err(NetSemanticError, f"place {name!r} declared twice", lineno, toks[1])
        self.declared.add(name)
        self.use_place(name)
        self.marking[name] = int(body)

    def parse_tr(self, toks, lineno):
        if len(toks) < 2:
            raise self.err(NetSyntaxError, "expected transition name after 'tr'", lineno, toks[0])
        name = self.ident(toks[1], lineno, "transition name")
        if name in self.pre:
            raise self.err(NetSemanticError, f"transition {name!r} defined twice", lineno, toks[1])
        i = 2
        label = EPSILON
        interval = TimeInterval(Fraction(0), INF)
        if i < len(toks) and toks[i].kind == "colon":
            if i + 1 >= len(toks):
                raise self.err(NetSyntaxError, "expected a label after ':'", lineno, toks[i])
            label = self.ident(toks[i + 1], lineno, "label")
            i += 2
        if i < len(toks) and toks[i].kind == "interval":
            interval = self.parse_interval(toks[i], lineno)
            i += 1
        pre, i = self.parse_arcs(toks, i, lineno, stop="arrow")
        if i >= len(toks) or toks[i].kind != "arrow":
            tok = toks[i] if i < len(toks) else toks[-1]
            raise self.err(NetSyntaxError, "expected '->' between input and output places", lineno, tok)
        post, i = self.parse_arcs(toks, i + 1, lineno, stop=None)
        self.transitions.append(name)
        self.pre[name] = pre
        self.post[name] = post
        self.intervals[name] = interval
        self.labels[name] = label

    def parse_arcs(self, toks, i, lineno, stop):
        arcs = {}
        while i < len(toks) and toks[i].kind != stop:
            tok = toks[i]
            if tok.kind == "interval":
                raise self.err(NetSyntaxError, "interval must come before the arcs", lineno, tok)
            place = self.ident(tok, lineno, "place name")
            i += 1
            weight = 1
            if i < len(toks) and toks[i].kind == "query":
                raise self.err(UnsupportedFeature,
                               "read and inhibitor arcs are not supported", lineno, toks[i])
            if i < len(toks) and toks[i].kind == "star":
                if i + 1 >= len(toks) or not toks[i + 1].text.isdigit():
                    raise self.err(NetSyntaxError, "expected an arc weight after '*'", lineno, toks[i])
                weight = int(toks[i + 1].text)
                if weight == 0:
                    raise self.err(NetSemanticError, "arc weight must be positive", lineno, toks[i + 1])
                i += 2
            self.use_place(place)
            arcs[place] = arcs.get(place, 0) + weight
        return arcs, i

    def parse_interval(self, tok, lineno):
        text = tok.text
        opening, closing = text[0], text[-1]
        body = text[1:-1]
        parts = [s.strip() for s in body.split(",")]
        if len(parts) != 2:
            raise self.err(NetSyntaxError, "interval must look like [a,b] or [a,w[", lineno, tok)
        lo_s, hi_s = parts
        if opening == "]":
            raise self.err(UnsupportedFeature,
                           "open (strict) interval bounds are not supported; only [a,b] and [a,w[",
                           lineno, tok)
        for s in (lo_s, hi_s):
            if s.startswith("-") and _NUMBER.match(s):
                raise self.err(NetSemanticError, f"negative interval endpoint {s}", lineno, tok)
        if not _NUMBER.match(lo_s):
            raise self.err(NetSyntaxError, f"bad lower endpoint {lo_s!r}", lineno, tok)
        low = Fraction(lo_s)
        if hi_s == "w":
            if closing != "[":
                raise self.err(NetSyntaxError, "an infinite bound is written [a,w[", lineno, tok)
            return TimeInterval(low, INF)
        if not _NUMBER.match(hi_s):
            raise self.err(NetSyntaxError, f"bad upper endpoint {hi_s!r}", lineno, tok)
        if closing == "[":
            raise self.err(UnsupportedFeature,
                           "open (strict) interval bounds are not supported; only [a,b] and [a,w[",
                           lineno, tok)
        high = Fraction(hi_s)
        if low > high:
            raise self.err(NetSemanticError, f"empty interval {text}", lineno, tok)
        return TimeInterval(low, high)


def parse_net(src) -> TimePetriNet:
    """Parse ``.net`` text (a :class:`NetSource` or a plain string)."""
    if isinstance(src, str):
        src = NetSource(src)
    return _Parser(src).parse()


def load_net(path) -> TimePetriNet:
    return parse_net(NetSource.from_path(path))


def _name(x) -> str:
    return x if _PLAIN_IDENT.match(x) else "{" + x + "}"


def _arcs_text(arcs) -> str:
    return " ".join(_name(p) if w == 1 else f"{_name(p)}*{w}" for p, w in arcs.items())


def format_net(net: TimePetriNet) -> str:
    """Canonical ``.net`` text; places first so their order survives a round trip."""
    lines = [f"net {_name(net.name)}"]
    for p in net.places:
        lines.append(f"pl {_name(p)} ({net.initial_marking[p]})")
    for t in net.transitions:
        parts = ["tr", _name(t)]
        if net.labels[t] is not EPSILON:
            parts += [":", _name(net.labels[t])]
        parts.append(str(net.intervals[t]))
        pre, post = _arcs_text(net.pre[t]), _arcs_text(net.post[t])
        parts.append(f"{pre} -> {post}".strip() if pre else f"-> {post}".strip())
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def rename_disjoint(n1: TimePetriNet, n2: TimePetriNet) -> tuple[TimePetriNet, TimePetriNet]:
    """Make identifiers disjoint by suffixing clashing names of ``n2``.

    A clash on ``x`` renames it ``x_2``, or ``x_3``, ... if that is taken.
    Labels are left alone.
    """
    taken_p = set(n1.places) | set(n2.places)
    taken_t = set(n1.transitions) | set(n2.transitions)

    def fresh(x, taken):
        k = 2
        while f"{x}_{k}" in taken:
            k += 1
        taken.add(f"{x}_{k}")
        return f"{x}_{k}"

    pmap = {p: fresh(p, taken_p) if p in set(n1.places) else p for p in n2.places}
    tmap = {t: fresh(t, taken_t) if t in set(n1.transitions) else t for t in n2.transitions}
    if all(k == v for k, v in pmap.items()) and all(k == v for k, v in tmap.items()):
        return n1, n2
    return n1, rename(n2, pmap, tmap)


def rename(net: TimePetriNet, pmap: dict, tmap: dict, name=None) -> TimePetriNet:
    return TimePetriNet(
        [pmap.get(p, p) for p in net.places],
        [tmap.get(t, t) for t in net.transitions],
        pre={tmap.get(t, t): {pmap.get(p, p): w for p, w in net.pre[t].items()} for t in net.transitions},
        post={tmap.get(t, t): {pmap.get(p, p): w for p, w in net.post[t].items()} for t in net.transitions},
        initial_marking={pmap.get(p, p): n for p, n in net.initial_marking.items()},
        intervals={tmap.get(t, t): iv for t, iv in net.intervals.items()},
        labels={tmap.get(t, t): l for t, l in net.labels.items()},
        name=name or net.name,
    )


def _aut_label(firing) -> str:
    return "i" if firing.label is EPSILON else firing.label


def emit_aut(graph: ClassGraph) -> str:
    """CADP ``.aut`` text: header, then one line per edge."""
    if graph.truncated:
        raise TruncatedGraph("refusing to write a truncated graph as .aut")
    order = sorted(range(len(graph.edges)), key=lambda e: (graph.edges[e][0], e))
    lines = [f"des (0, {graph.num_edges}, {graph.num_classes})"]
    for e in order:
        src, firing, dst = graph.edges[e]
        label = _aut_label(firing).replace('"', '\\"')
        lines.append(f'({src}, "{label}", {dst})')
    return "\n".join(lines) + "\n"


def _marking_text(marking, places=None) -> str:
    keys = [p for p in places if p in marking] if places else sorted(marking, key=str)
    return " ".join(p if marking[p] == 1 else f"{p}*{marking[p]}" for p in keys)


def emit_dot(graph: ClassGraph, net: TimePetriNet | None = None) -> str:
    """Graphviz digraph of the classes; sync edges are drawn bold."""
    places = net.places if net is not None else None
    out = ["digraph scg {"]
    if graph.truncated:
        out.append("  truncated=true;")
    out.append("  node [shape=box, fontname=monospace];")
    for i, c in enumerate(graph.classes):
        text = f"{i}\\n{{{_marking_text(c.marking, places)}}}".replace('"', '\\"')
        out.append(f'  c{i} [label="{text}"];')
    for src, firing, dst in graph.edges:
        label = f"{_aut_label(firing)} ({'|'.join(firing.transitions)})".replace('"', '\\"')
        style = ", style=bold, kind=sync" if firing.is_sync else ", kind=single"
        out.append(f'  c{src} -> c{dst} [label="{label}"{style}];')
    out.append("}")
    return "\n".join(out) + "\n"

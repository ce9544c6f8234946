"""Oriented framed link diagrams from PD codes.

A diagram is a planar 4-valent multigraph (crossings) with extra 2-valent
vertices (twist tokens).  ``X[a,b,c,d]`` lists the four arcs at a crossing
counter-clockwise, starting from the incoming under-strand; ``T[s,a]`` puts
a ``s``-signed twist on arc ``a``.  Twists on the same arc are placed along
the arc's orientation in the order they appear in the text.

Vertices are numbered crossings first, then twists.  A *dart* is a pair
``(vertex, slot)``; crossing slots 0..3 follow the PD order, twist slot 0 is
the incoming end and slot 1 the outgoing end.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field

__all__ = [
    "Crossing",
    "TwistToken",
    "Segment",
    "LinkDiagram",
    "DiagramError",
    "parse_pd",
    "render_pd",
    "validate",
    "writhe",
    "split_components",
    "mirror",
]


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class Crossing:
    id: int
    arcs: tuple[int, int, int, int]
    sign: int


@dataclass(frozen=True)
class TwistToken:
    id: int
    sign: int
    arc: int


@dataclass(frozen=True)
class Segment:
    """A graph edge: an arc piece running from ``tail`` dart to ``head`` dart."""

    id: int
    arc: int
    tail: tuple[int, int]
    head: tuple[int, int]
    component: int


Dart = tuple[int, int]


@dataclass(eq=False)
class LinkDiagram:
    crossings: tuple[Crossing, ...]
    twists: tuple[TwistToken, ...]
    segments: tuple[Segment, ...]
    n_components: int
    colors: dict[int, str] = field(default_factory=dict)
    # component index -> sorted arc labels
    component_arcs: dict[int, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        self._mate: dict[Dart, tuple[Dart, Segment, bool]] = {}
        for seg in self.segments:
            self._mate[seg.tail] = (seg.head, seg, True)
            self._mate[seg.head] = (seg.tail, seg, False)

    # -- graph view -------------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.crossings) + len(self.twists)

    def degree(self, v: int) -> int:
        return 4 if v < len(self.crossings) else 2

    def is_crossing(self, v: int) -> bool:
        return v < len(self.crossings)

    def vertex_sign(self, v: int) -> int:
        if v < len(self.crossings):
            return self.crossings[v].sign
        return self.twists[v - len(self.crossings)].sign

    def mate(self, dart: Dart) -> Dart:
        return self._mate[dart][0]

    def segment_at(self, dart: Dart) -> Segment:
        return self._mate[dart][1]

    def is_outgoing(self, dart: Dart) -> bool:
        """True if the strand leaves the vertex through this dart."""
        return self._mate[dart][2]

    def darts(self, v: int) -> list[Dart]:
        return [(v, s) for s in range(self.degree(v))]

    def neighbours(self, v: int) -> set[int]:
        return {self.mate(d)[0] for d in self.darts(v)} - {v}

    def component_of_dart(self, dart: Dart) -> int:
        return self.segment_at(dart).component

    def color_of(self, component: int, default: str) -> str:
        return self.colors.get(component, default)

    def __eq__(self, other):
        if not isinstance(other, LinkDiagram):
            return NotImplemented
        return (
            [c.arcs for c in self.crossings] == [c.arcs for c in other.crossings]
            and [(t.sign, t.arc) for t in self.twists] == [(t.sign, t.arc) for t in other.twists]
            and self.colors == other.colors
        )

    def __repr__(self):
        return (
            f"LinkDiagram(crossings={len(self.crossings)}, twists={len(self.twists)}, "
            f"components={self.n_components})"
        )

    def __str__(self):
        return render_pd(self)

    @classmethod
    def bare_unknot(cls, color: str | None = None) -> LinkDiagram:
        """A crossing-free loop, stored as a cancelling twist pair."""
        return build_diagram([], [(+1, 1), (-1, 1)], {1: color} if color else {})


# -- construction ----------------------------------------------------------

def _over_direction_from_labels(b: int, d: int) -> bool:
    """True if the over strand runs b -> d by label succession."""
    return d == b + 1 or b > d + 1


def build_diagram(
    xs: list[tuple[int, int, int, int]],
    ts: list[tuple[int, int]],
    colors: dict[int, str] | None = None,
    framings: dict[int, int] | None = None,
) -> LinkDiagram:
    colors = dict(colors or {})
    occurrences: dict[int, list[Dart]] = defaultdict(list)
    for v, arcs in enumerate(xs):
        for s, a in enumerate(arcs):
            if a <= 0:
                raise DiagramError(f"arc labels must be positive, got {a}")
            occurrences[a].append((v, s))
    for a, occ in occurrences.items():
        if len(occ) != 2:
            raise DiagramError(f"arc {a} used {len(occ)} times, expected 2")

    # Orient each arc: find (tail, head) darts.  Walk strands through
    # crossings (slot s continues to slot s+2).
    other_end = {}
    for a, (e1, e2) in occurrences.items():
        other_end[e1] = (a, e2)
        other_end[e2] = (a, e1)

    arc_dir: dict[int, tuple[Dart, Dart]] = {}
    visited: set[int] = set()
    components: list[list[int]] = []
    for start in sorted(occurrences):
        if start in visited:
            continue
        # traverse starting from occurrences[start][0] as the tail
        walk = []  # (arc, tail dart, head dart)
        tail = occurrences[start][0]
        a = start
        while True:
            head = other_end[tail][1]
            walk.append((a, tail, head))
            nxt_tail = (head[0], (head[1] + 2) % 4)
            a = other_end[nxt_tail][0]
            tail = nxt_tail
            if tail == occurrences[start][0]:
                break
        votes = set()
        for a_, t_, h_ in walk:
            # entering through slot 0 or leaving through slot 2 is forward
            if h_[1] == 0 or t_[1] == 2:
                votes.add(True)
            if h_[1] == 2 or t_[1] == 0:
                votes.add(False)
        if len(votes) == 2:
            raise DiagramError(f"inconsistent orientation around component containing arc {start}")
        if votes:
            forward = votes.pop()
        else:
            a_, t_, h_ = walk[0]
            v = h_[0]
            b, d = xs[v][1], xs[v][3]
            # h_ is where the strand enters crossing v along an over slot
            entering_b = h_[1] == 1
            forward = _over_direction_from_labels(b, d) == entering_b
        comp_arcs = []
        for a_, t_, h_ in walk:
            arc_dir[a_] = (t_, h_) if forward else (h_, t_)
            visited.add(a_)
            comp_arcs.append(a_)
        components.append(comp_arcs)

    # crossing signs: over strand entering at slot 3 (d -> b) is positive
    crossings = []
    for v, arcs in enumerate(xs):
        d_arc = arcs[3]
        t_, h_ = arc_dir[d_arc]
        if h_ == (v, 3):
            sign = +1
        else:
            t2, h2 = arc_dir[arcs[1]]
            if h2 != (v, 1):
                raise DiagramError(f"over strand at crossing {v} has no consistent direction")
            sign = -1
        crossings.append(Crossing(v, tuple(arcs), sign))

    # twist-only loops become their own components
    loop_labels = sorted({a for _, a in ts} - set(occurrences))
    for a in loop_labels:
        if a <= 0:
            raise DiagramError(f"arc labels must be positive, got {a}")
        components.append([a])

    components.sort(key=min)
    comp_index = {}
    for i, arcs in enumerate(components, start=1):
        for a in arcs:
            comp_index[a] = i

    ts = list(ts)
    for comp, k in (framings or {}).items():
        if not 1 <= comp <= len(components):
            raise DiagramError(f"framing for unknown component {comp}")
        first = min(components[comp - 1])
        ts.extend([(1 if k > 0 else -1, first)] * abs(k))
    for comp in colors:
        if not 1 <= comp <= len(components):
            raise DiagramError(f"colour for unknown component {comp}")

    nc = len(xs)
    twists = [TwistToken(nc + i, s, a) for i, (s, a) in enumerate(ts)]
    on_arc: dict[int, list[int]] = defaultdict(list)
    for tw in twists:
        on_arc[tw.arc].append(tw.id)

    segments: list[Segment] = []

    def add(arc, tail, head):
        segments.append(Segment(len(segments), arc, tail, head, comp_index[arc]))

    for a in sorted(occurrences):
        t_, h_ = arc_dir[a]
        chain = on_arc.get(a, [])
        prev = t_
        for tid in chain:
            add(a, prev, (tid, 0))
            prev = (tid, 1)
        add(a, prev, h_)
    for a in loop_labels:
        chain = on_arc[a]
        for i, tid in enumerate(chain):
            add(a, (tid, 1), (chain[(i + 1) % len(chain)], 0))

    comp_arcs = {i: tuple(sorted(arcs)) for i, arcs in enumerate(components, start=1)}
    return LinkDiagram(
        tuple(crossings), tuple(twists), tuple(segments), len(components), colors, comp_arcs
    )


_TOKEN = re.compile(r"([XT])\[([^\]]*)\]")


def parse_pd(text: str, check: bool = True) -> LinkDiagram:
    """Parse PD text into a validated :class:`LinkDiagram`."""
    xs: list[tuple[int, int, int, int]] = []
    ts: list[tuple[int, int]] = []
    colors: dict[int, str] = {}
    framings: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] == "component":
            if len(words) != 4 or words[2] != "color":
                raise DiagramError(f"line {lineno}: expected 'component i color NAME'")
            colors[_int(words[1], lineno)] = words[3]
            continue
        if words[0] == "framing":
            if len(words) != 3:
                raise DiagramError(f"line {lineno}: expected 'framing i k'")
            framings[_int(words[1], lineno)] = _int(words[2], lineno)
            continue
        pos = 0
        for m in _TOKEN.finditer(line):
            if line[pos : m.start()].strip(" ,\t"):
                raise DiagramError(f"line {lineno}: malformed token near {line[pos:m.start()]!r}")
            pos = m.end()
            kind, body = m.groups()
            fields = [f.strip() for f in body.split(",")]
            if kind == "X":
                if len(fields) != 4:
                    raise DiagramError(f"line {lineno}: X needs 4 arcs, got {body!r}")
                xs.append(tuple(_int(f, lineno) for f in fields))
            else:
                if len(fields) != 2 or fields[0] not in {"+", "-"}:
                    raise DiagramError(f"line {lineno}: malformed twist {m.group(0)!r}")
                ts.append((1 if fields[0] == "+" else -1, _int(fields[1], lineno)))
        if line[pos:].strip(" ,\t"):
            raise DiagramError(f"line {lineno}: malformed token near {line[pos:]!r}")
    d = build_diagram(xs, ts, colors, framings)
    if check:
        validate(d)
    return d


def _int(s: str, lineno: int) -> int:
    try:
        return int(s)
    except ValueError:
        raise DiagramError(f"line {lineno}: expected an integer, got {s!r}") from None


def render_pd(d: LinkDiagram) -> str:
    lines = [f"component {i} color {name}" for i, name in sorted(d.colors.items())]
    toks = [f"X[{a},{b},{c},{e}]" for a, b, c, e in (x.arcs for x in d.crossings)]
    toks += [f"T[{'+' if t.sign > 0 else '-'},{t.arc}]" for t in d.twists]
    if toks:
        lines.append(" ".join(toks))
    return "\n".join(lines) + "\n"


def validate(d: LinkDiagram) -> list[list[Dart]]:
    """Trace faces of the rotation system and check Euler's formula.

    Returns the faces as lists of darts.  Raises :class:`DiagramError` when
    ``V - E + F != 2`` per connected component.
    """
    faces = []
    seen: set[Dart] = set()
    for v in range(d.n_vertices):
        for dart in d.darts(v):
            if dart in seen:
                continue
            face = []
            cur = dart
            while cur not in seen:
                seen.add(cur)
                face.append(cur)
                w, t = d.mate(cur)
                cur = (w, (t - 1) % d.degree(w))
            faces.append(face)
    n_conn = len(connected_vertex_sets(d))
    euler = d.n_vertices - len(d.segments) + len(faces)
    if euler != 2 * n_conn:
        raise DiagramError(
            f"non-planar or inconsistent rotation system "
            f"(V={d.n_vertices}, E={len(d.segments)}, F={len(faces)}, components={n_conn})"
        )
    return faces


def connected_vertex_sets(d: LinkDiagram) -> list[list[int]]:
    seen: set[int] = set()
    out = []
    for v in range(d.n_vertices):
        if v in seen:
            continue
        stack, comp = [v], []
        seen.add(v)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in d.neighbours(x):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        out.append(sorted(comp))
    return out


def writhe(d: LinkDiagram) -> int:
    return sum(c.sign for c in d.crossings) + sum(t.sign for t in d.twists)


def _pd_lists(d: LinkDiagram):
    return [c.arcs for c in d.crossings], [(t.sign, t.arc) for t in d.twists]


def split_components(d: LinkDiagram) -> list[LinkDiagram]:
    """Connected components of the diagram graph as standalone diagrams."""
    out = []
    nc = len(d.crossings)
    for verts in connected_vertex_sets(d):
        xs = [d.crossings[v].arcs for v in verts if v < nc]
        ts = [(d.twists[v - nc].sign, d.twists[v - nc].arc) for v in verts if v >= nc]
        sub = build_diagram(xs, ts)
        colors = {}
        for i, arcs in sub.component_arcs.items():
            orig = next(c for c, arcs0 in d.component_arcs.items() if arcs[0] in arcs0)
            if orig in d.colors:
                colors[i] = d.colors[orig]
        sub.colors = colors
        out.append(sub)
    return out


def mirror(d: LinkDiagram) -> LinkDiagram:
    """Swap over and under at every crossing and flip every twist."""
    xs = []
    for c in d.crossings:
        a, b, cc, e = c.arcs
        # the new incoming under-strand is the old incoming over-strand
        xs.append((e, a, b, cc) if c.sign > 0 else (b, cc, e, a))
    ts = [(-t.sign, t.arc) for t in d.twists]
    return build_diagram(xs, ts, d.colors)

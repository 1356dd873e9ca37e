"""
Line-based text format for curves:

    start <edge> <offset>
    segment <duration> <speed> <edge>:<from>:<to> ...

Floats are written with ``repr`` so a curve reads back exactly.
"""

from apps.core.exceptions import InputError
from apps.metric_graph.graph import GraphPoint

from .curves import AdmissibleCurve, Segment
from .paths import Leg


def dumps(curve):
    lines = [f"start {curve.start.edge} {curve.start.offset!r}"]
    for segment in curve.segments:
        legs = " ".join(f"{leg.edge}:{leg.start!r}:{leg.end!r}" for leg in segment.legs)
        line = f"segment {segment.duration!r} {segment.speed!r}"
        lines.append(f"{line} {legs}" if legs else line)
    return "\n".join(lines) + "\n"


def loads(text, graph):
    start = None
    segments = []
    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0].startswith("#"):
            continue
        try:
            if tokens[0] == "start" and len(tokens) == 3 and start is None:
                start = GraphPoint(int(tokens[1]), float(tokens[2]))
            elif tokens[0] == "segment" and len(tokens) >= 3 and start is not None:
                legs = []
                for token in tokens[3:]:
                    edge, begin, end = token.split(":")
                    legs.append(Leg(int(edge), float(begin), float(end)))
                segments.append(Segment(float(tokens[1]), float(tokens[2]), tuple(legs)))
            else:
                raise ValueError(tokens[0])
        except ValueError as exc:
            raise InputError("Malformed curve line", line=number, text=raw.strip()) from exc
    if start is None:
        raise InputError("Curve text has no start line")
    return AdmissibleCurve(graph, start, segments)

"""
Factory classes for testing the curves app.
"""

import factory

from apps.metric_graph.factories import MetricGraphFactory
from apps.metric_graph.graph import GraphPoint

from .curves import AdmissibleCurve, Segment
from .paths import Leg


class ConstantCurveFactory(factory.Factory):
    class Meta:
        model = AdmissibleCurve

    graph = factory.SubFactory(MetricGraphFactory)
    start = GraphPoint(0, 0.5)
    segments = ()


class UnitEdgeCurveFactory(ConstantCurveFactory):
    """Runs along edge 0 from offset 0 at ``speed`` for ``duration``."""

    class Params:
        speed = 1.0
        duration = 1.0

    start = GraphPoint(0, 0.0)
    segments = factory.LazyAttribute(
        lambda o: (Segment(o.duration, o.speed, (Leg(0, 0.0, o.speed * o.duration),)),)
    )

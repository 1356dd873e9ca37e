"""
Verification records and reports.

A record passes iff its worst violation is within its tolerance, and carries
a replayable counterexample iff it fails.
"""

import logging
from dataclasses import dataclass, field

from apps.core.exceptions import InputError, InternalError
from apps.core.extended import format_extended
from apps.curves.serialization import dumps, loads
from apps.metric_graph.graph import GraphPoint

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ("check", "samples", "worst_violation", "tolerance", "pass")


@dataclass(frozen=True)
class Counterexample:
    """A curve from ``x`` and the times ``(t, h)`` at which an inequality failed."""

    curve: object
    x: GraphPoint
    t: float
    h: float

    def as_text(self):
        probe = f"probe {self.x.edge} {self.x.offset!r} {self.t!r} {self.h!r}\n"
        return dumps(self.curve) + probe

    @classmethod
    def parse(cls, text, graph):
        curve_lines = []
        probe = None
        for line in text.splitlines():
            if line.startswith("probe "):
                probe = line.split()
            else:
                curve_lines.append(line)
        if probe is None or len(probe) != 5:
            raise InputError("Counterexample has no probe line")
        try:
            x = GraphPoint(int(probe[1]), float(probe[2]))
            t, h = float(probe[3]), float(probe[4])
        except ValueError as exc:
            raise InputError("Malformed probe line", text=" ".join(probe)) from exc
        return cls(loads("\n".join(curve_lines), graph), x, t, h)


@dataclass(frozen=True)
class CheckRecord:
    check: str
    samples: int
    worst_violation: float
    tolerance: float
    counterexample: Counterexample = None

    def __post_init__(self):
        if self.passed and self.counterexample is not None:
            object.__setattr__(self, "counterexample", None)
        if not self.passed and self.counterexample is None:
            raise InternalError("A failing check must carry a counterexample", check=self.check)

    @property
    def passed(self):
        return self.worst_violation <= self.tolerance

    def as_row(self):
        return (
            self.check,
            str(self.samples),
            format_extended(self.worst_violation),
            format_extended(self.tolerance),
            "true" if self.passed else "false",
        )

    def as_text(self):
        return " ".join(f"{key}={value}" for key, value in zip(REPORT_COLUMNS, self.as_row()))


def merge_records(check, records, tolerance):
    """One record for ``check`` summing samples and keeping the worst violation."""
    records = list(records)
    if not records:
        return CheckRecord(check, 0, float("-inf"), tolerance)
    worst = max(records, key=lambda record: record.worst_violation)
    return CheckRecord(
        check,
        sum(record.samples for record in records),
        worst.worst_violation,
        tolerance,
        worst.counterexample,
    )


@dataclass
class VerificationReport:
    records: list = field(default_factory=list)

    def add(self, record):
        self.records.append(record)
        if record.passed:
            logger.info("Check %s passed (%s)", record.check, record.as_text())
        else:
            logger.warning("Check %s failed (%s)", record.check, record.as_text())
        return record

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, check):
        for record in self.records:
            if record.check == check:
                return record
        raise KeyError(check)

    @property
    def passed(self):
        return all(record.passed for record in self.records)

    @property
    def failures(self):
        return [record for record in self.records if not record.passed]

    def as_text(self):
        return "".join(record.as_text() + "\n" for record in self.records)

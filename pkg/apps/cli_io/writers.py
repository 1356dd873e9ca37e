"""
CSV and text outputs of the ``hj`` workflows.

Floats are written with ``repr`` and infinities as ``inf`` so that two runs
of the same scenario produce byte-identical files.
"""

import csv
import logging

import numpy as np

from apps.core.extended import format_extended
from apps.verification.report import REPORT_COLUMNS

logger = logging.getLogger(__name__)

VALUE_COLUMNS = ("node_id", "edge_id", "offset", "t", "U")
TRAJECTORY_COLUMNS = ("probe", "h", "edge_id", "offset", "speed")
TRANSFORM_COLUMNS = ("node_id", "v", "L", "roundtrip_error")
CONVERGENCE_COLUMNS = ("level", "dx", "dt", "max_error", "observed_order")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        count = 0
        for row in rows:
            writer.writerow(row)
            count += 1
    logger.info("Wrote %s (%d rows)", path, count)
    return path


def write_values(path, grid, sign=1.0):
    """One row per lattice node and grid time, layer by layer."""
    points = grid.lattice.points
    times = grid.times
    values = sign * np.asarray(grid.values)
    # no "-0.0" in the output
    values[values == 0.0] = 0.0

    def rows():
        for k, t in enumerate(times):
            for node, point in enumerate(points):
                yield (
                    node,
                    point.edge,
                    format_extended(point.offset),
                    format_extended(t),
                    format_extended(values[node, k]),
                )

    return _write_csv(path, VALUE_COLUMNS, rows())


def write_trajectories(path, trajectories, dt):
    """Positions of every ``(curve, t)`` pair at the grid times ``0, dt, ..., t``."""

    def rows():
        for probe, (curve, t) in enumerate(trajectories):
            steps = int(round(t / dt))
            for j in range(steps + 1):
                h = j * dt
                point = curve.evaluate(h)
                yield (
                    probe,
                    format_extended(h),
                    point.edge,
                    format_extended(point.offset),
                    format_extended(curve.speed_at(h)),
                )

    return _write_csv(path, TRAJECTORY_COLUMNS, rows())


def write_transform(path, rows):
    return _write_csv(
        path,
        TRANSFORM_COLUMNS,
        (
            (node, format_extended(v), format_extended(cost), format_extended(error))
            for node, v, cost, error in rows
        ),
    )


def write_convergence(path, table):
    return _write_csv(
        path,
        CONVERGENCE_COLUMNS,
        (
            (
                row.level,
                format_extended(row.dx),
                format_extended(row.dt),
                format_extended(row.max_error),
                "" if row.observed_order is None else format_extended(row.observed_order),
            )
            for row in table.rows
        ),
    )


def write_report(directory, report):
    """``report.txt``, ``report.csv`` and one counterexample file per failed check."""
    (directory / "report.txt").write_text(report.as_text())
    _write_csv(directory / "report.csv", REPORT_COLUMNS, (record.as_row() for record in report))
    written = []
    for record in report.failures:
        target = directory / f"counterexample_{record.check}.txt"
        target.write_text(record.counterexample.as_text())
        written.append(target)
        logger.warning("Counterexample for %s written to %s", record.check, target)
    return written

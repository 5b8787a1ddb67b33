"""Evaluation measures: waypoint distance, stability detection, graph diffs.

All functions here are read-only over a gas or its snapshot and safe to call
between steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from navgas.gng import Gas, Position
from navgas.traces import Sample

METRICS_HEADER = "tick,sim_time,node_count,cum_distance"


def _node_array(gas: Gas) -> np.ndarray:
    return np.array([[n.x, n.y, n.z] for n in gas.nodes.values()], dtype=float)


def cumulated_distance(waypoints: Sequence[Position], gas: Gas) -> float:
    """Sum over waypoints of the distance to the nearest gas node."""
    if not gas.nodes:
        raise ValueError("cumulated_distance is undefined for an empty gas")
    if not waypoints:
        raise ValueError("cumulated_distance needs at least one waypoint")
    nodes = _node_array(gas)
    pts = np.asarray(waypoints, dtype=float)
    diff = pts[:, None, :] - nodes[None, :, :]
    dists = np.sqrt((diff * diff).sum(axis=2))
    return float(dists.min(axis=1).sum())


@dataclass(slots=True)
class MetricsRecord:
    tick: int
    sim_time: float
    node_count: int
    cum_distance: float


@dataclass(slots=True)
class MetricsSeries:
    """Time series of evaluation records with strictly increasing ticks."""

    records: list[MetricsRecord] = field(default_factory=list)

    def append(self, record: MetricsRecord) -> None:
        if self.records and record.tick <= self.records[-1].tick:
            raise ValueError(
                f"ticks must increase strictly, got {record.tick} after {self.records[-1].tick}"
            )
        self.records.append(record)

    def to_csv(self) -> str:
        lines = [METRICS_HEADER]
        for r in self.records:
            lines.append(f"{r.tick},{r.sim_time!r},{r.node_count},{r.cum_distance!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "MetricsSeries":
        lines = text.splitlines()
        if not lines or lines[0] != METRICS_HEADER:
            raise ValueError(f"expected header {METRICS_HEADER!r}")
        series = cls()
        for lineno, line in enumerate(lines[1:], start=2):
            parts = line.split(",")
            if len(parts) != 4:
                raise ValueError(f"line {lineno}: expected 4 fields")
            series.append(
                MetricsRecord(int(parts[0]), float(parts[1]), int(parts[2]), float(parts[3]))
            )
        return series


class MetricsRecorder:
    """feed() observer that appends one record per invocation.

    Use as ``feed(gas, trace, observer=recorder, stride=50)``.
    """

    def __init__(self, waypoints: Sequence[Position]):
        self.waypoints = list(waypoints)
        self.series = MetricsSeries()

    def __call__(self, gas: Gas, sample: Sample) -> None:
        self.series.append(
            MetricsRecord(gas.tick, sample.t, len(gas.nodes), cumulated_distance(self.waypoints, gas))
        )


def detect_stable(series: MetricsSeries, window: int, eps_rel: float) -> int | None:
    """Earliest tick whose trailing window looks settled, or None.

    A record at tick T qualifies when every record with tick in
    [T - window + 1, T] has the same node_count, the cum_distance spread
    (max - min) over those records is at most eps_rel times their mean, the
    window holds at least two records, and it does not reach back before the
    series start.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1 tick, got {window}")
    records = series.records
    if not records:
        return None
    first_tick = records[0].tick
    lo = 0
    for hi, rec in enumerate(records):
        t = rec.tick
        if t - window + 1 < first_tick:
            continue
        while records[lo].tick < t - window + 1:
            lo += 1
        win = records[lo : hi + 1]
        if len(win) < 2:
            continue
        counts = {r.node_count for r in win}
        if len(counts) != 1:
            continue
        values = [r.cum_distance for r in win]
        mean = sum(values) / len(values)
        if max(values) - min(values) <= eps_rel * mean:
            return t
    return None


def compare_graphs(a: Gas, b: Gas) -> dict[str, float | int]:
    """Node counts plus the symmetric sum of nearest-neighbor distances."""
    if not a.nodes or not b.nodes:
        raise ValueError("compare_graphs needs two non-empty graphs")
    pa, pb = _node_array(a), _node_array(b)
    diff = pa[:, None, :] - pb[None, :, :]
    dists = np.sqrt((diff * diff).sum(axis=2))
    chamfer = float(dists.min(axis=1).sum() + dists.min(axis=0).sum())
    return {"nodes_a": len(a.nodes), "nodes_b": len(b.nodes), "chamfer": chamfer}


def obstacle_crossing_edges(gas: Gas, world) -> list[tuple[int, int, str]]:
    """Edges whose straight segment between endpoints crosses blocked space.

    ``world`` must expose ``segment_blocked(p, q) -> bool`` over (x, y)
    positions, as the built-in maps do.
    """
    crossing = []
    for key in sorted(gas.edges):
        a, b, _ = key
        na, nb = gas.nodes[a], gas.nodes[b]
        if world.segment_blocked((na.x, na.y), (nb.x, nb.y)):
            crossing.append(key)
    return crossing

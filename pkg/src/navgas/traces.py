"""Demonstrator trace ingest, resampling, merging, and gas feeding.

A trace file is one record per line, `t demonstrator x y z`, delimited by
whitespace or commas, with `#` starting a comment. Timestamps are seconds.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from navgas.gng import Gas, Position


class MalformedLineWarning(UserWarning):
    """Some trace lines were skipped during parsing."""


@dataclass(frozen=True, slots=True)
class Sample:
    """One observed demonstrator position at time ``t`` seconds."""

    t: float
    demonstrator: int
    pos: Position


@dataclass(frozen=True, slots=True)
class Trace:
    """Time-sorted samples plus an optional native-rate hint in Hz."""

    samples: tuple[Sample, ...]
    rate: float | None = None

    def __len__(self) -> int:
        return len(self.samples)

    def demonstrators(self) -> list[int]:
        return sorted({s.demonstrator for s in self.samples})

    def by_demonstrator(self) -> dict[int, list[Sample]]:
        split: dict[int, list[Sample]] = {}
        for s in self.samples:
            split.setdefault(s.demonstrator, []).append(s)
        return split


def _sorted_trace(samples: Iterable[Sample], rate: float | None) -> Trace:
    ordered = sorted(samples, key=lambda s: (s.t, s.demonstrator))
    return Trace(tuple(ordered), rate)


def parse_trace(text: str, rate: float | None = None) -> Trace:
    """Parse trace text, skipping malformed lines with a warning.

    A line is malformed if it does not have exactly five numeric fields,
    if the timestamp is negative or non-finite, if the demonstrator id is
    not a non-negative integer, or if a coordinate is non-finite.
    """
    samples: list[Sample] = []
    bad = 0
    first_bad = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].replace(",", " ").strip()
        if not line:
            continue
        parts = line.split()
        try:
            if len(parts) != 5:
                raise ValueError
            t = float(parts[0])
            dem = int(parts[1])
            x, y, z = float(parts[2]), float(parts[3]), float(parts[4])
            if dem < 0 or t < 0 or not math.isfinite(t):
                raise ValueError
            if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
                raise ValueError
        except ValueError:
            bad += 1
            first_bad = first_bad or lineno
            continue
        samples.append(Sample(t, dem, (x, y, z)))
    if bad:
        warnings.warn(
            f"skipped {bad} malformed trace line(s), first at line {first_bad}",
            MalformedLineWarning,
            stacklevel=2,
        )
    return _sorted_trace(samples, rate)


def read_trace(path: str | Path, rate: float | None = None) -> Trace:
    """Parse a trace file. I/O failures propagate as OSError."""
    return parse_trace(Path(path).read_text(encoding="utf-8"), rate)


def format_trace(trace: Trace) -> str:
    """Render a trace in the line-record format, floats at full precision."""
    lines = [
        f"{s.t!r} {s.demonstrator} {s.pos[0]!r} {s.pos[1]!r} {s.pos[2]!r}"
        for s in trace.samples
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def write_trace(trace: Trace, path: str | Path) -> None:
    Path(path).write_text(format_trace(trace), encoding="utf-8")


def resample(trace: Trace, rate: float) -> Trace:
    """Zero-order-hold resampling onto per-demonstrator uniform grids.

    For each demonstrator the grid runs t0, t0 + 1/rate, ... starting at its
    first sample; each grid time takes the latest sample at or before it.
    Grid times past the demonstrator's last sample are not emitted.
    """
    if not (rate > 0 and math.isfinite(rate)):
        raise ValueError(f"rate must be a positive finite Hz value, got {rate}")
    out: list[Sample] = []
    for dem, samples in trace.by_demonstrator().items():
        t0 = samples[0].t
        t_last = samples[-1].t
        idx = 0
        k = 0
        while True:
            g = t0 + k / rate
            if g > t_last:
                break
            while idx + 1 < len(samples) and samples[idx + 1].t <= g:
                idx += 1
            out.append(Sample(g, dem, samples[idx].pos))
            k += 1
    return _sorted_trace(out, rate)


def merge(traces: Sequence[Trace], remap: bool = False) -> Trace:
    """Interleave traces into one, sorted by (t, demonstrator).

    Demonstrator ids must be disjoint across inputs; with ``remap`` each
    (input index, original id) pair gets a fresh consecutive id instead.
    """
    if remap:
        mapping: dict[tuple[int, int], int] = {}
        for i, tr in enumerate(traces):
            for dem in tr.demonstrators():
                mapping[(i, dem)] = len(mapping)
        out = [
            Sample(s.t, mapping[(i, s.demonstrator)], s.pos)
            for i, tr in enumerate(traces)
            for s in tr.samples
        ]
    else:
        seen: dict[int, int] = {}
        for i, tr in enumerate(traces):
            for dem in tr.demonstrators():
                if dem in seen:
                    raise ValueError(
                        f"demonstrator id {dem} appears in traces {seen[dem]} and {i}; "
                        "pass remap=True to renumber"
                    )
                seen[dem] = i
        out = [s for tr in traces for s in tr.samples]
    rates = {tr.rate for tr in traces if tr.rate is not None}
    rate = rates.pop() if len(rates) == 1 else None
    return _sorted_trace(out, rate)


def feed(
    gas: Gas,
    trace: Trace,
    observer: Callable[[Gas, Sample], None] | None = None,
    stride: int = 1,
) -> int:
    """Step the gas through every sample in order.

    Invokes ``observer(gas, sample)`` after each accepted step whose
    resulting tick is a multiple of ``stride``. Samples the gas rejects
    (non-finite positions) are skipped; returns the skip count.
    """
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    skipped = 0
    for sample in trace.samples:
        try:
            gas.step(sample.pos, sample.demonstrator)
        except ValueError:
            skipped += 1
            continue
        if observer is not None and gas.tick % stride == 0:
            observer(gas, sample)
    return skipped

"""Shared test helpers."""

from __future__ import annotations

import sys
from dataclasses import fields
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from navgas.gasdoc import deserialize
from navgas.gng import Gas, Params


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance suite's per-criterion verdict lines.

    Plain prints inside passing tests stay captured; this repeats them where
    they are always visible, at the end of the run.
    """
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.line(line)


def doc_text(
    params: Params | None = None,
    nodes: list[tuple] = (),
    edges: list[tuple] = (),
    last_winner: dict[int, int] | None = None,
    tick: int = 0,
    next_id: int | None = None,
) -> str:
    """Assemble a gas document from literal tuples.

    nodes: (id, x, y, z, error); edges: (a, b, kind, age).
    """
    params = params or Params()
    lines = ["gasdoc 1"]
    for f in fields(Params):
        value = getattr(params, f.name)
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        lines.append(f"param {f.name} {text}")
    lines.append(f"tick {tick}")
    if next_id is None:
        next_id = max((n[0] for n in nodes), default=-1) + 1
    lines.append(f"nextid {next_id}")
    for n in nodes:
        lines.append(f"node {n[0]} {float(n[1])!r} {float(n[2])!r} {float(n[3])!r} {float(n[4])!r}")
    for a, b, kind, age in edges:
        lines.append(f"edge {a} {b} {kind} {age}")
    for dem in sorted(last_winner or {}):
        lines.append(f"lastwinner {dem} {last_winner[dem]}")
    return "\n".join(lines) + "\n"


def make_gas(
    nodes: list[tuple] = (),
    edges: list[tuple] = (),
    params: Params | None = None,
    **kwargs,
) -> Gas:
    """Build a gas with the given literal nodes and edges."""
    return deserialize(doc_text(params=params, nodes=nodes, edges=edges, **kwargs))

"""Canonical text serialization for a gas.

The document is line oriented and versioned. Equal graphs serialize
byte-identically: params appear in a fixed order, nodes sorted by id, edges
sorted by (a, b, kind), per-demonstrator winner memory sorted by
demonstrator id. Floats are written with repr() so a round trip restores the
exact bit pattern.

Layout::

    gasdoc 1
    param winner_attraction 0.03
    ... one line per parameter, declaration order ...
    tick 42
    nextid 7
    node <id> <x> <y> <z> <error>
    edge <a> <b> <kind> <age>
    lastwinner <demonstrator> <node id>
"""

from __future__ import annotations

import math
from dataclasses import fields
from pathlib import Path

from navgas.gng import (
    EDGE_KINDS,
    ConfigurationError,
    Gas,
    Node,
    Params,
    edge_key,
)

HEADER = "gasdoc 1"

_PARAM_NAMES = tuple(f.name for f in fields(Params))
_FLOAT_PARAMS = {"winner_attraction", "neighbor_attraction", "error_decay", "max_error"}
_BOOL_PARAMS = {"remove_isolated_nodes"}


class GasDocumentError(ValueError):
    """A gas document failed to parse or validate.

    Attributes:
        line: 1-based line number the error was detected on, if known.
        field: name of the offending field, if known.
    """

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        prefix = f"line {line}: " if line is not None else ""
        if field is not None:
            prefix += f"{field}: "
        super().__init__(prefix + message)
        self.line = line
        self.field = field


def _format_param(name: str, value: object) -> str:
    if name in _BOOL_PARAMS:
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def serialize(gas: Gas) -> str:
    """Render ``gas`` as its canonical text document."""
    lines = [HEADER]
    for name in _PARAM_NAMES:
        lines.append(f"param {name} {_format_param(name, getattr(gas.params, name))}")
    lines.append(f"tick {gas.tick}")
    lines.append(f"nextid {gas.next_id}")
    for node in sorted(gas.nodes.values(), key=lambda n: n.id):
        lines.append(f"node {node.id} {node.x!r} {node.y!r} {node.z!r} {node.error!r}")
    for (a, b, kind), age in sorted(gas.edges.items()):
        lines.append(f"edge {a} {b} {kind} {age}")
    for dem in sorted(gas.last_winner):
        lines.append(f"lastwinner {dem} {gas.last_winner[dem]}")
    return "\n".join(lines) + "\n"


def _parse_int(text: str, lineno: int, field: str, minimum: int | None = None) -> int:
    try:
        value = int(text)
    except ValueError:
        raise GasDocumentError(f"expected integer, got {text!r}", lineno, field) from None
    if minimum is not None and value < minimum:
        raise GasDocumentError(f"must be >= {minimum}, got {value}", lineno, field)
    return value


def _parse_float(text: str, lineno: int, field: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise GasDocumentError(f"expected number, got {text!r}", lineno, field) from None
    if not math.isfinite(value):
        raise GasDocumentError(f"must be finite, got {text}", lineno, field)
    return value


def deserialize(doc: str) -> Gas:
    """Parse a gas document, validating structure and invariants.

    Accepts node/edge/lastwinner records in any order; duplicates, dangling
    references, out-of-range ages and malformed lines raise
    :class:`GasDocumentError` carrying the line number and field.
    """
    lines = doc.splitlines()
    if not lines or lines[0] != HEADER:
        got = lines[0] if lines else "<empty document>"
        raise GasDocumentError(f"expected header {HEADER!r}, got {got!r}", 1, "header")

    param_values: dict[str, object] = {}
    tick: int | None = None
    next_id: int | None = None
    nodes: dict[int, Node] = {}
    edges: dict[tuple[int, int, str], int] = {}
    edge_lines: dict[tuple[int, int, str], int] = {}
    last_winner: dict[int, int] = {}

    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(" ")
        record = parts[0]
        if record == "param":
            if len(parts) != 3:
                raise GasDocumentError("param line needs name and value", lineno, "param")
            name, raw = parts[1], parts[2]
            if name not in _PARAM_NAMES:
                raise GasDocumentError(f"unknown parameter {name!r}", lineno, name)
            if name in param_values:
                raise GasDocumentError(f"duplicate parameter {name!r}", lineno, name)
            if name in _FLOAT_PARAMS:
                param_values[name] = _parse_float(raw, lineno, name)
            elif name in _BOOL_PARAMS:
                if raw not in ("true", "false"):
                    raise GasDocumentError(f"expected true/false, got {raw!r}", lineno, name)
                param_values[name] = raw == "true"
            elif name == "max_age":
                param_values[name] = _parse_int(raw, lineno, name)
            else:
                param_values[name] = raw
        elif record == "tick":
            if tick is not None:
                raise GasDocumentError("duplicate tick line", lineno, "tick")
            if len(parts) != 2:
                raise GasDocumentError("tick line needs one value", lineno, "tick")
            tick = _parse_int(parts[1], lineno, "tick", minimum=0)
        elif record == "nextid":
            if next_id is not None:
                raise GasDocumentError("duplicate nextid line", lineno, "nextid")
            if len(parts) != 2:
                raise GasDocumentError("nextid line needs one value", lineno, "nextid")
            next_id = _parse_int(parts[1], lineno, "nextid", minimum=0)
        elif record == "node":
            if len(parts) != 6:
                raise GasDocumentError("node line needs id, x, y, z, error", lineno, "node")
            nid = _parse_int(parts[1], lineno, "node id", minimum=0)
            if nid in nodes:
                raise GasDocumentError(f"duplicate node id {nid}", lineno, "node id")
            x = _parse_float(parts[2], lineno, "x")
            y = _parse_float(parts[3], lineno, "y")
            z = _parse_float(parts[4], lineno, "z")
            error = _parse_float(parts[5], lineno, "error")
            if error < 0.0:
                raise GasDocumentError(f"error must be >= 0, got {error}", lineno, "error")
            nodes[nid] = Node(nid, x, y, z, error)
        elif record == "edge":
            if len(parts) != 5:
                raise GasDocumentError("edge line needs a, b, kind, age", lineno, "edge")
            a = _parse_int(parts[1], lineno, "edge a", minimum=0)
            b = _parse_int(parts[2], lineno, "edge b", minimum=0)
            kind = parts[3]
            if kind not in EDGE_KINDS:
                raise GasDocumentError(f"unknown edge kind {kind!r}", lineno, "kind")
            if a == b:
                raise GasDocumentError(f"self-edge on node {a}", lineno, "edge")
            age = _parse_int(parts[4], lineno, "age", minimum=0)
            key = edge_key(a, b, kind)
            if key in edges:
                raise GasDocumentError(f"duplicate edge {key}", lineno, "edge")
            edges[key] = age
            edge_lines[key] = lineno
        elif record == "lastwinner":
            if len(parts) != 3:
                raise GasDocumentError(
                    "lastwinner line needs demonstrator and node id", lineno, "lastwinner"
                )
            dem = _parse_int(parts[1], lineno, "demonstrator", minimum=0)
            if dem in last_winner:
                raise GasDocumentError(f"duplicate lastwinner for demonstrator {dem}", lineno, "lastwinner")
            last_winner[dem] = _parse_int(parts[2], lineno, "lastwinner node", minimum=0)
        elif record == "":
            raise GasDocumentError("blank line not allowed", lineno, None)
        else:
            raise GasDocumentError(f"unknown record type {record!r}", lineno, None)

    missing = [name for name in _PARAM_NAMES if name not in param_values]
    if missing:
        raise GasDocumentError(f"missing parameters: {', '.join(missing)}", None, "param")
    if tick is None:
        raise GasDocumentError("missing tick line", None, "tick")
    if next_id is None:
        raise GasDocumentError("missing nextid line", None, "nextid")

    try:
        params = Params(**param_values)  # type: ignore[arg-type]
        params.validate()
    except ConfigurationError as exc:
        raise GasDocumentError(str(exc), None, "param") from None

    if nodes and next_id <= max(nodes):
        raise GasDocumentError(
            f"nextid {next_id} must exceed the largest node id {max(nodes)}", None, "nextid"
        )
    for key, age in edges.items():
        lineno = edge_lines[key]
        for end in key[:2]:
            if end not in nodes:
                raise GasDocumentError(f"edge references missing node {end}", lineno, "edge")
        if age > params.max_age:
            raise GasDocumentError(
                f"edge age {age} exceeds max_age {params.max_age}", lineno, "age"
            )
    for nid in last_winner.values():
        if nid not in nodes:
            raise GasDocumentError(
                f"lastwinner references missing node {nid}", None, "lastwinner"
            )

    gas = Gas(params)
    gas.tick = tick
    gas._next_id = next_id
    for nid in sorted(nodes):
        gas.nodes[nid] = nodes[nid]
        gas._incident[nid] = set()
    for key, age in edges.items():
        gas.edges[key] = age
        gas._incident[key[0]].add(key)
        gas._incident[key[1]].add(key)
    gas.last_winner = dict(sorted(last_winner.items()))
    return gas


def write_gas(gas: Gas, path: str | Path) -> None:
    """Serialize ``gas`` to a file."""
    Path(path).write_text(serialize(gas), encoding="utf-8")


def read_gas(path: str | Path) -> Gas:
    """Load a gas document from a file."""
    return deserialize(Path(path).read_text(encoding="utf-8"))

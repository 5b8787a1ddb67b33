"""Live demonstration sessions over a websocket.

A client opens a session on a builtin map, streams steered positions, and
receives graph snapshots while the gas learns online. The wire protocol is
JSON text frames, each carrying a ``type`` field:

    client -> server
        {"type": "open", "map": "open_room"}          create a session
        {"type": "open", "session": "s1"}             join an existing one
        {"type": "input", "demonstrator": 0, "x": .., "y": ..}
        {"type": "params", "max_age": 50, ...}        swap learning params
    server -> client
        {"type": "open", "session", "map", "params"}  ack, map as text grid
        {"type": "graph", "nodes", "edges", "tick", "node_count", ...}
        {"type": "params", ...}                       effective params ack
        {"type": "error", "message"}

Positions are 2-D on the wire (z = 0). Session state is mutated only from
the server's single event loop, and a snapshot is taken synchronously right
after the step that produced it, so clients never observe a half-applied
step. Inputs from one connection are applied in arrival order.

The core classes below are plain synchronous Python with an injectable
clock; the asyncio/FastAPI layer at the bottom only moves frames.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, replace
from typing import Any, Callable

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .gng import ConfigurationError, Gas, GasSnapshot, Params, new_gas
from .worlds import WorldMap, builtin_map

Clock = Callable[[], float]

DEFAULT_MAX_HZ = 100.0
DEFAULT_INTERVAL = 0.1


def error_frame(message: str) -> dict[str, Any]:
    return {"type": "error", "message": message}


class RateLimiter:
    """Per-demonstrator minimum-interval cap; refused inputs are counted."""

    def __init__(self, max_hz: float, clock: Clock):
        if not (max_hz > 0 and math.isfinite(max_hz)):
            raise ValueError(f"max_hz must be positive and finite, got {max_hz}")
        self.min_interval = 1.0 / max_hz
        self._clock = clock
        self._last: dict[int, float] = {}
        self.drops: dict[int, int] = {}

    def allow(self, demonstrator: int) -> bool:
        now = self._clock()
        last = self._last.get(demonstrator)
        if last is not None and now - last < self.min_interval:
            self.drops[demonstrator] = self.drops.get(demonstrator, 0) + 1
            return False
        self._last[demonstrator] = now
        return True

    @property
    def total_drops(self) -> int:
        return sum(self.drops.values())


class Session:
    """One live gas plus its map, rate limiter, and lifecycle flag."""

    def __init__(
        self,
        session_id: str,
        world: WorldMap,
        params: Params,
        clock: Clock,
        max_hz: float = DEFAULT_MAX_HZ,
    ):
        self.id = session_id
        self.world = world
        self.gas: Gas = new_gas(params)
        self.limiter = RateLimiter(max_hz, clock)
        self.closed = False
        self.connections = 0

    def handle_input(self, demonstrator: int, x: float, y: float) -> dict[str, Any] | None:
        """Apply one steered position.

        Returns an error frame on rejection, None when the input was applied
        or silently dropped by the rate cap.
        """
        if self.closed:
            return error_frame(f"session {self.id} is closed")
        if not isinstance(demonstrator, int) or demonstrator < 0:
            return error_frame("rejected input: demonstrator must be a non-negative integer")
        if not (isinstance(x, (int, float)) and isinstance(y, (int, float))):
            return error_frame("rejected input: x and y must be numbers")
        if not (math.isfinite(x) and math.isfinite(y)):
            return error_frame("rejected input: non-finite position")
        if not self.limiter.allow(demonstrator):
            return None
        self.gas.step((float(x), float(y), 0.0), demonstrator)
        return None

    def set_params(self, fields: dict[str, Any]) -> dict[str, Any] | None:
        """Swap learning parameters; error frame when a field is bad."""
        known = {f for f in Params.__dataclass_fields__}
        unknown = sorted(set(fields) - known)
        if unknown:
            return error_frame(f"unknown params field(s): {', '.join(unknown)}")
        try:
            swapped = replace(self.gas.params, **fields)
            swapped.validate()
        except (ConfigurationError, TypeError) as exc:
            return error_frame(f"bad params: {exc}")
        self.gas.params = swapped
        return None

    def params_frame(self) -> dict[str, Any]:
        return {"type": "params", **asdict(self.gas.params)}

    def snapshot(self) -> GasSnapshot:
        return self.gas.snapshot()

    def close(self) -> None:
        self.closed = True


class Subscriber:
    """Snapshot cadence for one consumer: at most one frame per interval,
    and unchanged ticks are never resent."""

    def __init__(self, interval: float, clock: Clock):
        if not (interval >= 0 and math.isfinite(interval)):
            raise ValueError(f"interval must be >= 0 and finite, got {interval}")
        self.interval = interval
        self._clock = clock
        self._last_tick = -1
        self._last_publish = -math.inf

    def due(self, snapshot: GasSnapshot) -> bool:
        if snapshot.tick == self._last_tick:
            return False
        return self._clock() - self._last_publish >= self.interval

    def mark(self, snapshot: GasSnapshot) -> None:
        self._last_tick = snapshot.tick
        self._last_publish = self._clock()

    @property
    def first(self) -> bool:
        return self._last_tick < 0


def graph_frame(snapshot: GasSnapshot, dropped: int, delta: bool) -> dict[str, Any]:
    return {
        "type": "graph",
        "tick": snapshot.tick,
        "node_count": snapshot.node_count,
        "nodes": [[i, x, y, error] for (i, x, y, _z, error) in snapshot.nodes],
        "edges": [[a, b, kind, age] for (a, b, kind, age) in snapshot.edges],
        "dropped": dropped,
        "delta": delta,
    }


class SessionManager:
    """Creates and looks up sessions; ids are distinct per manager."""

    def __init__(self, clock: Clock = time.monotonic):
        self.clock = clock
        self.sessions: dict[str, Session] = {}
        self._counter = 0

    def open(
        self,
        map_name: str,
        params_fields: dict[str, Any] | None = None,
        max_hz: float = DEFAULT_MAX_HZ,
    ) -> Session:
        world = builtin_map(map_name)
        params = Params(**(params_fields or {}))
        self._counter += 1
        session = Session(f"s{self._counter}", world, params, self.clock, max_hz)
        self.sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        session = self.sessions.get(session_id)
        if session is None or session.closed:
            return None
        return session

    def attach(self, session: Session) -> None:
        session.connections += 1

    def detach(self, session: Session) -> None:
        session.connections -= 1
        if session.connections <= 0:
            session.close()


def build_app(clock: Clock = time.monotonic) -> FastAPI:
    """FastAPI app with the websocket endpoint at /ws.

    The clock parameter exists so tests can drive rate limiting and
    snapshot cadence deterministically.
    """
    app = FastAPI(title="navgas live service")
    manager = SessionManager(clock=clock)
    app.state.manager = manager

    # session id -> list of (websocket, subscriber) pairs
    subscribers: dict[str, list[tuple[WebSocket, Subscriber]]] = {}

    async def publish(session: Session) -> None:
        snapshot = session.snapshot()
        dropped = session.limiter.total_drops
        for ws, sub in list(subscribers.get(session.id, [])):
            if sub.due(snapshot):
                frame = graph_frame(snapshot, dropped, delta=not sub.first)
                sub.mark(snapshot)
                await ws.send_json(frame)

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        session: Session | None = None
        try:
            while True:
                try:
                    frame = await ws.receive_json()
                except ValueError:
                    await ws.send_json(error_frame("malformed frame: not valid JSON"))
                    continue
                if not isinstance(frame, dict):
                    await ws.send_json(error_frame("malformed frame: expected an object"))
                    continue
                ftype = frame.get("type")

                if ftype == "open":
                    if session is not None:
                        await ws.send_json(error_frame("session already open on this connection"))
                        continue
                    try:
                        # validate the subscriber first so a bad interval
                        # cannot leave behind a session nobody is attached to
                        subscriber = Subscriber(
                            float(frame.get("interval", DEFAULT_INTERVAL)), manager.clock
                        )
                        if "session" in frame:
                            session = manager.get(str(frame["session"]))
                            if session is None:
                                await ws.send_json(
                                    error_frame(f"unknown or closed session {frame['session']!r}")
                                )
                                continue
                        else:
                            session = manager.open(
                                str(frame.get("map", "")),
                                frame.get("params"),
                                float(frame.get("max_hz", DEFAULT_MAX_HZ)),
                            )
                    except (ValueError, TypeError, ConfigurationError) as exc:
                        session = None
                        await ws.send_json(error_frame(str(exc)))
                        continue
                    manager.attach(session)
                    subscribers.setdefault(session.id, []).append((ws, subscriber))
                    await ws.send_json(
                        {
                            "type": "open",
                            "session": session.id,
                            "map": session.world.to_text(),
                            "params": asdict(session.gas.params),
                        }
                    )
                    # initial full snapshot so the client can draw immediately
                    snapshot = session.snapshot()
                    frame_out = graph_frame(snapshot, session.limiter.total_drops, delta=False)
                    subscriber.mark(snapshot)
                    await ws.send_json(frame_out)
                elif session is None:
                    await ws.send_json(error_frame("open a session first"))
                elif ftype == "input":
                    reply = session.handle_input(
                        frame.get("demonstrator", 0), frame.get("x"), frame.get("y")
                    )
                    if reply is not None:
                        await ws.send_json(reply)
                    else:
                        await publish(session)
                elif ftype == "params":
                    fields = {k: v for k, v in frame.items() if k != "type"}
                    reply = session.set_params(fields)
                    await ws.send_json(reply if reply is not None else session.params_frame())
                else:
                    await ws.send_json(error_frame(f"unknown frame type {ftype!r}"))
        except WebSocketDisconnect:
            pass
        finally:
            if session is not None:
                pairs = subscribers.get(session.id, [])
                subscribers[session.id] = [(w, s) for (w, s) in pairs if w is not ws]
                if not subscribers[session.id]:
                    del subscribers[session.id]
                manager.detach(session)

    return app

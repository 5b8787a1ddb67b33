"""Growing neural gas with error-threshold node insertion.

The gas learns a waypoint graph from a stream of demonstrator positions.
Unlike the classic interval-based variant, a node is inserted whenever the
winning node's accumulated error exceeds ``max_error``; a constant per-input
error decay then keeps the graph from growing forever, so no stopping
criterion is needed.

Edges carry a flavor tag: ``proximity`` edges link the two nodes nearest to
an input, ``trajectory`` edges link consecutive winners of one demonstrator
and therefore encode traversability rather than closeness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

PROXIMITY = "proximity"
TRAJECTORY = "trajectory"

EdgeKind = Literal["proximity", "trajectory"]
EdgeMode = Literal["proximity", "trajectory", "both"]
NeighborRule = Literal["input", "second_offset"]

#: Undirected edge identity: (low node id, high node id, kind).
EdgeKey = tuple[int, int, str]

#: A point in world units. All components must be finite.
Position = tuple[float, float, float]

EDGE_KINDS = (PROXIMITY, TRAJECTORY)
EDGE_MODES = (PROXIMITY, TRAJECTORY, "both")


class ConfigurationError(ValueError):
    """A gas parameter violates its documented bound."""


@dataclass(frozen=True, slots=True)
class Params:
    """Learning parameters of the gas.

    Attributes:
        winner_attraction: Fraction of the input-to-winner vector the winner
            moves per input. Must be in (0, 1].
        neighbor_attraction: Fraction of the input-to-neighbor vector each of
            the winner's graph neighbors moves per input. Must be in [0, 1].
        error_decay: Amount subtracted from every node's error per input,
            in world units. Must be > 0.
        max_error: Accumulated-error threshold above which a node is inserted
            next to the winner, in world units. Must be > 0.
        max_age: Edges strictly older than this many inputs are deleted.
            Must be >= 1.
        edge_mode: Which edge flavors the step maintains: ``proximity`` for
            the classic nearest-pair edges, ``trajectory`` for
            consecutive-winner edges, or ``both``.
        remove_isolated_nodes: Drop nodes that lose their last edge, keeping
            at least two nodes alive.
        neighbor_rule: How the winner's graph neighbors move. ``input``
            displaces each neighbor toward the input by
            neighbor_attraction·(input − neighbor.pos). ``second_offset`` is
            an experimental alternative with no correctness claim: every
            neighbor is displaced by the one fixed vector
            neighbor_attraction·(input − second.pos), with second's position
            captured at selection time.
    """

    winner_attraction: float = 0.03
    neighbor_attraction: float = 0.0006
    error_decay: float = 10.0
    max_error: float = 20000.0
    max_age: int = 75
    edge_mode: EdgeMode = PROXIMITY
    remove_isolated_nodes: bool = True
    neighbor_rule: NeighborRule = "input"

    def validate(self) -> None:
        """Raise :class:`ConfigurationError` naming the first violated bound."""
        if not (0.0 < self.winner_attraction <= 1.0):
            raise ConfigurationError(
                f"winner_attraction must be in (0, 1], got {self.winner_attraction}"
            )
        if not (0.0 <= self.neighbor_attraction <= 1.0):
            raise ConfigurationError(
                f"neighbor_attraction must be in [0, 1], got {self.neighbor_attraction}"
            )
        if not self.error_decay > 0.0:
            raise ConfigurationError(
                f"error_decay must be > 0, got {self.error_decay}"
            )
        if not self.max_error > 0.0:
            raise ConfigurationError(f"max_error must be > 0, got {self.max_error}")
        if not (isinstance(self.max_age, int) and self.max_age >= 1):
            raise ConfigurationError(f"max_age must be an integer >= 1, got {self.max_age}")
        if self.edge_mode not in EDGE_MODES:
            raise ConfigurationError(
                f"edge_mode must be one of {EDGE_MODES}, got {self.edge_mode!r}"
            )
        if self.neighbor_rule not in ("input", "second_offset"):
            raise ConfigurationError(
                f"neighbor_rule must be 'input' or 'second_offset', got {self.neighbor_rule!r}"
            )
        for name in ("winner_attraction", "neighbor_attraction", "error_decay", "max_error"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")


@dataclass(slots=True)
class Node:
    """A learned waypoint: position in world units plus accumulated error."""

    id: int
    x: float
    y: float
    z: float
    error: float = 0.0

    @property
    def pos(self) -> Position:
        return (self.x, self.y, self.z)


@dataclass(slots=True)
class StepReport:
    """Everything one step changed.

    ``winner`` is None exactly when fewer than two nodes existed when the
    step began (bootstrap phase).
    """

    winner: int | None = None
    second: int | None = None
    nodes_added: list[int] = field(default_factory=list)
    nodes_removed: list[int] = field(default_factory=list)
    edges_added: list[EdgeKey] = field(default_factory=list)
    edges_removed: list[EdgeKey] = field(default_factory=list)


@dataclass(frozen=True, slots=True)
class GasSnapshot:
    """Immutable view of a gas after a completed step.

    Safe to hand to other threads/tasks; node and edge tuples are sorted
    (by id, and by (a, b, kind) respectively).
    """

    tick: int
    nodes: tuple[tuple[int, float, float, float, float], ...]
    edges: tuple[tuple[int, int, str, int], ...]

    @property
    def node_count(self) -> int:
        return len(self.nodes)


def edge_key(a: int, b: int, kind: str) -> EdgeKey:
    """Normalize an undirected edge to its canonical (low, high, kind) key."""
    if a == b:
        raise ValueError(f"self-edge on node {a}")
    return (a, b, kind) if a < b else (b, a, kind)


class Gas:
    """The learned graph plus its parameters and per-demonstrator memory.

    A Gas is a single-writer object: :meth:`step` calls must be externally
    serialized. Use :meth:`snapshot` to publish a consistent post-step state
    to other execution contexts.
    """

    def __init__(self, params: Params | None = None):
        params = params if params is not None else Params()
        params.validate()
        self.params = params
        self.nodes: dict[int, Node] = {}
        self.edges: dict[EdgeKey, int] = {}
        self.tick = 0
        self.last_winner: dict[int, int] = {}
        self._incident: dict[int, set[EdgeKey]] = {}
        self._next_id = 0

    @property
    def next_id(self) -> int:
        """Id the next created node will receive. Never reused."""
        return self._next_id

    # -- graph surgery -------------------------------------------------

    def _add_node(self, x: float, y: float, z: float, error: float = 0.0) -> Node:
        node = Node(self._next_id, x, y, z, error)
        self._next_id += 1
        self.nodes[node.id] = node
        self._incident[node.id] = set()
        return node

    def _remove_node(self, node_id: int) -> None:
        for key in list(self._incident[node_id]):
            self._remove_edge(key)
        del self._incident[node_id]
        del self.nodes[node_id]
        for dem, winner in list(self.last_winner.items()):
            if winner == node_id:
                del self.last_winner[dem]

    def _put_edge(self, a: int, b: int, kind: str) -> EdgeKey | None:
        """Create edge at age 0, or reset an existing one. Returns the key if created."""
        key = edge_key(a, b, kind)
        created = key not in self.edges
        self.edges[key] = 0
        if created:
            self._incident[a].add(key)
            self._incident[b].add(key)
            return key
        return None

    def _remove_edge(self, key: EdgeKey) -> None:
        del self.edges[key]
        self._incident[key[0]].discard(key)
        self._incident[key[1]].discard(key)

    def neighbors(self, node_id: int) -> list[int]:
        """Ids adjacent to ``node_id`` via any edge kind, ascending."""
        seen = {key[0] if key[1] == node_id else key[1] for key in self._incident[node_id]}
        return sorted(seen)

    # -- queries ---------------------------------------------------------

    def winner_pair(self, position: Sequence[float]) -> tuple[int, int]:
        """Nearest and second-nearest node ids by Euclidean distance.

        Ties break toward the lowest node id. Raises ValueError with fewer
        than two nodes.
        """
        if len(self.nodes) < 2:
            raise ValueError(f"winner_pair needs at least 2 nodes, gas has {len(self.nodes)}")
        x, y, z = position
        return self._winner_pair(float(x), float(y), float(z))

    def _winner_pair(self, x: float, y: float, z: float) -> tuple[int, int]:
        best_d = second_d = math.inf
        best_id = second_id = -1
        for nid, node in self.nodes.items():
            dx = x - node.x
            dy = y - node.y
            dz = z - node.z
            d = dx * dx + dy * dy + dz * dz
            if d < best_d or (d == best_d and nid < best_id):
                second_d, second_id = best_d, best_id
                best_d, best_id = d, nid
            elif d < second_d or (d == second_d and nid < second_id):
                second_d, second_id = d, nid
        return best_id, second_id

    def snapshot(self) -> GasSnapshot:
        nodes = tuple(
            (n.id, n.x, n.y, n.z, n.error) for n in sorted(self.nodes.values(), key=lambda n: n.id)
        )
        edges = tuple((a, b, kind, age) for (a, b, kind), age in sorted(self.edges.items()))
        return GasSnapshot(tick=self.tick, nodes=nodes, edges=edges)

    # -- the update step ---------------------------------------------------

    def step(self, position: Sequence[float], demonstrator: int = 0) -> StepReport:
        """Consume one demonstrator position and update the graph.

        Bootstrap: while the gas holds fewer than two nodes the input only
        creates a node (plus the first edge once the count reaches two) and
        the step ends. Afterwards each step, in order: selects winner and
        second, refreshes the proximity edge, accumulates the winner's error
        by the input distance, attracts the winner, ages the winner's edges,
        deletes edges older than ``max_age``, attracts the winner's
        neighbors, decays every error (clamped at zero), inserts a node if
        the winner's error exceeds ``max_error``, and in trajectory modes
        links the demonstrator's previous winner to the current one.

        Raises ValueError on a non-finite input, leaving the gas unchanged.
        """
        x, y, z = position
        x = float(x)
        y = float(y)
        z = float(z)
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
            raise ValueError(f"non-finite input position {position!r}")
        report = StepReport()
        params = self.params

        if len(self.nodes) < 2:
            node = self._add_node(x, y, z, 0.0)
            report.nodes_added.append(node.id)
            if len(self.nodes) == 2:
                a, b = self.nodes.keys()
                key = self._put_edge(a, b, PROXIMITY)
                if key is not None:
                    report.edges_added.append(key)
            self.tick += 1
            return report

        winner_id, second_id = self._winner_pair(x, y, z)
        report.winner = winner_id
        report.second = second_id
        winner = self.nodes[winner_id]
        second = self.nodes[second_id]
        second_pos = (second.x, second.y, second.z)

        if params.edge_mode != TRAJECTORY:
            key = self._put_edge(winner_id, second_id, PROXIMITY)
            if key is not None:
                report.edges_added.append(key)

        dx = x - winner.x
        dy = y - winner.y
        dz = z - winner.z
        winner.error += math.sqrt(dx * dx + dy * dy + dz * dz)

        wa = params.winner_attraction
        winner.x += wa * (x - winner.x)
        winner.y += wa * (y - winner.y)
        winner.z += wa * (z - winner.z)

        incident = self._incident[winner_id]
        edges = self.edges
        for key in incident:
            edges[key] += 1

        # Only winner-incident edges can have just crossed max_age.
        max_age = params.max_age
        stale = [key for key in incident if edges[key] > max_age]
        if stale:
            stale.sort()
            orphans: set[int] = set()
            for key in stale:
                self._remove_edge(key)
                report.edges_removed.append(key)
                orphans.add(key[0] if key[1] == winner_id else key[1])
            if params.remove_isolated_nodes:
                for nid in sorted(orphans):
                    if nid != winner_id and not self._incident[nid] and len(self.nodes) > 2:
                        self._remove_node(nid)
                        report.nodes_removed.append(nid)

        na = params.neighbor_attraction
        if params.neighbor_rule == "input":
            for nid in self.neighbors(winner_id):
                node = self.nodes[nid]
                node.x += na * (x - node.x)
                node.y += na * (y - node.y)
                node.z += na * (z - node.z)
        else:
            vx = na * (x - second_pos[0])
            vy = na * (y - second_pos[1])
            vz = na * (z - second_pos[2])
            for nid in self.neighbors(winner_id):
                node = self.nodes[nid]
                node.x += vx
                node.y += vy
                node.z += vz

        decay = params.error_decay
        for node in self.nodes.values():
            e = node.error - decay
            node.error = e if e > 0.0 else 0.0

        if winner.error > params.max_error:
            self._insert_node(winner_id, report)

        if params.edge_mode != PROXIMITY:
            last = self.last_winner.get(demonstrator)
            if last is not None and last != winner_id and last in self.nodes:
                key = self._put_edge(last, winner_id, TRAJECTORY)
                if key is not None:
                    report.edges_added.append(key)
            self.last_winner[demonstrator] = winner_id

        self.tick += 1
        return report

    def insert_node(self, winner_id: int) -> int | None:
        """Split the winner's region: midpoint node toward the worst neighbor.

        Intended to be called only when the winner's error exceeds
        ``max_error``. Halves both parents' errors, gives the new node their
        halved sum, and rewires the parent edge through the new node.
        Returns the new node id, or None (without mutating) if the winner
        has no neighbors.
        """
        report = StepReport(winner=winner_id)
        return self._insert_node(winner_id, report)

    def _insert_node(self, winner_id: int, report: StepReport) -> int | None:
        winner = self.nodes[winner_id]
        worst_id = -1
        worst_error = -math.inf
        for nid in self.neighbors(winner_id):
            err = self.nodes[nid].error
            if err > worst_error:
                worst_error, worst_id = err, nid
        if worst_id < 0:
            return None
        worst = self.nodes[worst_id]

        mid_x = (winner.x + worst.x) / 2.0
        mid_y = (winner.y + worst.y) / 2.0
        mid_z = (winner.z + worst.z) / 2.0
        winner.error /= 2.0
        worst.error /= 2.0
        new = self._add_node(mid_x, mid_y, mid_z, winner.error + worst.error)
        report.nodes_added.append(new.id)

        # Replacement edges are proximity-kind regardless of what linked the
        # parents: the new node has never been a winner, so giving it a
        # trajectory edge would fake an observed traversal.
        removed_any = False
        for kind in EDGE_KINDS:
            old = edge_key(winner_id, worst_id, kind)
            if old in self.edges:
                self._remove_edge(old)
                report.edges_removed.append(old)
                removed_any = True
        if removed_any:
            for end in (winner_id, worst_id):
                key = self._put_edge(end, new.id, PROXIMITY)
                if key is not None:
                    report.edges_added.append(key)
        return new.id

    def prune(self) -> tuple[list[EdgeKey], list[int]]:
        """Drop edges older than ``max_age``, then isolated nodes.

        Node removal honors ``remove_isolated_nodes`` and never brings the
        node count below two. Returns (removed edge keys, removed node ids).
        """
        max_age = self.params.max_age
        stale = sorted(key for key, age in self.edges.items() if age > max_age)
        for key in stale:
            self._remove_edge(key)
        removed_nodes: list[int] = []
        if self.params.remove_isolated_nodes:
            for nid in sorted(self.nodes):
                if not self._incident[nid] and len(self.nodes) > 2:
                    self._remove_node(nid)
                    removed_nodes.append(nid)
        return stale, removed_nodes


def new_gas(params: Params | None = None) -> Gas:
    """Create an empty gas, validating ``params`` against their bounds."""
    return Gas(params)

"""Synthetic occupancy-grid worlds and simulated demonstrators.

Maps are small text fixtures: a versioned header, a cell size in world
units, then one row of characters per grid row (`#` blocked, `.` walkable,
`W` walkable waypoint cell). Row 0 is the top of the map; y grows downward,
x to the right, and each cell spans ``cell_size`` world units.

Demonstrators walk waypoint to waypoint along grid-shortest paths at a
fixed speed, with a little per-cell jitter so traces do not collapse onto
cell centers. Everything is a pure function of the seed.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from navgas.gng import Position
from navgas.traces import Sample, Trace

MAP_HEADER = "navmap 1"

#: Grid-step order used by both path search and component counting.
_STEPS = ((-1, 0), (0, 1), (1, 0), (0, -1))


@dataclass(frozen=True, slots=True)
class WorldMap:
    """Immutable occupancy grid with embedded reference waypoints.

    Waypoint markers are planted ``marker_height`` world units above the
    ground plane, the way hand-placed navigation markers sit on posts
    rather than flush with the floor.
    """

    name: str
    cell_size: float
    rows: tuple[str, ...]
    waypoints: tuple[Position, ...]
    marker_height: float = 0.0

    @property
    def height_cells(self) -> int:
        return len(self.rows)

    @property
    def width_cells(self) -> int:
        return len(self.rows[0])

    @property
    def size_wu(self) -> tuple[float, float]:
        return (self.width_cells * self.cell_size, self.height_cells * self.cell_size)

    @property
    def diagonal_wu(self) -> float:
        w, h = self.size_wu
        return math.hypot(w, h)

    def cell_walkable(self, row: int, col: int) -> bool:
        if 0 <= row < self.height_cells and 0 <= col < self.width_cells:
            return self.rows[row][col] != "#"
        return False

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        return (int(math.floor(y / self.cell_size)), int(math.floor(x / self.cell_size)))

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        return ((col + 0.5) * self.cell_size, (row + 0.5) * self.cell_size)

    def is_walkable(self, x: float, y: float) -> bool:
        return self.cell_walkable(*self.cell_of(x, y))

    def walkable_cells(self) -> list[tuple[int, int]]:
        return [
            (r, c)
            for r in range(self.height_cells)
            for c in range(self.width_cells)
            if self.rows[r][c] != "#"
        ]

    def component_count(self) -> int:
        todo = set(self.walkable_cells())
        components = 0
        while todo:
            components += 1
            queue = deque([todo.pop()])
            while queue:
                r, c = queue.popleft()
                for dr, dc in _STEPS:
                    nxt = (r + dr, c + dc)
                    if nxt in todo:
                        todo.remove(nxt)
                        queue.append(nxt)
        return components

    def segment_blocked(self, p: tuple[float, float], q: tuple[float, float]) -> bool:
        """Whether the straight segment p→q touches any blocked cell.

        Walks the grid cells along the segment; leaving the map counts as
        blocked.
        """
        (x0, y0), (x1, y1) = p, q
        row, col = self.cell_of(x0, y0)
        end_row, end_col = self.cell_of(x1, y1)
        if not self.cell_walkable(row, col):
            return True
        dx = x1 - x0
        dy = y1 - y0
        step_col = 1 if dx > 0 else -1
        step_row = 1 if dy > 0 else -1
        # parametric distance to the next vertical/horizontal cell boundary
        if dx != 0:
            next_gx = (col + (step_col > 0)) * self.cell_size
            t_max_x = (next_gx - x0) / dx
            t_delta_x = self.cell_size / abs(dx)
        else:
            t_max_x = math.inf
            t_delta_x = math.inf
        if dy != 0:
            next_gy = (row + (step_row > 0)) * self.cell_size
            t_max_y = (next_gy - y0) / dy
            t_delta_y = self.cell_size / abs(dy)
        else:
            t_max_y = math.inf
            t_delta_y = math.inf
        for _ in range(self.width_cells + self.height_cells + 4):
            if (row, col) == (end_row, end_col):
                return False
            if t_max_x < t_max_y:
                col += step_col
                t_max_x += t_delta_x
            else:
                row += step_row
                t_max_y += t_delta_y
            if not self.cell_walkable(row, col):
                return True
        return False

    def to_text(self) -> str:
        lines = [MAP_HEADER, f"name {self.name}", f"cellsize {self.cell_size!r}"]
        if self.marker_height:
            lines.append(f"markerheight {self.marker_height!r}")
        lines.extend(self.rows)
        return "\n".join(lines) + "\n"


def parse_worldmap(text: str) -> WorldMap:
    lines = text.splitlines()
    if not lines or lines[0] != MAP_HEADER:
        raise ValueError(f"expected map header {MAP_HEADER!r}")
    if len(lines) < 4 or not lines[1].startswith("name ") or not lines[2].startswith("cellsize "):
        raise ValueError("map needs name, cellsize, and at least one grid row")
    name = lines[1][len("name "):]
    cell_size = float(lines[2][len("cellsize "):])
    if not (cell_size > 0 and math.isfinite(cell_size)):
        raise ValueError(f"cellsize must be positive, got {cell_size}")
    first_row = 3
    marker_height = 0.0
    if lines[3].startswith("markerheight "):
        marker_height = float(lines[3][len("markerheight "):])
        if not (marker_height >= 0 and math.isfinite(marker_height)):
            raise ValueError(f"markerheight must be >= 0, got {marker_height}")
        first_row = 4
    rows = tuple(lines[first_row:])
    if not rows:
        raise ValueError("map needs at least one grid row")
    width = len(rows[0])
    waypoints = []
    for r, line in enumerate(rows):
        if len(line) != width:
            raise ValueError(f"grid row {r} has length {len(line)}, expected {width}")
        for c, ch in enumerate(line):
            if ch not in "#.W":
                raise ValueError(f"unknown map character {ch!r} at row {r}, col {c}")
            if ch == "W":
                x = (c + 0.5) * cell_size
                y = (r + 0.5) * cell_size
                waypoints.append((x, y, marker_height))
    world = WorldMap(name, cell_size, rows, tuple(waypoints), marker_height)
    if not world.walkable_cells():
        raise ValueError("map has no walkable cells")
    return world


def read_worldmap(path: str | Path) -> WorldMap:
    return parse_worldmap(Path(path).read_text(encoding="utf-8"))


_OPEN_ROOM_ROWS = [
    "####################",
    "#..................#",
    "#..................#",
    "#..................#",
    "#..................#",
    "#....W..W..W..W....#",
    "#..................#",
    "#..................#",
    "#....W..W..W..W....#",
    "#..................#",
    "#..................#",
    "#....W..W..W..W....#",
    "#..................#",
    "#..................#",
    "#....W..W..W..W....#",
    "#..................#",
    "#..................#",
    "#..................#",
    "#..................#",
    "####################",
]

OPEN_ROOM_TEXT = (
    "navmap 1\nname open_room\ncellsize 100.0\nmarkerheight 50.0\n"
    + "\n".join(_OPEN_ROOM_ROWS)
    + "\n"
)


def _corridors_rows() -> list[str]:
    width, height = 40, 40
    grid = [["#"] * width for _ in range(height)]

    def carve(r0, r1, c0, c1):
        for r in range(r0, r1 + 1):
            for c in range(c0, c1 + 1):
                grid[r][c] = "."

    carve(2, 13, 2, 7)  # west hall joining the corridors
    for top in (2, 7, 12):
        carve(top, top + 1, 8, 33)
    # 12 waypoints per corridor, from the mouth to the far end so both the
    # turn out of the hall and the dead end stay anchored by markers.
    for top in (2, 7, 12):
        for c in (8, 10, 12, 14, 16, 18, 22, 24, 26, 28, 30, 32):
            grid[top][c] = "W"
    for r in (3, 6, 9, 12):  # 4 waypoints down the west hall
        grid[r][4] = "W"
    return ["".join(row) for row in grid]


CORRIDORS_TEXT = (
    "navmap 1\nname corridors\ncellsize 100.0\nmarkerheight 50.0\n"
    + "\n".join(_corridors_rows())
    + "\n"
)

_BUILTIN_TEXTS = {"open_room": OPEN_ROOM_TEXT, "corridors": CORRIDORS_TEXT}

BUILTIN_MAP_NAMES = tuple(sorted(_BUILTIN_TEXTS))


def builtin_map(name: str) -> WorldMap:
    """Load one of the built-in fixtures: open_room or corridors."""
    try:
        text = _BUILTIN_TEXTS[name]
    except KeyError:
        raise ValueError(
            f"unknown map {name!r}; built-ins are {', '.join(BUILTIN_MAP_NAMES)}"
        ) from None
    return parse_worldmap(text)


def parse_waypoints(text: str) -> list[Position]:
    """Parse `x y z` lines (z optional, whitespace or comma delimited)."""
    points: list[Position] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].replace(",", " ").strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ValueError(f"waypoint line {lineno}: expected x y [z], got {raw!r}")
        x, y = float(parts[0]), float(parts[1])
        z = float(parts[2]) if len(parts) == 3 else 0.0
        if not all(math.isfinite(v) for v in (x, y, z)):
            raise ValueError(f"waypoint line {lineno}: non-finite coordinate")
        points.append((x, y, z))
    return points


def read_waypoints(path: str | Path) -> list[Position]:
    return parse_waypoints(Path(path).read_text(encoding="utf-8"))


def format_waypoints(points: list[Position]) -> str:
    return "".join(f"{x!r} {y!r} {z!r}\n" for x, y, z in points)


class _Walker:
    """One demonstrator's deterministic waypoint-to-waypoint walk.

    Goals are drawn by reshuffling the waypoint list each time it is
    exhausted, so coverage stays even instead of leaving random gaps.
    """

    def __init__(self, world: WorldMap, rng: np.random.Generator, jitter: float = 10.0):
        self.world = world
        self.rng = rng
        self.jitter = jitter
        cells = world.walkable_cells()
        self.cell = cells[int(rng.integers(len(cells)))]
        self.pos = self._jittered_center(self.cell)
        self.route: deque[tuple[float, float]] = deque()
        self.tour: deque[int] = deque()

    def _jittered_center(self, cell: tuple[int, int]) -> tuple[float, float]:
        cx, cy = self.world.cell_center(*cell)
        dx, dy = self.rng.uniform(-self.jitter, self.jitter, size=2)
        return (cx + dx, cy + dy)

    def _distance_field(self, goal: tuple[int, int]) -> dict[tuple[int, int], int]:
        dist = {goal: 0}
        queue = deque([goal])
        while queue:
            r, c = queue.popleft()
            for dr, dc in _STEPS:
                nxt = (r + dr, c + dc)
                if nxt not in dist and self.world.cell_walkable(*nxt):
                    dist[nxt] = dist[(r, c)] + 1
                    queue.append(nxt)
        return dist

    def _next_goal_index(self) -> int:
        if not self.tour:
            order = self.rng.permutation(len(self.world.waypoints))
            self.tour.extend(int(i) for i in order)
        return self.tour.popleft()

    def _plan_route(self) -> None:
        world = self.world
        for _ in range(20 + len(world.waypoints)):
            goal_pos = world.waypoints[self._next_goal_index()]
            goal = world.cell_of(goal_pos[0], goal_pos[1])
            if goal == self.cell:
                continue
            dist = self._distance_field(goal)
            if self.cell not in dist:
                continue
            cur = self.cell
            heading = None
            cells = []
            while cur != goal:
                down = [
                    (dr, dc)
                    for dr, dc in _STEPS
                    if dist.get((cur[0] + dr, cur[1] + dc)) == dist[cur] - 1
                ]
                if heading in down:
                    step = heading
                else:
                    step = down[int(self.rng.integers(len(down)))]
                heading = step
                cur = (cur[0] + step[0], cur[1] + step[1])
                cells.append(cur)
            self.route.extend(self._jittered_center(cell) for cell in cells)
            self.cell = goal
            return
        raise RuntimeError(f"no waypoint reachable from cell {self.cell}")

    def advance(self, distance: float) -> None:
        x, y = self.pos
        while distance > 0:
            if not self.route:
                self._plan_route()
            tx, ty = self.route[0]
            seg = math.hypot(tx - x, ty - y)
            if seg <= distance:
                x, y = tx, ty
                self.route.popleft()
                distance -= seg
            else:
                frac = distance / seg
                x += (tx - x) * frac
                y += (ty - y) * frac
                distance = 0.0
        self.pos = (x, y)


def simulate(
    world: WorldMap,
    demonstrators: int = 1,
    seed: int = 0,
    duration: float = 60.0,
    speed: float = 440.0,
    rate: float = 10.0,
) -> Trace:
    """Generate a merged demonstrator trace, deterministic in its arguments.

    Each demonstrator gets an independent generator seeded with
    (seed, index), so adding demonstrators never changes existing paths.
    """
    if demonstrators < 1:
        raise ValueError(f"demonstrators must be >= 1, got {demonstrators}")
    if not duration > 0:
        raise ValueError(f"duration must be > 0 seconds, got {duration}")
    if not speed > 0:
        raise ValueError(f"speed must be > 0 WU/s, got {speed}")
    if not rate > 0:
        raise ValueError(f"rate must be > 0 Hz, got {rate}")
    count = int(round(duration * rate))
    step_length = speed / rate
    samples: list[Sample] = []
    for dem in range(demonstrators):
        walker = _Walker(world, np.random.default_rng([seed, dem]))
        for k in range(count):
            x, y = walker.pos
            # plain floats so the trace serializes portably
            samples.append(Sample(k / rate, dem, (float(x), float(y), 0.0)))
            walker.advance(step_length)
    samples.sort(key=lambda s: (s.t, s.demonstrator))
    return Trace(tuple(samples), rate)

"""Matplotlib renderings of maps, learned graphs, and metric series.

Every function draws to a file and returns the written path; nothing opens
a window, so the module is safe on headless machines.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from .gng import Gas
from .metrics import MetricsSeries
from .worlds import WorldMap

EDGE_COLORS = {"proximity": "#1f77b4", "trajectory": "#d62728"}
NODE_COLOR = "#2c2c2c"
WAYPOINT_COLOR = "#2ca02c"


def _draw_map(ax: plt.Axes, world: WorldMap) -> None:
    # Row 0 of the grid covers y in [0, cell_size), so origin goes low.
    blocked = np.array(
        [[0.0 if ch != "#" else 1.0 for ch in row] for row in world.rows]
    )
    width, height = world.size_wu
    ax.imshow(
        blocked,
        extent=(0.0, width, 0.0, height),
        origin="lower",
        cmap="Greys",
        vmin=0.0,
        vmax=1.6,
        interpolation="nearest",
        zorder=0,
    )
    if world.waypoints:
        ax.scatter(
            [p[0] for p in world.waypoints],
            [p[1] for p in world.waypoints],
            marker="+",
            s=60,
            color=WAYPOINT_COLOR,
            linewidths=1.4,
            zorder=1,
            label="waypoints",
        )


def plot_graph(
    gas: Gas,
    path: str | Path,
    world: WorldMap | None = None,
    title: str | None = None,
) -> Path:
    """Draw the gas over an optional map: edges by kind, nodes sized by error.

    Older edges fade toward transparent so churn is visible at a glance.
    """
    fig, ax = plt.subplots(figsize=(7.0, 7.0))
    if world is not None:
        _draw_map(ax, world)
    max_age = max(1, gas.params.max_age)
    seen_kinds: set[str] = set()
    for (a, b, kind), age in sorted(gas.edges.items()):
        na, nb = gas.nodes[a], gas.nodes[b]
        alpha = max(0.25, 1.0 - age / (max_age + 1))
        ax.plot(
            [na.x, nb.x],
            [na.y, nb.y],
            color=EDGE_COLORS.get(kind, "#777777"),
            linewidth=1.3,
            alpha=alpha,
            zorder=2,
            label=kind if kind not in seen_kinds else None,
        )
        seen_kinds.add(kind)
    if gas.nodes:
        nodes = sorted(gas.nodes.values(), key=lambda n: n.id)
        scale = max(gas.params.max_error, 1e-9)
        sizes = [14.0 + 60.0 * min(1.0, n.error / scale) for n in nodes]
        ax.scatter(
            [n.x for n in nodes],
            [n.y for n in nodes],
            s=sizes,
            color=NODE_COLOR,
            zorder=3,
            label="nodes",
        )
    ax.set_aspect("equal")
    ax.set_xlabel("x [WU]")
    ax.set_ylabel("y [WU]")
    if title:
        ax.set_title(title)
    if seen_kinds or gas.nodes:
        ax.legend(loc="upper right", fontsize="small")
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def plot_metrics(series: MetricsSeries, path: str | Path, title: str | None = None) -> Path:
    """Node count and cumulated distance against simulated time, stacked."""
    records = series.records
    fig, (ax_n, ax_d) = plt.subplots(2, 1, sharex=True, figsize=(7.0, 5.0))
    times = [r.sim_time for r in records]
    ax_n.step(times, [r.node_count for r in records], where="post", color="#1f77b4")
    ax_n.set_ylabel("nodes")
    ax_d.plot(times, [r.cum_distance for r in records], color="#d62728")
    ax_d.set_ylabel("cum. distance [WU]")
    ax_d.set_xlabel("simulated time [s]")
    if title:
        ax_n.set_title(title)
    for ax in (ax_n, ax_d):
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out

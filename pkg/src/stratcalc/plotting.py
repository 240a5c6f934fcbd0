"""Figures for the report commands.

Every function renders to a file and returns its path.  Rendering uses the
non-interactive Agg backend and a shared rc-parameter set so figures look
alike across commands.
"""

from __future__ import annotations

from contextlib import contextmanager
from math import sqrt
from pathlib import Path
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .poset import FinitePoset, label_text, mobius  # noqa: E402

GOLDEN = (sqrt(5.0) - 1.0) / 2.0
FIG_WIDTH = 5.0
PALETTE = ["#08589e", "#2b8cbe", "#4eb3d3", "#7bccc4", "#a8ddb5"]
PASS_COLOR = "#2b8cbe"
FAIL_COLOR = "#d7301f"

STYLE = {
    "axes.prop_cycle": matplotlib.cycler(color=PALETTE),
    "axes.labelsize": 10,
    "axes.titlesize": 11,
    "font.family": "sans-serif",
    "font.size": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": [FIG_WIDTH, FIG_WIDTH * GOLDEN],
    "figure.dpi": 120,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
    "lines.linewidth": 1.0,
}


@contextmanager
def styled():
    with plt.rc_context(STYLE):
        yield


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    return path


def hasse_layout(P: FinitePoset) -> Dict[Hashable, Tuple[float, float]]:
    """Elements at height = length of the longest chain below, spread evenly per level."""
    height: Dict[Hashable, int] = {}
    for x in P.linear_order:
        below = [height[y] for y in P.strict_down(x)]
        height[x] = 1 + max(below) if below else 0
    levels: Dict[int, List[Hashable]] = {}
    for x in P.elements:
        levels.setdefault(height[x], []).append(x)
    pos = {}
    for h, xs in levels.items():
        for i, x in enumerate(xs):
            pos[x] = (i - (len(xs) - 1) / 2.0, float(h))
    return pos


def plot_hasse(
    P: FinitePoset,
    path,
    title: str = "",
    edge_styles: Optional[Mapping[Tuple[Hashable, Hashable], str]] = None,
    extra_edges: Iterable[Tuple[Hashable, Hashable]] = (),
    node_labels: Optional[Mapping[Hashable, str]] = None,
) -> Path:
    """Hasse diagram; ``edge_styles`` maps pairs to 'solid' or 'dashed'."""
    pos = hasse_layout(P)
    styles = dict(edge_styles or {})
    with styled():
        fig, ax = plt.subplots()
        for a, b in list(P.covers) + [e for e in extra_edges if e not in set(P.covers)]:
            (x0, y0), (x1, y1) = pos[a], pos[b]
            st = styles.get((a, b), "solid")
            color = PALETTE[0] if st == "solid" else "0.6"
            curve = 0.0 if (a, b) in set(P.covers) else 0.25
            ax.annotate(
                "",
                xy=(x1, y1),
                xytext=(x0, y0),
                arrowprops=dict(arrowstyle="-|>", color=color, linestyle=st, shrinkA=12, shrinkB=12,
                                connectionstyle=f"arc3,rad={curve}"),
            )
        for x, (u, v) in pos.items():
            text = (node_labels or {}).get(x, label_text(x))
            ax.text(u, v, text, ha="center", va="center",
                    bbox=dict(boxstyle="round,pad=0.3", fc="white", ec=PALETTE[1]))
        xs = [u for u, _ in pos.values()] or [0]
        ys = [v for _, v in pos.values()] or [0]
        ax.set_xlim(min(xs) - 1, max(xs) + 1)
        ax.set_ylim(min(ys) - 0.6, max(ys) + 0.6)
        ax.axis("off")
        if title:
            ax.set_title(title)
        return _save(fig, path)


def plot_mobius(P: FinitePoset, path, title: str = "") -> Path:
    """Heat map of μ(r, p) with the values written in the cells."""
    mu = mobius(P)
    els = P.linear_order
    n = len(els)
    grid = [[mu.get((r, p), 0) for p in els] for r in els]
    with styled():
        size = max(2.5, 0.45 * n + 1.5)
        fig, ax = plt.subplots(figsize=(size, size))
        vmax = max(1, max(abs(v) for row in grid for v in row))
        ax.imshow(grid, cmap="RdBu", vmin=-vmax, vmax=vmax)
        for i in range(n):
            for j in range(n):
                if (els[i], els[j]) in mu:
                    ax.text(j, i, str(grid[i][j]), ha="center", va="center", fontsize=8)
        names = [label_text(x) for x in els]
        ax.set_xticks(range(n), names, rotation=90 if n > 8 else 0)
        ax.set_yticks(range(n), names)
        ax.set_xlabel("p")
        ax.set_ylabel("r")
        ax.set_title(title or "μ(r, p)")
        return _save(fig, path)


def plot_page(page, path, title: str = "") -> Path:
    """An E^r page: dimensions on the (s, t) grid, differentials as arrows."""
    nz = page.nonzero()
    with styled():
        fig, ax = plt.subplots()
        for (s, t), k in nz.items():
            ax.scatter([s], [t], s=120 + 60 * k, color=PALETTE[1], zorder=2)
            ax.text(s, t, str(k), ha="center", va="center", color="white", fontsize=8, zorder=3)
        for (s, t), cols in page.differentials.items():
            if page.rank(s, t):
                ax.annotate("", xy=(s - page.r, t + page.r - 1), xytext=(s, t),
                            arrowprops=dict(arrowstyle="-|>", color=FAIL_COLOR, shrinkA=8, shrinkB=8))
        if nz:
            ss = [s for s, _ in nz]
            ts = [t for _, t in nz]
            ax.set_xlim(min(ss) - 1, max(ss) + 1)
            ax.set_ylim(min(ts) - 1, max(ts) + 1)
        ax.set_xlabel("s")
        ax.set_ylabel("t")
        ax.grid(True, color="0.9")
        ax.set_title(title or f"E^{page.r}")
        return _save(fig, path)


def plot_verdicts(rows: Sequence[Mapping[str, object]], path, title: str = "") -> Path:
    """Horizontal bars of per-check timing, coloured by verdict."""
    with styled():
        h = max(2.0, 0.28 * len(rows) + 1.0)
        fig, ax = plt.subplots(figsize=(FIG_WIDTH, h))
        names = [str(r["check"]) for r in rows]
        secs = [float(r.get("seconds", 0.0)) for r in rows]
        colors = [PASS_COLOR if r.get("pass") else FAIL_COLOR for r in rows]
        ax.barh(range(len(rows)), secs, color=colors)
        ax.set_yticks(range(len(rows)), names)
        ax.invert_yaxis()
        ax.set_xlabel("seconds")
        ax.set_title(title or "verdicts")
        return _save(fig, path)


def plot_skeleton(PG, report, path, title: str = "") -> Path:
    """P_G with possibly-nonzero gluing maps solid and vanishing ones dashed."""
    styles = {(e.source, e.target): ("solid" if e.verdict == "PossiblyNonzero" else "dashed") for e in report}
    labels = {c.name: f"{c.name}\n|W|={c.weyl_order}" for c in PG.classes}
    return plot_hasse(PG.poset, path, title or f"gluing skeleton of {PG.group.name}", styles,
                      extra_edges=[(e.source, e.target) for e in report], node_labels=labels)

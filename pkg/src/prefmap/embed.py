"""Force-directed 2-D layout of a distance matrix, plus SVG/CSV output.

Distances are normalized by their maximum, and points move by gradient
descent on the weighted stress sum w_ij * (|p_i - p_j| - d_ij)^2 with
w_ij = d_ij^2, so large distances dominate the layout.  Steps that would
increase the stress are rejected (with a halved step scale), which makes
the stress non-increasing and the run deterministic for a fixed seed.
"""

from __future__ import annotations

import csv
import math
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping, Sequence
from xml.etree import ElementTree

import numpy as np

# styling entry: (css color, marker shape, group label)
Styling = Mapping[Hashable, tuple[str, str, str]]

_PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#17becf",
)


@dataclass(frozen=True)
class MapLayout:
    """Planar embedding: one (id, x, y) triple per input row."""

    points: tuple[tuple[Hashable, float, float], ...]
    styling: Styling = field(default_factory=dict)
    seed: int = 0
    iterations: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "points",
            tuple((pid, float(x), float(y)) for pid, x, y in self.points),
        )
        for _, x, y in self.points:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError("coordinates must be finite")


def _stress(pos: np.ndarray, target: np.ndarray, weight: np.ndarray) -> float:
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    err = dist - target
    return float((weight * err * err).sum() / 2.0)


def embed_distances(
    distances: Sequence[Sequence[float | Fraction | int]],
    seed: int,
    iterations: int = 1000,
    step: float = 0.1,
    ids: Sequence[Hashable] | None = None,
    styling: Styling | None = None,
) -> MapLayout:
    """Embed a symmetric nonnegative distance matrix into the plane.

    The returned layout is centered at the origin.  Identical inputs with
    the same seed give bitwise-identical coordinates.
    """
    k = len(distances)
    for row in distances:
        if len(row) != k:
            raise ValueError("distance matrix must be square")
    for i in range(k):
        if distances[i][i] != 0:
            raise ValueError("diagonal must be zero")
        for j in range(k):
            if distances[i][j] != distances[j][i]:
                raise ValueError("distance matrix must be symmetric")
            if distances[i][j] < 0:
                raise ValueError("distances must be nonnegative")
    if iterations < 1 or step <= 0:
        raise ValueError("iterations and step must be positive")
    if ids is None:
        ids = tuple(range(k))
    else:
        ids = tuple(ids)
        if len(ids) != k or len(set(ids)) != k:
            raise ValueError("ids must be distinct and match the matrix size")
    if k == 0:
        return MapLayout((), styling or {}, seed, iterations)

    d = np.array([[float(v) for v in row] for row in distances], dtype=float)
    dmax = d.max()
    if dmax == 0.0:
        pts = tuple((pid, 0.0, 0.0) for pid in ids)
        return MapLayout(pts, styling or {}, seed, iterations)
    target = d / dmax
    weight = target * target

    rng = random.Random(seed)
    pos = np.array(
        [[rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)] for _ in range(k)]
    )
    current = _stress(pos, target, weight)
    scale = 1.0
    for t in range(iterations):
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((diff * diff).sum(axis=2))
        safe = np.where(dist == 0.0, 1.0, dist)
        coeff = 2.0 * weight * (dist - target) / safe
        grad = (coeff[:, :, None] * diff).sum(axis=1)
        lr = step * scale / (1.0 + 0.01 * t)
        candidate = pos - lr * grad
        cand_stress = _stress(candidate, target, weight)
        if cand_stress <= current:
            pos = candidate
            current = cand_stress
        else:
            scale *= 0.5
    pos = pos - pos.mean(axis=0)
    pts = tuple((pid, float(x), float(y)) for pid, (x, y) in zip(ids, pos))
    return MapLayout(pts, styling or {}, seed, iterations)


def layout_stress(
    layout: MapLayout, distances: Sequence[Sequence[float | Fraction | int]]
) -> float:
    """Stress of an existing layout against a distance matrix (same
    normalization as embed_distances)."""
    d = np.array([[float(v) for v in row] for row in distances], dtype=float)
    dmax = d.max()
    if dmax == 0:
        return 0.0
    target = d / dmax
    pos = np.array([[x, y] for _, x, y in layout.points])
    return _stress(pos, target, target * target)


def default_styling(ids: Sequence[Hashable]) -> dict[Hashable, tuple[str, str, str]]:
    """Color/marker/group assignment keyed off the compass label scheme.

    Bare anchor names become emphasized corners; ``A-B:k/K`` labels group
    by their path; everything else lands in an unnamed group.
    """
    corner_kinds = {"ID", "UN", "ST", "AN"}
    groups: list[str] = []
    for pid in ids:
        text = str(pid)
        if text in corner_kinds:
            groups.append("corner")
        elif ":" in text:
            groups.append(text.split(":", 1)[0])
        else:
            groups.append("")
    palette_of: dict[str, str] = {}
    styling: dict[Hashable, tuple[str, str, str]] = {}
    for pid, group in zip(ids, groups):
        if group == "corner":
            styling[pid] = ("#000000", "star", "corner")
            continue
        if group not in palette_of:
            palette_of[group] = _PALETTE[len(palette_of) % len(_PALETTE)]
        styling[pid] = (palette_of[group], "dot", group)
    return styling


def _marker_element(shape: str, x: float, y: float, size: float, color: str):
    if shape == "star":
        pts = []
        for i in range(10):
            r = size if i % 2 == 0 else size * 0.45
            ang = math.pi / 2 + i * math.pi / 5
            pts.append(f"{x + r * math.cos(ang):.3f},{y - r * math.sin(ang):.3f}")
        el = ElementTree.Element("polygon", points=" ".join(pts), fill=color)
    elif shape == "square":
        el = ElementTree.Element(
            "rect",
            x=f"{x - size:.3f}",
            y=f"{y - size:.3f}",
            width=f"{2 * size:.3f}",
            height=f"{2 * size:.3f}",
            fill=color,
        )
    else:  # dot / circle
        el = ElementTree.Element(
            "circle", cx=f"{x:.3f}", cy=f"{y:.3f}", r=f"{size:.3f}", fill=color
        )
    return el


def render_svg(layout: MapLayout, path: str | os.PathLike[str], size: int = 640) -> None:
    """Draw the layout: emphasized labeled corners, path groups as small
    dots joined by a polyline, a legend for the named groups."""
    pts = layout.points
    width = float(size)
    pad = width * 0.08
    if pts:
        xs = [x for _, x, _ in pts]
        ys = [y for _, _, y in pts]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
        span = max(x1 - x0, y1 - y0) or 1.0
    else:
        x0 = y0 = 0.0
        span = 1.0
    scale = (width - 2 * pad) / span

    def to_screen(x: float, y: float) -> tuple[float, float]:
        # flip y so larger values draw higher
        return pad + (x - x0) * scale, width - pad - (y - y0) * scale

    svg = ElementTree.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=str(size),
        height=str(size),
        viewBox=f"0 0 {size} {size}",
    )
    ElementTree.SubElement(svg, "rect", x="0", y="0", width=str(size),
                           height=str(size), fill="white")

    by_group: dict[str, list[tuple[Hashable, float, float]]] = {}
    for pid, x, y in pts:
        color, shape, group = layout.styling.get(pid, ("#444444", "dot", ""))
        by_group.setdefault(group, []).append((pid, x, y))

    # polylines first so markers draw on top
    for group, members in by_group.items():
        if group in ("", "corner") or len(members) < 2:
            continue
        color = layout.styling[members[0][0]][0]
        coords = " ".join(
            "{:.3f},{:.3f}".format(*to_screen(x, y)) for _, x, y in members
        )
        ElementTree.SubElement(
            svg,
            "polyline",
            points=coords,
            fill="none",
            stroke=color,
            attrib={"stroke-width": "1.5", "stroke-opacity": "0.8"},
        )
    for pid, x, y in pts:
        color, shape, group = layout.styling.get(pid, ("#444444", "dot", ""))
        sx, sy = to_screen(x, y)
        marker_size = 9.0 if group == "corner" else 3.0
        svg.append(_marker_element(shape, sx, sy, marker_size, color))
        if group == "corner":
            label = ElementTree.SubElement(
                svg,
                "text",
                x=f"{sx + 11:.3f}",
                y=f"{sy - 9:.3f}",
                attrib={"font-size": "16", "font-family": "sans-serif"},
            )
            label.text = str(pid)

    legend_y = pad * 0.5
    for group in sorted(g for g in by_group if g not in ("", "corner")):
        color = layout.styling[by_group[group][0][0]][0]
        ElementTree.SubElement(
            svg, "circle", cx=f"{pad:.3f}", cy=f"{legend_y:.3f}", r="4", fill=color
        )
        text = ElementTree.SubElement(
            svg,
            "text",
            x=f"{pad + 10:.3f}",
            y=f"{legend_y + 4:.3f}",
            attrib={"font-size": "12", "font-family": "sans-serif"},
        )
        text.text = group
        legend_y += 16

    tree = ElementTree.ElementTree(svg)
    ElementTree.indent(tree)
    tree.write(path, encoding="unicode", xml_declaration=False)


def write_coordinates(layout: MapLayout, path: str | os.PathLike[str]) -> None:
    """CSV with header id,x,y,group in layout order; floats round-trip."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "x", "y", "group"])
        for pid, x, y in layout.points:
            group = layout.styling.get(pid, ("", "", ""))[2]
            writer.writerow([str(pid), repr(x), repr(y), group])


def read_coordinates(
    path: str | os.PathLike[str],
) -> list[tuple[str, float, float, str]]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["id", "x", "y", "group"]:
            raise ValueError(f"{path}: expected header id,x,y,group")
        for row in reader:
            if len(row) != 4:
                raise ValueError(f"{path}: expected 4 columns, got {len(row)}")
            out.append((row[0], float(row[1]), float(row[2]), row[3]))
    return out

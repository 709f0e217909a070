"""Equilibrium counts and labels sampled over two-dimensional slices.

Asset-space maps show where the images of the partition cells overlap
(several equilibria) and where they leave gaps (none); price-space maps show
the cells themselves.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, TooManyBanks
from .forward import partition_of
from .model import Network, Partition
from .solver import equilibrium_codes, n_max_default

DEFAULT_WINDOW = (-20.0, 40.0)
DEFAULT_RESOLUTION = 241


@dataclass(frozen=True)
class Cell:
    point: tuple[float, float]
    count: int
    labels: tuple[str, ...]


@dataclass
class GridMap:
    """Samples on a ``resolution x resolution`` grid over ``window^2``.

    ``cells`` is row-major: the first slice axis varies slowest.
    ``base`` is the full vector used for the coordinates not on the slice.
    """

    window: tuple[float, float]
    resolution: int
    axes: tuple[int, int]
    base: np.ndarray
    space: str  # "asset" or "price"
    cells: list[Cell] = field(default_factory=list)

    @property
    def ticks(self) -> np.ndarray:
        return np.linspace(self.window[0], self.window[1], self.resolution)

    @property
    def counts(self) -> np.ndarray:
        return np.array([c.count for c in self.cells], dtype=int).reshape(self.resolution, self.resolution)

    def cell_at(self, x: float, y: float) -> Cell:
        """The sampled cell nearest to ``(x, y)``."""
        t = self.ticks
        i, j = int(np.abs(t - x).argmin()), int(np.abs(t - y).argmin())
        return self.cells[i * self.resolution + j]

    def point(self, cell: Cell) -> np.ndarray:
        v = self.base.copy()
        v[list(self.axes)] = cell.point
        return v

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        prefix = "a" if self.space == "asset" else "s"
        w.writerow([f"{prefix}{self.axes[0] + 1}", f"{prefix}{self.axes[1] + 1}", "count", "labels"])
        for cell in self.cells:
            w.writerow([repr(cell.point[0]), repr(cell.point[1]), cell.count, ";".join(cell.labels)])
        return buf.getvalue()


def _slice_base(net: Network, axes, fixed) -> tuple[tuple[int, int], np.ndarray]:
    axes = (int(axes[0]), int(axes[1]))
    n = net.n
    if axes[0] == axes[1] or not all(0 <= k < n for k in axes):
        raise DimensionMismatch(f"slice axes {axes} invalid for n={n}")
    if fixed is None:
        if n != 2:
            raise DimensionMismatch("n > 2 needs fixed values for the banks off the slice")
        return axes, np.zeros(n)
    base = np.asarray(fixed, dtype=float)
    if base.shape != (n,):
        raise DimensionMismatch(f"fixed vector must have length {n}")
    return axes, base.copy()


def _check_resolution(resolution: int) -> int:
    resolution = int(resolution)
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    return resolution


def grid_map(
    net: Network,
    window=DEFAULT_WINDOW,
    resolution: int = DEFAULT_RESOLUTION,
    axes=(0, 1),
    fixed=None,
) -> GridMap:
    """Count and label the equilibria at every point of an asset-space grid.

    ``fixed`` supplies the full asset vector whose entries on ``axes`` are
    overwritten by the grid coordinates (required when ``n > 2``).
    """
    resolution = _check_resolution(resolution)
    if net.n > n_max_default():
        raise TooManyBanks(f"n={net.n} exceeds the enumeration cap {n_max_default()}")
    axes, base = _slice_base(net, axes, fixed)
    gm = GridMap((float(window[0]), float(window[1])), resolution, axes, base, "asset")
    label_of = [Partition.from_code(k, net.n).label for k in range(3**net.n)]
    a = base.copy()
    for x in gm.ticks:
        for y in gm.ticks:
            a[axes[0]], a[axes[1]] = x, y
            labels = tuple(label_of[code] for code, _ in equilibrium_codes(a, net))
            gm.cells.append(Cell((float(x), float(y)), len(labels), labels))
    return gm


def price_space_map(
    net: Network,
    window=DEFAULT_WINDOW,
    resolution: int = DEFAULT_RESOLUTION,
    axes=(0, 1),
    fixed=None,
) -> GridMap:
    """Label every point of a price-space grid with its partition (count is 1)."""
    resolution = _check_resolution(resolution)
    axes, base = _slice_base(net, axes, fixed)
    gm = GridMap((float(window[0]), float(window[1])), resolution, axes, base, "price")
    s = base.copy()
    for x in gm.ticks:
        for y in gm.ticks:
            s[axes[0]], s[axes[1]] = x, y
            gm.cells.append(Cell((float(x), float(y)), 1, (partition_of(s, net).label,)))
    return gm


@dataclass(frozen=True)
class OverlapSummary:
    histogram: dict[int, int]
    pairs: tuple[tuple[str, str], ...]
    label_sets: dict[tuple[str, ...], int]

    def has_pair(self, x: str, y: str) -> bool:
        return tuple(sorted((x, y))) in self.pairs

    def to_dict(self) -> dict:
        return {
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "pairs": [list(p) for p in self.pairs],
            "label_sets": {";".join(k): v for k, v in sorted(self.label_sets.items())},
        }


def overlap_summary(gm: GridMap) -> OverlapSummary:
    """Cells per equilibrium count and the partition pairs that co-occur."""
    hist = Counter(c.count for c in gm.cells)
    sets = Counter(c.labels for c in gm.cells)
    pairs = set()
    for labels in sets:
        for i, x in enumerate(labels):
            for y in labels[i + 1 :]:
                pairs.add(tuple(sorted((x, y))))
    return OverlapSummary(dict(sorted(hist.items())), tuple(sorted(pairs)), dict(sorted(sets.items())))

"""Weighted region metric over the lattice.

A weight map assigns every window cell a positive weight, possibly
infinite. A straight segment is priced piece by piece: pieces crossing a
cell's interior cost that cell's weight times their Euclidean length, and
pieces running along a lattice edge cost the cheaper of the two incident
cells. Cells outside the window count as infinitely heavy.
"""

import math
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .tessellation import (
    EDGE_COLLINEAR,
    Cell,
    Corner,
    Edge,
    Point,
    Tessellation,
    are_adjacent,
    corner_position,
    edge_cells,
    edge_key,
    segment_walk,
)


class WeightMap:
    """Positive cell weights on a rows x cols window.

    Infinity marks impassable cells. The value grid is kept read-only so a
    map can be shared freely; derive modified maps with replace().
    """

    __slots__ = ("values", "rows", "cols")

    def __init__(self, values: Sequence[Sequence[float]]):
        arr = np.array(values, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("weights must form a non-empty 2d grid")
        if np.isnan(arr).any() or (arr <= 0.0).any():
            raise ValueError("weights must be positive, or infinite for blocked cells")
        arr.setflags(write=False)
        self.values = arr
        self.rows, self.cols = arr.shape

    def effective(self, cell: Cell) -> float:
        """Weight seen by the metric: the stored value, or infinity outside."""
        row, col = cell
        if 0 <= row < self.rows and 0 <= col < self.cols:
            return float(self.values[row, col])
        return math.inf

    def replace(self, cell: Cell, weight: float) -> "WeightMap":
        """A copy of this map with one cell's weight changed."""
        row, col = cell
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise ValueError(f"cell outside the window: {cell!r}")
        out = np.array(self.values)
        out[row, col] = weight
        return WeightMap(out)

    def __repr__(self):
        return f"WeightMap({self.rows}x{self.cols})"


def edge_weight(weights: WeightMap, edge: Edge) -> float:
    """Min-rule weight of an edge: the cheaper of its two incident cells."""
    a, b = edge_cells(edge)
    return min(weights.effective(a), weights.effective(b))


def grid_edge_cost(weights: WeightMap, a: Corner, b: Corner) -> float:
    """Cost of one grid-graph edge; every lattice edge has length 2."""
    if not are_adjacent(a, b):
        raise ValueError(f"corners are not adjacent: {a!r}, {b!r}")
    return 2.0 * edge_weight(weights, edge_key(a, b))


def segment_cost(weights: WeightMap, p: Point, q: Point) -> float:
    """Weighted length of the straight segment from p to q.

    The walk never emits zero-length pieces, so infinite weights cannot
    meet zero lengths and the result is always well defined.
    """
    total = 0.0
    for rec in segment_walk(p, q):
        length = math.dist(rec.entry, rec.exit)
        if rec.kind == EDGE_COLLINEAR:
            w = edge_weight(weights, rec.edge)
        else:
            w = weights.effective(rec.cell)
        total += w * length
    return total


def polyline_cost(weights: WeightMap, points: Sequence[Point]) -> float:
    return sum(segment_cost(weights, p, q) for p, q in zip(points, points[1:]))


class CornerHopTable:
    """Flattened walk pieces for every pair of window corners.

    The walks depend only on the window shape, so one table serves every
    weight map of that shape; pricing all pairs under a map reduces to a
    couple of vectorized array operations.
    """

    def __init__(self, tess: Tessellation):
        self.rows = tess.rows
        self.cols = tess.cols
        self.corners = tess.corners
        n = len(self.corners)
        positions = [corner_position(c) for c in self.corners]
        pairs: List[Tuple[int, int]] = []
        pair_idx: List[int] = []
        lengths: List[float] = []
        cells_a: List[Cell] = []
        cells_b: List[Cell] = []
        for ai in range(n):
            for bi in range(ai + 1, n):
                k = len(pairs)
                pairs.append((ai, bi))
                for rec in segment_walk(positions[ai], positions[bi]):
                    if rec.kind == EDGE_COLLINEAR:
                        ca, cb = edge_cells(rec.edge)
                    else:
                        ca = cb = rec.cell
                    pair_idx.append(k)
                    lengths.append(math.dist(rec.entry, rec.exit))
                    cells_a.append(ca)
                    cells_b.append(cb)
        self.n_corners = n
        self.pairs = np.array(pairs, dtype=np.int32)
        self.pair_idx = np.array(pair_idx, dtype=np.int64)
        self.lengths = np.array(lengths)
        self.cells_a = np.array(cells_a, dtype=np.int64)
        self.cells_b = np.array(cells_b, dtype=np.int64)

    def cost_matrix(self, weights: WeightMap) -> np.ndarray:
        """Dense symmetric matrix of straight-hop costs between all corners."""
        if (weights.rows, weights.cols) != (self.rows, self.cols):
            raise ValueError("weight map shape does not match the table")
        wa = _effective_array(weights, self.cells_a)
        wb = _effective_array(weights, self.cells_b)
        contrib = np.minimum(wa, wb) * self.lengths
        per_pair = np.bincount(self.pair_idx, weights=contrib, minlength=len(self.pairs))
        m = np.zeros((self.n_corners, self.n_corners))
        ai, bi = self.pairs[:, 0], self.pairs[:, 1]
        m[ai, bi] = per_pair
        m[bi, ai] = per_pair
        return m


def _effective_array(weights: WeightMap, cells: np.ndarray) -> np.ndarray:
    rows, cols = cells[:, 0], cells[:, 1]
    inside = (rows >= 0) & (rows < weights.rows) & (cols >= 0) & (cols < weights.cols)
    out = np.full(len(cells), np.inf)
    vals = weights.values[np.clip(rows, 0, weights.rows - 1), np.clip(cols, 0, weights.cols - 1)]
    out[inside] = vals[inside]
    return out


_HOP_TABLES: Dict[Tuple[int, int], CornerHopTable] = {}


def corner_hop_table(tess: Tessellation) -> CornerHopTable:
    """Shared per-shape table; window shape fully determines the geometry."""
    key = (tess.rows, tess.cols)
    table = _HOP_TABLES.get(key)
    if table is None:
        table = _HOP_TABLES[key] = CornerHopTable(tess)
    return table

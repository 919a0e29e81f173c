"""Shortest paths through tessellation corners.

Two solvers share the corner set but differ in moves. The grid-path solver
walks single lattice edges between adjacent corners. The vertex-path solver
may hop in a straight line between any two corners, paying the weighted
length of the segment, so its moves form a complete graph priced by the
metric. Both resolve cost ties toward smaller (j, i) corner keys, which
makes results reproducible.
"""

import heapq
import math
from typing import Dict, NamedTuple, Tuple

import numpy as np

from .metric import WeightMap, corner_hop_table, grid_edge_cost
from .tessellation import Corner, Tessellation


class UnreachableError(Exception):
    """No finite-cost path exists between the endpoints."""


class InvalidCornerError(ValueError):
    """An endpoint is not a corner of the tessellation window."""


class PathResult(NamedTuple):
    path: Tuple[Corner, ...]
    cost: float


def _check_endpoints(tess: Tessellation, s: Corner, t: Corner):
    for c in (s, t):
        if not tess.valid_corner(c):
            raise InvalidCornerError(f"not a corner of the window: {c!r}")


def _reconstruct(parent: Dict[Corner, Corner], s: Corner, t: Corner) -> Tuple[Corner, ...]:
    out = [t]
    while out[-1] != s:
        out.append(parent[out[-1]])
    out.reverse()
    return tuple(out)


def shortest_grid_path(
    tess: Tessellation, weights: WeightMap, s: Corner, t: Corner
) -> PathResult:
    """Cheapest path that moves along lattice edges only."""
    _check_endpoints(tess, s, t)
    if s == t:
        return PathResult((s,), 0.0)
    dist: Dict[Corner, float] = {s: 0.0}
    parent: Dict[Corner, Corner] = {}
    done = set()
    heap = [(0.0, (s[1], s[0]), s)]
    while heap:
        d, _, node = heapq.heappop(heap)
        if node in done:
            continue  # stale heap entry for an already settled corner
        if node == t:
            return PathResult(_reconstruct(parent, s, t), d)
        done.add(node)
        for nb in tess.corner_neighbors(node):
            if nb in done:
                continue
            nd = d + grid_edge_cost(weights, node, nb)
            if math.isinf(nd):
                continue
            if nd < dist.get(nb, math.inf):
                dist[nb] = nd
                parent[nb] = node
                heapq.heappush(heap, (nd, (nb[1], nb[0]), nb))
    raise UnreachableError(f"no finite-cost grid path from {s!r} to {t!r}")


def shortest_vertex_path(
    tess: Tessellation, weights: WeightMap, s: Corner, t: Corner
) -> PathResult:
    """Cheapest corner-to-corner polyline under the segment metric.

    Every corner pair is a candidate hop, so the relaxation runs over dense
    rows of the shared hop-cost matrix instead of adjacency lists.
    """
    _check_endpoints(tess, s, t)
    if s == t:
        return PathResult((s,), 0.0)
    corners = tess.corners
    m = corner_hop_table(tess).cost_matrix(weights)
    n = len(corners)
    si, ti = tess.corner_ids[s], tess.corner_ids[t]
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    dist[si] = 0.0
    while True:
        masked = np.where(done, np.inf, dist)
        u = int(np.argmin(masked))  # first minimum, i.e. smallest (j, i)
        if math.isinf(masked[u]):
            raise UnreachableError(f"no finite-cost vertex path from {s!r} to {t!r}")
        if u == ti:
            break
        done[u] = True
        nd = dist[u] + m[u]
        better = nd < dist
        parent[better] = u
        dist[better] = nd[better]
    path = [ti]
    while path[-1] != si:
        path.append(int(parent[path[-1]]))
    return PathResult(tuple(corners[k] for k in reversed(path)), float(dist[ti]))

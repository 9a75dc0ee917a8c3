"""Tree-network simulator.

Places nodes uniformly in the unit square, grows a rooted tree from the
sink at the center (unit-disk reachability, breadth-first adoption,
nearest neighbours first), and measures per-pair path lengths and
per-level forwarding load under two application designs:

* orchestration: every exchange travels to the sink and back down,
* choreography: exchanges use the shortest path inside the tree.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

ORCHESTRATION = "orchestration"
CHOREOGRAPHY = "choreography"
DESIGNS = (ORCHESTRATION, CHOREOGRAPHY)


class NotAttachedError(Exception):
    pass


class TooFewNodesError(Exception):
    pass


def _check_design(design: str) -> None:
    if design not in DESIGNS:
        raise ValueError(f"design must be one of {DESIGNS}, got '{design}'")


@dataclass(frozen=True)
class TopologyParams:
    """Knobs for the random tree: count, radio range, shape caps, seed."""

    n: int
    radius: float
    th_max: int  # max depth of any node (sink is depth 0)
    in_max: int  # max children of one parent that may themselves route
    n_max: int  # max children of one parent
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 < self.radius <= 1:
            raise ValueError("radius must be in (0, 1]")
        if self.th_max < 0:
            raise ValueError("th_max must be >= 0")
        if self.in_max < 0 or self.n_max < 0:
            raise ValueError("in_max and n_max must be >= 0")
        if self.in_max > self.n_max:
            raise ValueError("in_max cannot exceed n_max")


@dataclass
class TreeTopology:
    """A rooted tree over placed nodes; unattached nodes keep depth -1."""

    positions: np.ndarray  # (n, 2)
    parent: np.ndarray  # (n,) int, -1 for the sink and unattached nodes
    depth: np.ndarray  # (n,) int, -1 for unattached nodes
    attached: np.ndarray  # (n,) bool
    sink: int = 0

    @property
    def n(self) -> int:
        return len(self.parent)

    def attached_ids(self) -> np.ndarray:
        return np.flatnonzero(self.attached)

    def endpoint_ids(self) -> np.ndarray:
        """Attached nodes that can be path endpoints (the sink is excluded)."""
        ids = self.attached_ids()
        return ids[ids != self.sink]

    def children(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = defaultdict(list)
        for child in self.attached_ids():
            p = int(self.parent[child])
            if p >= 0:
                out[p].append(int(child))
        return dict(out)

    def path_to_sink(self, i: int) -> list[int]:
        path = [int(i)]
        while path[-1] != self.sink:
            path.append(int(self.parent[path[-1]]))
        return path

    def lca(self, i: int, j: int) -> int:
        a, b = int(i), int(j)
        while self.depth[a] > self.depth[b]:
            a = int(self.parent[a])
        while self.depth[b] > self.depth[a]:
            b = int(self.parent[b])
        while a != b:
            a = int(self.parent[a])
            b = int(self.parent[b])
        return a


def from_parents(parents: list[int], positions: np.ndarray | None = None) -> TreeTopology:
    """Build a topology from a parent array (index 0 is the sink, parent -1)."""
    n = len(parents)
    if n == 0 or parents[0] != -1:
        raise ValueError("parents[0] must be the sink with parent -1")
    parent = np.asarray(parents, dtype=np.int64)
    depth = np.full(n, -1, dtype=np.int64)
    depth[0] = 0
    # parents may appear in any order; resolve depths iteratively
    remaining = set(range(1, n))
    while remaining:
        progressed = False
        for v in sorted(remaining):
            p = parent[v]
            if p < 0 or p >= n:
                raise ValueError(f"node {v} has invalid parent {p}")
            if depth[p] >= 0:
                depth[v] = depth[p] + 1
                remaining.discard(v)
                progressed = True
        if not progressed:
            raise ValueError("parent array contains a cycle")
    if positions is None:
        # synthetic layout: x by depth, y by index
        positions = np.stack([depth / max(1, depth.max()), np.linspace(0, 1, n)], axis=1)
    return TreeTopology(
        positions=np.asarray(positions, dtype=float),
        parent=parent,
        depth=depth,
        attached=np.ones(n, dtype=bool),
    )


def linear_chain(n: int) -> TreeTopology:
    """Sink plus a line of ``n`` nodes below it (depths 1..n)."""
    if n < 1:
        raise ValueError("a chain needs at least one node below the sink")
    return from_parents([-1] + list(range(n)))


def build_tree(params: TopologyParams) -> TreeTopology:
    """Grow a tree from the sink at the square's center.

    Breadth-first: each frontier node adopts the unattached nodes inside its
    radio range, nearest first, while honouring the per-parent child cap
    (n_max), the per-parent router cap (in_max) and the height cap (th_max).
    Nodes out of reach stay unattached and are excluded from statistics.
    """
    rng = np.random.default_rng(params.seed)
    n = params.n
    positions = rng.random((n, 2))
    positions[0] = (0.5, 0.5)

    parent = np.full(n, -1, dtype=np.int64)
    depth = np.full(n, -1, dtype=np.int64)
    depth[0] = 0
    attached = np.zeros(n, dtype=bool)
    attached[0] = True
    if n == 1 or params.th_max == 0 or params.n_max == 0:
        return TreeTopology(positions, parent, depth, attached)

    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))

    child_count = np.zeros(n, dtype=np.int64)
    router_children = np.zeros(n, dtype=np.int64)
    unattached = set(range(1, n))
    frontier = [0]
    head = 0
    while head < len(frontier):
        v = frontier[head]
        head += 1
        if depth[v] >= params.th_max:
            continue
        if v != 0 and child_count[v] == 0:
            # v would turn into a router; its parent must have a slot left
            if router_children[parent[v]] >= params.in_max:
                continue
        candidates = sorted(
            (u for u in unattached if dist[v, u] <= params.radius),
            key=lambda u: (dist[v, u], u),
        )
        for u in candidates:
            if child_count[v] >= params.n_max:
                break
            parent[u] = v
            depth[u] = depth[v] + 1
            attached[u] = True
            unattached.discard(u)
            child_count[v] += 1
            if child_count[v] == 1 and v != 0:
                router_children[parent[v]] += 1
            frontier.append(u)
    return TreeTopology(positions, parent, depth, attached)


def path_length(t: TreeTopology, i: int, j: int, design: str) -> int:
    """Hop count between two attached non-sink nodes under one design."""
    _check_design(design)
    if i == j:
        raise ValueError("i and j must differ")
    for v in (i, j):
        if not t.attached[v]:
            raise NotAttachedError(f"node {v} is not attached to the tree")
    d = int(t.depth[i] + t.depth[j])
    if design == ORCHESTRATION:
        return d
    return d - 2 * int(t.depth[t.lca(i, j)])


@dataclass
class PathStats:
    design: str
    histogram: dict[int, int]
    mean: float
    pairs: int


def _ancestor_table(t: TreeTopology, ids: np.ndarray) -> np.ndarray:
    """anc[row, k] = ancestor of ids[row] at depth k, row-unique sentinel above."""
    m = ids.size
    max_depth = int(t.depth[ids].max())
    anc = np.empty((m, max_depth + 1), dtype=np.int64)
    for row, node in enumerate(ids):
        anc[row, :] = -(row + 1)
        v = int(node)
        for k in range(int(t.depth[node]), -1, -1):
            anc[row, k] = v
            v = int(t.parent[v]) if v != t.sink else v
    return anc


def pair_length_matrix(t: TreeTopology, design: str) -> tuple[np.ndarray, np.ndarray]:
    """(endpoint ids, hop-count matrix) for one design; diagonal is 0-based filler."""
    _check_design(design)
    ids = t.endpoint_ids()
    m = ids.size
    if m < 2:
        raise TooFewNodesError(f"need at least 2 attached non-sink nodes, have {m}")
    d = t.depth[ids]
    lengths = d[:, None] + d[None, :]
    if design == CHOREOGRAPHY:
        anc = _ancestor_table(t, ids)
        lca_depth = np.zeros((m, m), dtype=np.int64)
        for k in range(1, anc.shape[1]):
            col = anc[:, k]
            lca_depth += col[:, None] == col[None, :]
        lengths = lengths - 2 * lca_depth
    return ids, lengths


def all_pairs_stats(t: TreeTopology, design: str) -> PathStats:
    """Histogram and mean of path lengths over all unordered endpoint pairs."""
    ids, lengths = pair_length_matrix(t, design)
    m = ids.size
    iu = np.triu_indices(m, 1)
    vals = lengths[iu]
    counts = np.bincount(vals)
    histogram = {int(length): int(c) for length, c in enumerate(counts) if c}
    return PathStats(design, histogram, float(vals.mean()), int(vals.size))


@dataclass
class LoadReport:
    """Per-level forwarding counts and delivery ratio of one experiment."""

    design: str
    sent: int
    delivered: int
    dropped: int
    pdr: float
    per_level: dict[int, int] = field(default_factory=dict)
    top_level_activity: int = 0


def _route(t: TreeTopology, i: int, j: int, design: str) -> list[int]:
    if design == ORCHESTRATION:
        up = t.path_to_sink(i)
        down = t.path_to_sink(j)[::-1]
        return up + down[1:]
    meet = t.lca(i, j)
    up = []
    v = int(i)
    while v != meet:
        up.append(v)
        v = int(t.parent[v])
    down = []
    v = int(j)
    while v != meet:
        down.append(v)
        v = int(t.parent[v])
    return up + [meet] + down[::-1]


def run_load_experiment(
    t: TreeTopology,
    design: str,
    pairs: int,
    messages_per_pair: int,
    capacity: int,
    seed: int = 0,
) -> LoadReport:
    """Route random sensor-to-actuator traffic in discrete rounds.

    Each pair originates one message per round. A message advances one hop
    per round; a relay that already forwarded ``capacity`` packets in the
    round drops the excess. ``float('inf')`` capacity disables loss.
    """
    _check_design(design)
    if capacity < 1:
        raise ValueError("capacity must be >= 1")
    rng = np.random.default_rng(seed)
    endpoints = t.endpoint_ids()
    if endpoints.size < 2 or pairs < 1 or messages_per_pair < 1:
        return LoadReport(design, 0, 0, 0, 1.0)

    routes = []
    for _ in range(pairs):
        i = int(endpoints[rng.integers(endpoints.size)])
        j = i
        while j == i:
            j = int(endpoints[rng.integers(endpoints.size)])
        routes.append(_route(t, i, j, design))

    per_level: dict[int, int] = defaultdict(int)
    delivered = 0
    dropped = 0
    sent = pairs * messages_per_pair

    inflight: list[list] = []  # [route, position], stable creation order
    round_idx = 0
    while round_idx < messages_per_pair or inflight:
        if round_idx < messages_per_pair:
            for route in routes:
                inflight.append([route, 0])
        budget: dict[int, int] = defaultdict(int)
        survivors = []
        for item in inflight:
            route, pos = item
            tx = route[pos]
            if pos > 0:  # a relay transmission, subject to capacity
                if budget[tx] >= capacity:
                    dropped += 1
                    continue
                budget[tx] += 1
                per_level[int(t.depth[tx])] += 1
            pos += 1
            item[1] = pos
            if pos == len(route) - 1:
                delivered += 1
            else:
                survivors.append(item)
        inflight = survivors
        round_idx += 1

    return LoadReport(
        design=design,
        sent=sent,
        delivered=delivered,
        dropped=dropped,
        pdr=delivered / sent if sent else 1.0,
        per_level=dict(sorted(per_level.items())),
        top_level_activity=per_level.get(1, 0),
    )


def dump_edge_list(t: TreeTopology) -> str:
    """One attached non-sink node per line: ``child parent depth x y``."""
    lines = []
    for v in t.endpoint_ids():
        x, y = t.positions[v]
        lines.append(f"{int(v)} {int(t.parent[v])} {int(t.depth[v])} {x:.6f} {y:.6f}")
    return "\n".join(lines) + ("\n" if lines else "")

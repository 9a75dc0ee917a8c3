import random
from collections import deque
from fractions import Fraction

import numpy as np
import pytest

from dlite.netsim import (
    CHOREOGRAPHY,
    ORCHESTRATION,
    NotAttachedError,
    TooFewNodesError,
    TopologyParams,
    all_pairs_stats,
    build_tree,
    dump_edge_list,
    from_parents,
    linear_chain,
    pair_length_matrix,
    path_length,
    run_load_experiment,
)

# Hand-encoded 16-node example tree: node 9 hangs under router 2, node 13
# under router 7 which is also a child of router 2.
FIG_TREE = [-1, 0, 0, 0, 1, 1, 2, 2, 3, 2, 4, 5, 6, 7, 8, 10]


def params(**kw):
    base = dict(n=40, radius=0.3, th_max=5, in_max=3, n_max=5, seed=1)
    base.update(kw)
    return TopologyParams(**base)


# -- independent oracle: plain BFS over the undirected tree edges -------------


def bfs_hops(topo, src):
    adj = {}
    for child in topo.attached_ids():
        p = int(topo.parent[child])
        if p >= 0:
            adj.setdefault(int(child), []).append(p)
            adj.setdefault(p, []).append(int(child))
    dist = {int(src): 0}
    queue = deque([int(src)])
    while queue:
        v = queue.popleft()
        for w in adj.get(v, ()):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def oracle_length(topo, i, j, design):
    if design == CHOREOGRAPHY:
        return bfs_hops(topo, i)[int(j)]
    return bfs_hops(topo, i)[topo.sink] + bfs_hops(topo, j)[topo.sink]


# -- tree construction -------------------------------------------------------


def test_single_node_tree():
    topo = build_tree(params(n=1, th_max=3))
    assert topo.attached.tolist() == [True]
    assert topo.depth.tolist() == [0]


def test_th_max_zero_attaches_only_sink():
    topo = build_tree(params(n=20, th_max=0, radius=1.0))
    assert topo.attached.sum() == 1


def test_star_topology():
    topo = build_tree(params(n=30, th_max=1, in_max=29, n_max=29, radius=1.0))
    assert topo.attached.all()
    assert (topo.depth[1:] == 1).all()


def test_build_is_deterministic():
    a = build_tree(params(seed=77))
    b = build_tree(params(seed=77))
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.parent, b.parent)
    assert np.array_equal(a.depth, b.depth)
    c = build_tree(params(seed=78))
    assert not np.array_equal(a.positions, c.positions)


def test_tree_invariants_property():
    rng = random.Random(5)
    for _ in range(80):
        n_max = rng.randint(1, 8)
        p = TopologyParams(
            n=rng.randint(1, 60),
            radius=rng.choice([0.08, 0.15, 0.3, 0.6, 1.0]),
            th_max=rng.randint(0, 8),
            in_max=rng.randint(0, n_max),
            n_max=n_max,
            seed=rng.randint(0, 10_000),
        )
        topo = build_tree(p)
        assert topo.depth[0] == 0
        assert topo.attached[0]
        children = topo.children()
        for v, kids in children.items():
            assert len(kids) <= p.n_max
            routers = [k for k in kids if children.get(k)]
            assert len(routers) <= p.in_max
        for v in topo.attached_ids():
            v = int(v)
            if v == 0:
                continue
            parent = int(topo.parent[v])
            assert topo.attached[parent]
            assert topo.depth[v] == topo.depth[parent] + 1
            assert topo.depth[v] <= p.th_max
            assert np.linalg.norm(topo.positions[v] - topo.positions[parent]) <= p.radius
        for v in np.flatnonzero(~topo.attached):
            assert topo.depth[v] == -1
            assert topo.parent[v] == -1


def test_params_validation():
    with pytest.raises(ValueError):
        TopologyParams(n=0, radius=0.5, th_max=1, in_max=1, n_max=1)
    with pytest.raises(ValueError):
        TopologyParams(n=5, radius=0.0, th_max=1, in_max=1, n_max=1)
    with pytest.raises(ValueError):
        TopologyParams(n=5, radius=0.5, th_max=1, in_max=3, n_max=2)


# -- path lengths ----------------------------------------------------------


def test_fig_tree_micro_check():
    topo = from_parents(FIG_TREE)
    assert path_length(topo, 9, 13, CHOREOGRAPHY) == 3
    assert path_length(topo, 9, 13, ORCHESTRATION) == 5


def test_star_siblings_two_hops():
    topo = build_tree(params(n=10, th_max=1, in_max=9, n_max=9, radius=1.0))
    assert path_length(topo, 3, 7, ORCHESTRATION) == 2
    assert path_length(topo, 3, 7, CHOREOGRAPHY) == 2


def test_chain_paths():
    topo = linear_chain(6)
    assert path_length(topo, 2, 5, CHOREOGRAPHY) == 3
    assert path_length(topo, 2, 5, ORCHESTRATION) == 7


def test_path_length_errors():
    topo = None
    for seed in range(50):
        candidate = build_tree(params(n=30, radius=0.2, seed=seed))
        if candidate.endpoint_ids().size and (~candidate.attached).sum():
            topo = candidate
            break
    assert topo is not None, "no partially-attached topology found"
    unattached = np.flatnonzero(~topo.attached)
    first_attached = int(topo.endpoint_ids()[0])
    with pytest.raises(NotAttachedError):
        path_length(topo, first_attached, int(unattached[0]), CHOREOGRAPHY)
    with pytest.raises(ValueError):
        path_length(topo, first_attached, first_attached, CHOREOGRAPHY)
    with pytest.raises(ValueError):
        path_length(topo, 1, 2, "peer-to-peer")


def test_paths_match_bfs_oracle():
    rng = random.Random(11)
    for _ in range(10):
        topo = build_tree(params(n=35, radius=0.35, seed=rng.randint(0, 999)))
        ids = topo.endpoint_ids()
        if ids.size < 2:
            continue
        for _ in range(20):
            i, j = rng.sample([int(v) for v in ids], 2)
            for design in (ORCHESTRATION, CHOREOGRAPHY):
                assert path_length(topo, i, j, design) == oracle_length(topo, i, j, design)


# -- all-pairs statistics ------------------------------------------------------


def test_chain_means_match_closed_forms():
    topo = linear_chain(5)
    orch = all_pairs_stats(topo, ORCHESTRATION)
    chor = all_pairs_stats(topo, CHOREOGRAPHY)
    assert orch.mean == 6.0
    assert chor.mean == 2.0
    assert orch.pairs == chor.pairs == 10


def test_star_means_are_two():
    topo = build_tree(params(n=40, th_max=1, in_max=39, n_max=39, radius=1.0))
    for design in (ORCHESTRATION, CHOREOGRAPHY):
        stats = all_pairs_stats(topo, design)
        assert stats.mean == 2.0
        assert stats.histogram == {2: 39 * 38 // 2}


def test_histogram_matches_oracle_enumeration():
    rng = random.Random(4)
    for _ in range(8):
        topo = build_tree(params(n=30, radius=0.4, seed=rng.randint(0, 999)))
        ids = [int(v) for v in topo.endpoint_ids()]
        if len(ids) < 2:
            continue
        for design in (ORCHESTRATION, CHOREOGRAPHY):
            expected = {}
            for a in range(len(ids)):
                hops = bfs_hops(topo, ids[a])
                sink_hops = bfs_hops(topo, topo.sink)
                for b in range(a + 1, len(ids)):
                    if design == CHOREOGRAPHY:
                        length = hops[ids[b]]
                    else:
                        length = hops[topo.sink] + sink_hops[ids[b]]
                    expected[length] = expected.get(length, 0) + 1
            assert all_pairs_stats(topo, design).histogram == expected


def test_mean_is_exact_ratio_of_histogram():
    topo = build_tree(params(n=50, radius=0.3, seed=9))
    stats = all_pairs_stats(topo, CHOREOGRAPHY)
    total = sum(stats.histogram.values())
    weighted = sum(k * v for k, v in stats.histogram.items())
    assert stats.pairs == total
    assert Fraction(weighted, total) == Fraction(stats.mean).limit_denominator(10**9)


def test_dominance_choreography_never_longer():
    rng = random.Random(2)
    for _ in range(20):
        topo = build_tree(params(n=45, radius=0.3, seed=rng.randint(0, 9999)))
        if topo.endpoint_ids().size < 2:
            continue
        _, orch = pair_length_matrix(topo, ORCHESTRATION)
        ids, chor = pair_length_matrix(topo, CHOREOGRAPHY)
        assert (chor <= orch).all()
        # equality exactly when the lowest common ancestor is the sink
        for _ in range(10):
            i, j = rng.sample([int(v) for v in ids], 2)
            equal = path_length(topo, i, j, CHOREOGRAPHY) == path_length(topo, i, j, ORCHESTRATION)
            assert equal == (topo.lca(i, j) == topo.sink)


def test_too_few_nodes():
    topo = build_tree(params(n=2, th_max=1, in_max=1, n_max=1, radius=1.0))
    with pytest.raises(TooFewNodesError):
        all_pairs_stats(topo, ORCHESTRATION)


# -- load experiment ---------------------------------------------------------


def test_infinite_capacity_delivers_everything():
    topo = build_tree(params(n=40, radius=0.4, seed=8))
    for design in (ORCHESTRATION, CHOREOGRAPHY):
        rep = run_load_experiment(topo, design, pairs=30, messages_per_pair=10,
                                  capacity=10**9, seed=5)
        assert rep.pdr == 1.0
        assert rep.dropped == 0
        assert rep.sent == rep.delivered == 300


def test_conservation_sent_equals_delivered_plus_dropped():
    topo = build_tree(params(n=50, radius=0.25, seed=12))
    for design in (ORCHESTRATION, CHOREOGRAPHY):
        rep = run_load_experiment(topo, design, pairs=40, messages_per_pair=30,
                                  capacity=2, seed=3)
        assert rep.sent == rep.delivered + rep.dropped
        assert 0.0 <= rep.pdr <= 1.0
        assert all(v >= 0 for v in rep.per_level.values())


def test_load_reports_are_deterministic():
    topo = build_tree(params(n=50, radius=0.25, seed=12))
    a = run_load_experiment(topo, ORCHESTRATION, 40, 30, 2, seed=3)
    b = run_load_experiment(topo, ORCHESTRATION, 40, 30, 2, seed=3)
    assert a == b


def test_tight_capacity_concentrates_orchestration_on_top_level():
    rng = random.Random(21)
    wins_depth1 = 0
    wins_pdr = 0
    total = 0
    for _ in range(15):
        topo = build_tree(params(n=60, radius=0.16, th_max=6, seed=rng.randint(0, 9999)))
        if topo.endpoint_ids().size < 5:
            continue
        total += 1
        pairs = int(topo.endpoint_ids().size)
        orch = run_load_experiment(topo, ORCHESTRATION, pairs, 30, 2, seed=77)
        chor = run_load_experiment(topo, CHOREOGRAPHY, pairs, 30, 2, seed=77)
        wins_depth1 += orch.top_level_activity >= chor.top_level_activity
        wins_pdr += chor.pdr >= orch.pdr
    assert total >= 10
    assert wins_depth1 >= 0.9 * total
    assert wins_pdr >= 0.9 * total


def test_degenerate_topology_yields_vacuous_report():
    topo = build_tree(params(n=1))
    rep = run_load_experiment(topo, ORCHESTRATION, 10, 10, 1, seed=0)
    assert rep.sent == 0 and rep.pdr == 1.0


# -- misc -----------------------------------------------------------------------


def test_dump_edge_list_format():
    topo = from_parents(FIG_TREE)
    lines = dump_edge_list(topo).splitlines()
    assert len(lines) == 15
    child, parent, depth, x, y = lines[0].split()
    assert (int(child), int(parent), int(depth)) == (1, 0, 1)
    float(x), float(y)


def test_from_parents_rejects_cycles():
    with pytest.raises(ValueError):
        from_parents([-1, 2, 1])

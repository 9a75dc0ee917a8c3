#!/usr/bin/env python3
# Path lengths in a sensor tree under the two application designs.
# Orchestrated exchanges always detour via the sink; choreographed ones
# take the shortest path inside the tree.

from fractions import Fraction

from dlite import (
    CHOREOGRAPHY,
    ORCHESTRATION,
    TopologyParams,
    all_pairs_stats,
    build_tree,
    from_parents,
    linear_chain,
    mu_choreography,
    mu_orchestration,
    path_length,
)

# A hand-built 16-node tree: two sensors hang three levels apart.
tree = from_parents([-1, 0, 0, 0, 1, 1, 2, 2, 3, 2, 4, 5, 6, 7, 8, 10])
print("16-node tree, node 9 -> node 13:")
print(f"  choreography : {path_length(tree, 9, 13, CHOREOGRAPHY)} hops")
print(f"  orchestration: {path_length(tree, 9, 13, ORCHESTRATION)} hops")

# On a line the averages collapse to closed forms: n+1 versus (n+1)/3.
for n in (5, 20, 99):
    chain = linear_chain(n)
    orch = all_pairs_stats(chain, ORCHESTRATION)
    chor = all_pairs_stats(chain, CHOREOGRAPHY)
    print(f"\nline of {n}: simulated {orch.mean:.3f} / {chor.mean:.3f} hops"
          f"  closed form {mu_orchestration(n)} / {mu_choreography(n)}"
          f"  ratio {float(Fraction(1, 3)):.2%}")

# A random unit-disk tree: the gap persists, scaled by the tree's shape.
params = TopologyParams(n=100, radius=0.13, th_max=8, in_max=3, n_max=5, seed=11)
topology = build_tree(params)
attached = int(topology.attached.sum())
orch = all_pairs_stats(topology, ORCHESTRATION)
chor = all_pairs_stats(topology, CHOREOGRAPHY)
print(f"\nrandom tree ({attached}/{params.n} nodes attached, depth<={params.th_max}):")
print(f"  orchestration mean {orch.mean:.2f} hops over {orch.pairs} pairs")
print(f"  choreography  mean {chor.mean:.2f} hops, ratio {chor.mean / orch.mean:.0%}")

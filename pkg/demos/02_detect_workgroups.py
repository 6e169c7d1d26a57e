"""Detect hierarchical workgroups on a synthetic organization.

Synthesizes a two-level organization, runs the size sweep with elbow
selection, then detects the hierarchy at the chosen maximum community size
and compares against the planted structure.
"""

import numpy as np

from orgmap import SynthConfig, detect_hierarchy, modularity, sweep_and_elbow, synthesize

result = synthesize(SynthConfig(seed=7))
g = result.graph
print(f"synthetic org: {g.n_nodes} people, {g.n_edges} ties")
print(f"planted: {result.planted_hierarchy.leaf_partition.n_communities} leaf workgroups")

curve, chosen = sweep_and_elbow(g, [20, 40, 80, 160, 320], seed=7)
print("size sweep (max size -> leaf modularity):")
for size, q in curve.points:
    marker = "  <- elbow" if size == chosen else ""
    print(f"   {size:4d} -> {q:.3f}{marker}")

hierarchy = detect_hierarchy(g, max_size=chosen, seed=7)
leaf = hierarchy.leaf_partition
sizes = sorted((len(m) for m in leaf.communities().values()), reverse=True)
print(f"detected {leaf.n_communities} leaf workgroups over {hierarchy.depth} levels")
print(f"leaf sizes: {sizes[:12]}{' ...' if len(sizes) > 12 else ''}")
print(f"leaf modularity: {modularity(g, leaf):.3f}")

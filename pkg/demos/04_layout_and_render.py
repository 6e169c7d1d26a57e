"""Lay out a synthetic organization and render themed workgroup maps.

Runs the three-phase layout (anneal, expand, contract), then renders the
node-only overview map, a highlight map, and a metric-colored map under a
dark theme. SVGs land in demos/out/.
"""

from pathlib import Path

from orgmap import (
    LayoutConfig,
    MapSpec,
    SliderState,
    SynthConfig,
    derive_theme,
    layout_pipeline,
    render_map,
    synthesize,
)
from orgmap.metrics import aggregate_node_metric

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

result = synthesize(SynthConfig(top_level_communities=5, size_range=(40, 100),
                                hierarchy_depth=1, seed=11))
g = result.graph
leaf = result.planted_hierarchy.leaf_partition
print(f"laying out {g.n_nodes} nodes...")
layout = layout_pipeline(g, LayoutConfig(seed=11))

theme = derive_theme(SliderState(accent_hue=160, background_level=35, mode="dark"))

overview = render_map(MapSpec(layout, coloring="nominal", communities=leaf), theme)
(out / "map_overview.svg").write_text(overview)

spotlight = render_map(
    MapSpec(layout, coloring="nominal", communities=leaf, highlight=2), theme
)
(out / "map_highlight.svg").write_text(spotlight)

# color nodes by their workgroup's synthetic freedom value
node_freedom = result.node_metrics["freedom"]
by_comm = aggregate_node_metric(node_freedom, leaf)
values = {n: by_comm[leaf.assignment[n]] for n in g.node_ids if by_comm[leaf.assignment[n]] is not None}
metric_map = render_map(
    MapSpec(layout, coloring="sequential", metrics={"freedom": values}, metric_name="freedom"),
    theme,
)
(out / "map_freedom.svg").write_text(metric_map)

print(f"wrote {out / 'map_overview.svg'}")
print(f"wrote {out / 'map_highlight.svg'}")
print(f"wrote {out / 'map_freedom.svg'}")

"""Run the whole pipeline on a synthetic organization.

Synthesizes an org, writes its edge lists, org chart, and monthly variants
in the pipeline's input formats, then runs every stage end to end and
prints the manifest. Everything lands in demos/out/pipeline/.
"""

import json
from pathlib import Path

from orgmap import PipelineConfig, SynthConfig, run_pipeline, synthesize
from orgmap.graph import write_edge_list, write_org_csv
from orgmap.synthesis import org_tree_from_hierarchy, synthesize_monthly_series

base_dir = Path(__file__).parent / "out" / "pipeline"
base_dir.mkdir(parents=True, exist_ok=True)

result = synthesize(SynthConfig(top_level_communities=5, size_range=(20, 50),
                                hierarchy_depth=1, inter_edge_fraction=0.1, seed=17))
write_edge_list(result.graph, base_dir / "edges_longitudinal.csv")
months = ["2024-01", "2024-02", "2024-03", "2024-04"]
monthly_paths = {}
for label, graph in synthesize_monthly_series(result, months, 0.15, seed=17).items():
    path = base_dir / f"edges_{label}.csv"
    write_edge_list(graph, path)
    monthly_paths[label] = str(path)
write_org_csv(
    [org_tree_from_hierarchy(result.graph, result.planted_hierarchy)],
    base_dir / "org.csv",
)

manifest = run_pipeline(
    PipelineConfig(
        out_dir=str(base_dir / "artifacts"),
        edges=str(base_dir / "edges_longitudinal.csv"),
        monthly_edges=monthly_paths,
        org=str(base_dir / "org.csv"),
        months=months,
        max_size=60,
        seed=17,
        sliders={"accentHue": 205, "backgroundLevel": 30},
    )
)

print(f"{manifest['workgroups']} workgroups over {len(manifest['months'])} months")
print("artifacts:")
for artifact in manifest["artifacts"]:
    print(f"  {artifact['name']:<22} {artifact['path']:<28} {artifact['sha256'][:12]}")
print(f"\nopen {base_dir / 'artifacts' / 'deck.html'} in a browser for the stamped deck")

"""Command-line front end: one subcommand per pipeline stage plus the full
pipeline and the local theme service."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .community import detect_hierarchy, sweep_and_elbow
from .graph import (
    read_edge_list,
    read_partition_csv,
    write_edge_list,
    write_org_csv,
    write_partition_csv,
)
from .ingest import induce_series, load_org_snapshots, parse_message_log
from .layout import LayoutConfig, layout_pipeline, read_positions_csv, write_positions_csv
from .pipeline import PipelineConfig, PipelineError, run_pipeline
from .render import MapSpec, QuadrantSpec, default_thresholds, render_map, render_quadrant
from .synthesis import (
    SynthConfig,
    org_tree_from_hierarchy,
    synthesize,
    synthesize_monthly_series,
)
from .theming import clamp_sliders, derive_theme, theme_from_json, theme_to_json

SEED_OPTION = dict(default=0, show_default=True, envvar="ORGMAP_SEED", help="Random seed (env ORGMAP_SEED).")


@click.group()
def main():
    """Workgroup mapping toolkit: induce, detect, measure, lay out, theme,
    render, and stamp."""


@main.command()
@click.option("--logs", required=True, type=click.Path(exists=True), help="Message log CSV or JSON-lines.")
@click.option("--months", default=None, help="Comma-separated YYYY-MM labels (default: all present).")
@click.option("--min-total", default=4, show_default=True)
@click.option("--min-each-direction", default=1, show_default=True)
@click.option("--hash-salt", default=None, help="Pseudonymize ids with this salt.")
@click.option("--out", required=True, type=click.Path(), help="Output directory.")
def induce(logs, months, min_total, min_each_direction, hash_salt, out):
    """Induce monthly and longitudinal collaboration networks from logs."""
    records, diags = parse_message_log(logs, hash_salt=hash_salt)
    for diag in diags:
        click.echo(f"warning: {diag}", err=True)
    month_list = months.split(",") if months else None
    series = induce_series(records, month_list, min_total, min_each_direction)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for month, graph in series.graphs.items():
        write_edge_list(graph, out_dir / f"edges_{month}.csv")
    write_edge_list(series.longitudinal, out_dir / "edges_longitudinal.csv")
    click.echo(
        f"induced {len(series.months)} monthly graphs; longitudinal "
        f"n={series.longitudinal.n_nodes} m={series.longitudinal.n_edges}"
    )


@main.command()
@click.option("--edges", required=True, type=click.Path(exists=True))
@click.option("--max-size", default=None, type=int, help="Maximum leaf community size.")
@click.option("--sweep", is_flag=True, help="Pick max size by elbow over a size sweep.")
@click.option("--seed", **SEED_OPTION)
@click.option("--out", required=True, type=click.Path())
def communities(edges, max_size, sweep, seed, out):
    """Detect hierarchical workgroups on an edge list."""
    g = read_edge_list(edges)
    if sweep or max_size is None:
        curve, max_size = sweep_and_elbow(g, None, seed)
        click.echo("size sweep: " + ", ".join(f"{s}:{q:.3f}" for s, q in curve.points))
        click.echo(f"elbow max size: {max_size}")
    hierarchy = detect_hierarchy(g, max_size, seed)
    write_partition_csv(hierarchy.levels, out)
    click.echo(
        f"{hierarchy.leaf_partition.n_communities} leaf workgroups "
        f"across {hierarchy.depth} levels -> {out}"
    )


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), help="Pipeline config JSON.")
@click.option("--out", "out_dir", type=click.Path(), help="Output directory (with --edges/--logs).")
@click.option("--logs", type=click.Path(exists=True))
@click.option("--edges", type=click.Path(exists=True))
@click.option("--org", type=click.Path())
@click.option("--max-size", type=int, default=None)
@click.option("--seed", **SEED_OPTION)
def pipeline(config_path, out_dir, logs, edges, org, max_size, seed):
    """Run the whole pipeline from a config file or quick flags."""
    if config_path:
        cfg = PipelineConfig.from_json(Path(config_path).read_text())
    else:
        if not out_dir:
            raise click.UsageError("provide --config or --out with --logs/--edges")
        cfg = PipelineConfig(
            out_dir=out_dir, logs=logs, edges=edges, org=org, max_size=max_size, seed=seed
        )
    try:
        manifest = run_pipeline(cfg)
    except PipelineError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"wrote {len(manifest['artifacts'])} artifacts to {cfg.out_dir}")


@main.command()
@click.option("--communities", "n_communities", default=10, show_default=True)
@click.option("--size-range", default="20,120", show_default=True)
@click.option("--depth", default=2, show_default=True)
@click.option("--inter-fraction", default=0.15, show_default=True)
@click.option("--months", default=0, help="Also emit this many rewired monthly edge lists.")
@click.option("--seed", **SEED_OPTION)
@click.option("--out", required=True, type=click.Path())
def synth(n_communities, size_range, depth, inter_fraction, months, seed, out):
    """Generate a synthetic organization (edge list, workgroups, org tree,
    node metrics) that round-trips through the pipeline."""
    lo, hi = (int(x) for x in size_range.split(","))
    cfg = SynthConfig(
        top_level_communities=n_communities,
        size_range=(lo, hi),
        hierarchy_depth=depth,
        inter_edge_fraction=inter_fraction,
        seed=seed,
    )
    result = synthesize(cfg)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_edge_list(result.graph, out_dir / "edges_longitudinal.csv")
    write_partition_csv(result.planted_hierarchy.levels, out_dir / "planted_workgroups.csv")
    tree = org_tree_from_hierarchy(result.graph, result.planted_hierarchy)
    write_org_csv([tree], out_dir / "org.csv")
    for name, values in sorted(result.node_metrics.items()):
        with open(out_dir / f"metric_{name}.csv", "w") as fh:
            fh.write("person_id,value\n")
            for node in sorted(values):
                fh.write(f"{node},{values[node]:.10g}\n")
    if months:
        labels = [f"2024-{m + 1:02d}" for m in range(months)]
        series = synthesize_monthly_series(result, labels, seed=seed)
        for label, graph in series.items():
            write_edge_list(graph, out_dir / f"edges_{label}.csv")
    click.echo(
        f"synthesized n={result.graph.n_nodes} m={result.graph.n_edges} "
        f"({result.planted_hierarchy.leaf_partition.n_communities} leaf workgroups)"
    )


@main.command()
@click.option("--edges", required=True, type=click.Path(exists=True))
@click.option("--seed", **SEED_OPTION)
@click.option("--out", required=True, type=click.Path())
def layout(edges, seed, out):
    """Compute the three-phase people-network layout."""
    g = read_edge_list(edges)
    result = layout_pipeline(g, LayoutConfig(seed=seed))
    write_positions_csv(result, out)
    click.echo(f"laid out {len(result.positions)} nodes -> {out}")


@main.command()
@click.option("--positions", required=True, type=click.Path(exists=True))
@click.option("--partition", "partition_path", type=click.Path(exists=True))
@click.option("--metric", "metric_path", type=click.Path(exists=True), help="CSV person_id,value for sequential coloring.")
@click.option("--metric-name", default="metric")
@click.option("--highlight", type=int, default=None)
@click.option("--theme", "theme_path", type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def render(positions, partition_path, metric_path, metric_name, highlight, theme_path, out):
    """Render a themed workgroup map SVG."""
    layout_result = read_positions_csv(positions)
    theme = _load_theme(theme_path)
    if metric_path:
        values = {}
        with open(metric_path) as fh:
            next(fh)
            for line in fh:
                node, value = line.strip().split(",")
                values[node] = float(value)
        spec = MapSpec(
            layout_result,
            coloring="sequential",
            metrics={metric_name: values},
            metric_name=metric_name,
        )
    else:
        if not partition_path:
            raise click.UsageError("nominal coloring needs --partition")
        levels = read_partition_csv(partition_path)
        spec = MapSpec(
            layout_result, coloring="nominal", communities=levels[-1], highlight=highlight
        )
    Path(out).write_text(render_map(spec, theme))
    click.echo(f"wrote {out}")


@main.command()
@click.option("--metrics", "metrics_path", required=True, type=click.Path(exists=True), help="CSV workgroup_id,size,freedom,fluidity.")
@click.option("--theme", "theme_path", type=click.Path(exists=True))
@click.option("--freedom-threshold", type=float, default=None)
@click.option("--fluidity-threshold", type=float, default=None)
@click.option("--out", required=True, type=click.Path())
def quadrant(metrics_path, theme_path, freedom_threshold, fluidity_threshold, out):
    """Render the 2x2 freedom/fluidity chart from a metrics CSV."""
    points = []
    with open(metrics_path) as fh:
        next(fh)
        for line in fh:
            wid, size, free, fluid = line.strip().split(",")
            if free and fluid:
                points.append((int(wid), float(free), float(fluid), int(size)))
    if not points:
        raise click.ClickException("no workgroups with both metrics")
    thresholds = default_thresholds(points)
    if freedom_threshold is not None:
        thresholds = (freedom_threshold, thresholds[1])
    if fluidity_threshold is not None:
        thresholds = (thresholds[0], fluidity_threshold)
    theme = _load_theme(theme_path)
    Path(out).write_text(render_quadrant(QuadrantSpec(points, thresholds), theme))
    click.echo(f"wrote {out}")


def _load_theme(theme_path):
    if theme_path:
        return theme_from_json(Path(theme_path).read_text())
    return derive_theme(clamp_sliders({})[0])


@main.command()
@click.option("--sliders", "sliders_json", default="{}", help="Slider JSON, e.g. '{\"accentHue\": 200}'.")
@click.option("--sliders-file", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="Write here instead of stdout.")
def theme(sliders_json, sliders_file, out):
    """Derive a theme JSON from slider values."""
    raw = json.loads(Path(sliders_file).read_text()) if sliders_file else json.loads(sliders_json)
    state, warnings = clamp_sliders(raw)
    for w in warnings:
        click.echo(f"warning: {w}", err=True)
    text = theme_to_json(derive_theme(state))
    if out:
        Path(out).write_text(text)
        click.echo(f"wrote {out}")
    else:
        sys.stdout.write(text)


@main.command()
@click.option("--template", required=True, type=click.Path(exists=True))
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True))
@click.option("--media-dir", type=click.Path(exists=True), default=None)
@click.option("--theme", "theme_path", type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path(), help="Output HTML path (deck JSON lands beside it).")
def stamp(template, spec_path, media_dir, theme_path, out):
    """Stamp a deck template with replacements and render HTML."""
    from . import deck as deck_mod

    tpl = deck_mod.template_from_json(Path(template).read_text())
    spec = deck_mod.spec_from_json(Path(spec_path).read_text())
    media = {}
    if media_dir:
        media = {p.name: p.read_bytes() for p in sorted(Path(media_dir).iterdir()) if p.is_file()}
    theme_obj = _load_theme(theme_path or spec.theme_ref)
    try:
        deck = deck_mod.stamp(tpl, spec, media=media, theme=theme_obj)
    except deck_mod.DeckError as exc:
        raise click.ClickException(str(exc)) from exc
    out_path = Path(out)
    out_path.write_text(deck_mod.render_deck_html(deck, media))
    json_path = out_path.with_suffix(".json")
    json_path.write_text(deck_mod.deck_to_json(deck))
    click.echo(f"wrote {out_path} and {json_path}")


@main.command()
@click.option("--edges", required=True, type=click.Path(exists=True))
@click.option("--org", required=True, type=click.Path(exists=True))
@click.option("--partition", "partition_path", required=True, type=click.Path(exists=True))
@click.option("--monthly-dir", type=click.Path(exists=True), default=None, help="Directory holding edges_YYYY-MM.csv files.")
@click.option("--out", required=True, type=click.Path())
def metrics(edges, org, partition_path, monthly_dir, out):
    """Compute freedom and fluidity per workgroup."""
    from .embedding import embed_adjacent_months
    from .metrics import fluidity as fluidity_fn
    from .metrics import freedom as freedom_fn
    from .metrics import workgroups_of, write_metrics_csv

    g = read_edge_list(edges)
    levels = read_partition_csv(partition_path)
    leaf = levels[-1]
    trees = load_org_snapshots(org)
    embeddings = []
    if monthly_dir:
        monthly = {}
        for path in sorted(Path(monthly_dir).glob("edges_*.csv")):
            label = path.stem.replace("edges_", "")
            if label != "longitudinal":
                monthly[label] = read_edge_list(path, window=label)
        if len(monthly) >= 2:
            embeddings = embed_adjacent_months(monthly, sorted(monthly))
    rows = []
    for wg in workgroups_of(leaf):
        free = fluid = None
        try:
            free = freedom_fn(wg, trees).value
        except Exception:
            pass
        if embeddings:
            try:
                fluid = fluidity_fn(wg, embeddings).value
            except Exception:
                pass
        rows.append((wg.id, len(wg.members), free, fluid))
    write_metrics_csv(rows, out)
    click.echo(f"wrote metrics for {len(rows)} workgroups -> {out}")


@main.command()
@click.option("--port", default=8756, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port, host):
    """Serve theme computation and sample previews for the theme studio."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()

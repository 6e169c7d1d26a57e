"""End-to-end pipeline: logs or edge lists in, presentation artifacts out.

Stages run in a fixed order (ingest, communities, embedding, metrics,
layout, render, deck); each stage's outputs are written as soon as they
exist, so a failing stage leaves earlier artifacts on disk for debugging.
The manifest lists every artifact with a content hash, plus the seeds used,
so reruns can be checked for bit-stability.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import deck as deck_mod
from .community import detect_hierarchy, sweep_and_elbow
from .embedding import embed_adjacent_months, write_embedding_csv
from .graph import (
    CollabGraph,
    read_edge_list,
    write_edge_list,
    write_partition_csv,
)
from .ingest import induce_series, load_org_snapshots, org_snapshot_for_month, parse_message_log
from .layout import LayoutConfig, layout_pipeline, write_positions_csv
from .metrics import (
    MetricError,
    aggregate_node_metric,
    fluidity,
    freedom,
    workgroups_of,
    write_metric_detail_csv,
    write_metrics_csv,
)
from .render import (
    MapSpec,
    QuadrantSpec,
    default_thresholds,
    pick_quadrant_callouts,
    render_map,
    render_quadrant,
)
from .theming import SliderState, clamp_sliders, derive_theme, theme_from_json, theme_to_json

MANIFEST_VERSION = 1


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    out_dir: str
    logs: Optional[str] = None
    edges: Optional[str] = None
    monthly_edges: Dict[str, str] = field(default_factory=dict)
    org: Optional[str] = None
    months: Optional[List[str]] = None
    min_total: int = 4
    min_each_direction: int = 1
    max_size: Optional[int] = None
    sweep: bool = False
    seed: int = 0
    sliders: Optional[Dict] = None
    theme_path: Optional[str] = None
    template: Optional[str] = None
    stamp_spec: Optional[str] = None

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        data = json.loads(text)
        return cls(
            out_dir=data["outDir"],
            logs=data.get("logs"),
            edges=data.get("edges"),
            monthly_edges=data.get("monthlyEdges", {}),
            org=data.get("org"),
            months=data.get("months"),
            min_total=data.get("minTotal", 4),
            min_each_direction=data.get("minEachDirection", 1),
            max_size=data.get("maxSize"),
            sweep=data.get("sweep", False),
            seed=data.get("seed", 0),
            sliders=data.get("sliders"),
            theme_path=data.get("themePath"),
            template=data.get("template"),
            stamp_spec=data.get("stampSpec"),
        )


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_pipeline(cfg: PipelineConfig) -> Dict:
    """Run every stage and return the manifest dict (also written to disk)."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts: List[Tuple[str, Path]] = []

    def save(name: str, path: Path, writer) -> Path:
        writer(path)
        artifacts.append((name, path))
        return path

    # -- ingest --------------------------------------------------------------
    stage = "ingest"
    try:
        if cfg.logs:
            records, diags = parse_message_log(cfg.logs)
            series = induce_series(
                records, cfg.months, cfg.min_total, cfg.min_each_direction
            )
            months = series.months
            monthly = series.graphs
            longitudinal = series.longitudinal
            if diags:
                save(
                    "ingest-diagnostics",
                    out / "ingest_diagnostics.txt",
                    lambda p: p.write_text("\n".join(diags) + "\n"),
                )
        elif cfg.edges:
            longitudinal = read_edge_list(cfg.edges, window="longitudinal")
            monthly = {
                month: read_edge_list(path, window=month)
                for month, path in sorted(cfg.monthly_edges.items())
            }
            months = cfg.months or sorted(monthly)
        else:
            raise ValueError("config needs either 'logs' or 'edges'")
        if longitudinal.n_nodes == 0:
            raise ValueError("longitudinal graph is empty after induction")
        save(
            "longitudinal-edges",
            out / "longitudinal_edges.csv",
            lambda p: write_edge_list(longitudinal, p),
        )
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(stage, exc) from exc

    # -- communities ----------------------------------------------------------
    stage = "communities"
    try:
        if cfg.sweep or cfg.max_size is None:
            curve, chosen = sweep_and_elbow(longitudinal, None, cfg.seed)
            save(
                "size-modularity-curve",
                out / "size_modularity_curve.csv",
                lambda p: p.write_text(
                    "max_size,leaf_modularity\n"
                    + "".join(f"{s},{q:.10g}\n" for s, q in curve.points)
                ),
            )
            max_size = chosen
        else:
            max_size = cfg.max_size
        hierarchy = detect_hierarchy(longitudinal, max_size, cfg.seed)
        leaf = hierarchy.leaf_partition
        save(
            "workgroups",
            out / "workgroups.csv",
            lambda p: write_partition_csv(hierarchy.levels, p),
        )
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(stage, exc) from exc

    # -- embedding -------------------------------------------------------------
    stage = "embedding"
    try:
        embeddings = []
        if len(months) >= 2:
            embeddings = embed_adjacent_months(monthly, list(months))
            save(
                "embeddings",
                out / "embeddings.csv",
                lambda p: write_embedding_csv(embeddings, p),
            )
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(stage, exc) from exc

    # -- metrics ----------------------------------------------------------------
    stage = "metrics"
    try:
        if not cfg.org:
            raise ValueError("no org snapshot file configured (need 'org' path)")
        if not Path(cfg.org).exists():
            raise FileNotFoundError(f"org snapshot file not found: {cfg.org}")
        trees = load_org_snapshots(cfg.org)
        monthly_trees = [org_snapshot_for_month(trees, m) for m in months] if months else trees
        workgroups = workgroups_of(leaf)
        freedom_scores = {}
        fluidity_scores = {}
        for wg in workgroups:
            try:
                freedom_scores[wg.id] = freedom(wg, monthly_trees)
            except MetricError:
                pass
            if embeddings:
                try:
                    fluidity_scores[wg.id] = fluidity(wg, embeddings)
                except MetricError:
                    pass
        rows = [
            (
                wg.id,
                len(wg.members),
                freedom_scores[wg.id].value if wg.id in freedom_scores else None,
                fluidity_scores[wg.id].value if wg.id in fluidity_scores else None,
            )
            for wg in workgroups
        ]
        save("metrics", out / "metrics.csv", lambda p: write_metrics_csv(rows, p))
        save(
            "metrics-detail",
            out / "metrics_detail.csv",
            lambda p: write_metric_detail_csv(freedom_scores, fluidity_scores, p),
        )
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(stage, exc) from exc

    # -- layout -----------------------------------------------------------------
    stage = "layout"
    try:
        layout = layout_pipeline(longitudinal, LayoutConfig(seed=cfg.seed))
        save("positions", out / "positions.csv", lambda p: write_positions_csv(layout, p))
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(stage, exc) from exc

    # -- render -----------------------------------------------------------------
    stage = "render"
    try:
        if cfg.theme_path:
            theme = theme_from_json(Path(cfg.theme_path).read_text())
        else:
            sliders, _ = clamp_sliders(cfg.sliders or {})
            theme = derive_theme(sliders)
        save("theme", out / "theme.json", lambda p: p.write_text(theme_to_json(theme)))

        node_metric_values: Dict[str, Dict[str, float]] = {}
        for name, scores in (("freedom", freedom_scores), ("fluidity", fluidity_scores)):
            by_comm = {wid: s.value for wid, s in scores.items()}
            values = {
                node: by_comm[leaf.assignment[node]]
                for node in longitudinal.node_ids
                if leaf.assignment[node] in by_comm
            }
            if values:
                node_metric_values[name] = values

        overview = render_map(
            MapSpec(layout, coloring="nominal", communities=leaf), theme
        )
        save("map-overview", out / "map_overview.svg", lambda p: p.write_text(overview))
        for name, values in sorted(node_metric_values.items()):
            spec = MapSpec(
                layout,
                coloring="sequential",
                metrics={name: values},
                metric_name=name,
            )
            svg = render_map(spec, theme)
            save(
                f"map-{name}",
                out / f"map_{name}.svg",
                lambda p, text=svg: p.write_text(text),
            )

        quad_points = [
            (
                wg.id,
                freedom_scores[wg.id].value,
                fluidity_scores[wg.id].value,
                len(wg.members),
            )
            for wg in workgroups
            if wg.id in freedom_scores and wg.id in fluidity_scores
        ]
        callouts: List[int] = []
        if quad_points:
            thresholds = default_thresholds(quad_points)
            quad = render_quadrant(QuadrantSpec(quad_points, thresholds), theme)
            save("quadrant", out / "quadrant.svg", lambda p: p.write_text(quad))
            callouts = pick_quadrant_callouts(quad_points, thresholds)
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(stage, exc) from exc

    # -- deck -------------------------------------------------------------------
    stage = "deck"
    try:
        media = {
            p.name: p.read_bytes() for _, p in artifacts if p.suffix == ".svg"
        }
        if cfg.template:
            template = deck_mod.template_from_json(Path(cfg.template).read_text())
            if cfg.stamp_spec:
                spec = deck_mod.spec_from_json(Path(cfg.stamp_spec).read_text())
            else:
                spec = deck_mod.StampSpec()
        else:
            template, spec = _default_deck(
                leaf.n_communities, months, node_metric_values, callouts
            )
        deck = deck_mod.stamp(template, spec, media=media, theme=theme)
        save(
            "deck-json",
            out / "deck.json",
            lambda p: p.write_text(deck_mod.deck_to_json(deck)),
        )
        html = deck_mod.render_deck_html(deck, media)
        save("deck-html", out / "deck.html", lambda p: p.write_text(html))
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(stage, exc) from exc

    manifest = {
        "formatVersion": MANIFEST_VERSION,
        "seed": cfg.seed,
        "months": list(months),
        "workgroups": leaf.n_communities,
        "maxCommunitySize": max_size,
        "artifacts": [
            {"name": name, "path": p.name, "sha256": _sha256(p)}
            for name, p in artifacts
        ],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest


def _default_deck(
    workgroup_count: int,
    months: Sequence[str],
    node_metrics: Dict[str, Dict[str, float]],
    callouts: Sequence[int],
) -> Tuple[deck_mod.DeckTemplate, deck_mod.StampSpec]:
    """Built-in narrative: overview, one slide per metric map, quadrant,
    then a reusable callout slide stamped once per prominent workgroup."""
    slides = [
        deck_mod.Slide(
            "title",
            [
                deck_mod.Element("text", "Workgroup map"),
                deck_mod.Element(
                    "text",
                    "{detected workgroup count} workgroups over {month count} months",
                ),
            ],
        ),
        deck_mod.Slide(
            "overview",
            [
                deck_mod.Element("text", "Collaboration structure"),
                deck_mod.Element("image", "{overview map}"),
            ],
        ),
    ]
    replacements = {
        "detected workgroup count": deck_mod.Replacement(text=str(workgroup_count)),
        "month count": deck_mod.Replacement(text=str(len(months))),
        "overview map": deck_mod.Replacement(media="map_overview.svg"),
    }
    for name in sorted(node_metrics):
        slides.append(
            deck_mod.Slide(
                f"metric-{name}",
                [
                    deck_mod.Element("text", f"Workgroups by {name}"),
                    deck_mod.Element("image", "{%s map}" % name),
                ],
            )
        )
        replacements[f"{name} map"] = deck_mod.Replacement(media=f"map_{name}.svg")
    sequences = []
    if callouts:
        slides.append(
            deck_mod.Slide(
                "quadrant",
                [
                    deck_mod.Element("text", "Freedom and fluidity"),
                    deck_mod.Element("image", "{quadrant chart}"),
                ],
            )
        )
        replacements["quadrant chart"] = deck_mod.Replacement(media="quadrant.svg")
        slides.append(
            deck_mod.Slide(
                "callout",
                [deck_mod.Element("text", "Prominent workgroup {workgroup id}")],
            )
        )
        sequences.append(
            deck_mod.Sequence(
                ["callout"],
                [
                    {"workgroup id": deck_mod.Replacement(text=str(wid))}
                    for wid in callouts
                ],
            )
        )
    template = deck_mod.DeckTemplate(slides)
    spec = deck_mod.StampSpec(replacements=replacements, sequences=sequences)
    return template, spec

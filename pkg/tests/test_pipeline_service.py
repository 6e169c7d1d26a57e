import json
from pathlib import Path

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from orgmap.cli import main as cli_main
from orgmap.graph import write_edge_list, write_org_csv
from orgmap.pipeline import PipelineConfig, PipelineError, run_pipeline
from orgmap.service import create_app
from orgmap.synthesis import (
    SynthConfig,
    org_tree_from_hierarchy,
    synthesize,
    synthesize_monthly_series,
)
from orgmap.theming import SliderState, derive_theme, theme_to_json


@pytest.fixture(scope="module")
def synth_inputs(tmp_path_factory):
    """A small synthetic org written in the pipeline's input formats."""
    root = tmp_path_factory.mktemp("synth")
    cfg = SynthConfig(
        top_level_communities=4,
        size_range=(12, 28),
        hierarchy_depth=1,
        inter_edge_fraction=0.08,
        seed=5,
    )
    result = synthesize(cfg)
    write_edge_list(result.graph, root / "edges_longitudinal.csv")
    months = ["2024-01", "2024-02", "2024-03"]
    series = synthesize_monthly_series(result, months, rewire_fraction=0.15, seed=5)
    monthly_paths = {}
    for label, graph in series.items():
        path = root / f"edges_{label}.csv"
        write_edge_list(graph, path)
        monthly_paths[label] = str(path)
    tree = org_tree_from_hierarchy(result.graph, result.planted_hierarchy)
    write_org_csv([tree], root / "org.csv")
    return root, monthly_paths, months


def make_config(root, monthly_paths, months, out_name="out", **kw):
    defaults = dict(
        out_dir=str(root / out_name),
        edges=str(root / "edges_longitudinal.csv"),
        monthly_edges=monthly_paths,
        org=str(root / "org.csv"),
        months=months,
        max_size=30,
        seed=3,
    )
    defaults.update(kw)
    return PipelineConfig(**defaults)


def test_pipeline_end_to_end_artifacts(synth_inputs):
    root, monthly_paths, months = synth_inputs
    manifest = run_pipeline(make_config(root, monthly_paths, months))
    names = {a["name"] for a in manifest["artifacts"]}
    assert {
        "longitudinal-edges",
        "workgroups",
        "embeddings",
        "metrics",
        "positions",
        "theme",
        "map-overview",
        "map-freedom",
        "map-fluidity",
        "quadrant",
        "deck-json",
        "deck-html",
    } <= names
    out = Path(make_config(root, monthly_paths, months).out_dir)
    assert (out / "manifest.json").exists()
    html = (out / "deck.html").read_text()
    assert "<svg" in html


def test_pipeline_hashes_stable_across_reruns(synth_inputs):
    root, monthly_paths, months = synth_inputs
    m1 = run_pipeline(make_config(root, monthly_paths, months, out_name="r1"))
    m2 = run_pipeline(make_config(root, monthly_paths, months, out_name="r2"))
    h1 = {a["name"]: a["sha256"] for a in m1["artifacts"]}
    h2 = {a["name"]: a["sha256"] for a in m2["artifacts"]}
    assert h1 == h2


def test_pipeline_missing_org_fails_at_metrics_stage(synth_inputs):
    root, monthly_paths, months = synth_inputs
    cfg = make_config(
        root, monthly_paths, months, out_name="fail", org=str(root / "missing_org.csv")
    )
    with pytest.raises(PipelineError) as exc_info:
        run_pipeline(cfg)
    assert exc_info.value.stage == "metrics"
    assert "missing_org.csv" in str(exc_info.value)
    # earlier artifacts survive for debugging
    assert (Path(cfg.out_dir) / "longitudinal_edges.csv").exists()


def test_pipeline_from_config_json(tmp_path, synth_inputs):
    root, monthly_paths, months = synth_inputs
    config = {
        "outDir": str(tmp_path / "json_out"),
        "edges": str(root / "edges_longitudinal.csv"),
        "monthlyEdges": monthly_paths,
        "org": str(root / "org.csv"),
        "months": months,
        "maxSize": 30,
        "seed": 3,
        "sliders": {"accentHue": 120, "mode": "dark"},
    }
    cfg = PipelineConfig.from_json(json.dumps(config))
    manifest = run_pipeline(cfg)
    theme_text = (tmp_path / "json_out" / "theme.json").read_text()
    assert json.loads(theme_text)["mode"] == "dark"
    assert manifest["workgroups"] >= 2


# -- CLI ----------------------------------------------------------------------


def test_cli_theme_matches_library(tmp_path):
    runner = CliRunner()
    result = runner.invoke(cli_main, ["theme", "--sliders", '{"accentHue": 200}'])
    assert result.exit_code == 0, result.output
    expected = theme_to_json(derive_theme(SliderState(accent_hue=200.0)))
    assert result.output == expected


def test_cli_synth_layout_communities_flow(tmp_path):
    runner = CliRunner()
    synth_dir = tmp_path / "synthdir"
    result = runner.invoke(
        cli_main,
        ["synth", "--communities", "3", "--size-range", "10,20", "--depth", "1",
         "--seed", "2", "--months", "2", "--out", str(synth_dir)],
    )
    assert result.exit_code == 0, result.output
    assert (synth_dir / "edges_longitudinal.csv").exists()
    assert (synth_dir / "org.csv").exists()
    assert (synth_dir / "edges_2024-01.csv").exists()

    part_path = tmp_path / "wg.csv"
    result = runner.invoke(
        cli_main,
        ["communities", "--edges", str(synth_dir / "edges_longitudinal.csv"),
         "--max-size", "25", "--seed", "1", "--out", str(part_path)],
    )
    assert result.exit_code == 0, result.output
    assert part_path.exists()

    pos_path = tmp_path / "pos.csv"
    result = runner.invoke(
        cli_main,
        ["layout", "--edges", str(synth_dir / "edges_longitudinal.csv"),
         "--seed", "1", "--out", str(pos_path)],
    )
    assert result.exit_code == 0, result.output

    svg_path = tmp_path / "map.svg"
    result = runner.invoke(
        cli_main,
        ["render", "--positions", str(pos_path), "--partition", str(part_path),
         "--out", str(svg_path)],
    )
    assert result.exit_code == 0, result.output
    assert svg_path.read_text().startswith("<svg")


def test_cli_induce_and_metrics(tmp_path):
    logs = tmp_path / "logs.csv"
    rows = ["sender,recipient,sent_at"]
    for month in ("2024-01", "2024-02"):
        for day in range(1, 5):
            rows.append(f"a,b,{month}-{day:02d}T10:00:00Z")
            rows.append(f"b,a,{month}-{day:02d}T11:00:00Z")
            rows.append(f"b,c,{month}-{day:02d}T12:00:00Z")
            rows.append(f"c,b,{month}-{day:02d}T13:00:00Z")
    logs.write_text("\n".join(rows) + "\n")
    runner = CliRunner()
    out_dir = tmp_path / "induced"
    result = runner.invoke(cli_main, ["induce", "--logs", str(logs), "--out", str(out_dir)])
    assert result.exit_code == 0, result.output
    assert (out_dir / "edges_2024-01.csv").exists()
    assert (out_dir / "edges_longitudinal.csv").exists()


# -- service -------------------------------------------------------------------


def test_service_health():
    client = TestClient(create_app())
    response = client.get("/health")
    assert response.status_code == 200
    assert response.text == "ok"


def test_service_theme_matches_cli_bytes():
    client = TestClient(create_app())
    response = client.post("/theme", json={"accentHue": 200})
    assert response.status_code == 200
    expected = theme_to_json(derive_theme(SliderState(accent_hue=200.0)))
    assert response.text == expected
    data = response.json()
    assert set(data) == {"mode", "sliders", "colors"}
    assert set(data["colors"]) == {
        "background", "foreground", "accent", "nominal", "nominalBold",
        "nominalMuted", "sequential", "diverging",
    }


def test_service_clamps_with_warning_field():
    client = TestClient(create_app())
    response = client.post("/theme", json={"accentHue": 400})
    assert response.status_code == 200
    data = response.json()
    assert data["sliders"]["accentHue"] == 360.0
    assert any("accentHue" in w for w in data["warnings"])


def test_service_rejects_bad_input():
    client = TestClient(create_app())
    assert client.post("/theme", json={"mode": "sepia"}).status_code == 400
    assert client.post("/theme", content=b"not json").status_code == 400
    assert client.post("/theme", json={"accentHue": "blue"}).status_code == 400


def test_service_sample_network_svg():
    client = TestClient(create_app())
    response = client.get("/sample/network.svg", params={"accentHue": 10, "mode": "dark"})
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("image/svg+xml")
    dark_bg = derive_theme(SliderState(accent_hue=10.0, mode="dark")).background
    assert dark_bg in response.text
    # step change shows a different palette size
    r21 = client.get("/sample/network.svg", params={"nominalScaleStep": 21})
    assert r21.status_code == 200


def test_service_validate_endpoint():
    client = TestClient(create_app())
    response = client.post("/theme/validate", json={})
    assert response.status_code == 200
    report = response.json()
    assert report["contrastRatio"] >= 4.5
    assert "colorBlindMinDeltaE" in report


def test_exported_theme_reimports_with_identical_figure_colors(tmp_path):
    # the studio exports the raw /theme response; feeding that file back into
    # the renderer must reproduce exactly the colors a direct derivation gives
    client = TestClient(create_app())
    body = client.post("/theme", json={"accentHue": 31, "mode": "dark"}).text
    theme_file = tmp_path / "exported.json"
    theme_file.write_text(body)

    from orgmap.layout import LayoutResult
    from orgmap.render import MapSpec, render_map
    from orgmap.graph import Partition
    from orgmap.theming import theme_from_json

    layout = LayoutResult(
        {f"n{i}": (float(i), float(i % 3)) for i in range(6)},
        {f"n{i}": 1.0 for i in range(6)},
    )
    partition = Partition({f"n{i}": i % 3 for i in range(6)})
    direct = derive_theme(SliderState(accent_hue=31.0, mode="dark"))
    reimported = theme_from_json(theme_file.read_text())
    svg_direct = render_map(MapSpec(layout, communities=partition), direct)
    svg_reimported = render_map(MapSpec(layout, communities=partition), reimported)
    assert svg_direct == svg_reimported

import re

import pytest

from orgmap.graph import CollabGraph, Partition
from orgmap.layout import LayoutResult
from orgmap.render import (
    MapSpec,
    QuadrantSpec,
    RenderError,
    default_thresholds,
    pick_quadrant_callouts,
    quadrant_of,
    render_map,
    render_quadrant,
)
from orgmap.theming import SliderState, derive_theme

THEME = derive_theme(SliderState())


def tiny_layout(n=4):
    positions = {f"n{i}": (float(i), float(i % 2)) for i in range(n)}
    radii = {f"n{i}": 1.0 + i for i in range(n)}
    return LayoutResult(positions, radii)


def fills_of(svg):
    return set(re.findall(r'fill="(#[0-9A-F]{6})"', svg))


def test_single_node_map():
    layout = LayoutResult({"solo": (0.0, 0.0)}, {"solo": 1.0})
    spec = MapSpec(layout, communities=Partition({"solo": 0}))
    svg = render_map(spec, THEME)
    assert svg.count("<circle") == 1
    assert f'fill="{THEME.background}"' in svg


def test_nominal_coloring_uses_nominal_palette():
    layout = tiny_layout()
    p = Partition({"n0": 0, "n1": 0, "n2": 1, "n3": 1})
    svg = render_map(MapSpec(layout, communities=p), THEME)
    assert fills_of(svg) <= set(THEME.nominal) | {THEME.background}


def test_highlight_partitions_bold_vs_muted():
    layout = tiny_layout()
    p = Partition({"n0": 0, "n1": 0, "n2": 1, "n3": 1})
    svg = render_map(MapSpec(layout, communities=p, highlight=1), THEME)
    bold = THEME.nominal_bold[1]
    muted = THEME.nominal_muted[0]
    for node, expected in (("n0", muted), ("n1", muted), ("n2", bold), ("n3", bold)):
        m = re.search(rf'<circle id="{node}"[^>]*fill="(#[0-9A-F]{{6}})"', svg)
        assert m.group(1) == expected


def test_sequential_coloring_and_midpoint_degenerate():
    layout = tiny_layout()
    metrics = {"freedom": {f"n{i}": i / 3.0 for i in range(4)}}
    svg = render_map(
        MapSpec(layout, coloring="sequential", metrics=metrics, metric_name="freedom"),
        THEME,
    )
    assert fills_of(svg) <= set(THEME.sequential) | {THEME.background}

    flat = {"freedom": {f"n{i}": 0.7 for i in range(4)}}
    svg2 = render_map(
        MapSpec(layout, coloring="sequential", metrics=flat, metric_name="freedom"),
        THEME,
    )
    mid = THEME.sequential[round(0.5 * (len(THEME.sequential) - 1))]
    node_fills = re.findall(r'<circle[^>]*fill="(#[0-9A-F]{6})"', svg2)
    assert set(node_fills) == {mid}


def test_unknown_metric_errors():
    layout = tiny_layout()
    with pytest.raises(RenderError, match="unknown metric"):
        render_map(
            MapSpec(layout, coloring="sequential", metrics={}, metric_name="bogus"),
            THEME,
        )


def test_links_drawn_when_requested():
    layout = tiny_layout()
    g = CollabGraph.from_edges([("n0", "n1", 1.0), ("n2", "n3", 2.0)])
    p = Partition({"n0": 0, "n1": 0, "n2": 1, "n3": 1})
    svg = render_map(
        MapSpec(layout, communities=p, show_links=True, graph=g), THEME
    )
    assert svg.count("<line") == 2
    no_links = render_map(MapSpec(layout, communities=p), THEME)
    assert "<line" not in no_links


def test_map_deterministic_bytes():
    layout = tiny_layout()
    p = Partition({"n0": 0, "n1": 0, "n2": 1, "n3": 1})
    assert render_map(MapSpec(layout, communities=p), THEME) == render_map(
        MapSpec(layout, communities=p), THEME
    )


def test_quadrant_four_corners():
    points = [(1, 0.2, 0.2, 10), (2, 0.8, 0.2, 20), (3, 0.2, 0.8, 30), (4, 0.8, 0.8, 40)]
    spec = QuadrantSpec(points, (0.5, 0.5))
    theme4 = derive_theme(SliderState(nominal_scale_step=12))  # 4 nominal hues
    svg = render_quadrant(spec, theme4)
    assert svg.count("<circle") == 4
    assert svg.count("<text") >= 4  # four captions plus axis labels
    # one marker per quadrant means four distinct quadrant colors
    node_fills = re.findall(r'<circle[^>]*fill="(#[0-9A-F]{6})"', svg)
    assert len(set(node_fills)) == 4


def test_threshold_tie_goes_high():
    assert quadrant_of(0.5, 0.2, (0.5, 0.5)) == (True, False)
    assert quadrant_of(0.2, 0.5, (0.5, 0.5)) == (False, True)


def test_empty_quadrant_caption_still_rendered():
    points = [(1, 0.1, 0.1, 5)]
    spec = QuadrantSpec(points, (0.1, 0.1), labels=("a", "b", "c", "d"))
    svg = render_quadrant(spec, THEME)
    for label in ("a", "b", "c", "d"):
        assert f">{label}</text>" in svg


def test_thresholds_must_be_in_range():
    with pytest.raises(RenderError):
        QuadrantSpec([(1, 0.2, 0.2, 5)], (0.9, 0.2))


def test_default_thresholds_are_medians():
    points = [(1, 0.1, 0.5, 5), (2, 0.3, 0.7, 5), (3, 0.9, 0.9, 5)]
    assert default_thresholds(points) == (0.3, 0.7)


def test_callouts_four_corners_all_selected():
    points = [(1, 0.2, 0.2, 10), (2, 0.8, 0.2, 20), (3, 0.2, 0.8, 30), (4, 0.8, 0.8, 40)]
    chosen = pick_quadrant_callouts(points, (0.5, 0.5))
    assert sorted(chosen) == [1, 2, 3, 4]


def test_callouts_prefer_farther_point():
    points = [(1, 0.55, 0.55, 10), (2, 0.95, 0.95, 5)]
    assert pick_quadrant_callouts(points, (0.5, 0.5)) == [2]


def test_callouts_tie_break_size_then_id():
    points = [(5, 0.8, 0.8, 10), (3, 0.8, 0.8, 20), (4, 0.8, 0.8, 20)]
    assert pick_quadrant_callouts(points, (0.5, 0.5)) == [3]


def test_callouts_empty_quadrant_skipped():
    points = [(1, 0.9, 0.9, 5)]
    assert pick_quadrant_callouts(points, (0.5, 0.5)) == [1]


def test_marker_radius_monotone_in_size():
    points = [(1, 0.2, 0.2, 4), (2, 0.8, 0.8, 64)]
    svg = render_quadrant(QuadrantSpec(points, (0.5, 0.5)), THEME)
    radii = [float(r) for r in re.findall(r'<circle[^>]*r="([\d.]+)"', svg)]
    assert radii[0] < radii[1]

"""Local HTTP service backing the theme studio.

Stateless endpoints: POST /theme turns slider JSON into theme JSON (the
response body is byte-identical to ``orgmap theme`` output for the same
sliders; a ``warnings`` key is added only when inputs had to be clamped),
GET /sample/network.svg renders a bundled synthetic workgroup map under
query-string sliders, and GET /health answers ok. CORS is open for local
UI origins.
"""

from __future__ import annotations

import json
from functools import lru_cache
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .layout import LayoutConfig, layout_pipeline
from .render import MapSpec, render_map
from .synthesis import SynthConfig, synthesize
from .theming import ThemeError, clamp_sliders, derive_theme, theme_to_json, validate_theme

_SAMPLE_SEED = 7


@lru_cache(maxsize=1)
def _sample_scene():
    """Small fixed synthetic network, laid out once per process."""
    cfg = SynthConfig(
        top_level_communities=5,
        size_range=(12, 30),
        hierarchy_depth=1,
        inter_edge_fraction=0.08,
        seed=_SAMPLE_SEED,
    )
    result = synthesize(cfg)
    layout = layout_pipeline(result.graph, LayoutConfig(seed=_SAMPLE_SEED))
    return layout, result.planted_hierarchy.leaf_partition


def create_app() -> FastAPI:
    app = FastAPI(title="orgmap theme service")
    app.add_middleware(
        CORSMiddleware,
        allow_origin_regex=r"http://(localhost|127\.0\.0\.1)(:\d+)?",
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/health")
    def health() -> Response:
        return Response("ok", media_type="text/plain")

    @app.post("/theme")
    async def theme(request: Request) -> Response:
        try:
            raw = await request.json()
        except json.JSONDecodeError:
            return Response(
                json.dumps({"error": "body must be JSON"}), status_code=400,
                media_type="application/json",
            )
        try:
            sliders, warnings = clamp_sliders(raw if isinstance(raw, dict) else {})
        except ThemeError as exc:
            return Response(
                json.dumps({"error": str(exc)}), status_code=400,
                media_type="application/json",
            )
        body = theme_to_json(derive_theme(sliders))
        if warnings:
            data = json.loads(body)
            data["warnings"] = warnings
            body = json.dumps(data, indent=2) + "\n"
        return Response(body, media_type="application/json")

    @app.post("/theme/validate")
    async def theme_validate(request: Request) -> Response:
        try:
            raw = await request.json()
        except json.JSONDecodeError:
            return Response(
                json.dumps({"error": "body must be JSON"}), status_code=400,
                media_type="application/json",
            )
        try:
            sliders, _ = clamp_sliders(raw if isinstance(raw, dict) else {})
        except ThemeError as exc:
            return Response(
                json.dumps({"error": str(exc)}), status_code=400,
                media_type="application/json",
            )
        report = validate_theme(derive_theme(sliders))
        return Response(json.dumps(report, indent=2) + "\n", media_type="application/json")

    @app.get("/sample/network.svg")
    def sample_network(
        accentHue: Optional[float] = None,
        accentSaturation: Optional[float] = None,
        accentLightness: Optional[float] = None,
        backgroundLevel: Optional[float] = None,
        backgroundHueShift: Optional[float] = None,
        nominalScaleStep: Optional[int] = None,
        mode: Optional[str] = None,
        highlight: Optional[int] = None,
    ) -> Response:
        raw = {
            key: value
            for key, value in {
                "accentHue": accentHue,
                "accentSaturation": accentSaturation,
                "accentLightness": accentLightness,
                "backgroundLevel": backgroundLevel,
                "backgroundHueShift": backgroundHueShift,
                "nominalScaleStep": nominalScaleStep,
                "mode": mode,
            }.items()
            if value is not None
        }
        try:
            sliders, _ = clamp_sliders(raw)
        except ThemeError as exc:
            return Response(
                json.dumps({"error": str(exc)}), status_code=400,
                media_type="application/json",
            )
        layout, partition = _sample_scene()
        svg = render_map(
            MapSpec(layout, coloring="nominal", communities=partition, highlight=highlight),
            derive_theme(sliders),
        )
        return Response(svg, media_type="image/svg+xml")

    return app

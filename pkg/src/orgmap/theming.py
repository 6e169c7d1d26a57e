"""Derive a complete color theme from six slider values.

A theme couples a slide background, foreground text color, and accent with
nominal/bold/muted categorical palettes and sequential/diverging ramps, all
constrained so the parts work together: the background keeps its absolute
chroma at most 4 (quietly colorful, never loud), the foreground keeps WCAG
contrast, nominal hues stay maximally separated along the hue wheel, and the
diverging endpoints sit 90 degrees apart to stay legible under color
blindness. Light and dark modes are inversions of the same sliders.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from .colorspace import (
    contrast_ratio,
    delta_e,
    hex_to_rgb,
    hsluv_to_hex,
    hsluv_to_rgb,
    lab_chroma,
    rgb_to_hex,
    simulate_cvd,
)


class ThemeError(ValueError):
    pass


BACKGROUND_CHROMA_CAP = 4.0
_CHROMA_TARGET = 3.7  # headroom so 8-bit quantization cannot cross the cap
SEQUENTIAL_BINS = 10
DIVERGING_BINS = 11


@dataclass(frozen=True)
class SliderState:
    """The six theme sliders plus the light/dark mode flag."""

    accent_hue: float = 210.0
    accent_saturation: float = 80.0
    accent_lightness: float = 50.0
    background_level: float = 25.0
    background_hue_shift: float = 50.0
    nominal_scale_step: int = 11
    mode: str = "light"

    def to_json_dict(self) -> Dict:
        return {
            "accentHue": self.accent_hue,
            "accentSaturation": self.accent_saturation,
            "accentLightness": self.accent_lightness,
            "backgroundLevel": self.background_level,
            "backgroundHueShift": self.background_hue_shift,
            "nominalScaleStep": self.nominal_scale_step,
            "mode": self.mode,
        }


_SLIDER_RANGES = {
    "accent_hue": (0.0, 360.0),
    "accent_saturation": (0.0, 100.0),
    "accent_lightness": (0.0, 100.0),
    "background_level": (0.0, 100.0),
    "background_hue_shift": (0.0, 100.0),
    "nominal_scale_step": (0, 21),
}

_JSON_FIELDS = {
    "accentHue": "accent_hue",
    "accentSaturation": "accent_saturation",
    "accentLightness": "accent_lightness",
    "backgroundLevel": "background_level",
    "backgroundHueShift": "background_hue_shift",
    "nominalScaleStep": "nominal_scale_step",
    "mode": "mode",
}


def clamp_sliders(raw: Dict) -> Tuple[SliderState, List[str]]:
    """Build a SliderState from wire-format JSON, clamping out-of-range
    values and reporting what was clamped."""
    values: Dict = {}
    warnings: List[str] = []
    for json_name, field in _JSON_FIELDS.items():
        if json_name not in raw:
            continue
        value = raw[json_name]
        if field == "mode":
            if value not in ("light", "dark"):
                raise ThemeError(f"mode must be 'light' or 'dark', got {value!r}")
            values[field] = value
            continue
        try:
            number = float(value)
        except (TypeError, ValueError) as exc:
            raise ThemeError(f"{json_name} must be numeric, got {value!r}") from exc
        lo, hi = _SLIDER_RANGES[field]
        if number < lo or number > hi:
            warnings.append(f"{json_name}={number:g} clamped to [{lo:g}, {hi:g}]")
            number = min(float(hi), max(float(lo), number))
        values[field] = int(round(number)) if field == "nominal_scale_step" else number
    unknown = set(raw) - set(_JSON_FIELDS)
    if unknown:
        raise ThemeError(f"unknown slider fields: {sorted(unknown)}")
    return SliderState(**values), warnings


@dataclass
class Theme:
    mode: str
    sliders: SliderState
    background: str
    foreground: str
    accent: str
    nominal: List[str]
    nominal_bold: List[str]
    nominal_muted: List[str]
    sequential: List[str]
    diverging: List[str]
    sample_sequential: Callable[[float], str] = dataclasses.field(repr=False, default=None)
    sample_diverging: Callable[[float], str] = dataclasses.field(repr=False, default=None)

    def to_json_dict(self) -> Dict:
        return {
            "mode": self.mode,
            "sliders": self.sliders.to_json_dict(),
            "colors": {
                "background": self.background,
                "foreground": self.foreground,
                "accent": self.accent,
                "nominal": list(self.nominal),
                "nominalBold": list(self.nominal_bold),
                "nominalMuted": list(self.nominal_muted),
                "sequential": list(self.sequential),
                "diverging": list(self.diverging),
            },
        }

    def all_colors(self) -> List[str]:
        return (
            [self.background, self.foreground, self.accent]
            + self.nominal
            + self.nominal_bold
            + self.nominal_muted
            + self.sequential
            + self.diverging
        )


def theme_to_json(theme: Theme) -> str:
    """Canonical serialization; the CLI and service both emit exactly this."""
    return json.dumps(theme.to_json_dict(), indent=2, sort_keys=False) + "\n"


def theme_from_json(text: str) -> Theme:
    data = json.loads(text)
    sliders, _ = clamp_sliders(data["sliders"])
    return derive_theme(sliders)


# ---------------------------------------------------------------------------
# hue machinery
# ---------------------------------------------------------------------------


def hues_per_traversal(step: int) -> int:
    """Steps 10/11 give 3 hues per wheel traversal, 9/12 give 4, up to 0/21
    which give 13."""
    if not 0 <= step <= 21:
        raise ThemeError(f"nominal scale step {step} outside 0..21")
    return step - 8 if step >= 11 else 13 - step


def traversal_direction(step: int) -> int:
    return 1 if step >= 11 else -1


def _circular_distance(a: float, b: float) -> float:
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def nominal_hues(accent_hue: float, step: int, k: int) -> List[float]:
    """First k nominal hues.

    The first traversal walks the wheel in equal steps of 360/T in the
    traversal direction; past one traversal, each next hue is the nearest
    hue in that direction among those maximizing the minimum circular
    distance to everything already chosen (midpoints of the widest gaps).
    """
    if k < 1:
        raise ThemeError("need at least one hue")
    t = hues_per_traversal(step)
    direction = traversal_direction(step)
    spacing = 360.0 / t
    hues = [(accent_hue + direction * j * spacing) % 360.0 for j in range(min(k, t))]
    while len(hues) < k:
        ordered = sorted(hues)
        gaps = []
        for i, low in enumerate(ordered):
            high = ordered[(i + 1) % len(ordered)]
            width = (high - low) % 360.0
            if width == 0.0:
                width = 360.0 if len(ordered) == 1 else 0.0
            gaps.append((width, (low + width / 2.0) % 360.0))
        best_width = max(w for w, _ in gaps)
        candidates = [mid for w, mid in gaps if w > best_width - 1e-9]
        last = hues[-1]
        ahead = min(candidates, key=lambda c: ((c - last) * direction) % 360.0)
        hues.append(ahead % 360.0)
    return hues


def background_hue(accent_hue: float, hue_shift: float) -> float:
    """Compound 0-100 scale: 50 is no shift, 50-75 analogous clockwise
    (+0..30), 75-100 complementary (+150..180); below 50 mirrors
    counter-clockwise."""
    v = hue_shift
    if v >= 50.0:
        if v <= 75.0:
            shift = (v - 50.0) / 25.0 * 30.0
        else:
            shift = 150.0 + (v - 75.0) / 25.0 * 30.0
    else:
        if v >= 25.0:
            shift = -((50.0 - v) / 25.0 * 30.0)
        else:
            shift = -(150.0 + (25.0 - v) / 25.0 * 30.0)
    return (accent_hue + shift) % 360.0


# ---------------------------------------------------------------------------
# background / foreground
# ---------------------------------------------------------------------------


def _max_muted_saturation(hue: float, lightness: float) -> float:
    """Largest HSLuv saturation whose sRGB color stays under the absolute
    chroma cap at this hue and lightness (bisection against CIE LCh)."""
    if lab_chroma(hsluv_to_rgb(hue, 100.0, lightness)) <= _CHROMA_TARGET:
        return 100.0
    lo, hi = 0.0, 100.0
    for _ in range(40):
        mid = (lo + hi) / 2.0
        if lab_chroma(hsluv_to_rgb(hue, mid, lightness)) <= _CHROMA_TARGET:
            lo = mid
        else:
            hi = mid
    return lo


def _background_anchor(mode: str) -> float:
    return 95.0 if mode == "light" else 10.0


def background_color(s: SliderState) -> str:
    """Level 0-50 interpolates grayscale to the maximum capped saturation at
    fixed lightness (95 light / 10 dark); 50-100 interpolates lightness to
    white/black holding that saturation."""
    hue = background_hue(s.accent_hue, s.background_hue_shift)
    anchor = _background_anchor(s.mode)
    s_max = _max_muted_saturation(hue, anchor)
    if s.background_level <= 50.0:
        sat = s.background_level / 50.0 * s_max
        lightness = anchor
    else:
        sat = s_max
        frac = (s.background_level - 50.0) / 50.0
        if s.mode == "light":
            lightness = anchor + frac * (100.0 - anchor)
        else:
            lightness = anchor - frac * anchor
    return hsluv_to_hex(hue, sat, lightness)


def foreground_color(s: SliderState) -> str:
    hue = background_hue(s.accent_hue, s.background_hue_shift)
    lightness = 20.0 if s.mode == "light" else 90.0
    return hsluv_to_hex(hue, 20.0, lightness)


# ---------------------------------------------------------------------------
# palettes and ramps
# ---------------------------------------------------------------------------


def _color_triple(hue: float, s: SliderState) -> Tuple[str, str, str]:
    """standard / bold / muted for one nominal hue.

    Bold shifts lightness 10 points toward higher contrast against the
    background; muted drops saturation and moves 20 points toward the
    background lightness.
    """
    al = s.accent_lightness
    if s.mode == "light":
        bold_l = max(0.0, al - 10.0)
        muted_l = min(100.0, al + 20.0)
    else:
        bold_l = min(100.0, al + 10.0)
        muted_l = max(0.0, al - 20.0)
    return (
        hsluv_to_hex(hue, 90.0, al),
        hsluv_to_hex(hue, 100.0, bold_l),
        hsluv_to_hex(hue, 30.0, muted_l),
    )


def _lerp_hue(h1: float, h2: float, t: float) -> float:
    delta = ((h2 - h1 + 180.0) % 360.0) - 180.0
    return (h1 + t * delta) % 360.0


def _hsluv_ramp(
    start: Tuple[float, float, float], end: Tuple[float, float, float]
) -> Callable[[float], str]:
    def sample(t: float) -> str:
        t = min(1.0, max(0.0, t))
        h = _lerp_hue(start[0], end[0], t)
        sat = start[1] + t * (end[1] - start[1])
        lum = start[2] + t * (end[2] - start[2])
        return hsluv_to_hex(h, sat, lum)

    return sample


def diverging_endpoint_hues(accent_hue: float, step: int) -> Tuple[float, float]:
    """First two nominal hues, with the second rotated minimally so the
    endpoints sit exactly 90 degrees apart."""
    h1, h2 = nominal_hues(accent_hue, step, 2)[:2]
    delta = ((h2 - h1 + 180.0) % 360.0) - 180.0
    if delta == 0.0:
        delta = 90.0
    sign = 1.0 if delta >= 0 else -1.0
    return h1, (h1 + sign * 90.0) % 360.0


def _quantize(sample: Callable[[float], str], bins: int) -> List[str]:
    if bins == 1:
        return [sample(0.5)]
    return [sample(i / (bins - 1.0)) for i in range(bins)]


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------


def derive_theme(s: SliderState, nominal_k: Optional[int] = None) -> Theme:
    """Full theme from slider values; ``nominal_k`` overrides the palette
    length (default: the hues available in one wheel traversal)."""
    k = nominal_k if nominal_k is not None else hues_per_traversal(s.nominal_scale_step)
    hues = nominal_hues(s.accent_hue, s.nominal_scale_step, k)
    triples = [_color_triple(h, s) for h in hues]

    bg_hue = background_hue(s.accent_hue, s.background_hue_shift)
    anchor = _background_anchor(s.mode)
    seq_low_l = anchor - 3.0 if s.mode == "light" else anchor + 8.0
    seq_start = (bg_hue, 15.0, seq_low_l)
    seq_end = (hues[0], 90.0, s.accent_lightness)
    sample_seq = _hsluv_ramp(seq_start, seq_end)

    div_a, div_b = diverging_endpoint_hues(s.accent_hue, s.nominal_scale_step)
    mid = (bg_hue, 5.0, anchor)
    left = _hsluv_ramp((div_a, 90.0, s.accent_lightness), mid)
    right = _hsluv_ramp(mid, (div_b, 90.0, s.accent_lightness))

    def sample_div(t: float) -> str:
        t = min(1.0, max(0.0, t))
        if t <= 0.5:
            return left(t * 2.0)
        return right((t - 0.5) * 2.0)

    return Theme(
        mode=s.mode,
        sliders=s,
        background=background_color(s),
        foreground=foreground_color(s),
        accent=hsluv_to_hex(s.accent_hue, s.accent_saturation, s.accent_lightness),
        nominal=[t[0] for t in triples],
        nominal_bold=[t[1] for t in triples],
        nominal_muted=[t[2] for t in triples],
        sequential=_quantize(sample_seq, SEQUENTIAL_BINS),
        diverging=_quantize(sample_div, DIVERGING_BINS),
        sample_sequential=sample_seq,
        sample_diverging=sample_div,
    )


def invert_mode(s: SliderState) -> SliderState:
    """Flip light/dark only; all six sliders carry over."""
    return dataclasses.replace(s, mode="dark" if s.mode == "light" else "light")


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

CVD_DELTA_E_WARN = 10.0


def validate_theme(theme: Theme) -> Dict:
    """Automated checks: WCAG contrast, background chroma cap, diverging
    endpoint separation, and color-blind distinguishability of the nominal
    palette. Reports pass/warn, never raises."""
    bg = hex_to_rgb(theme.background)
    fg = hex_to_rgb(theme.foreground)
    accent = hex_to_rgb(theme.accent)
    issues: List[str] = []

    contrast = contrast_ratio(fg, bg)
    if contrast < 4.5:
        issues.append(f"foreground contrast {contrast:.2f} below 4.5")
    accent_contrast = contrast_ratio(accent, bg)
    if accent_contrast < 3.0:
        issues.append(f"accent contrast {accent_contrast:.2f} below 3.0")

    chroma = lab_chroma(bg)
    if chroma > BACKGROUND_CHROMA_CAP:
        issues.append(f"background chroma {chroma:.2f} above {BACKGROUND_CHROMA_CAP}")

    div_a, div_b = diverging_endpoint_hues(
        theme.sliders.accent_hue, theme.sliders.nominal_scale_step
    )
    gap = _circular_distance(div_a, div_b)
    if abs(gap - 90.0) > 1.0:
        issues.append(f"diverging endpoints {gap:.1f} degrees apart, want 90")

    warnings: List[str] = []
    cvd_min: Dict[str, float] = {}
    nominal_rgb = [hex_to_rgb(c) for c in theme.nominal]
    for kind in ("protan", "deutan", "tritan"):
        worst = math.inf
        simulated = [simulate_cvd(c, kind) for c in nominal_rgb]
        for i in range(len(simulated)):
            for j in range(i + 1, len(simulated)):
                worst = min(worst, delta_e(simulated[i], simulated[j]))
        cvd_min[kind] = worst if math.isfinite(worst) else float("nan")
        if worst < CVD_DELTA_E_WARN:
            warnings.append(
                f"{kind} minimum nominal color distance {worst:.1f} below "
                f"{CVD_DELTA_E_WARN}"
            )

    return {
        "contrastRatio": round(contrast, 4),
        "accentContrastRatio": round(accent_contrast, 4),
        "backgroundChroma": round(chroma, 4),
        "divergingHueGap": round(gap, 4),
        "colorBlindMinDeltaE": {k: round(v, 4) for k, v in cvd_min.items()},
        "passed": not issues,
        "issues": issues,
        "warnings": warnings,
    }

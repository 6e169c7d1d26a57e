"""Color space conversions for the theming engine.

HSLuv is a cylindrical projection of CIELUV where saturation is the
percentage of the maximum in-gamut chroma available at a given hue and
lightness; the gamut boundary is found by intersecting the hue ray with the
six sRGB edge lines in the chromaticity plane. CIELAB/LCh is carried
alongside for absolute-chroma checks and perceptual distances, plus WCAG
relative luminance and dichromacy simulation matrices.
"""

from __future__ import annotations

import math
import warnings
from typing import List, Sequence, Tuple

RGB = Tuple[float, float, float]

# XYZ <-> linear sRGB (D65)
_M = (
    (3.240969941904521, -1.537383177570093, -0.498610760293),
    (-0.96924363628087, 1.87596750150772, 0.041555057407175),
    (0.055630079696993, -0.20397695888897, 1.056971514242878),
)
_M_INV = (
    (0.41239079926595, 0.35758433938387, 0.18048078840183),
    (0.21263900587151, 0.71516867876775, 0.072192315360733),
    (0.019330818715591, 0.11919477979462, 0.95053215224966),
)
_REF_U = 0.19783000664283
_REF_V = 0.46831999493879
_KAPPA = 903.2962962
_EPSILON = 0.0088564516


class ColorRangeWarning(UserWarning):
    pass


def _clamp(value: float, lo: float, hi: float, name: str) -> float:
    if value < lo - 1e-6 or value > hi + 1e-6:
        warnings.warn(
            f"{name}={value:g} outside [{lo:g}, {hi:g}], clamped", ColorRangeWarning
        )
    return min(hi, max(lo, value))


# ---------------------------------------------------------------------------
# gamut boundary
# ---------------------------------------------------------------------------


def _get_bounds(l: float) -> List[Tuple[float, float]]:
    """The six sRGB gamut edges as (slope, intercept) lines at lightness l."""
    result = []
    sub1 = ((l + 16.0) ** 3) / 1560896.0
    sub2 = sub1 if sub1 > _EPSILON else l / _KAPPA
    for m1, m2, m3 in _M:
        for t in (0.0, 1.0):
            top1 = (284517.0 * m1 - 94839.0 * m3) * sub2
            top2 = (838422.0 * m3 + 769860.0 * m2 + 731718.0 * m1) * l * sub2 - 769860.0 * t * l
            bottom = (632260.0 * m3 - 126452.0 * m2) * sub2 + 126452.0 * t
            result.append((top1 / bottom, top2 / bottom))
    return result


def max_chroma_for(l: float, h: float) -> float:
    """Largest in-gamut LUV chroma at the given HSLuv lightness and hue."""
    hrad = math.radians(h)
    sin_h = math.sin(hrad)
    cos_h = math.cos(hrad)
    best = math.inf
    for slope, intercept in _get_bounds(l):
        denom = sin_h - slope * cos_h
        if denom == 0:
            continue
        length = intercept / denom
        if length >= 0:
            best = min(best, length)
    return best


# ---------------------------------------------------------------------------
# component conversions
# ---------------------------------------------------------------------------


def _from_linear(c: float) -> float:
    if c <= 0.0031308:
        return 12.92 * c
    return 1.055 * (c ** (1.0 / 2.4)) - 0.055


def _to_linear(c: float) -> float:
    if c > 0.04045:
        return ((c + 0.055) / 1.055) ** 2.4
    return c / 12.92


def _y_to_l(y: float) -> float:
    if y <= _EPSILON:
        return y * _KAPPA
    return 116.0 * (y ** (1.0 / 3.0)) - 16.0


def _l_to_y(l: float) -> float:
    if l <= 8.0:
        return l / _KAPPA
    return ((l + 16.0) / 116.0) ** 3


def _xyz_to_rgb(xyz: Sequence[float]) -> RGB:
    return tuple(_from_linear(sum(m * c for m, c in zip(row, xyz))) for row in _M)


def _rgb_to_xyz(rgb: Sequence[float]) -> Tuple[float, float, float]:
    linear = [_to_linear(c) for c in rgb]
    return tuple(sum(m * c for m, c in zip(row, linear)) for row in _M_INV)


def _xyz_to_luv(xyz: Sequence[float]) -> Tuple[float, float, float]:
    x, y, z = xyz
    div = x + 15.0 * y + 3.0 * z
    if div == 0:
        return 0.0, 0.0, 0.0
    var_u = 4.0 * x / div
    var_v = 9.0 * y / div
    l = _y_to_l(y)
    if l == 0:
        return 0.0, 0.0, 0.0
    return l, 13.0 * l * (var_u - _REF_U), 13.0 * l * (var_v - _REF_V)


def _luv_to_xyz(luv: Sequence[float]) -> Tuple[float, float, float]:
    l, u, v = luv
    if l == 0:
        return 0.0, 0.0, 0.0
    var_u = u / (13.0 * l) + _REF_U
    var_v = v / (13.0 * l) + _REF_V
    y = _l_to_y(l)
    x = 0.0 - (9.0 * y * var_u) / ((var_u - 4.0) * var_v - var_u * var_v)
    z = (9.0 * y - (15.0 * var_v * y) - (var_v * x)) / (3.0 * var_v)
    return x, y, z


def _luv_to_lch(luv: Sequence[float]) -> Tuple[float, float, float]:
    l, u, v = luv
    c = math.hypot(u, v)
    if c < 1e-8:
        h = 0.0
    else:
        h = math.degrees(math.atan2(v, u))
        if h < 0:
            h += 360.0
    return l, c, h


def _lch_to_luv(lch: Sequence[float]) -> Tuple[float, float, float]:
    l, c, h = lch
    hrad = math.radians(h)
    return l, math.cos(hrad) * c, math.sin(hrad) * c


def _hsluv_to_lch(hsl: Sequence[float]) -> Tuple[float, float, float]:
    h, s, l = hsl
    if l > 100.0 - 1e-7:
        return 100.0, 0.0, h
    if l < 1e-8:
        return 0.0, 0.0, h
    return l, max_chroma_for(l, h) / 100.0 * s, h


def _lch_to_hsluv(lch: Sequence[float]) -> Tuple[float, float, float]:
    l, c, h = lch
    if l > 100.0 - 1e-7:
        return h, 0.0, 100.0
    if l < 1e-8:
        return h, 0.0, 0.0
    mx = max_chroma_for(l, h)
    return h, c / mx * 100.0 if mx > 0 else 0.0, l


# ---------------------------------------------------------------------------
# public conversions
# ---------------------------------------------------------------------------


def hsluv_to_rgb(h: float, s: float, l: float) -> RGB:
    """HSLuv (0-360, 0-100, 0-100) to sRGB floats; out-of-range inputs clamp
    with a warning."""
    h = _clamp(h % 360.0 if math.isfinite(h) else 0.0, 0.0, 360.0, "hue")
    s = _clamp(s, 0.0, 100.0, "saturation")
    l = _clamp(l, 0.0, 100.0, "lightness")
    rgb = _xyz_to_rgb(_luv_to_xyz(_lch_to_luv(_hsluv_to_lch((h, s, l)))))
    return tuple(min(1.0, max(0.0, c)) for c in rgb)


def rgb_to_hsluv(r: float, g: float, b: float) -> Tuple[float, float, float]:
    return _lch_to_hsluv(_luv_to_lch(_xyz_to_luv(_rgb_to_xyz((r, g, b)))))


def rgb_to_hex(rgb: Sequence[float]) -> str:
    channels = [int(round(min(1.0, max(0.0, c)) * 255.0)) for c in rgb]
    return "#{:02X}{:02X}{:02X}".format(*channels)


def hex_to_rgb(value: str) -> RGB:
    value = value.lstrip("#")
    if len(value) != 6:
        raise ValueError(f"expected #RRGGBB, got {value!r}")
    return tuple(int(value[i : i + 2], 16) / 255.0 for i in (0, 2, 4))


def hsluv_to_hex(h: float, s: float, l: float) -> str:
    return rgb_to_hex(hsluv_to_rgb(h, s, l))


def hex_to_hsluv(value: str) -> Tuple[float, float, float]:
    return rgb_to_hsluv(*hex_to_rgb(value))


# ---------------------------------------------------------------------------
# CIELAB (absolute chroma and perceptual distance)
# ---------------------------------------------------------------------------

# white point implied by the sRGB matrix itself, so pure grays are neutral
_LAB_WHITE = tuple(sum(row) for row in _M_INV)


def rgb_to_lab(rgb: Sequence[float]) -> Tuple[float, float, float]:
    xyz = _rgb_to_xyz(rgb)
    scaled = [c / w for c, w in zip(xyz, _LAB_WHITE)]

    def f(t: float) -> float:
        if t > 0.008856:
            return t ** (1.0 / 3.0)
        return (903.3 * t + 16.0) / 116.0

    fx, fy, fz = (f(t) for t in scaled)
    return 116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)


def lab_chroma(rgb: Sequence[float]) -> float:
    """CIE LCh(ab) chroma: the colorfulness the background cap limits."""
    _, a, b = rgb_to_lab(rgb)
    return math.hypot(a, b)


def delta_e(rgb1: Sequence[float], rgb2: Sequence[float]) -> float:
    """CIE76 distance in Lab."""
    l1 = rgb_to_lab(rgb1)
    l2 = rgb_to_lab(rgb2)
    return math.dist(l1, l2)


# ---------------------------------------------------------------------------
# accessibility checks
# ---------------------------------------------------------------------------


def relative_luminance(rgb: Sequence[float]) -> float:
    r, g, b = (_to_linear(c) for c in rgb)
    return 0.2126 * r + 0.7152 * g + 0.0722 * b


def contrast_ratio(rgb1: Sequence[float], rgb2: Sequence[float]) -> float:
    l1 = relative_luminance(rgb1)
    l2 = relative_luminance(rgb2)
    bright, dark = max(l1, l2), min(l1, l2)
    return (bright + 0.05) / (dark + 0.05)


# dichromacy simulation in linear RGB (Machado et al. severity 1.0)
_CVD_MATRICES = {
    "protan": (
        (0.152286, 1.052583, -0.204868),
        (0.114503, 0.786281, 0.099216),
        (-0.003882, -0.048116, 1.051998),
    ),
    "deutan": (
        (0.367322, 0.860646, -0.227968),
        (0.280085, 0.672501, 0.047413),
        (-0.011820, 0.042940, 0.968881),
    ),
    "tritan": (
        (1.255528, -0.076749, -0.178779),
        (-0.078411, 0.930809, 0.147602),
        (0.004733, 0.691367, 0.303900),
    ),
}


def simulate_cvd(rgb: Sequence[float], kind: str) -> RGB:
    """Simulated appearance under protanopia, deuteranopia, or tritanopia."""
    if kind not in _CVD_MATRICES:
        raise ValueError(f"unknown deficiency {kind!r}")
    linear = [_to_linear(c) for c in rgb]
    out = [sum(m * c for m, c in zip(row, linear)) for row in _CVD_MATRICES[kind]]
    return tuple(min(1.0, max(0.0, _from_linear(c))) for c in out)

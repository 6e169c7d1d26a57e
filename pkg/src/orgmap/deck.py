"""Template-driven deck assembly.

A deck template is an ordered list of slides whose text and image elements
carry ``{tag}`` placeholders. A stamp specification says how to replace the
tags with text or media, how to duplicate reusable slide sequences with
per-instance replacements, and which theme to apply. Stamping resolves
everything or fails loudly listing what is missing; the resolved deck
serializes to JSON and renders to a single self-contained HTML file.

Literal braces escape as ``{{`` and ``}}``; tags do not nest.
"""

from __future__ import annotations

import base64
import json
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .theming import Theme

FORMAT_VERSION = 1
_TAG_RE = re.compile(r"\{([^{}]+)\}")
_ESC_OPEN = "\x00"
_ESC_CLOSE = "\x01"


class DeckError(ValueError):
    pass


@dataclass
class Element:
    kind: str  # "text" | "image"
    content: str = ""  # text body or image source (path, url, or "{tag}")
    hyperlink: Optional[str] = None

    def to_json_dict(self) -> Dict:
        out: Dict = {"kind": self.kind, "content": self.content}
        if self.hyperlink:
            out["hyperlink"] = self.hyperlink
        return out


@dataclass
class Slide:
    slide_id: str
    elements: List[Element]

    def to_json_dict(self) -> Dict:
        return {
            "slideId": self.slide_id,
            "elements": [e.to_json_dict() for e in self.elements],
        }


@dataclass
class DeckTemplate:
    slides: List[Slide]

    def __post_init__(self):
        ids = [s.slide_id for s in self.slides]
        if len(ids) != len(set(ids)):
            raise DeckError("slide ids must be unique")
        for slide in self.slides:
            for el in slide.elements:
                if el.kind not in ("text", "image"):
                    raise DeckError(f"unknown element kind {el.kind!r}")
                _scan_tags(el.content)  # validates tag syntax

    def slide_map(self) -> Dict[str, Slide]:
        return {s.slide_id: s for s in self.slides}


@dataclass
class Replacement:
    text: Optional[str] = None
    media: Optional[str] = None
    url: Optional[str] = None

    @classmethod
    def from_json(cls, data) -> "Replacement":
        if isinstance(data, str):
            return cls(text=data)
        return cls(text=data.get("text"), media=data.get("media"), url=data.get("url"))


@dataclass
class Sequence:
    slide_ids: List[str]
    instances: List[Dict[str, Replacement]]


@dataclass
class StampSpec:
    replacements: Dict[str, Replacement] = field(default_factory=dict)
    sequences: List[Sequence] = field(default_factory=list)
    theme_ref: Optional[str] = None


@dataclass
class Deck:
    slides: List[Slide]
    theme: Optional[Theme] = None

    def to_json_dict(self) -> Dict:
        return {
            "formatVersion": FORMAT_VERSION,
            "slides": [s.to_json_dict() for s in self.slides],
        }


# ---------------------------------------------------------------------------
# JSON loading
# ---------------------------------------------------------------------------


def template_from_json(text: str) -> DeckTemplate:
    data = json.loads(text)
    if data.get("formatVersion") != FORMAT_VERSION:
        raise DeckError(f"unsupported template formatVersion {data.get('formatVersion')!r}")
    slides = []
    for s in data["slides"]:
        elements = [
            Element(e["kind"], e.get("content", ""), e.get("hyperlink"))
            for e in s["elements"]
        ]
        slides.append(Slide(s["slideId"], elements))
    return DeckTemplate(slides)


def template_to_json(template: DeckTemplate) -> str:
    return json.dumps(
        {"formatVersion": FORMAT_VERSION, "slides": [s.to_json_dict() for s in template.slides]},
        indent=2,
    ) + "\n"


def spec_from_json(text: str) -> StampSpec:
    data = json.loads(text)
    if data.get("formatVersion") != FORMAT_VERSION:
        raise DeckError(f"unsupported spec formatVersion {data.get('formatVersion')!r}")
    replacements = {
        tag: Replacement.from_json(v) for tag, v in data.get("replacements", {}).items()
    }
    sequences = [
        Sequence(
            seq["slideIds"],
            [
                {tag: Replacement.from_json(v) for tag, v in inst.items()}
                for inst in seq.get("instances", [])
            ],
        )
        for seq in data.get("sequences", [])
    ]
    return StampSpec(replacements, sequences, data.get("themeRef"))


def deck_to_json(deck: Deck) -> str:
    return json.dumps(deck.to_json_dict(), indent=2) + "\n"


# ---------------------------------------------------------------------------
# tag machinery
# ---------------------------------------------------------------------------


def _protect(text: str) -> str:
    return text.replace("{{", _ESC_OPEN).replace("}}", _ESC_CLOSE)


def _restore(text: str) -> str:
    return text.replace(_ESC_OPEN, "{").replace(_ESC_CLOSE, "}")


def _scan_tags(text: str) -> List[str]:
    guarded = _protect(text)
    if "{" in re.sub(_TAG_RE, "", guarded) or "}" in re.sub(_TAG_RE, "", guarded):
        raise DeckError(f"malformed tag braces in {text!r}")
    return _TAG_RE.findall(guarded)


def _substitute_text(text: str, table: Dict[str, Replacement]) -> Tuple[str, List[str]]:
    guarded = _protect(text)
    unresolved: List[str] = []

    def repl(match: re.Match) -> str:
        tag = match.group(1)
        if tag in table:
            value = table[tag]
            if value.text is not None:
                return value.text
            if value.media is not None:
                return value.media
        unresolved.append(tag)
        return match.group(0)

    return _restore(_TAG_RE.sub(repl, guarded)), unresolved


def _stamp_element(el: Element, table: Dict[str, Replacement]) -> Tuple[Element, List[str]]:
    if el.kind == "text":
        content, unresolved = _substitute_text(el.content, table)
        return Element("text", content, el.hyperlink), unresolved
    # image: the whole content may be one tag resolving to media or url
    tags = _scan_tags(el.content)
    if not tags:
        return Element("image", _restore(_protect(el.content)), el.hyperlink), []
    if len(tags) > 1 or el.content.strip() != "{%s}" % tags[0]:
        raise DeckError(f"image source must be a single tag, got {el.content!r}")
    tag = tags[0]
    if tag not in table:
        return el, [tag]
    value = table[tag]
    source = value.media if value.media is not None else (value.text or "")
    hyperlink = value.url or el.hyperlink
    return Element("image", source, hyperlink), []


# ---------------------------------------------------------------------------
# stamping
# ---------------------------------------------------------------------------


def validate_spec(template: DeckTemplate, spec: StampSpec) -> Dict:
    """Dry-run report: unresolved tags, unknown slide ids, unused replacements."""
    known = template.slide_map()
    unknown_slides = [
        sid for seq in spec.sequences for sid in seq.slide_ids if sid not in known
    ]
    template_tags = set()
    for slide in template.slides:
        for el in slide.elements:
            template_tags.update(_scan_tags(el.content))
    provided = set(spec.replacements)
    for seq in spec.sequences:
        for inst in seq.instances:
            provided.update(inst)
    sequenced_tags = set()
    for seq in spec.sequences:
        for sid in seq.slide_ids:
            if sid in known:
                for el in known[sid].elements:
                    sequenced_tags.update(_scan_tags(el.content))
    unresolved = sorted(template_tags - provided)
    unused = sorted(provided - template_tags)
    return {
        "unresolvedTags": unresolved,
        "unknownSlideIds": sorted(set(unknown_slides)),
        "unusedReplacements": unused,
    }


def stamp(
    template: DeckTemplate,
    spec: StampSpec,
    media: Optional[Dict[str, bytes]] = None,
    theme: Optional[Theme] = None,
) -> Deck:
    """Expand sequences, substitute every tag, and apply the theme.

    Per-instance values override global replacements on sequenced slides.
    Unresolved tags, unknown slide ids, and missing media raise DeckError.
    """
    media = media or {}
    known = template.slide_map()
    for seq in spec.sequences:
        for sid in seq.slide_ids:
            if sid not in known:
                raise DeckError(f"unknown slideId {sid!r} in sequence")
    claimed: Dict[str, int] = {}
    for i, seq in enumerate(spec.sequences):
        for sid in seq.slide_ids:
            if sid in claimed:
                raise DeckError(f"slideId {sid!r} appears in more than one sequence")
            claimed[sid] = i

    out_slides: List[Slide] = []
    emitted_sequences = set()
    unresolved_all: List[str] = []
    for slide in template.slides:
        if slide.slide_id in claimed:
            seq_idx = claimed[slide.slide_id]
            if seq_idx in emitted_sequences:
                continue  # the whole run expands at its first slide's position
            emitted_sequences.add(seq_idx)
            seq = spec.sequences[seq_idx]
            for inst_no, inst in enumerate(seq.instances, 1):
                table = dict(spec.replacements)
                table.update(inst)
                for sid in seq.slide_ids:
                    src = known[sid]
                    elements = []
                    for el in src.elements:
                        stamped, unresolved = _stamp_element(el, table)
                        unresolved_all.extend(unresolved)
                        elements.append(stamped)
                    out_slides.append(Slide(f"{sid}#{inst_no}", elements))
        else:
            elements = []
            for el in slide.elements:
                stamped, unresolved = _stamp_element(el, spec.replacements)
                unresolved_all.extend(unresolved)
                elements.append(stamped)
            out_slides.append(Slide(slide.slide_id, elements))

    if unresolved_all:
        raise DeckError(f"unresolved tags: {sorted(set(unresolved_all))}")

    for slide in out_slides:
        for el in slide.elements:
            if el.kind == "image" and not _is_url(el.content):
                if el.content not in media:
                    raise DeckError(f"missing media: {el.content!r}")
    return Deck(out_slides, theme)


def _is_url(source: str) -> bool:
    return source.startswith("http://") or source.startswith("https://")


# ---------------------------------------------------------------------------
# HTML rendering
# ---------------------------------------------------------------------------


def _html_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def _embed_image(source: str, media: Dict[str, bytes]) -> str:
    if _is_url(source):
        return f'<img src="{source}" alt=""/>'
    blob = media[source]
    if source.endswith(".svg") or blob.lstrip()[:4] == b"<svg":
        return blob.decode("utf-8")
    suffix = source.rsplit(".", 1)[-1].lower()
    mime = {"png": "image/png", "jpg": "image/jpeg", "jpeg": "image/jpeg"}.get(
        suffix, "application/octet-stream"
    )
    encoded = base64.b64encode(blob).decode("ascii")
    return f'<img src="data:{mime};base64,{encoded}" alt=""/>'


def render_deck_html(deck: Deck, media: Optional[Dict[str, bytes]] = None) -> str:
    """Single-file HTML: one section per slide, media inlined, theme colors
    as page styles, hyperlinks preserved."""
    media = media or {}
    background = deck.theme.background if deck.theme else "#FFFFFF"
    foreground = deck.theme.foreground if deck.theme else "#222222"
    accent = deck.theme.accent if deck.theme else "#3366AA"
    parts = [
        "<!DOCTYPE html>",
        '<html><head><meta charset="utf-8"><title>deck</title><style>',
        f"body {{ background: {background}; color: {foreground}; "
        "font-family: sans-serif; margin: 0; }}",
        "section { min-height: 90vh; padding: 4vh 8vw; "
        f"border-bottom: 2px solid {accent}; }}",
        "img, svg { max-width: 100%; height: auto; }",
        f"a {{ color: {accent}; }}",
        "</style></head><body>",
    ]
    for slide in deck.slides:
        parts.append(f'<section id="{_html_escape(slide.slide_id)}">')
        for el in slide.elements:
            if el.kind == "text":
                body = _html_escape(el.content)
                if el.hyperlink:
                    body = f'<a href="{el.hyperlink}">{body}</a>'
                parts.append(f"<p>{body}</p>")
            else:
                img = _embed_image(el.content, media)
                if el.hyperlink:
                    img = f'<a href="{el.hyperlink}">{img}</a>'
                parts.append(img)
        parts.append("</section>")
    parts.append("</body></html>")
    return "\n".join(parts) + "\n"

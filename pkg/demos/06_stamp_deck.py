"""Stamp a deck template into a themed HTML presentation.

A template with text and image placeholders is stamped with replacements
and a reusable per-workgroup slide sequence, then rendered as a single HTML
file in demos/out/.
"""

from pathlib import Path

from orgmap import SliderState, derive_theme
from orgmap.deck import (
    DeckTemplate,
    Element,
    Replacement,
    Sequence,
    Slide,
    StampSpec,
    render_deck_html,
    stamp,
)

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

template = DeckTemplate(
    [
        Slide("title", [Element("text", "Collaboration review: {org name}")]),
        Slide(
            "overview",
            [
                Element("text", "We detected {detected workgroup count} workgroups."),
                Element("image", "{overview map}", hyperlink="https://example.org/method"),
            ],
        ),
        Slide(
            "workgroup",
            [
                Element("text", "Workgroup {wg}: freedom {freedom}, fluidity {fluidity}"),
            ],
        ),
    ]
)

spec = StampSpec(
    replacements={
        "org name": Replacement(text="Acme Corp"),
        "detected workgroup count": Replacement(text="23"),
        "overview map": Replacement(media="map.svg"),
    },
    sequences=[
        Sequence(
            ["workgroup"],
            [
                {
                    "wg": Replacement(text=str(wid)),
                    "freedom": Replacement(text=f"{0.1 * wid:.1f}"),
                    "fluidity": Replacement(text=f"{0.03 * wid:.2f}"),
                }
                for wid in (3, 7, 12)
            ],
        )
    ],
)

media = {
    "map.svg": (
        b'<svg xmlns="http://www.w3.org/2000/svg" width="200" height="80">'
        b'<circle cx="40" cy="40" r="30" fill="#4477AA"/>'
        b'<circle cx="120" cy="40" r="22" fill="#AA5533"/></svg>'
    )
}

theme = derive_theme(SliderState(accent_hue=280, mode="dark"))
deck = stamp(template, spec, media=media, theme=theme)
print(f"stamped {len(deck.slides)} slides: {[s.slide_id for s in deck.slides]}")

html = render_deck_html(deck, media)
(out / "deck.html").write_text(html)
print(f"wrote {out / 'deck.html'}")

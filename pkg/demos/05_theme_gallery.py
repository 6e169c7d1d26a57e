"""Walk the theme sliders and print the resulting palettes.

Shows how the background level and hue shift stay within the muted chroma
cap, how the nominal scale step controls palette size and direction, and
what the validator reports for each theme.
"""

from orgmap import SliderState, derive_theme, validate_theme
from orgmap.theming import invert_mode


def show(label, state):
    theme = derive_theme(state)
    report = validate_theme(theme)
    print(f"\n{label}")
    print(f"  background {theme.background}  foreground {theme.foreground}  accent {theme.accent}")
    print(f"  nominal ({len(theme.nominal)}): {' '.join(theme.nominal)}")
    print(f"  sequential: {theme.sequential[0]} .. {theme.sequential[-1]}")
    print(f"  diverging:  {theme.diverging[0]} .. {theme.diverging[-1]}")
    print(
        f"  contrast {report['contrastRatio']}  bg-chroma {report['backgroundChroma']}"
        f"  diverging-gap {report['divergingHueGap']}"
        + ("" if report["passed"] else f"  ISSUES: {report['issues']}")
    )


show("default light", SliderState())
show("default dark (inverted)", invert_mode(SliderState()))
show("warm brand, tinted background", SliderState(accent_hue=25, background_level=45, background_hue_shift=60))
show("complementary background", SliderState(accent_hue=25, background_hue_shift=100))
show("thirteen nominal hues (step 21)", SliderState(nominal_scale_step=21))
show("counter-clockwise four hues (step 9)", SliderState(nominal_scale_step=9))

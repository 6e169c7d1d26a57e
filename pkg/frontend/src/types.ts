/**
 * Wire types shared with the orgmap theme service. The studio never invents
 * colors: everything displayed comes from a served ThemeJson.
 */

export type Mode = 'light' | 'dark';

export interface SliderState {
  accentHue: number;
  accentSaturation: number;
  accentLightness: number;
  backgroundLevel: number;
  backgroundHueShift: number;
  nominalScaleStep: number;
  mode: Mode;
}

export const DEFAULT_SLIDERS: SliderState = {
  accentHue: 210,
  accentSaturation: 80,
  accentLightness: 50,
  backgroundLevel: 25,
  backgroundHueShift: 50,
  nominalScaleStep: 11,
  mode: 'light',
};

export interface ThemeColors {
  background: string;
  foreground: string;
  accent: string;
  nominal: string[];
  nominalBold: string[];
  nominalMuted: string[];
  sequential: string[];
  diverging: string[];
}

export interface ThemeJson {
  mode: Mode;
  sliders: SliderState;
  colors: ThemeColors;
  /** present only when the service clamped out-of-range inputs */
  warnings?: string[];
}

export interface ValidationReport {
  contrastRatio: number;
  accentContrastRatio: number;
  backgroundChroma: number;
  divergingHueGap: number;
  colorBlindMinDeltaE: Record<string, number>;
  passed: boolean;
  issues: string[];
  warnings: string[];
}

export const SLIDER_RANGES: Record<Exclude<keyof SliderState, 'mode'>, [number, number, number]> = {
  accentHue: [0, 360, 1],
  accentSaturation: [0, 100, 1],
  accentLightness: [0, 100, 1],
  backgroundLevel: [0, 100, 1],
  backgroundHueShift: [0, 100, 1],
  nominalScaleStep: [0, 21, 1],
};

/**
 * Studio state: slider values are optimistic (the knob moves immediately),
 * colors are pessimistic (only ever swapped in from a server response).
 * The raw response text is the single source of truth for every swatch and
 * for export, which stays blocked while a change is still settling.
 */

import { ThemeClient, ServiceError } from './api';
import { debounce, type Debounced } from './debounce';
import {
  DEFAULT_SLIDERS,
  type SliderState,
  type ThemeJson,
  type ValidationReport,
} from './types';

export interface StudioState {
  sliders: SliderState;
  themeText: string | null;
  theme: ThemeJson | null;
  validation: ValidationReport | null;
  dirty: boolean;
  banner: string | null;
}

export type Listener = (state: StudioState) => void;

export const DEBOUNCE_MS = 100;

export class StudioStore {
  private state: StudioState = {
    sliders: { ...DEFAULT_SLIDERS },
    themeText: null,
    theme: null,
    validation: null,
    dirty: true,
    banner: null,
  };
  private listeners = new Set<Listener>();
  private readonly scheduleRefresh: Debounced<[]>;

  constructor(private readonly client: ThemeClient, debounceMs: number = DEBOUNCE_MS) {
    this.scheduleRefresh = debounce(() => {
      void this.refresh();
    }, debounceMs);
  }

  getState(): StudioState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private update(patch: Partial<StudioState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  /** Slider knobs move instantly; the theme refresh is debounced. */
  setSlider<K extends keyof SliderState>(field: K, value: SliderState[K]): void {
    if (this.state.sliders[field] === value) return;
    this.update({
      sliders: { ...this.state.sliders, [field]: value },
      dirty: true,
    });
    this.scheduleRefresh();
  }

  toggleMode(): void {
    this.setSlider('mode', this.state.sliders.mode === 'light' ? 'dark' : 'light');
  }

  /** Immediate fetch for the current sliders (used at startup). */
  async refresh(): Promise<void> {
    const requested = { ...this.state.sliders };
    let response;
    try {
      response = await this.client.fetchTheme(requested);
    } catch (err) {
      // service unreachable: keep the last good theme, raise the banner
      const message = err instanceof ServiceError ? err.message : String(err);
      this.update({ banner: message });
      return;
    }
    if (response === null) return; // superseded by a newer request
    const settled = sameSliders(requested, this.state.sliders);
    this.update({
      themeText: response.raw,
      theme: response.theme,
      dirty: settled ? false : this.state.dirty,
      banner: null,
    });
    try {
      const validation = await this.client.validate(requested);
      if (sameSliders(requested, this.state.sliders)) {
        this.update({ validation });
      }
    } catch {
      // validation is advisory; the theme itself already landed
    }
  }

  /**
   * The exported file is exactly the bytes the server sent. Export is
   * blocked while a slider change has not settled into a response.
   */
  exportTheme(): string | null {
    if (this.state.dirty || this.state.themeText === null) {
      return null;
    }
    return this.state.themeText;
  }

  sampleUrl(): string {
    return this.client.sampleUrl(this.state.sliders);
  }
}

function sameSliders(a: SliderState, b: SliderState): boolean {
  return (
    a.accentHue === b.accentHue &&
    a.accentSaturation === b.accentSaturation &&
    a.accentLightness === b.accentLightness &&
    a.backgroundLevel === b.backgroundLevel &&
    a.backgroundHueShift === b.backgroundHueShift &&
    a.nominalScaleStep === b.nominalScaleStep &&
    a.mode === b.mode
  );
}

/**
 * DOM wiring: six sliders plus the mode toggle on the left, live preview on
 * the right (sample workgroup map, palette strips, slide-chrome mock,
 * validation badges). The studio's own chrome adopts whatever theme the
 * server last returned, so the tool is always a preview of itself.
 */

import type { StudioState, StudioStore } from './store';
import { SLIDER_RANGES, type SliderState } from './types';

const SLIDER_LABELS: Record<Exclude<keyof SliderState, 'mode'>, string> = {
  accentHue: 'Accent hue',
  accentSaturation: 'Accent saturation',
  accentLightness: 'Accent lightness',
  backgroundLevel: 'Background level',
  backgroundHueShift: 'Background hue shift',
  nominalScaleStep: 'Nominal scale step',
};

export function mountStudio(root: HTMLElement, store: StudioStore): void {
  root.innerHTML = `
    <div class="studio">
      <aside class="controls">
        <h1>Theme studio</h1>
        <div class="banner" hidden></div>
        <div class="sliders"></div>
        <label class="mode-row">
          <input type="checkbox" class="mode-toggle"/> dark mode
        </label>
        <button class="export" disabled>Export theme JSON</button>
      </aside>
      <main class="preview">
        <img class="sample" alt="sample workgroup map"/>
        <div class="strips">
          <div class="strip nominal"><h2>nominal</h2><div class="swatches"></div></div>
          <div class="strip bold"><h2>bold</h2><div class="swatches"></div></div>
          <div class="strip muted"><h2>muted</h2><div class="swatches"></div></div>
          <div class="strip sequential"><h2>sequential</h2><div class="swatches"></div></div>
          <div class="strip diverging"><h2>diverging</h2><div class="swatches"></div></div>
        </div>
        <div class="slide-mock">
          <h2 class="mock-title">Slide title</h2>
          <p class="mock-body">Body text on the themed background with an
            <span class="mock-accent">accent</span>.</p>
        </div>
        <ul class="badges"></ul>
      </main>
    </div>`;

  const slidersBox = root.querySelector('.sliders') as HTMLElement;
  for (const [field, label] of Object.entries(SLIDER_LABELS)) {
    const key = field as Exclude<keyof SliderState, 'mode'>;
    const [min, max, step] = SLIDER_RANGES[key];
    const row = document.createElement('label');
    row.className = 'slider-row';
    row.innerHTML = `<span>${label}</span>
      <input type="range" min="${min}" max="${max}" step="${step}" data-field="${field}"/>
      <output></output>`;
    slidersBox.appendChild(row);
    const input = row.querySelector('input') as HTMLInputElement;
    input.addEventListener('input', () => {
      store.setSlider(key, Number(input.value));
      (row.querySelector('output') as HTMLOutputElement).value = input.value;
    });
  }

  const modeToggle = root.querySelector('.mode-toggle') as HTMLInputElement;
  modeToggle.addEventListener('change', () => store.toggleMode());

  const exportButton = root.querySelector('.export') as HTMLButtonElement;
  exportButton.addEventListener('click', () => {
    const text = store.exportTheme();
    if (text === null) return; // still settling
    const blob = new Blob([text], { type: 'application/json' });
    const link = document.createElement('a');
    link.href = URL.createObjectURL(blob);
    link.download = 'theme.json';
    link.click();
    URL.revokeObjectURL(link.href);
  });

  store.subscribe((state) => render(root, store, state));
  void store.refresh();
}

function render(root: HTMLElement, store: StudioStore, state: StudioState): void {
  for (const input of root.querySelectorAll<HTMLInputElement>('input[type=range]')) {
    const field = input.dataset.field as Exclude<keyof SliderState, 'mode'>;
    const value = String(state.sliders[field]);
    if (input.value !== value) {
      input.value = value;
      const output = input.parentElement?.querySelector('output');
      if (output) (output as HTMLOutputElement).value = value;
    }
  }
  (root.querySelector('.mode-toggle') as HTMLInputElement).checked =
    state.sliders.mode === 'dark';

  const banner = root.querySelector('.banner') as HTMLElement;
  banner.hidden = state.banner === null;
  banner.textContent = state.banner ?? '';

  (root.querySelector('.export') as HTMLButtonElement).disabled =
    state.dirty || state.themeText === null;

  const sample = root.querySelector('.sample') as HTMLImageElement;
  const url = store.sampleUrl();
  if (sample.dataset.url !== url) {
    sample.dataset.url = url;
    sample.src = url;
  }

  // all colors below come from the served theme, never computed locally
  const theme = state.theme;
  if (!theme) return;
  const strips: Array<[string, string[]]> = [
    ['.strip.nominal .swatches', theme.colors.nominal],
    ['.strip.bold .swatches', theme.colors.nominalBold],
    ['.strip.muted .swatches', theme.colors.nominalMuted],
    ['.strip.sequential .swatches', theme.colors.sequential],
    ['.strip.diverging .swatches', theme.colors.diverging],
  ];
  for (const [selector, colors] of strips) {
    const box = root.querySelector(selector) as HTMLElement;
    box.innerHTML = colors
      .map((c) => `<span class="swatch" title="${c}" style="background:${c}"></span>`)
      .join('');
  }

  const chrome = root.querySelector('.studio') as HTMLElement;
  chrome.style.setProperty('--background', theme.colors.background);
  chrome.style.setProperty('--foreground', theme.colors.foreground);
  chrome.style.setProperty('--accent', theme.colors.accent);

  const badges = root.querySelector('.badges') as HTMLElement;
  const report = state.validation;
  if (report) {
    const rows = [
      ['contrast', `${report.contrastRatio}`, report.contrastRatio >= 4.5],
      ['bg chroma', `${report.backgroundChroma}`, report.backgroundChroma <= 4],
      ['diverging gap', `${report.divergingHueGap}°`, Math.abs(report.divergingHueGap - 90) <= 1],
      ...Object.entries(report.colorBlindMinDeltaE).map(
        ([kind, value]) => [kind, `ΔE ${value}`, value >= 10] as [string, string, boolean],
      ),
    ] as Array<[string, string, boolean]>;
    badges.innerHTML = rows
      .map(
        ([name, value, ok]) =>
          `<li class="badge ${ok ? 'ok' : 'warn'}">${name}: ${value}</li>`,
      )
      .join('');
  }
}

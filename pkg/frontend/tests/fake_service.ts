/**
 * Deterministic stand-in for the orgmap theme service: same sliders always
 * produce the same bytes, the nominal palette length follows the scale step
 * exactly like the real engine, and every produced color is traceable to
 * the request (so tests can prove no client-side color math happened).
 */

import type { SliderState, ThemeJson } from '../src/types';

export function huesPerTraversal(step: number): number {
  return step >= 11 ? step - 8 : 13 - step;
}

export function fakeThemeBody(sliders: SliderState): string {
  const k = huesPerTraversal(sliders.nominalScaleStep);
  const hex = (n: number) =>
    `#${((n * 2654435761) >>> 8).toString(16).padStart(6, '0').slice(0, 6).toUpperCase()}`;
  const seedNum =
    sliders.accentHue * 7 +
    sliders.accentSaturation * 11 +
    sliders.accentLightness * 13 +
    sliders.backgroundLevel * 17 +
    sliders.backgroundHueShift * 19 +
    sliders.nominalScaleStep * 23 +
    (sliders.mode === 'dark' ? 29 : 0);
  const series = (offset: number, count: number) =>
    Array.from({ length: count }, (_, i) => hex(seedNum + offset + i));
  const theme: ThemeJson = {
    mode: sliders.mode,
    sliders,
    colors: {
      background: hex(seedNum + 1),
      foreground: hex(seedNum + 2),
      accent: hex(seedNum + 3),
      nominal: series(10, k),
      nominalBold: series(40, k),
      nominalMuted: series(70, k),
      sequential: series(100, 10),
      diverging: series(120, 11),
    },
  };
  return JSON.stringify(theme, null, 2) + '\n';
}

export interface RecordedRequest {
  url: string;
  body: SliderState;
}

export function makeFakeFetch(options?: {
  delayMs?: number;
  failNext?: { count: number };
}): { fetchImpl: typeof fetch; requests: RecordedRequest[] } {
  const requests: RecordedRequest[] = [];
  const fetchImpl = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const body = JSON.parse(String(init?.body ?? '{}')) as SliderState;
    requests.push({ url, body });
    if (options?.failNext && options.failNext.count > 0) {
      options.failNext.count -= 1;
      throw new TypeError('network down');
    }
    if (options?.delayMs) {
      await new Promise((resolve) => setTimeout(resolve, options.delayMs));
    }
    if (init?.signal?.aborted) {
      throw new DOMException('aborted', 'AbortError');
    }
    if (url.endsWith('/theme')) {
      return new Response(fakeThemeBody(body), { status: 200 });
    }
    if (url.endsWith('/theme/validate')) {
      return new Response(
        JSON.stringify({
          contrastRatio: 11.5,
          accentContrastRatio: 4.2,
          backgroundChroma: 2.1,
          divergingHueGap: 90,
          colorBlindMinDeltaE: { protan: 25, deutan: 12, tritan: 30 },
          passed: true,
          issues: [],
          warnings: [],
        }),
        { status: 200 },
      );
    }
    return new Response('not found', { status: 404 });
  }) as typeof fetch;
  return { fetchImpl, requests };
}

/**
 * Client for the orgmap theme service.
 *
 * At most one theme request is live at a time: issuing a new one aborts the
 * previous and stale responses are dropped by request id, so the newest
 * slider state always wins. The raw response body is preserved verbatim
 * because exports must be byte-identical to what the server sent.
 */

import type { SliderState, ThemeJson, ValidationReport } from './types';

export interface ThemeResponse {
  /** exact bytes of the server response, the export artifact */
  raw: string;
  theme: ThemeJson;
}

export class ServiceError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class ThemeClient {
  private requestId = 0;
  private controller: AbortController | undefined;

  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  /**
   * POST the sliders; resolves null when a newer request superseded this
   * one, throws ServiceError when the service is unreachable or rejects.
   */
  async fetchTheme(sliders: SliderState): Promise<ThemeResponse | null> {
    this.requestId += 1;
    const id = this.requestId;
    this.controller?.abort();
    this.controller = new AbortController();
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/theme`, {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify(sliders),
        signal: this.controller.signal,
      });
    } catch (err) {
      if (id !== this.requestId) return null; // aborted by a newer request
      throw new ServiceError(`theme service unreachable: ${err}`);
    }
    if (id !== this.requestId) return null;
    const raw = await response.text();
    if (id !== this.requestId) return null;
    if (!response.ok) {
      throw new ServiceError(`theme request failed (${response.status})`, response.status);
    }
    return { raw, theme: JSON.parse(raw) as ThemeJson };
  }

  async validate(sliders: SliderState): Promise<ValidationReport> {
    const response = await this.fetchImpl(`${this.baseUrl}/theme/validate`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(sliders),
    });
    if (!response.ok) {
      throw new ServiceError(`validate failed (${response.status})`, response.status);
    }
    return (await response.json()) as ValidationReport;
  }

  /** URL of the themed sample workgroup map for the given sliders. */
  sampleUrl(sliders: SliderState): string {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(sliders)) {
      params.set(key, String(value));
    }
    return `${this.baseUrl}/sample/network.svg?${params.toString()}`;
  }
}

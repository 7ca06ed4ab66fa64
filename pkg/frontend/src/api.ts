// Minimal typed client for the search service. Callers pass AbortSignals;
// the session layer owns cancellation policy (one in-flight request per kind).

import type {
  DatasetInfo,
  RerankMode,
  RerankResponse,
  SearchResponse,
  ServiceErrorBody,
} from './types';

export class ServiceError extends Error {
  readonly kind: string;
  readonly status: number;

  constructor(status: number, body: ServiceErrorBody) {
    super(body.detail || body.error || `service error ${status}`);
    this.kind = body.error ?? 'Unknown';
    this.status = status;
  }
}

export interface SearchParams {
  dataset: string;
  query: string;
  weights?: Record<string, number>;
  top?: number;
}

export interface RerankParams {
  dataset: string;
  query: string;
  mode: RerankMode;
  k: number;
  weights?: Record<string, number>;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
      signal,
    });
    return this.unwrap<T>(response);
  }

  private async unwrap<T>(response: Response): Promise<T> {
    const payload = await response.json();
    if (!response.ok) {
      throw new ServiceError(response.status, payload as ServiceErrorBody);
    }
    return payload as T;
  }

  async datasets(signal?: AbortSignal): Promise<DatasetInfo[]> {
    const response = await this.fetchFn(`${this.baseUrl}/datasets`, { signal });
    return this.unwrap<DatasetInfo[]>(response);
  }

  search(params: SearchParams, signal?: AbortSignal): Promise<SearchResponse> {
    return this.post<SearchResponse>('/search', params, signal);
  }

  rerank(params: RerankParams, signal?: AbortSignal): Promise<RerankResponse> {
    return this.post<RerankResponse>('/rerank', params, signal);
  }

  imageUrl(dataset: string, guiId: string): string {
    return `${this.baseUrl}/guis/${encodeURIComponent(dataset)}/${encodeURIComponent(guiId)}/image`;
  }
}

declare global {
  interface Window {
    __GUISEEK_SERVICE__?: string;
  }
}

export function resolveServiceUrl(win: Pick<Window, 'location'> & Partial<Window>): string {
  const fromQuery = new URLSearchParams(win.location.search).get('service');
  return win.__GUISEEK_SERVICE__ ?? fromQuery ?? 'http://localhost:8000';
}

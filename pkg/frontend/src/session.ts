// Client-side search session: query, weights, stage-1 and rerank results,
// the before/after ordering toggle, and cancellation of stale requests.
// Pure state container over the ApiClient so it is testable without a DOM.

import type { ApiClient } from './api';
import { ServiceError } from './api';
import type {
  DatasetInfo,
  Decomposition,
  RerankMode,
  RerankRow,
  SearchRow,
  UsageBlock,
} from './types';

export const WEIGHT_MIN = 0;
export const WEIGHT_MAX = 5;
export const WEIGHT_STEP = 0.1;

export function clampWeight(value: number): number {
  const clamped = Math.min(WEIGHT_MAX, Math.max(WEIGHT_MIN, value));
  return Math.round(clamped / WEIGHT_STEP) * WEIGHT_STEP;
}

export interface SessionState {
  dataset: DatasetInfo | null;
  query: string;
  weights: Record<string, number>;
  decomposition: Decomposition | null;
  stage1: SearchRow[] | null;
  reranked: RerankRow[] | null;
  rerankUsage: UsageBlock | null;
  searchUsage: UsageBlock | null;
  mode: RerankMode;
  k: number;
  showReranked: boolean;
  searching: boolean;
  reranking: boolean;
  error: string | null;
  validation: string | null;
}

function initialState(): SessionState {
  return {
    dataset: null,
    query: '',
    weights: {},
    decomposition: null,
    stage1: null,
    reranked: null,
    rerankUsage: null,
    searchUsage: null,
    mode: 'text',
    k: 20,
    showReranked: false,
    searching: false,
    reranking: false,
    error: null,
    validation: null,
  };
}

type Listener = (state: SessionState) => void;

export class SearchSession {
  readonly state: SessionState = initialState();
  private listeners: Listener[] = [];
  private searchController: AbortController | null = null;
  private rerankController: AbortController | null = null;

  constructor(private readonly api: ApiClient) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  setDataset(dataset: DatasetInfo): void {
    this.state.dataset = dataset;
    this.state.weights = {};
    for (const dim of dataset.dimensions) {
      this.state.weights[dim.id] = clampWeight(dim.default_weight);
    }
    this.state.stage1 = null;
    this.state.reranked = null;
    this.state.decomposition = null;
    this.state.showReranked = false;
    this.emit();
  }

  setQuery(query: string): void {
    this.state.query = query;
    this.state.validation = null;
    this.emit();
  }

  setMode(mode: RerankMode): void {
    this.state.mode = mode;
    this.emit();
  }

  setK(k: number): void {
    this.state.k = Math.max(1, Math.round(k));
    this.emit();
  }

  /** Slider change: clamp to [0, 5] in 0.1 steps, then re-run the search. */
  async setWeight(dimId: string, value: number): Promise<void> {
    this.state.weights[dimId] = clampWeight(value);
    this.emit();
    if (this.state.stage1 !== null) {
      await this.runSearch();
    }
  }

  get canRerank(): boolean {
    return this.state.stage1 !== null && !this.state.searching;
  }

  /** Stage-1 search. Stale in-flight searches are cancelled; results of a
   *  previous rerank are dropped since they no longer match the inputs. */
  async runSearch(): Promise<void> {
    const state = this.state;
    if (!state.dataset) return;
    if (!state.query.trim()) {
      state.validation = 'Enter a requirement first.';
      this.emit();
      return;
    }
    this.searchController?.abort();
    const controller = new AbortController();
    this.searchController = controller;
    state.searching = true;
    state.error = null;
    state.validation = null;
    this.emit();
    try {
      const response = await this.api.search(
        {
          dataset: state.dataset.name,
          query: state.query,
          weights: state.weights,
          top: 100,
        },
        controller.signal,
      );
      if (controller.signal.aborted) return;
      state.decomposition = response.decomposition;
      state.stage1 = response.results;
      state.searchUsage = response.usage;
      state.reranked = null;
      state.rerankUsage = null;
      state.showReranked = false;
    } catch (error) {
      if (isAbort(error)) return;
      state.error = describe(error);
    } finally {
      if (this.searchController === controller) {
        state.searching = false;
        this.emit();
      }
    }
  }

  /** Stage-2 rerank of the current results; requires a stage-1 ranking. */
  async runRerank(): Promise<void> {
    const state = this.state;
    if (!state.dataset || state.stage1 === null) return;
    this.rerankController?.abort();
    const controller = new AbortController();
    this.rerankController = controller;
    state.reranking = true;
    state.error = null;
    this.emit();
    try {
      const response = await this.api.rerank(
        {
          dataset: state.dataset.name,
          query: state.query,
          mode: state.mode,
          k: state.k,
          weights: state.weights,
        },
        controller.signal,
      );
      if (controller.signal.aborted) return;
      state.reranked = response.results;
      state.rerankUsage = response.usage;
      state.showReranked = true;
    } catch (error) {
      if (isAbort(error)) return;
      state.error = describe(error);
    } finally {
      if (this.rerankController === controller) {
        state.reranking = false;
        this.emit();
      }
    }
  }

  /** Flip between reranked and stage-1 ordering; both are client cached,
   *  so toggling never issues a request. */
  toggleView(): void {
    if (this.state.reranked === null) return;
    this.state.showReranked = !this.state.showReranked;
    this.emit();
  }

  dismissError(): void {
    this.state.error = null;
    this.emit();
  }

  /** Rows in the order currently shown. */
  visibleRows(): RerankRow[] {
    const state = this.state;
    if (state.showReranked && state.reranked !== null) {
      return state.reranked;
    }
    return (state.stage1 ?? []).map((row) => ({
      gui_id: row.gui_id,
      stage: 'embedding' as const,
      total: row.total,
    }));
  }
}

function isAbort(error: unknown): boolean {
  return error instanceof DOMException && error.name === 'AbortError';
}

function describe(error: unknown): string {
  if (error instanceof ServiceError) return `${error.kind}: ${error.message}`;
  if (error instanceof Error) return error.message;
  return String(error);
}

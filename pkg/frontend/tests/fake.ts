// In-memory stand-in for the service: replays captured payloads, records
// every call, honors AbortSignals, and can delay responses to exercise
// cancellation.

export interface RecordedCall {
  path: string;
  body: unknown;
}

export class FakeService {
  calls: RecordedCall[] = [];
  searchQueue: unknown[] = [];
  rerankQueue: unknown[] = [];
  datasetsPayload: unknown = [];
  searchDelayMs = 0;
  failNext: { status: number; body: unknown } | null = null;
  /** When set, overrides the search queue (useful to key replies on the body). */
  searchHandler: ((body: any) => unknown) | null = null;

  fetch = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = String(input);
    const path = new URL(url).pathname;
    const signal = init?.signal ?? undefined;
    const body = init?.body ? JSON.parse(String(init.body)) : null;
    this.calls.push({ path, body });

    if (path === '/search' && this.searchDelayMs > 0) {
      await delay(this.searchDelayMs, signal);
    }
    throwIfAborted(signal);

    if (this.failNext) {
      const { status, body: errorBody } = this.failNext;
      this.failNext = null;
      return jsonResponse(errorBody, status);
    }
    if (path === '/datasets') return jsonResponse(this.datasetsPayload);
    if (path === '/search') {
      if (this.searchHandler) return jsonResponse(this.searchHandler(body));
      const next = this.searchQueue.length > 1 ? this.searchQueue.shift() : this.searchQueue[0];
      return jsonResponse(next);
    }
    if (path === '/rerank') {
      const next = this.rerankQueue.length > 1 ? this.rerankQueue.shift() : this.rerankQueue[0];
      return jsonResponse(next);
    }
    return jsonResponse({ error: 'NotFound', detail: path }, 404);
  };

  callsTo(path: string): RecordedCall[] {
    return this.calls.filter((call) => call.path === path);
  }
}

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

function throwIfAborted(signal?: AbortSignal): void {
  if (signal?.aborted) {
    throw new DOMException('The operation was aborted.', 'AbortError');
  }
}

function delay(ms: number, signal?: AbortSignal): Promise<void> {
  return new Promise((resolve, reject) => {
    if (signal?.aborted) {
      reject(new DOMException('The operation was aborted.', 'AbortError'));
      return;
    }
    const timer = setTimeout(resolve, ms);
    signal?.addEventListener('abort', () => {
      clearTimeout(timer);
      reject(new DOMException('The operation was aborted.', 'AbortError'));
    });
  });
}

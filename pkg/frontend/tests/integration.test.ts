// @vitest-environment node
//
// Full round-trip against the real stub-backed service: the test builds an
// offline demo dataset, spawns the HTTP server, and drives the session the
// way the UI does. Skipped automatically when the backend is not installed.

import { execSync, spawn, type ChildProcess } from 'node:child_process';
import { mkdtempSync, rmSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api';
import { SearchSession } from '../src/session';

const PORT = 8961;
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = fileURLToPath(new URL('../..', import.meta.url));
const QUERY = 'travel booking app, modern looking design, not dark';

function backendAvailable(): boolean {
  try {
    execSync('python3 -c "import guiseek"', { cwd: REPO_ROOT, stdio: 'ignore' });
    return true;
  } catch {
    return false;
  }
}

const available = backendAvailable();

describe.skipIf(!available)('live stub-backed service round-trip', () => {
  let server: ChildProcess;
  let workdir: string;

  beforeAll(async () => {
    workdir = mkdtempSync(join(tmpdir(), 'guiseek-ui-'));
    execSync(
      `python3 scripts/make_demo.py --out ${workdir} --guis 12 --port ${PORT}`,
      { cwd: REPO_ROOT, stdio: 'ignore' },
    );
    server = spawn(
      'python3',
      ['-m', 'guiseek.cli', 'serve', '--config', join(workdir, 'service.json')],
      { cwd: REPO_ROOT, stdio: 'ignore' },
    );
    const deadline = Date.now() + 30000;
    for (;;) {
      try {
        const response = await fetch(`${BASE}/datasets`);
        if (response.ok) break;
      } catch {
        // not up yet
      }
      if (Date.now() > deadline) throw new Error('service did not come up');
      await new Promise((resolve) => setTimeout(resolve, 250));
    }
  });

  afterAll(() => {
    server?.kill();
    rmSync(workdir, { recursive: true, force: true });
  });

  it('runs the search -> reweight -> rerank -> toggle loop', async () => {
    let requests = 0;
    const countingFetch: typeof fetch = (input, init) => {
      requests += 1;
      return fetch(input, init);
    };
    const api = new ApiClient(BASE, countingFetch);
    const session = new SearchSession(api);

    const datasets = await api.datasets();
    expect(datasets[0].gui_count).toBe(12);
    session.setDataset(datasets[0]);

    // Submit the example query: the design panel data must extract
    // +modern / -dark.
    session.setQuery(QUERY);
    await session.runSearch();
    expect(session.state.decomposition?.design.positive).toContain('modern');
    expect(session.state.decomposition?.design.negative).toContain('dark');
    const initialOrder = session.visibleRows().map((row) => row.gui_id);
    expect(initialOrder.length).toBeGreaterThan(0);

    // Change a weight slider: a new search fires and the grid reorders.
    const searchesBefore = requests;
    await session.setWeight('domain', 5.0);
    await session.setWeight('design', 0.1);
    expect(requests).toBeGreaterThan(searchesBefore);
    const reweightedOrder = session.visibleRows().map((row) => row.gui_id);
    expect(reweightedOrder).not.toEqual(initialOrder);

    // Back to the baseline weights so the rerank fixture ordering applies.
    await session.setWeight('domain', 1.0);
    await session.setWeight('design', 1.0);
    const stage1Order = session.visibleRows().map((row) => row.gui_id);

    // Text-mode rerank reorders the head and reports nonzero tokens.
    session.setMode('text');
    session.setK(4);
    await session.runRerank();
    expect(session.state.showReranked).toBe(true);
    const rerankedOrder = session.visibleRows().map((row) => row.gui_id);
    expect(rerankedOrder.slice(0, 4)).not.toEqual(stage1Order.slice(0, 4));
    expect(new Set(rerankedOrder.slice(0, 4))).toEqual(new Set(stage1Order.slice(0, 4)));
    expect(session.state.rerankUsage!.input_tokens).toBeGreaterThan(0);

    // The before/after toggle restores stage-1 order without a request.
    const requestsBeforeToggle = requests;
    session.toggleView();
    expect(session.visibleRows().map((row) => row.gui_id)).toEqual(stage1Order);
    session.toggleView();
    expect(session.visibleRows().map((row) => row.gui_id)).toEqual(rerankedOrder);
    expect(requests).toBe(requestsBeforeToggle);

    // Thumbnails resolve through the image endpoint.
    const image = await fetch(api.imageUrl('demo', stage1Order[0]));
    expect(image.ok).toBe(true);
    expect(image.headers.get('content-type')).toBe('image/png');
  });
});

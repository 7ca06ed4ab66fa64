import { ApiClient, resolveServiceUrl } from './api';
import {
  renderBanner,
  renderCostChip,
  renderDecomposition,
  renderGrid,
  renderSliders,
} from './render';
import { SearchSession } from './session';
import type { RerankMode } from './types';
import './style.css';

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

async function bootstrap(): Promise<void> {
  const api = new ApiClient(resolveServiceUrl(window));
  const session = new SearchSession(api);

  const datasetSelect = byId<HTMLSelectElement>('dataset');
  const queryInput = byId<HTMLInputElement>('query');
  const searchButton = byId<HTMLButtonElement>('search-button');
  const rerankButton = byId<HTMLButtonElement>('rerank-button');
  const toggleButton = byId<HTMLButtonElement>('toggle-button');
  const modeSelect = byId<HTMLSelectElement>('mode');
  const kInput = byId<HTMLInputElement>('k');
  const validation = byId<HTMLElement>('validation');
  const banner = byId<HTMLElement>('banner');
  const decompositionPanel = byId<HTMLElement>('decomposition');
  const sliders = byId<HTMLElement>('sliders');
  const grid = byId<HTMLElement>('grid');
  const costChip = byId<HTMLElement>('cost-chip');
  const status = byId<HTMLElement>('status');

  let lastWeightsKey = '';

  session.subscribe((state) => {
    renderBanner(banner, state, () => session.dismissError());
    renderDecomposition(decompositionPanel, state);
    renderGrid(grid, state, session.visibleRows(), api);
    renderCostChip(costChip, state);
    // Rebuild sliders only when the weight set itself changes, so an
    // in-progress drag is not interrupted by rerenders.
    const weightsKey = JSON.stringify(Object.keys(state.weights));
    if (weightsKey !== lastWeightsKey) {
      renderSliders(sliders, session);
      lastWeightsKey = weightsKey;
    }
    validation.textContent = state.validation ?? '';
    rerankButton.disabled = !session.canRerank || state.reranking;
    toggleButton.disabled = state.reranked === null;
    toggleButton.textContent = state.showReranked
      ? 'Show stage-1 order'
      : 'Show reranked order';
    searchButton.disabled = state.searching;
    status.textContent = state.searching
      ? 'Searching…'
      : state.reranking
        ? 'Reranking…'
        : '';
  });

  datasetSelect.addEventListener('change', () => {
    const datasets = (datasetSelect as any)._datasets ?? [];
    const chosen = datasets.find((d: any) => d.name === datasetSelect.value);
    if (chosen) session.setDataset(chosen);
  });
  queryInput.addEventListener('input', () => session.setQuery(queryInput.value));
  searchButton.addEventListener('click', () => void session.runSearch());
  queryInput.addEventListener('keydown', (event) => {
    if (event.key === 'Enter') void session.runSearch();
  });
  rerankButton.addEventListener('click', () => void session.runRerank());
  toggleButton.addEventListener('click', () => session.toggleView());
  modeSelect.addEventListener('change', () =>
    session.setMode(modeSelect.value as RerankMode),
  );
  kInput.addEventListener('change', () => session.setK(Number(kInput.value)));

  const datasets = await api.datasets();
  (datasetSelect as any)._datasets = datasets;
  for (const dataset of datasets) {
    const option = document.createElement('option');
    option.value = dataset.name;
    option.textContent = `${dataset.name} (${dataset.gui_count} screens)`;
    datasetSelect.appendChild(option);
  }
  if (datasets.length > 0) {
    datasetSelect.value = datasets[0].name;
    session.setDataset(datasets[0]);
  }
}

void bootstrap();

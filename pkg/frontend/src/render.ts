// DOM rendering for the session state: decomposition panel, weight sliders,
// result grid with thumbnails and score badges, cost chip, error banner.

import type { ApiClient } from './api';
import type { SearchSession, SessionState } from './session';
import { WEIGHT_MAX, WEIGHT_MIN, WEIGHT_STEP } from './session';

export function renderDecomposition(panel: HTMLElement, state: SessionState): void {
  panel.innerHTML = '';
  if (!state.decomposition || !state.dataset) return;
  for (const dim of state.dataset.dimensions) {
    const lists = state.decomposition[dim.id];
    if (!lists || (lists.positive.length === 0 && lists.negative.length === 0)) {
      continue;
    }
    const row = document.createElement('div');
    row.className = 'decomposition-row';
    row.dataset.dimension = dim.id;
    const label = document.createElement('span');
    label.className = 'dimension-label';
    label.textContent = dim.name;
    row.appendChild(label);
    for (const phrase of lists.positive) {
      row.appendChild(pill(phrase, 'positive'));
    }
    for (const phrase of lists.negative) {
      row.appendChild(pill(phrase, 'negative'));
    }
    panel.appendChild(row);
  }
}

function pill(phrase: string, polarity: 'positive' | 'negative'): HTMLElement {
  const el = document.createElement('span');
  el.className = `pill ${polarity}`;
  el.textContent = `${polarity === 'positive' ? '+' : '−'}${phrase}`;
  return el;
}

export function renderSliders(
  container: HTMLElement,
  session: SearchSession,
): void {
  container.innerHTML = '';
  const state = session.state;
  if (!state.dataset) return;
  for (const dim of state.dataset.dimensions) {
    const row = document.createElement('label');
    row.className = 'slider-row';
    const name = document.createElement('span');
    name.textContent = dim.name;
    name.title = dim.description;
    const value = document.createElement('span');
    value.className = 'slider-value';
    value.textContent = state.weights[dim.id].toFixed(1);
    const slider = document.createElement('input');
    slider.type = 'range';
    slider.min = String(WEIGHT_MIN);
    slider.max = String(WEIGHT_MAX);
    slider.step = String(WEIGHT_STEP);
    slider.value = String(state.weights[dim.id]);
    slider.dataset.dimension = dim.id;
    slider.addEventListener('change', () => {
      void session.setWeight(dim.id, Number(slider.value));
    });
    slider.addEventListener('input', () => {
      value.textContent = Number(slider.value).toFixed(1);
    });
    row.append(name, slider, value);
    container.appendChild(row);
  }
}

export function renderGrid(
  grid: HTMLElement,
  state: SessionState,
  rows: ReturnType<SearchSession['visibleRows']>,
  api: ApiClient,
): void {
  grid.innerHTML = '';
  if (!state.dataset) return;
  for (const row of rows) {
    const card = document.createElement('figure');
    card.className = `card ${row.stage}`;
    card.dataset.guiId = row.gui_id;

    const img = document.createElement('img');
    img.loading = 'lazy';
    img.src = api.imageUrl(state.dataset.name, row.gui_id);
    img.alt = row.gui_id;
    card.appendChild(img);

    const caption = document.createElement('figcaption');
    const title = document.createElement('strong');
    title.textContent = row.gui_id;
    caption.appendChild(title);

    const badge = document.createElement('span');
    badge.className = 'score-badge';
    if (row.stage === 'reranked') {
      badge.textContent = `★ ${(row.aggregate ?? 0).toFixed(3)}`;
    } else {
      badge.textContent = (row.total ?? 0).toFixed(3);
    }
    caption.appendChild(badge);

    if (row.stage === 'reranked' && row.scores) {
      const scores = document.createElement('span');
      scores.className = 'dimension-scores';
      scores.textContent = Object.entries(row.scores)
        .map(([dim, score]) => `${dim}:${score}`)
        .join(' ');
      caption.appendChild(scores);
    }
    if (row.flags && row.flags.length > 0) {
      const warning = document.createElement('span');
      warning.className = 'warning-badge';
      warning.title = row.flags.join(', ');
      warning.textContent = '⚠';
      caption.appendChild(warning);
    }
    card.appendChild(caption);
    grid.appendChild(card);
  }
}

export function renderCostChip(chip: HTMLElement, state: SessionState): void {
  const usage = state.rerankUsage ?? state.searchUsage;
  if (!usage) {
    chip.hidden = true;
    return;
  }
  chip.hidden = false;
  const cost = usage.cost === null ? 'unpriced' : `$${usage.cost.toFixed(4)}`;
  chip.textContent =
    `${usage.input_tokens.toLocaleString()} in / ` +
    `${usage.output_tokens.toLocaleString()} out tokens · ${cost}`;
}

export function renderBanner(
  banner: HTMLElement,
  state: SessionState,
  dismiss: () => void,
): void {
  banner.innerHTML = '';
  banner.hidden = state.error === null;
  if (state.error === null) return;
  const text = document.createElement('span');
  text.textContent = state.error;
  const close = document.createElement('button');
  close.type = 'button';
  close.className = 'dismiss';
  close.textContent = '×';
  close.addEventListener('click', dismiss);
  banner.append(text, close);
}

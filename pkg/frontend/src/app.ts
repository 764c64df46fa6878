/**
 * Browser bootstrap: hash routing between the explore screen, the curation
 * queue and single-task curation, plus DOM event wiring. All state lives on
 * the server; every screen rebuilds from API responses.
 */

import { createClient, type Client, type GeoEntry } from './api.js';
import { CurationController, renderCurationScreen } from './curation.js';
import {
  ExploreController,
  renderEventsHeatmap,
  renderExploreScreen,
  renderTfHeatmap,
} from './explore.js';
import { escapeHtml } from './highlight.js';

const API_BASE = (window as unknown as { HEMEROCLIM_API?: string }).HEMEROCLIM_API ?? '';

function root(): HTMLElement {
  const el = document.getElementById('app');
  if (!el) throw new Error('missing #app element');
  return el;
}

async function showQueue(client: Client): Promise<void> {
  const page = await client.listTasks('pending');
  const rows = page.items
    .map(
      (task) => `
    <tr>
      <td><a href="#curate/${task.id}">${task.id}</a></td>
      <td>${escapeHtml(task.article_id)}</td>
      <td>${escapeHtml(task.article_date)}</td>
      <td>${escapeHtml(task.newspaper_country)}</td>
      <td>${task.candidate.trigger_terms.map(([t]) => escapeHtml(t)).join(', ')}</td>
    </tr>`,
    )
    .join('');
  root().innerHTML = `
    <h2>Curation queue (${page.total} pending)</h2>
    <table class="queue"><thead>
      <tr><th>task</th><th>article</th><th>date</th><th>country</th><th>triggers</th></tr>
    </thead><tbody>${rows}</tbody></table>`;
}

async function showCuration(client: Client, taskId: string): Promise<void> {
  const controller = new CurationController(client);
  await controller.load(taskId);

  const rerender = () => {
    root().innerHTML = renderCurationScreen(controller);
    wire();
  };

  const wire = () => {
    root().querySelectorAll<HTMLElement>('.geo-pick, .pin').forEach((el) => {
      el.addEventListener('click', async () => {
        const spanKey = el.dataset.span!;
        const index = Number(el.dataset.index);
        const entry = controller.task?.proposed_geo[spanKey]?.[index] as GeoEntry | undefined;
        if (!entry) return;
        await controller.confirmLocation(spanKey, entry);
        rerender();
      });
    });
    root().querySelectorAll<HTMLElement>('.term-keep, .term-drop').forEach((el) => {
      el.addEventListener('click', async () => {
        await controller.correctTerm(el.dataset.span!, el.classList.contains('term-keep'));
        rerender();
      });
    });
    const form = root().querySelector<HTMLFormElement>('.event-form');
    form?.querySelector('[data-testid="btn-promote"]')?.addEventListener('click', async () => {
      const date = (form.elements.namedItem('date') as HTMLInputElement).value.trim();
      if (date && date !== controller.task?.state.event_date) await controller.setDate(date);
      const name = (form.elements.namedItem('event-name') as HTMLInputElement).value.trim();
      if (name && name !== controller.task?.state.event_name) await controller.setEventName(name);
      const damage = (form.elements.namedItem('damage') as HTMLInputElement).value.trim();
      if (damage) await controller.addDamage(damage);
      const start = (form.elements.namedItem('duration-start') as HTMLInputElement).value.trim();
      const end = (form.elements.namedItem('duration-end') as HTMLInputElement).value.trim();
      if (start && end) await controller.setDuration(start, end);
      await controller.promote();
      rerender();
    });
    form?.querySelector('[data-testid="btn-metaphor"]')?.addEventListener('click', async () => {
      await controller.rejectMetaphor();
      rerender();
    });
  };

  rerender();
}

async function showExplore(client: Client): Promise<void> {
  const controller = new ExploreController(client);

  const rerender = () => {
    root().innerHTML = renderExploreScreen(controller);
    wire();
  };

  const wire = () => {
    const form = root().querySelector<HTMLFormElement>('[data-testid="query-form"]');
    form?.addEventListener('submit', async (event) => {
      event.preventDefault();
      const q = (form.elements.namedItem('q') as HTMLInputElement).value;
      const localize = (form.elements.namedItem('localize') as HTMLInputElement).value.trim();
      const geoText = (form.elements.namedItem('geo') as HTMLInputElement).value.trim();
      const rules = (form.elements.namedItem('rules') as HTMLInputElement).checked;
      const options: Record<string, unknown> = { rules };
      if (localize) options.localize = localize.toUpperCase();
      if (geoText) {
        const [place, radius] = geoText.split(',');
        options.geo = { place: (place ?? '').trim(), radius_km: radius ? Number(radius) : undefined };
      }
      await controller.preview(q, options);
      rerender();
    });
    root().querySelector('[data-testid="btn-run"]')?.addEventListener('click', async () => {
      const chosen = root().querySelector<HTMLInputElement>('input[data-variant]:checked');
      await controller.run(chosen?.dataset.variant ?? 'original');
      rerender();
    });
    root().querySelectorAll<HTMLElement>('.open-article').forEach((el) => {
      el.addEventListener('click', async () => {
        await controller.openArticle(el.dataset.article!);
        rerender();
      });
    });
  };

  rerender();
}

async function showHeatmaps(client: Client): Promise<void> {
  const [events, tf] = await Promise.all([client.heatmap(), client.tf({ top: '25' })]);
  root().innerHTML = `
    <h2>Events heat map</h2>
    ${renderEventsHeatmap(events)}
    <h2>Term frequency heat map</h2>
    ${renderTfHeatmap(tf)}`;
}

async function route(client: Client): Promise<void> {
  const hash = window.location.hash.replace(/^#/, '');
  try {
    if (hash.startsWith('curate/')) {
      await showCuration(client, hash.slice('curate/'.length));
    } else if (hash === 'queue') {
      await showQueue(client);
    } else if (hash === 'heatmaps') {
      await showHeatmaps(client);
    } else {
      await showExplore(client);
    }
  } catch (error) {
    root().innerHTML = `<div class="banner banner-error">${escapeHtml(
      error instanceof Error ? error.message : String(error),
    )}</div>`;
  }
}

export function start(): void {
  const client = createClient(API_BASE);
  window.addEventListener('hashchange', () => void route(client));
  void route(client);
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  start();
}

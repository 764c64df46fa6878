/**
 * Curation screen: review a candidate, validate its spans, build the event.
 *
 * All state changes round-trip through POST /curation/tasks/{id}/actions
 * carrying the task version. Updates are optimistic: the local view changes
 * immediately, and a version_conflict from the server rolls it back by
 * reloading the authoritative task. The UI never owns state.
 */

import type { ArticleDetail, Client, EventRecord, GeoEntry, TaskView } from './api.js';
import { ApiRequestError } from './api.js';
import { escapeHtml, highlightTokens, renderHighlights } from './highlight.js';
import { renderMap, renderPins } from './map.js';

export interface Banner {
  kind: 'info' | 'error' | 'conflict';
  message: string;
}

export class CurationController {
  task: TaskView | null = null;
  article: ArticleDetail | null = null;
  banner: Banner | null = null;
  promoted: EventRecord | null = null;

  constructor(private readonly client: Client) {}

  async load(taskId: string): Promise<TaskView> {
    this.task = await this.client.getTask(taskId);
    this.article = await this.client.getArticle(this.task.article_id, true);
    this.banner = null;
    return this.task;
  }

  /**
   * Apply one analyst action optimistically; on a version conflict reload
   * the task (the optimistic change is discarded) and surface a banner.
   */
  private async apply(
    kind: string,
    payload: Record<string, unknown>,
    optimistic?: (task: TaskView) => void,
  ): Promise<boolean> {
    if (!this.task) throw new Error('no task loaded');
    const taskId = this.task.id;
    const version = this.task.version;
    if (optimistic) optimistic(this.task);
    try {
      this.task = await this.client.applyAction(taskId, kind, payload, version);
      this.banner = null;
      return true;
    } catch (error) {
      if (error instanceof ApiRequestError && error.code === 'version_conflict') {
        this.task = await this.client.getTask(taskId);
        this.banner = {
          kind: 'conflict',
          message: 'Another analyst changed this task; it has been reloaded.',
        };
        return false;
      }
      this.task = await this.client.getTask(taskId);
      this.banner = {
        kind: 'error',
        message: error instanceof Error ? error.message : String(error),
      };
      return false;
    }
  }

  confirmLocation(spanKey: string, entry: GeoEntry): Promise<boolean> {
    return this.apply(
      'confirm_location',
      { span: spanKey, entry },
      (task) => {
        task.proposed_geo[spanKey] = [entry];
        task.state.confirmed_locations[spanKey] = entry;
      },
    );
  }

  rejectLocation(spanKey: string): Promise<boolean> {
    return this.apply('reject_location', { span: spanKey });
  }

  correctTerm(spanKey: string, keep: boolean): Promise<boolean> {
    return this.apply('correct_term', { span: spanKey, keep });
  }

  setDate(date: string, spanKey?: string): Promise<boolean> {
    return this.apply(
      'set_date',
      spanKey ? { date, span: spanKey } : { date },
      (task) => {
        task.state.event_date = date;
      },
    );
  }

  setDuration(start: string, end: string): Promise<boolean> {
    return this.apply('set_duration', { start, end });
  }

  addDamage(term: string): Promise<boolean> {
    return this.apply('add_damage', { term });
  }

  setEventName(name: string, spanKey?: string): Promise<boolean> {
    return this.apply('set_event_name', spanKey ? { name, span: spanKey } : { name });
  }

  rejectMetaphor(): Promise<boolean> {
    return this.apply('reject_metaphor', {});
  }

  async promote(): Promise<EventRecord | null> {
    if (!this.task) throw new Error('no task loaded');
    try {
      this.promoted = await this.client.promote(this.task.id);
      this.task = await this.client.getTask(this.task.id);
      this.banner = { kind: 'info', message: `Event ${this.promoted.id} stored.` };
      return this.promoted;
    } catch (error) {
      if (error instanceof ApiRequestError) {
        // the service enumerates the missing slots verbatim
        const details = Array.isArray(error.details) ? ` (missing: ${error.details.join(', ')})` : '';
        this.banner = { kind: 'error', message: `${error.message}${details}` };
        return null;
      }
      throw error;
    }
  }
}

function renderBanner(banner: Banner | null): string {
  if (!banner) return '';
  return `<div class="banner banner-${banner.kind}" data-testid="banner">${escapeHtml(banner.message)}</div>`;
}

function renderGeoPanel(task: TaskView): string {
  const sections = Object.entries(task.proposed_geo)
    .map(([spanKey, candidates]) => {
      const rows = candidates
        .map(
          (entry, index) => `
      <li>
        <button class="geo-pick" data-span="${spanKey}" data-index="${index}"
                data-testid="geo-${spanKey}-${index}">
          ${escapeHtml(entry.display_name)}, ${escapeHtml(entry.country)}
          <small>(${entry.lat.toFixed(2)}, ${entry.lon.toFixed(2)}) ${escapeHtml(entry.feature)}</small>
        </button>
      </li>`,
        )
        .join('');
      const confirmed = task.state.confirmed_locations[spanKey];
      const status = confirmed
        ? `<span class="confirmed">confirmed: ${escapeHtml(confirmed.display_name)}, ${escapeHtml(confirmed.country)}</span>`
        : '<span class="pending">unresolved</span>';
      const pins = renderPins(
        spanKey,
        candidates,
        confirmed ? candidates.findIndex((c) => c.lat === confirmed.lat && c.lon === confirmed.lon) : null,
      );
      return `
    <section class="geo-span" data-span="${spanKey}">
      <h4>span ${spanKey} ${status}</h4>
      <ul class="geo-candidates">${rows}</ul>
      ${renderMap(pins)}
    </section>`;
    })
    .join('');
  return `<aside class="geo-panel" data-testid="geo-panel">${sections}</aside>`;
}

function renderEventForm(task: TaskView): string {
  const dates = task.proposed_dates
    .map((d) => `<option value="${escapeHtml(d)}">${escapeHtml(d)}</option>`)
    .join('');
  const damages = task.state.damages.map((d) => `<li>${escapeHtml(d)}</li>`).join('');
  return `
  <form class="event-form" data-testid="event-form">
    <label>Event date
      <input name="date" list="proposed-dates" value="${escapeHtml(task.state.event_date ?? '')}" />
      <datalist id="proposed-dates">${dates}</datalist>
    </label>
    <label>Duration <input name="duration-start" placeholder="YYYY[-MM[-DD]]" />
      – <input name="duration-end" placeholder="YYYY[-MM[-DD]]" /></label>
    <label>Event name <input name="event-name" value="${escapeHtml(task.state.event_name ?? '')}" /></label>
    <label>Damage term <input name="damage" /></label>
    <ul class="damages">${damages}</ul>
    <div class="actions">
      <button type="button" data-testid="btn-promote">Store event</button>
      <button type="button" data-testid="btn-metaphor" class="danger">Reject as metaphor</button>
    </div>
  </form>`;
}

export function renderCurationScreen(controller: CurationController): string {
  const task = controller.task;
  if (!task || !controller.article) {
    return '<p class="empty" data-testid="curation-empty">No task loaded.</p>';
  }
  const tree = controller.article.content_tree;
  const body = tree
    ? renderHighlights(highlightTokens(tree.sentences, task.candidate))
    : escapeHtml(controller.article.text);
  const triggers = task.candidate.trigger_terms
    .map(([term, span]) => {
      const key = `${span[0]}:${span[1]}:${span[2]}`;
      const validated = key in task.state.validated_triggers;
      const dropped = task.state.dropped_triggers.includes(key);
      const state = validated ? 'kept' : dropped ? 'dropped' : 'pending';
      return `
    <li data-span="${key}" class="trigger-${state}">
      <code>${escapeHtml(term)}</code> (${state})
      <button class="term-keep" data-span="${key}" data-testid="keep-${key}">keep</button>
      <button class="term-drop" data-span="${key}" data-testid="drop-${key}">drop</button>
    </li>`;
    })
    .join('');
  return `
<div class="curation-screen" data-task="${task.id}" data-version="${task.version}" data-status="${task.status}">
  ${renderBanner(controller.banner)}
  <header>
    <h2>${task.id} — ${escapeHtml(task.article_id)} (${escapeHtml(task.newspaper_country)}, ${escapeHtml(task.article_date)})</h2>
    <span class="status status-${task.status}" data-testid="task-status">${task.status}</span>
  </header>
  <article class="article-body" data-testid="article-body">${body}</article>
  <section class="triggers"><h3>Trigger terms</h3><ul>${triggers}</ul></section>
  ${renderGeoPanel(task)}
  ${renderEventForm(task)}
</div>`;
}

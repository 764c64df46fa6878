/**
 * Explore screen: query entry with rewrite preview, result list, article
 * detail with the additional-information panel, and the two heat-map views.
 *
 * The preview shows the RewritePlan before anything runs; the analyst picks
 * a variant and executes exactly that one. Results and detail panels render
 * from API responses alone.
 */

import type {
  ArticleDetail,
  Client,
  HeatmapCollection,
  QueryOptions,
  QueryResponse,
  TfSurface,
} from './api.js';
import { escapeHtml } from './highlight.js';
import { renderHeatCells, renderMap } from './map.js';
import { buildPreview, PreviewVariant, renderPreview } from './preview.js';

export class ExploreController {
  plan: QueryResponse | null = null;
  variants: PreviewVariant[] = [];
  results: Array<{ article_id: string; score: number }> = [];
  executed: string | null = null;
  detail: ArticleDetail | null = null;
  lastQuery = '';
  lastOptions: QueryOptions = {};

  constructor(private readonly client: Client) {}

  /** Fetch the rewrite plan (the preview step; results of the original come along). */
  async preview(q: string, options: QueryOptions = {}): Promise<PreviewVariant[]> {
    this.lastQuery = q;
    this.lastOptions = { ...options, execute: 'original' };
    this.plan = await this.client.query(q, this.lastOptions);
    this.variants = buildPreview(this.plan.plan);
    this.results = this.plan.results;
    this.executed = this.plan.executed;
    return this.variants;
  }

  /** Run one previewed variant; the chosen key goes to the service verbatim. */
  async run(variantKey: string): Promise<void> {
    const response = await this.client.query(this.lastQuery, {
      ...this.lastOptions,
      execute: variantKey,
    });
    this.plan = response;
    this.results = response.results;
    this.executed = response.executed;
  }

  async openArticle(articleId: string): Promise<ArticleDetail> {
    this.detail = await this.client.getArticle(articleId, true);
    return this.detail;
  }
}

function entityList(detail: ArticleDetail, kind: string): string[] {
  const tree = detail.content_tree;
  if (!tree) return [];
  const found: string[] = [];
  for (const sentence of tree.sentences) {
    for (const node of sentence.children ?? []) {
      if (node.tag === kind) {
        found.push(node.canonical ?? (node.children ?? []).map((leaf) => leaf.term ?? '').join(' '));
      }
    }
  }
  return found;
}

/** The "additional information" side panel: locations, entities, dates. */
export function renderAdditionalInfo(detail: ArticleDetail): string {
  const sections = [
    ['Geographic locations', entityList(detail, 'GPE')],
    ['Organizations', entityList(detail, 'ORG')],
    ['Personal names', entityList(detail, 'PERSON')],
    ['Dates', entityList(detail, 'DATE')],
  ] as const;
  const rows = sections
    .map(([title, values]) => {
      const items = values.length
        ? values.map((v) => `<li>${escapeHtml(v)}</li>`).join('')
        : '<li class="none">none found</li>';
      return `<section><h4>${title}</h4><ul>${items}</ul></section>`;
    })
    .join('');
  return `<aside class="additional-info" data-testid="additional-info">${rows}</aside>`;
}

export function renderResults(controller: ExploreController): string {
  if (!controller.executed) return '';
  const rows = controller.results
    .map(
      (r) => `
    <li><button class="open-article" data-article="${escapeHtml(r.article_id)}"
        data-testid="result-${escapeHtml(r.article_id)}">${escapeHtml(r.article_id)}</button>
        <span class="score">${r.score}</span></li>`,
    )
    .join('');
  return `
  <section class="results" data-testid="results">
    <h3>Results for <code>${escapeHtml(controller.executed)}</code> (${controller.results.length})</h3>
    <ol>${rows}</ol>
  </section>`;
}

export function renderExploreScreen(controller: ExploreController): string {
  const preview = controller.variants.length
    ? renderPreview(controller.variants) +
      '<button data-testid="btn-run" class="run">Run selected</button>'
    : '';
  return `
<div class="explore-screen">
  <form class="query-form" data-testid="query-form">
    <input name="q" placeholder='e.g. "fuertes tormentas" OR chubasco'
           value="${escapeHtml(controller.lastQuery)}" data-testid="query-input" />
    <label><input type="checkbox" name="rules" checked /> domain rules</label>
    <input name="localize" placeholder="localize (MX, CO, EC, UY)" size="8" />
    <input name="geo" placeholder='geo "place,km"' size="14" />
    <button type="submit">Preview rewrites</button>
  </form>
  ${preview}
  ${renderResults(controller)}
  ${controller.detail ? renderAdditionalInfo(controller.detail) : ''}
</div>`;
}

/** Term-frequency heat map from the vocabulary surface (rendered as a table). */
export function renderTfHeatmap(surface: TfSurface, maxTerms = 25): string {
  const terms = surface.terms.slice(0, maxTerms);
  const header = terms.map((t) => `<th>${escapeHtml(t)}</th>`).join('');
  const rows = surface.docs
    .map((doc, row) => {
      const cells = terms
        .map((_, col) => {
          const value = surface.normalized[row]?.[col] ?? 0;
          return `<td style="--heat: ${value.toFixed(4)}" data-value="${value.toFixed(4)}">` +
            `${surface.counts[row]?.[col] ?? 0}</td>`;
        })
        .join('');
      return `<tr><th>${escapeHtml(doc)}</th>${cells}</tr>`;
    })
    .join('');
  return `
  <table class="tf-heatmap" data-testid="tf-heatmap">
    <thead><tr><th>doc</th>${header}</tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

/** Events heat map over the Latin-America base layer. */
export function renderEventsHeatmap(collection: HeatmapCollection): string {
  return `
  <section class="events-heatmap" data-testid="events-heatmap">
    ${renderMap(renderHeatCells(collection))}
  </section>`;
}

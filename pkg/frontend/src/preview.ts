/**
 * Rewrite-preview model for the explore screen.
 *
 * The service answers a query with a RewritePlan (extended tree, localized
 * trees per country, domain-rule variants). The preview lists every variant
 * with a checkbox so the analyst chooses which ones to run; the variant set
 * shown is exactly the plan's, never recomputed client-side.
 */

import type { RewritePlanView } from './api.js';
import { escapeHtml } from './highlight.js';

export interface PreviewVariant {
  /** execute key understood by POST /query: original | extended | localized:CC | variant:N */
  key: string;
  label: string;
  query: string;
  checked: boolean;
}

export function buildPreview(plan: RewritePlanView): PreviewVariant[] {
  const variants: PreviewVariant[] = [
    { key: 'original', label: 'Original', query: plan.original, checked: true },
  ];
  if (plan.extended !== plan.original) {
    variants.push({ key: 'extended', label: 'Thesaurus extension', query: plan.extended, checked: false });
  }
  for (const country of Object.keys(plan.localized).sort()) {
    const localized = plan.localized[country]!;
    if (localized !== plan.original) {
      variants.push({
        key: `localized:${country}`,
        label: `Localized (${country})`,
        query: localized,
        checked: false,
      });
    }
  }
  plan.rule_variants.forEach((query, index) => {
    if (index === 0 && query === plan.original) return; // the original leads the list
    variants.push({
      key: `variant:${index}`,
      label: `Rule variant ${index}`,
      query,
      checked: false,
    });
  });
  return variants;
}

/** The query strings on display; acceptance checks compare this with the plan. */
export function shownVariantSet(variants: PreviewVariant[]): Set<string> {
  return new Set(variants.map((v) => v.query));
}

/** The plan's variant strings, deduplicated the same way the preview shows them. */
export function planVariantSet(plan: RewritePlanView): Set<string> {
  return new Set([
    plan.original,
    plan.extended,
    ...Object.values(plan.localized),
    ...plan.rule_variants,
  ]);
}

export function renderPreview(variants: PreviewVariant[]): string {
  const rows = variants
    .map(
      (variant) => `
    <label class="variant-row" data-testid="variant-${variant.key}">
      <input type="checkbox" data-variant="${variant.key}" ${variant.checked ? 'checked' : ''} />
      <span class="variant-label">${escapeHtml(variant.label)}</span>
      <code class="variant-query">${escapeHtml(variant.query)}</code>
    </label>`,
    )
    .join('\n');
  return `<div class="rewrite-preview" data-testid="rewrite-preview">${rows}\n</div>`;
}

/**
 * Span highlighting for the curation screen.
 *
 * The server owns the spans: trigger terms, locations, dates, person names
 * and damage hints arrive as token ranges over the article's content tree,
 * and this module only projects them onto the token stream for rendering.
 * No new spans are ever derived client-side.
 */

import type { CandidateView, SpanTriple, TreeNode } from './api.js';

export interface TokenSegment {
  text: string;
  sentence: number;
  position: number;
  /** highlight kinds covering this token (trigger, GPE, PERSON, DATE, damage) */
  kinds: string[];
  /** span key ("sentence:start:end") this token belongs to, when highlighted */
  spanKey?: string;
}

function spanKey(span: SpanTriple): string {
  return `${span[0]}:${span[1]}:${span[2]}`;
}

function leaves(node: TreeNode): string[] {
  if (node.term !== undefined) return [node.term];
  return (node.children ?? []).flatMap(leaves);
}

/** Flatten the server's content tree into per-sentence token lists. */
export function sentenceTokens(sentences: TreeNode[]): string[][] {
  return sentences.map((root) => leaves(root));
}

interface SpanMark {
  kind: string;
  span: SpanTriple;
}

function candidateMarks(candidate: CandidateView): SpanMark[] {
  const marks: SpanMark[] = [];
  for (const [, span] of candidate.trigger_terms) marks.push({ kind: 'trigger', span });
  for (const entity of candidate.locations) marks.push({ kind: entity.kind, span: entity.span });
  for (const entity of candidate.dates) marks.push({ kind: entity.kind, span: entity.span });
  for (const entity of candidate.persons) marks.push({ kind: entity.kind, span: entity.span });
  for (const [, span] of candidate.damages_hints) marks.push({ kind: 'damage', span });
  return marks;
}

/**
 * Project candidate spans onto the token stream. Every returned segment with
 * kinds corresponds 1:1 to a span of the underlying task.
 */
export function highlightTokens(
  sentences: TreeNode[],
  candidate: CandidateView,
): TokenSegment[] {
  const marks = candidateMarks(candidate);
  const segments: TokenSegment[] = [];
  sentenceTokens(sentences).forEach((tokens, sentence) => {
    tokens.forEach((text, position) => {
      const covering = marks.filter(
        (m) => m.span[0] === sentence && m.span[1] <= position && position < m.span[2],
      );
      segments.push({
        text,
        sentence,
        position,
        kinds: covering.map((m) => m.kind),
        spanKey: covering.length > 0 ? spanKey(covering[0]!.span) : undefined,
      });
    });
  });
  return segments;
}

export function escapeHtml(str: string): string {
  return str
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

const KIND_CLASS: Record<string, string> = {
  trigger: 'hl-trigger',
  GPE: 'hl-gpe',
  PERSON: 'hl-person',
  DATE: 'hl-date',
  ORG: 'hl-org',
  damage: 'hl-damage',
};

function isWordToken(text: string): boolean {
  return /[\p{L}\p{N}]/u.test(text);
}

const OPENING_PUNCT = new Set(['¿', '¡', '(', '«', '"']);

/** Render the highlighted article body as HTML (underlined spans by kind). */
export function renderHighlights(segments: TokenSegment[]): string {
  const parts: string[] = [];
  segments.forEach((segment) => {
    const needsSpace =
      parts.length > 0 && (isWordToken(segment.text) || OPENING_PUNCT.has(segment.text));
    const glue = needsSpace ? ' ' : '';
    if (segment.kinds.length === 0) {
      parts.push(glue + escapeHtml(segment.text));
      return;
    }
    const classes = segment.kinds.map((k) => KIND_CLASS[k] ?? 'hl-other').join(' ');
    parts.push(
      `${glue}<mark class="${classes}" data-span="${segment.spanKey}" data-kinds="${segment.kinds.join(',')}">` +
        `${escapeHtml(segment.text)}</mark>`,
    );
  });
  return parts.join('');
}

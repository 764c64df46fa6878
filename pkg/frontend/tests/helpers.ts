/** Shared test fixtures: a canned task and a scripted fetch stub. */

import type { FetchLike, TaskView, TreeNode } from '../src/api.js';

export function makeTask(overrides: Partial<TaskView> = {}): TaskView {
  return {
    id: 'task-00001',
    status: 'pending',
    version: 0,
    article_id: 'uy-001',
    article_date: '1805-01-20',
    newspaper_country: 'UY',
    candidate: {
      article_id: 'uy-001',
      trigger_terms: [['tormenta', [0, 0, 1]]],
      locations: [{ kind: 'GPE', span: [0, 2, 3], canonical: 'montevideo' }],
      dates: [{ kind: 'DATE', span: [1, 4, 9], canonical: '1805-01-12' }],
      persons: [],
      damages_hints: [['daños', [2, 5, 6]]],
      status: 'pending',
    },
    proposed_geo: {
      '0:2:3': [
        { name: 'montevideo', display_name: 'Montevideo', lat: -34.9, lon: -56.19, country: 'UY', feature: 'city' },
        { name: 'montevideo', display_name: 'Montevideo', lat: 44.9425, lon: -95.7236, country: 'US', feature: 'city' },
      ],
    },
    proposed_dates: ['1805-01-12'],
    state: {
      validated_triggers: {},
      dropped_triggers: [],
      event_name: null,
      confirmed_locations: {},
      rejected_locations: [],
      event_date: null,
      event_duration: null,
      damages: [],
      metaphor_rejected: false,
    },
    promoted_event_id: null,
    ...overrides,
  };
}

export const SENTENCES: TreeNode[] = [
  {
    tag: 'OTHER',
    children: [
      { tag: 'NN', children: [{ term: 'Tormenta' }] },
      { tag: 'IN', children: [{ term: 'en' }] },
      { tag: 'GPE', canonical: 'montevideo', children: [{ term: 'Montevideo' }] },
      { tag: 'OTHER', children: [{ term: '.' }] },
    ],
  },
];

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
}

export interface ScriptedResponse {
  status?: number;
  body: unknown;
}

/** Fetch stub: replays scripted responses in order and records requests. */
export function scriptedFetch(script: ScriptedResponse[]): {
  fetch: FetchLike;
  requests: RecordedRequest[];
} {
  const requests: RecordedRequest[] = [];
  const queue = [...script];
  const fetchFn: FetchLike = async (url, init) => {
    requests.push({
      url: String(url),
      method: init?.method ?? 'GET',
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    const next = queue.shift();
    if (!next) throw new Error(`no scripted response left for ${url}`);
    return new Response(JSON.stringify(next.body), {
      status: next.status ?? 200,
      headers: { 'content-type': 'application/json' },
    });
  };
  return { fetch: fetchFn, requests };
}

export function ok(data: unknown): ScriptedResponse {
  return { body: { status: 'ok', data } };
}

export function err(code: string, message: string, status = 400, details?: unknown): ScriptedResponse {
  return { status, body: { status: 'error', error: { code, message, details } } };
}

import { describe, expect, it } from 'vitest';

import { createClient } from '../src/api.js';
import { CurationController, renderCurationScreen } from '../src/curation.js';
import { err, makeTask, ok, scriptedFetch, SENTENCES } from './helpers.js';

const ARTICLE = {
  id: 'uy-001',
  date: '1805-01-20',
  text: 'Tormenta en Montevideo.',
  newspaper: { name: 'Gaceta de Montevideo', country: 'UY' },
  content_tree: { article_id: 'uy-001', sentences: SENTENCES },
};

function controllerWith(script: Parameters<typeof scriptedFetch>[0]) {
  const { fetch, requests } = scriptedFetch(script);
  const controller = new CurationController(createClient('http://svc', fetch));
  return { controller, requests };
}

describe('curation controller', () => {
  it('loads task and article together', async () => {
    const { controller, requests } = controllerWith([ok(makeTask()), ok(ARTICLE)]);
    await controller.load('task-00001');
    expect(requests.map((r) => r.url)).toEqual([
      'http://svc/curation/tasks/task-00001',
      'http://svc/articles/uy-001?view=content_tree',
    ]);
  });

  it('round-trips confirm_location through the actions endpoint', async () => {
    const task = makeTask();
    const entry = task.proposed_geo['0:2:3']![0]!;
    const confirmed = makeTask({ version: 1 });
    confirmed.state.confirmed_locations['0:2:3'] = entry;
    const { controller, requests } = controllerWith([ok(task), ok(ARTICLE), ok(confirmed)]);
    await controller.load('task-00001');
    const applied = await controller.confirmLocation('0:2:3', entry);
    expect(applied).toBe(true);
    expect(requests[2]).toMatchObject({
      url: 'http://svc/curation/tasks/task-00001/actions',
      body: {
        kind: 'confirm_location',
        payload: { span: '0:2:3', entry },
        version: 0,
      },
    });
    expect(controller.task?.version).toBe(1);
  });

  it('rolls back and reloads on version conflict', async () => {
    const task = makeTask();
    const entry = task.proposed_geo['0:2:3']![1]!;
    const serverTask = makeTask({ version: 3 });
    const { controller } = controllerWith([
      ok(task),
      ok(ARTICLE),
      err('version_conflict', 'task task-00001 is at version 3, not 0', 409),
      ok(serverTask),
    ]);
    await controller.load('task-00001');
    const applied = await controller.confirmLocation('0:2:3', entry);
    expect(applied).toBe(false);
    expect(controller.banner?.kind).toBe('conflict');
    // the optimistic change was discarded in favor of the reloaded task
    expect(controller.task?.version).toBe(3);
    expect(controller.task?.state.confirmed_locations).toEqual({});
  });

  it('surfaces missing-slot lists from promote verbatim', async () => {
    const { controller } = controllerWith([
      ok(makeTask()),
      ok(ARTICLE),
      err('validation_failed', 'cannot promote, missing: location, date', 422, ['location', 'date']),
    ]);
    await controller.load('task-00001');
    const event = await controller.promote();
    expect(event).toBeNull();
    expect(controller.banner?.kind).toBe('error');
    expect(controller.banner?.message).toContain('location, date');
  });

  it('reject_metaphor marks the task rejected', async () => {
    const rejected = makeTask({ status: 'rejected', version: 1 });
    const { controller, requests } = controllerWith([ok(makeTask()), ok(ARTICLE), ok(rejected)]);
    await controller.load('task-00001');
    await controller.rejectMetaphor();
    expect(requests[2]?.body).toMatchObject({ kind: 'reject_metaphor' });
    expect(controller.task?.status).toBe('rejected');
  });
});

describe('curation screen rendering', () => {
  it('renders highlights, geo proposals and the event form', async () => {
    const { controller } = controllerWith([ok(makeTask()), ok(ARTICLE)]);
    await controller.load('task-00001');
    const html = renderCurationScreen(controller);
    expect(html).toContain('data-testid="article-body"');
    expect(html).toContain('<mark class="hl-trigger"');
    expect(html).toContain('data-testid="geo-0:2:3-0"');
    expect(html).toContain('data-testid="geo-0:2:3-1"');
    expect(html).toContain('data-testid="btn-promote"');
    expect(html).toContain('data-testid="btn-metaphor"');
    expect(html).toContain('1805-01-12'); // proposed date surfaced in the form
  });

  it('every rendered highlight maps to a candidate span', async () => {
    const { controller } = controllerWith([ok(makeTask()), ok(ARTICLE)]);
    await controller.load('task-00001');
    const html = renderCurationScreen(controller);
    const spans = [...html.matchAll(/data-span="(\d+:\d+:\d+)"/g)].map((m) => m[1]);
    const task = controller.task!;
    const known = new Set([
      ...task.candidate.trigger_terms.map(([, s]) => `${s[0]}:${s[1]}:${s[2]}`),
      ...task.candidate.locations.map((e) => `${e.span[0]}:${e.span[1]}:${e.span[2]}`),
      ...task.candidate.dates.map((e) => `${e.span[0]}:${e.span[1]}:${e.span[2]}`),
      ...task.candidate.damages_hints.map(([, s]) => `${s[0]}:${s[1]}:${s[2]}`),
    ]);
    for (const span of spans) {
      expect(known.has(span!)).toBe(true);
    }
  });
});

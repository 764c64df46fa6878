/**
 * Integration against the real curation service.
 *
 * Two fresh service instances are spawned from the Python package. One is
 * driven through the UI controllers (exactly the code the browser runs);
 * the other receives the same action sequence as direct API calls. The
 * resulting events must be identical, and the rewrite preview must show
 * exactly the plan the service returns.
 */

import { spawn, type ChildProcess } from 'node:child_process';
import { mkdtempSync, readFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join, resolve } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { createClient, type Client, type EventRecord, type TaskView } from '../src/api.js';
import { CurationController } from '../src/curation.js';
import { ExploreController } from '../src/explore.js';
import { planVariantSet, shownVariantSet } from '../src/preview.js';

const SERVICE_BIN = process.env.HEMEROCLIM_BIN ?? 'hemeroclim';
const CORPUS_PATH = resolve(__dirname, '../../src/hemeroclim/data/sample_corpus.jsonl');
const BASE_PORT = 8490 + (process.pid % 400);

interface Service {
  base: string;
  proc: ChildProcess;
  client: Client;
}

async function startService(port: number): Promise<Service> {
  const dataDir = mkdtempSync(join(tmpdir(), 'hemeroclim-ui-'));
  const proc = spawn(SERVICE_BIN, ['--data-dir', dataDir, 'serve', '--port', String(port)], {
    stdio: ['ignore', 'pipe', 'pipe'],
  });
  const base = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const response = await fetch(`${base}/healthz`);
      if (response.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      proc.kill();
      throw new Error(`service on :${port} did not come up`);
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  return { base, proc, client: createClient(base) };
}

async function seed(service: Service): Promise<void> {
  const records = readFileSync(CORPUS_PATH, 'utf-8')
    .split('\n')
    .filter((line) => line.trim())
    .map((line) => JSON.parse(line));
  const ingest = await fetch(`${service.base}/articles:ingest`, {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify({ records }),
  });
  expect(ingest.ok).toBe(true);
  await service.client.runPipeline();
}

function taskFor(tasks: TaskView[], articleId: string): TaskView {
  const task = tasks.find((t) => t.article_id === articleId);
  if (!task) throw new Error(`no task for ${articleId}`);
  return task;
}

let uiService: Service;
let apiService: Service;

beforeAll(async () => {
  [uiService, apiService] = await Promise.all([
    startService(BASE_PORT),
    startService(BASE_PORT + 1),
  ]);
  await Promise.all([seed(uiService), seed(apiService)]);
}, 90_000);

afterAll(() => {
  uiService?.proc.kill();
  apiService?.proc.kill();
});

describe('UI round trip (acceptance: browser flow equals direct API calls)', () => {
  it('confirm geo + set date + promote produce identical events', async () => {
    // --- through the UI controller, as the browser does -------------------
    const uiTasks = (await uiService.client.listTasks('pending')).items;
    const uiTask = taskFor(uiTasks, 'uy-001');
    const controller = new CurationController(uiService.client);
    await controller.load(uiTask.id);

    const locationKey = Object.keys(uiTask.proposed_geo)[0]!;
    const uruguayan = uiTask.proposed_geo[locationKey]!.find((e) => e.country === 'UY')!;
    const triggerSpan = uiTask.candidate.trigger_terms[0]![1];
    const triggerKey = `${triggerSpan[0]}:${triggerSpan[1]}:${triggerSpan[2]}`;

    expect(await controller.correctTerm(triggerKey, true)).toBe(true);
    expect(await controller.confirmLocation(locationKey, uruguayan)).toBe(true);
    expect(await controller.setDate('1805-01-12')).toBe(true);
    const uiEvent = await controller.promote();
    expect(uiEvent).not.toBeNull();

    // --- the same sequence as direct API calls ----------------------------
    const apiTasks = (await apiService.client.listTasks('pending')).items;
    const apiTask = taskFor(apiTasks, 'uy-001');
    expect(apiTask.id).toBe(uiTask.id); // same deterministic queue
    const post = async (path: string, body: unknown): Promise<unknown> => {
      const response = await fetch(`${apiService.base}${path}`, {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify(body),
      });
      const envelope = (await response.json()) as { status: string; data: unknown };
      expect(envelope.status).toBe('ok');
      return envelope.data;
    };
    await post(`/curation/tasks/${apiTask.id}/actions`, {
      kind: 'correct_term',
      payload: { span: triggerKey, keep: true },
    });
    await post(`/curation/tasks/${apiTask.id}/actions`, {
      kind: 'confirm_location',
      payload: { span: locationKey, entry: uruguayan },
    });
    await post(`/curation/tasks/${apiTask.id}/actions`, {
      kind: 'set_date',
      payload: { date: '1805-01-12' },
    });
    const apiEvent = (await post(`/curation/tasks/${apiTask.id}:promote`, {})) as EventRecord;

    expect(JSON.stringify(uiEvent)).toBe(JSON.stringify(apiEvent));
    expect(apiEvent.scope).toEqual([
      { locationName: 'Montevideo', lon: -56.19, lat: -34.9, country: 'UY' },
    ]);
  }, 30_000);

  it('version conflicts from concurrent edits reload the task', async () => {
    const tasks = (await uiService.client.listTasks('pending')).items;
    const task = taskFor(tasks, 'uy-002');
    const controller = new CurationController(uiService.client);
    await controller.load(task.id);

    // another analyst edits the same task behind our back
    await uiService.client.applyAction(task.id, 'set_date', { date: '1803-03' });

    const applied = await controller.setDate('1803-03-02');
    expect(applied).toBe(false);
    expect(controller.banner?.kind).toBe('conflict');
    expect(controller.task?.version).toBeGreaterThan(task.version);
  }, 30_000);
});

describe('rewrite preview fidelity (acceptance: preview equals the plan)', () => {
  it('shows exactly the RewritePlan for the same inputs', async () => {
    const controller = new ExploreController(uiService.client);
    const variants = await controller.preview('tormenta fuerte', {
      localize: ['MX', 'UY'],
      rules: true,
      geo: { place: 'Mexico City', radius_km: 500 },
    });

    // the plan as POST /query returns it for the same inputs
    const response = await fetch(`${uiService.base}/query`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({
        q: 'tormenta fuerte',
        localize: ['MX', 'UY'],
        rules: true,
        geo: { place: 'Mexico City', radius_km: 500 },
        execute: 'original',
      }),
    });
    const envelope = (await response.json()) as {
      status: string;
      data: { plan: Parameters<typeof planVariantSet>[0] };
    };
    expect(envelope.status).toBe('ok');
    expect(shownVariantSet(variants)).toEqual(planVariantSet(envelope.data.plan));
    // the localization scenario is visible in the preview
    const queries = [...shownVariantSet(variants)];
    expect(queries.some((q) => q.includes('chaparrón'))).toBe(true);
    expect(queries.some((q) => q.includes('wind_speed_kmh > 118'))).toBe(true);
    expect(queries.some((q) => q.includes('reach_km <= 500'))).toBe(true);
  }, 30_000);

  it('running a previewed variant executes it verbatim', async () => {
    const controller = new ExploreController(uiService.client);
    await controller.preview('tormenta', { localize: 'UY', rules: false });
    const localized = controller.variants.find((v) => v.key === 'localized:UY');
    expect(localized).toBeDefined();
    await controller.run(localized!.key);
    expect(controller.executed).toBe(localized!.query);
    const ids = controller.results.map((r) => r.article_id);
    expect(ids).toContain('uy-002'); // the chubasco article only the localized query finds
  }, 30_000);
});

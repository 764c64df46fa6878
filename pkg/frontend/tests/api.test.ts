import { describe, expect, it } from 'vitest';

import { ApiRequestError, createClient } from '../src/api.js';
import { err, ok, scriptedFetch } from './helpers.js';

describe('api client', () => {
  it('unwraps ok envelopes', async () => {
    const { fetch, requests } = scriptedFetch([ok({ items: [], total: 0 })]);
    const client = createClient('http://svc', fetch);
    const page = await client.listArticles({ country: 'UY' });
    expect(page.total).toBe(0);
    expect(requests[0]?.url).toBe('http://svc/articles?country=UY');
  });

  it('raises ApiRequestError with the stable code', async () => {
    const { fetch } = scriptedFetch([err('not_found', "unknown article 'x'", 404)]);
    const client = createClient('http://svc', fetch);
    await expect(client.getArticle('x')).rejects.toMatchObject({
      name: 'ApiRequestError',
      code: 'not_found',
    });
  });

  it('propagates validation details verbatim', async () => {
    const { fetch } = scriptedFetch([
      err('validation_failed', 'cannot promote', 422, ['trigger', 'date']),
    ]);
    const client = createClient('http://svc', fetch);
    try {
      await client.promote('task-1');
      expect.unreachable();
    } catch (error) {
      expect(error).toBeInstanceOf(ApiRequestError);
      expect((error as ApiRequestError).details).toEqual(['trigger', 'date']);
    }
  });

  it('sends actions with version for optimistic concurrency', async () => {
    const { fetch, requests } = scriptedFetch([ok({ id: 'task-1', version: 1 })]);
    const client = createClient('http://svc', fetch);
    await client.applyAction('task-1', 'set_date', { date: '1805' }, 0);
    expect(requests[0]).toMatchObject({
      url: 'http://svc/curation/tasks/task-1/actions',
      method: 'POST',
      body: { kind: 'set_date', payload: { date: '1805' }, version: 0 },
    });
  });

  it('posts query options through unchanged', async () => {
    const { fetch, requests } = scriptedFetch([
      ok({ plan: { original: 'x', extended: 'x', localized: {}, rule_variants: ['x'] }, executed: 'x', results: [] }),
    ]);
    const client = createClient('http://svc', fetch);
    await client.query('tormenta', { localize: 'MX', geo: { place: 'Mexico City', radius_km: 500 } });
    expect(requests[0]?.body).toEqual({
      q: 'tormenta',
      localize: 'MX',
      geo: { place: 'Mexico City', radius_km: 500 },
    });
  });
});

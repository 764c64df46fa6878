/**
 * Typed client for the curation service.
 *
 * Every response arrives enveloped ({status: "ok", data} or {status:
 * "error", error:{code,message,details}}); errors surface as ApiRequestError
 * with the server's stable code, which the screens use to decide between a
 * rollback-and-reload (version_conflict) and an ordinary error banner.
 */

export interface ApiErrorBody {
  code: string;
  message: string;
  details?: unknown;
}

export interface Envelope<T> {
  status: 'ok' | 'error';
  data?: T;
  error?: ApiErrorBody;
}

export class ApiRequestError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly details?: unknown,
  ) {
    super(message);
    this.name = 'ApiRequestError';
  }
}

export interface ArticleSummary {
  id: string;
  date: string;
  newspaper: string;
  country: string;
}

export interface Page<T> {
  items: T[];
  total: number;
  next_cursor?: string;
}

export interface TreeNode {
  tag?: string;
  term?: string;
  canonical?: string;
  children?: TreeNode[];
}

export interface ArticleDetail {
  id: string;
  date: string;
  text: string;
  newspaper: { name: string; country: string };
  content_tree?: { article_id: string; sentences: TreeNode[] };
}

export type SpanTriple = [number, number, number];

export interface EntitySpanView {
  kind: string;
  span: SpanTriple;
  canonical: string;
}

export interface CandidateView {
  article_id: string;
  trigger_terms: Array<[string, SpanTriple]>;
  locations: EntitySpanView[];
  dates: EntitySpanView[];
  persons: EntitySpanView[];
  damages_hints: Array<[string, SpanTriple]>;
  status: string;
}

export interface GeoEntry {
  name: string;
  display_name: string;
  lat: number;
  lon: number;
  country: string;
  feature: string;
}

export interface TaskStateView {
  validated_triggers: Record<string, string>;
  dropped_triggers: string[];
  event_name: string | null;
  confirmed_locations: Record<string, GeoEntry>;
  rejected_locations: string[];
  event_date: string | null;
  event_duration: [string, string] | null;
  damages: string[];
  metaphor_rejected: boolean;
}

export interface TaskView {
  id: string;
  status: string;
  version: number;
  article_id: string;
  article_date: string;
  newspaper_country: string;
  candidate: CandidateView;
  proposed_geo: Record<string, GeoEntry[]>;
  proposed_dates: string[];
  state: TaskStateView;
  promoted_event_id: string | null;
}

export interface RewritePlanView {
  original: string;
  extended: string;
  localized: Record<string, string>;
  rule_variants: string[];
}

export interface QueryResponse {
  plan: RewritePlanView;
  executed: string;
  results: Array<{ article_id: string; score: number }>;
}

export interface QueryOptions {
  localize?: string | string[];
  rules?: boolean;
  geo?: { place: string; radius_km?: number };
  conjunctive_hypernyms?: boolean;
  execute?: string;
}

export interface EventRecord {
  id: string;
  date: string;
  scope: Array<{ locationName: string; lon: number; lat: number; country?: string }>;
  duration?: { init: string; end: string };
  name?: string;
  damages: string[];
  articles: string[];
  terms: string[];
  attributes?: Record<string, unknown>;
}

export interface HeatmapFeature {
  type: 'Feature';
  geometry: { type: 'Polygon'; coordinates: number[][][] };
  properties: { row: number; col: number; count: number };
}

export interface HeatmapCollection {
  type: 'FeatureCollection';
  features: HeatmapFeature[];
}

export interface TfSurface {
  docs: string[];
  terms: string[];
  counts: number[][];
  normalized: number[][];
  top: Array<[string, number]>;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface Client {
  listArticles(params?: Record<string, string>): Promise<Page<ArticleSummary>>;
  getArticle(id: string, withTree?: boolean): Promise<ArticleDetail>;
  runPipeline(articleId?: string): Promise<{ articles: number; candidates: number; tasks_created: number }>;
  listTasks(status?: string): Promise<Page<TaskView>>;
  getTask(taskId: string): Promise<TaskView>;
  applyAction(taskId: string, kind: string, payload: Record<string, unknown>, version?: number): Promise<TaskView>;
  promote(taskId: string): Promise<EventRecord>;
  query(q: string, options?: QueryOptions): Promise<QueryResponse>;
  heatmap(params?: Record<string, string>): Promise<HeatmapCollection>;
  tf(params?: Record<string, string>): Promise<TfSurface>;
  listEvents(params?: Record<string, string>): Promise<Page<EventRecord>>;
}

async function unwrap<T>(response: Response): Promise<T> {
  let body: Envelope<T>;
  try {
    body = (await response.json()) as Envelope<T>;
  } catch {
    throw new ApiRequestError('bad_response', `service returned ${response.status} with no envelope`);
  }
  if (body.status === 'ok' && body.data !== undefined) {
    return body.data;
  }
  const error = body.error ?? { code: 'unknown', message: 'malformed error envelope' };
  throw new ApiRequestError(error.code, error.message, error.details);
}

function withQuery(path: string, params?: Record<string, string>): string {
  if (!params || Object.keys(params).length === 0) return path;
  const search = new URLSearchParams(params);
  return `${path}?${search.toString()}`;
}

export function createClient(baseUrl: string, fetchFn?: FetchLike): Client {
  const doFetch: FetchLike = fetchFn ?? ((url, init) => fetch(url, init));
  const base = baseUrl.replace(/\/$/, '');

  async function get<T>(path: string, params?: Record<string, string>): Promise<T> {
    const response = await doFetch(base + withQuery(path, params));
    return unwrap<T>(response);
  }

  async function post<T>(path: string, body: unknown): Promise<T> {
    const response = await doFetch(base + path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    return unwrap<T>(response);
  }

  return {
    listArticles: (params) => get('/articles', params),
    getArticle: (id, withTree = false) =>
      get(`/articles/${encodeURIComponent(id)}`, withTree ? { view: 'content_tree' } : undefined),
    runPipeline: (articleId) => post('/pipeline/run', articleId ? { article_id: articleId } : {}),
    listTasks: (status) => get('/curation/tasks', { status: status ?? 'pending', limit: '200' }),
    getTask: (taskId) => get(`/curation/tasks/${encodeURIComponent(taskId)}`),
    applyAction: (taskId, kind, payload, version) =>
      post(`/curation/tasks/${encodeURIComponent(taskId)}/actions`, {
        kind,
        payload,
        ...(version !== undefined ? { version } : {}),
      }),
    promote: (taskId) => post(`/curation/tasks/${encodeURIComponent(taskId)}:promote`, {}),
    query: (q, options = {}) => post('/query', { q, ...options }),
    heatmap: (params) => get('/events/heatmap', params),
    tf: (params) => get('/vocab/tf', params),
    listEvents: (params) => get('/events', params),
  };
}

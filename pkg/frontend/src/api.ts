/** Typed API client with latest-wins request cancellation.
 *
 * Each request category keeps at most one request in flight: starting a new
 * search aborts the previous one, so a slow stale response can never
 * overwrite a newer result.
 */

import type {
  ArticleDetail,
  SchemaDetail,
  SchemaSummary,
  SearchResponse,
} from "./types.js";
import type { FilterFormState } from "./state.js";
import { filterParams } from "./state.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiRequestError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  private inflight = new Map<string, AbortController>();

  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async get<T>(category: string, path: string, params?: URLSearchParams): Promise<T> {
    this.inflight.get(category)?.abort();
    const controller = new AbortController();
    this.inflight.set(category, controller);
    const query = params && [...params.keys()].length ? `?${params.toString()}` : "";
    try {
      const response = await this.fetchFn(`${this.baseUrl}${path}${query}`, {
        signal: controller.signal,
      });
      const body = await response.json();
      if (!response.ok) {
        throw new ApiRequestError(response.status, body?.message ?? response.statusText);
      }
      return body as T;
    } finally {
      if (this.inflight.get(category) === controller) {
        this.inflight.delete(category);
      }
    }
  }

  search(state: FilterFormState, size = 10): Promise<SearchResponse> {
    const params = new URLSearchParams();
    if (state.query) params.set("q", state.query);
    if (state.schemaId) params.set("schema", state.schemaId);
    if (state.dateFrom) params.set("from", state.dateFrom);
    if (state.dateTo) params.set("to", state.dateTo);
    if (state.location) params.set("location", state.location);
    for (const filter of filterParams(state)) {
      params.append("filter", filter);
    }
    params.set("page", String(state.page));
    params.set("size", String(size));
    return this.get<SearchResponse>("search", "/api/search", params);
  }

  schemas(): Promise<SchemaSummary[]> {
    return this.get<SchemaSummary[]>("schemas", "/api/schemas");
  }

  schemaDetail(schemaId: string): Promise<SchemaDetail> {
    return this.get<SchemaDetail>("schema-detail", `/api/schemas/${schemaId}`);
  }

  article(articleId: string): Promise<ArticleDetail> {
    return this.get<ArticleDetail>("article", `/api/articles/${encodeURIComponent(articleId)}`);
  }
}

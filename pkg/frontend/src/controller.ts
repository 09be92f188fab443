/** View-model controller: state transitions, API calls, rendered fragments.
 *
 * Every user action maps to exactly one API call: schema selection fetches
 * that schema's filter descriptors (and nothing else), submitting the form
 * runs one search, opening an article fetches one detail bundle. Stale
 * responses lose: the client aborts superseded requests and a dropped
 * AbortError is swallowed silently.
 */

import { ApiClient, ApiRequestError } from "./api.js";
import type { FilterFormState } from "./state.js";
import { emptyState, parseState, serializeState, validateState } from "./state.js";
import type { ArticleDetail, SchemaDetail, SchemaSummary, SearchResponse } from "./types.js";
import {
  renderArticleDetail,
  renderErrorBanner,
  renderFilterPanel,
  renderResults,
  renderSchemaOptions,
} from "./render.js";

export interface ViewState {
  state: FilterFormState;
  mode: "results" | "detail";
  schemaOptionsHtml: string;
  filterPanelHtml: string;
  mainHtml: string;
  bannerHtml: string;
  /** serialized form of `state`, pushed into the URL by the host */
  queryString: string;
}

function isAbort(error: unknown): boolean {
  return error instanceof DOMException
    ? error.name === "AbortError"
    : error instanceof Error && error.name === "AbortError";
}

export class SearchController {
  state: FilterFormState = emptyState();
  schemas: SchemaSummary[] = [];
  schemaDetail: SchemaDetail | null = null;
  lastResponse: SearchResponse | null = null;
  article: ArticleDetail | null = null;
  private banner: string | null = null;
  private mode: "results" | "detail" = "results";

  constructor(
    private readonly api: ApiClient,
    private readonly onUpdate: (view: ViewState) => void,
  ) {}

  private emit(): void {
    const main =
      this.mode === "detail" && this.article
        ? renderArticleDetail(this.article)
        : this.lastResponse
          ? renderResults(this.lastResponse, this.state)
          : `<p class="hint">Search to see results.</p>`;
    this.onUpdate({
      state: this.state,
      mode: this.mode,
      schemaOptionsHtml: renderSchemaOptions(this.schemas, this.state.schemaId),
      filterPanelHtml: renderFilterPanel(this.schemaDetail, this.state),
      mainHtml: main,
      bannerHtml: renderErrorBanner(this.banner),
      queryString: serializeState(this.state),
    });
  }

  private async guard<T>(work: Promise<T>): Promise<T | null> {
    try {
      const result = await work;
      this.banner = null;
      return result;
    } catch (error) {
      if (isAbort(error)) return null;
      this.banner =
        error instanceof ApiRequestError
          ? `The service answered ${error.status}: ${error.message}`
          : `The service is unreachable (${String(error)})`;
      this.emit();
      return null;
    }
  }

  /** Initial load: schema list, then state recovered from the URL. */
  async start(queryString: string): Promise<void> {
    const schemas = await this.guard(this.api.schemas());
    if (schemas) this.schemas = schemas;
    await this.restore(queryString);
  }

  /** Rebuild the whole view from a serialized state (URL navigation). */
  async restore(queryString: string): Promise<void> {
    this.state = parseState(queryString);
    this.mode = "results";
    this.article = null;
    if (this.state.schemaId) {
      const detail = await this.guard(this.api.schemaDetail(this.state.schemaId));
      this.schemaDetail = detail ?? null;
    } else {
      this.schemaDetail = null;
    }
    await this.runSearch({ resetPage: false });
  }

  /** Schema change: exactly one schema-detail fetch, filter panel rebuilt.
   * Property filters of the previous schema are discarded. */
  async selectSchema(schemaId: string): Promise<void> {
    this.state.schemaId = schemaId;
    this.state.propertyFilters = {};
    this.state.page = 1;
    if (!schemaId) {
      this.schemaDetail = null;
      this.emit();
      return;
    }
    const detail = await this.guard(this.api.schemaDetail(schemaId));
    if (detail) this.schemaDetail = detail;
    this.emit();
  }

  setQuery(query: string): void {
    this.state.query = query;
  }

  setDates(from: string, to: string): void {
    this.state.dateFrom = from;
    this.state.dateTo = to;
  }

  setLocation(location: string): void {
    this.state.location = location;
  }

  setPropertyFilter(pid: string, bound: "min" | "max" | "eq", value: string): void {
    const input = (this.state.propertyFilters[pid] ??= {});
    input[bound] = value;
    if (!input.min && !input.max && !input.eq) {
      delete this.state.propertyFilters[pid];
    }
  }

  /** Submit: one search call (after client-side validation). */
  async runSearch(options: { resetPage?: boolean } = {}): Promise<void> {
    if (options.resetPage ?? true) this.state.page = 1;
    const problems = validateState(this.state);
    if (problems.length) {
      this.banner = `Fix before searching: ${problems.join("; ")}`;
      this.emit();
      return;
    }
    this.mode = "results";
    this.article = null;
    const response = await this.guard(this.api.search(this.state));
    if (response) this.lastResponse = response;
    this.emit();
  }

  async goToPage(page: number): Promise<void> {
    this.state.page = page;
    await this.runSearch({ resetPage: false });
  }

  /** Article click: one detail fetch, then the annotated view. */
  async openArticle(articleId: string): Promise<void> {
    const detail = await this.guard(this.api.article(articleId));
    if (!detail) return;
    this.article = detail;
    this.mode = "detail";
    this.emit();
  }

  backToResults(): void {
    this.mode = "results";
    this.article = null;
    this.emit();
  }
}

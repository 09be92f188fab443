/** Pure HTML renderers for every view fragment.
 *
 * Everything here is a string-in/string-out function so behaviour is
 * testable without a browser; `app.ts` owns the DOM wiring.
 */

import type {
  AnnotationRecord,
  ArticleDetail,
  EntityRecord,
  SchemaDetail,
  SchemaSummary,
  SearchResponse,
} from "./types.js";
import type { FilterFormState } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function renderSchemaOptions(schemas: SchemaSummary[], selected: string): string {
  const options = schemas
    .map((schema) => {
      const flag = schema.schema_id === selected ? " selected" : "";
      const text = `${schema.label} (${schema.article_count})`;
      return `<option value="${escapeHtml(schema.schema_id)}"${flag}>${escapeHtml(text)}</option>`;
    })
    .join("");
  return `<option value="">any schema</option>${options}`;
}

/** The dynamic per-schema panel: a numeric range row for range-filterable
 * properties, a plain text row otherwise. */
export function renderFilterPanel(
  detail: SchemaDetail | null,
  state: FilterFormState,
): string {
  if (detail === null) {
    return `<p class="hint">Pick a schema to unlock its property filters.</p>`;
  }
  if (detail.filters.length === 0) {
    return `<p class="hint">This schema suggests no property filters.</p>`;
  }
  const rows = detail.filters.map((property) => {
    const input = state.propertyFilters[property.pid] ?? {};
    const coverage = Math.round(property.coverage * 100);
    const label =
      `<span class="filter-label" title="${escapeHtml(property.pid)}, ` +
      `${coverage}% coverage">${escapeHtml(property.label)}</span>`;
    if (property.range_filterable) {
      return (
        `<div class="filter-row" data-pid="${escapeHtml(property.pid)}">${label}` +
        `<input type="number" data-pid="${escapeHtml(property.pid)}" data-bound="min"` +
        ` placeholder="at least" value="${escapeHtml(input.min ?? "")}">` +
        `<input type="number" data-pid="${escapeHtml(property.pid)}" data-bound="max"` +
        ` placeholder="at most" value="${escapeHtml(input.max ?? "")}">` +
        `</div>`
      );
    }
    return (
      `<div class="filter-row" data-pid="${escapeHtml(property.pid)}">${label}` +
      `<input type="text" data-pid="${escapeHtml(property.pid)}" data-bound="eq"` +
      ` placeholder="equals" value="${escapeHtml(input.eq ?? "")}">` +
      `</div>`
    );
  });
  return rows.join("");
}

function activeFilterSummary(state: FilterFormState): string[] {
  const active: string[] = [];
  if (state.query) active.push(`keywords "${state.query}"`);
  if (state.schemaId) active.push(`schema ${state.schemaId}`);
  if (state.dateFrom) active.push(`from ${state.dateFrom}`);
  if (state.dateTo) active.push(`to ${state.dateTo}`);
  if (state.location) active.push(`location "${state.location}"`);
  for (const [pid, input] of Object.entries(state.propertyFilters)) {
    if (input.min) active.push(`${pid} >= ${input.min}`);
    if (input.max) active.push(`${pid} <= ${input.max}`);
    if (input.eq) active.push(`${pid} = ${input.eq}`);
  }
  return active;
}

export function renderResults(response: SearchResponse, state: FilterFormState): string {
  if (response.total === 0) {
    const active = activeFilterSummary(state);
    const filters = active.length
      ? `<ul>${active.map((f) => `<li>${escapeHtml(f)}</li>`).join("")}</ul>`
      : "<p>No filters are active.</p>";
    return `<div class="zero-state"><p>No articles match.</p>${filters}</div>`;
  }
  const items = response.hits
    .map((hit) => {
      const schema = hit.schema_id
        ? `<span class="badge">${escapeHtml(hit.schema_id)}</span>`
        : "";
      return (
        `<li class="hit" data-article-id="${escapeHtml(hit.article_id)}">` +
        `<a href="#" class="hit-link" data-article-id="${escapeHtml(hit.article_id)}">` +
        `${escapeHtml(hit.headline)}</a> ${schema}` +
        `<div class="meta">${escapeHtml(hit.created.slice(0, 10))}</div>` +
        `<p class="snippet">${escapeHtml(hit.snippet)}</p></li>`
      );
    })
    .join("");
  const pages = Math.max(1, Math.ceil(response.total / response.size));
  const pager =
    `<div class="pager">page ${response.page} of ${pages} (${response.total} articles)` +
    (response.page > 1 ? ` <button data-page="${response.page - 1}">prev</button>` : "") +
    (response.page < pages ? ` <button data-page="${response.page + 1}">next</button>` : "") +
    `</div>`;
  return `<ul class="results">${items}</ul>${pager}`;
}

/** Wrap annotation spans in <mark> with the property label on hover.
 * Overlapping spans keep the earliest; text between spans is escaped. */
export function highlightAnnotations(text: string, annotations: AnnotationRecord[]): string {
  const spans = [...annotations].sort((a, b) => a.start - b.start || a.end - b.end);
  const parts: string[] = [];
  let cursor = 0;
  for (const span of spans) {
    if (span.start < cursor || span.end > text.length || span.start >= span.end) {
      continue; // overlapping or out-of-range spans are skipped, not broken
    }
    parts.push(escapeHtml(text.slice(cursor, span.start)));
    const title = `${span.pid} ${span.label} = ${String(span.value)}`;
    parts.push(
      `<mark class="annotation annotation-${escapeHtml(span.kind)}"` +
        ` title="${escapeHtml(title)}">${escapeHtml(text.slice(span.start, span.end))}</mark>`,
    );
    cursor = span.end;
  }
  parts.push(escapeHtml(text.slice(cursor)));
  return parts.join("");
}

function renderInfobox(entities: EntityRecord[]): string {
  const seen = new Set<string>();
  const rows: string[] = [];
  for (const entity of entities) {
    const key = `${entity.category}:${entity.surface.toLowerCase()}`;
    if (seen.has(key)) continue;
    seen.add(key);
    rows.push(
      `<li><span class="category">${escapeHtml(entity.category)}</span> ` +
        `${escapeHtml(entity.surface)}</li>`,
    );
  }
  if (!rows.length) {
    return `<p class="hint">No named entities recognized.</p>`;
  }
  return `<ul class="infobox-entities">${rows.join("")}</ul>`;
}

export function renderArticleDetail(detail: ArticleDetail): string {
  const highlighted = highlightAnnotations(detail.text, detail.annotations);
  const paragraphs = highlighted
    .split("\n\n")
    .map((block, index) =>
      index === 0 ? `<h2>${block}</h2>` : `<p>${block}</p>`,
    )
    .join("");
  const linked = detail.event_qid
    ? `<p class="meta">event <code>${escapeHtml(detail.event_qid)}</code>` +
      (detail.schema_id ? ` &middot; schema <code>${escapeHtml(detail.schema_id)}</code>` : "") +
      `</p>`
    : `<p class="meta">not linked to a knowledge-base event</p>`;
  const annotations = detail.annotations.length
    ? `<ul class="annotation-list">` +
      detail.annotations
        .map(
          (a) =>
            `<li><code>${escapeHtml(a.pid)}</code> ${escapeHtml(a.label)}: ` +
            `${escapeHtml(String(a.value))} (&ldquo;${escapeHtml(a.surface)}&rdquo;, ` +
            `sentence ${a.sentence})</li>`,
        )
        .join("") +
      `</ul>`
    : `<p class="hint">No property values grounded in this article.</p>`;
  return (
    `<article class="detail" data-article-id="${escapeHtml(detail.id)}">` +
    `<button class="back" data-action="back">&larr; results</button>` +
    `<div class="meta">${escapeHtml(detail.created.slice(0, 10))}` +
    (detail.dateline ? ` &middot; ${escapeHtml(detail.dateline)}` : "") +
    `</div>${paragraphs}${linked}` +
    `<section class="infobox"><h3>Entities</h3>${renderInfobox(detail.entities)}</section>` +
    `<section class="annotations"><h3>Structured values</h3>${annotations}</section>` +
    `</article>`
  );
}

export function renderErrorBanner(message: string | null): string {
  if (!message) return "";
  return `<div class="banner error" role="alert">${escapeHtml(message)}</div>`;
}

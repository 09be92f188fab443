import { describe, expect, it } from "vitest";

import {
  escapeHtml,
  highlightAnnotations,
  renderArticleDetail,
  renderFilterPanel,
  renderResults,
  renderSchemaOptions,
} from "../src/render.js";
import { emptyState } from "../src/state.js";
import type { ArticleDetail, SchemaDetail, SearchResponse } from "../src/types.js";

const SCHEMA: SchemaDetail = {
  schema_id: "S1",
  label: "aviation accident",
  wets: ["Q744913"],
  filters: [
    { pid: "P1120", label: "number of deaths", kind: "quantity", coverage: 1, range_filterable: true },
    { pid: "P17", label: "country", kind: "item", coverage: 1, range_filterable: false },
  ],
};

describe("filter panel", () => {
  it("renders a numeric range control iff the property is range-filterable", () => {
    const html = renderFilterPanel(SCHEMA, emptyState());
    const numberInputs = html.match(/type="number"/g) ?? [];
    expect(numberInputs).toHaveLength(2); // min + max for P1120 only
    expect(html).toContain('data-pid="P1120" data-bound="min"');
    expect(html).toContain('data-pid="P1120" data-bound="max"');
    expect(html).toContain('data-pid="P17" data-bound="eq"');
    expect(html).toContain('type="text"');
  });

  it("shows current input values", () => {
    const state = emptyState();
    state.propertyFilters = { P1120: { min: "50" } };
    expect(renderFilterPanel(SCHEMA, state)).toContain('value="50"');
  });

  it("explains an unselected schema", () => {
    expect(renderFilterPanel(null, emptyState())).toContain("Pick a schema");
  });
});

describe("schema options", () => {
  it("marks the selected schema", () => {
    const html = renderSchemaOptions(
      [
        { schema_id: "S1", label: "crash", wet_count: 3, article_count: 4 },
        { schema_id: "S2", label: "quake", wet_count: 1, article_count: 3 },
      ],
      "S2",
    );
    expect(html).toContain('<option value="S2" selected>');
    expect(html).toContain("crash (4)");
  });
});

describe("results", () => {
  it("lists hits with links and snippets", () => {
    const response: SearchResponse = {
      total: 1,
      page: 1,
      size: 10,
      hits: [
        {
          article_id: "a1",
          headline: "Big <crash>",
          created: "2015-03-24T12:00:00Z",
          schema_id: "S1",
          snippet: "snippet text",
          score: 2.5,
        },
      ],
    };
    const html = renderResults(response, emptyState());
    expect(html).toContain('data-article-id="a1"');
    expect(html).toContain("Big &lt;crash&gt;"); // escaped
    expect(html).toContain("snippet text");
  });

  it("zero state lists the active filters", () => {
    const state = emptyState();
    state.query = "zeppelin";
    state.schemaId = "S1";
    const html = renderResults({ total: 0, page: 1, size: 10, hits: [] }, state);
    expect(html).toContain("No articles match");
    expect(html).toContain("zeppelin");
    expect(html).toContain("schema S1");
  });

  it("paginates beyond one page", () => {
    const response: SearchResponse = { total: 25, page: 2, size: 10, hits: [hit("x")] };
    const html = renderResults(response, emptyState());
    expect(html).toContain('data-page="1"');
    expect(html).toContain('data-page="3"');
  });
});

function hit(id: string) {
  return {
    article_id: id,
    headline: id,
    created: "2015-01-01T00:00:00Z",
    schema_id: null,
    snippet: "",
    score: 0,
  };
}

describe("annotation highlighting", () => {
  it("wraps spans in mark tags with hover labels", () => {
    const text = "About 150 people died.";
    const html = highlightAnnotations(text, [
      {
        pid: "P1120",
        label: "number of deaths",
        kind: "quantity",
        surface: "150",
        sentence: 0,
        start: 6,
        end: 9,
        value: 150,
      },
    ]);
    expect(html).toBe(
      'About <mark class="annotation annotation-quantity" ' +
        'title="P1120 number of deaths = 150">150</mark> people died.',
    );
  });

  it("escapes HTML inside and outside spans", () => {
    const text = "<b>9</b>";
    const html = highlightAnnotations(text, [
      { pid: "P1", label: "x", kind: "quantity", surface: "9", sentence: 0, start: 3, end: 4, value: 9 },
    ]);
    expect(html).toContain("&lt;b&gt;");
    expect(html).toContain(">9</mark>");
  });

  it("skips overlapping spans instead of corrupting offsets", () => {
    const text = "abcdef";
    const html = highlightAnnotations(text, [
      { pid: "P1", label: "x", kind: "entity", surface: "abc", sentence: 0, start: 0, end: 3, value: "a" },
      { pid: "P2", label: "y", kind: "entity", surface: "bcd", sentence: 0, start: 1, end: 4, value: "b" },
    ]);
    expect(html).toContain(">abc</mark>");
    expect(html).not.toContain(">bcd</mark>");
  });
});

describe("article detail", () => {
  const DETAIL: ArticleDetail = {
    id: "a1",
    headline: "Crash update",
    created: "2015-03-24T12:41:21Z",
    dateline: "PARIS, March 24, 2015",
    iptc_codes: ["03000000"],
    slugs: ["aviation"],
    paragraphs: ["150 died in France."],
    text: "Crash update\n\n150 died in France.",
    event_qid: "Q19671417",
    schema_id: "S1",
    mapping_score: 2.0,
    annotations: [
      {
        pid: "P1120",
        label: "number of deaths",
        kind: "quantity",
        surface: "150",
        sentence: 1,
        start: 14,
        end: 17,
        value: 150,
      },
    ],
    entities: [
      { surface: "France", category: "GPE", start: 26, end: 32 },
      { surface: "France", category: "GPE", start: 26, end: 32 },
    ],
  };

  it("highlights annotations and shows the infobox", () => {
    const html = renderArticleDetail(DETAIL);
    expect(html).toContain("<mark");
    expect(html).toContain("Q19671417");
    expect(html).toContain("GPE");
    // duplicate entities are collapsed
    expect((html.match(/France<\/li>/g) ?? []).length).toBe(1);
  });

  it("escapes structured values", () => {
    const detail = { ...DETAIL, annotations: [], entities: [] };
    const html = renderArticleDetail(detail);
    expect(html).toContain("No property values grounded");
  });
});

describe("escapeHtml", () => {
  it("handles all special characters", () => {
    expect(escapeHtml(`<a href="x">&'</a>`)).toBe(
      "&lt;a href=&quot;x&quot;&gt;&amp;&#39;&lt;/a&gt;",
    );
  });
});

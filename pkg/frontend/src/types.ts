/** Shapes of the JSON API consumed by the client. */

export interface SchemaSummary {
  schema_id: string;
  label: string;
  wet_count: number;
  article_count: number;
}

export interface FilterPropertyDescriptor {
  pid: string;
  label: string;
  kind: string;
  coverage: number;
  range_filterable: boolean;
}

export interface SchemaDetail {
  schema_id: string;
  label: string;
  wets: string[];
  filters: FilterPropertyDescriptor[];
}

export interface SearchHit {
  article_id: string;
  headline: string;
  created: string;
  schema_id: string | null;
  snippet: string;
  score: number;
}

export interface SearchResponse {
  total: number;
  page: number;
  size: number;
  hits: SearchHit[];
}

export interface AnnotationRecord {
  pid: string;
  label: string;
  kind: string;
  surface: string;
  sentence: number;
  start: number;
  end: number;
  value: unknown;
  context_score?: number;
}

export interface EntityRecord {
  surface: string;
  category: string;
  start: number;
  end: number;
}

export interface ArticleDetail {
  id: string;
  headline: string;
  created: string;
  dateline: string | null;
  iptc_codes: string[];
  slugs: string[];
  paragraphs: string[];
  text: string;
  event_qid: string | null;
  schema_id: string | null;
  mapping_score: number | null;
  annotations: AnnotationRecord[];
  entities: EntityRecord[];
}

export interface ApiError {
  error: string;
  message: string;
}

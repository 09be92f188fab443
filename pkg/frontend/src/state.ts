/** Filter form state and its URL (de)serialization.
 *
 * The whole search is recoverable from the query string, so every state is
 * shareable as a link. Property filters reuse the API's own
 * `PID:comparator:value` syntax in repeated `filter` params.
 */

export interface PropertyFilterInput {
  /** numeric bounds for range-filterable properties (as entered, validated) */
  min?: string;
  max?: string;
  /** exact-match text for everything else */
  eq?: string;
}

export interface FilterFormState {
  query: string;
  dateFrom: string; // YYYY-MM-DD or ""
  dateTo: string;
  location: string;
  schemaId: string; // "" = no schema selected
  propertyFilters: Record<string, PropertyFilterInput>;
  page: number;
}

export function emptyState(): FilterFormState {
  return {
    query: "",
    dateFrom: "",
    dateTo: "",
    location: "",
    schemaId: "",
    propertyFilters: {},
    page: 1,
  };
}

const DATE_RE = /^\d{4}-\d{2}-\d{2}$/;
const NUMBER_RE = /^-?\d+(\.\d+)?$/;

/** Client-side validation run before any search is submitted. */
export function validateState(state: FilterFormState): string[] {
  const problems: string[] = [];
  for (const field of ["dateFrom", "dateTo"] as const) {
    const value = state[field];
    if (value && !DATE_RE.test(value)) {
      problems.push(`${field === "dateFrom" ? "from" : "to"} date must be YYYY-MM-DD`);
    }
  }
  for (const [pid, input] of Object.entries(state.propertyFilters)) {
    for (const bound of ["min", "max"] as const) {
      const value = input[bound];
      if (value !== undefined && value !== "" && !NUMBER_RE.test(value)) {
        problems.push(`${pid} ${bound} must be numeric`);
      }
    }
  }
  if (!Number.isInteger(state.page) || state.page < 1) {
    problems.push("page must be a positive integer");
  }
  return problems;
}

/** Property filters expressed as the API's repeated `filter` parameters. */
export function filterParams(state: FilterFormState): string[] {
  const params: string[] = [];
  for (const pid of Object.keys(state.propertyFilters).sort()) {
    const input = state.propertyFilters[pid];
    if (input.min !== undefined && input.min !== "") {
      params.push(`${pid}:gte:${input.min}`);
    }
    if (input.max !== undefined && input.max !== "") {
      params.push(`${pid}:lte:${input.max}`);
    }
    if (input.eq !== undefined && input.eq !== "") {
      params.push(`${pid}:eq:${input.eq}`);
    }
  }
  return params;
}

export function serializeState(state: FilterFormState): string {
  const params = new URLSearchParams();
  if (state.query) params.set("q", state.query);
  if (state.schemaId) params.set("schema", state.schemaId);
  if (state.dateFrom) params.set("from", state.dateFrom);
  if (state.dateTo) params.set("to", state.dateTo);
  if (state.location) params.set("location", state.location);
  for (const param of filterParams(state)) {
    params.append("filter", param);
  }
  if (state.page !== 1) params.set("page", String(state.page));
  return params.toString();
}

export function parseState(queryString: string): FilterFormState {
  const params = new URLSearchParams(queryString);
  const state = emptyState();
  state.query = params.get("q") ?? "";
  state.schemaId = params.get("schema") ?? "";
  state.dateFrom = params.get("from") ?? "";
  state.dateTo = params.get("to") ?? "";
  state.location = params.get("location") ?? "";
  const page = Number(params.get("page") ?? "1");
  state.page = Number.isInteger(page) && page >= 1 ? page : 1;
  for (const raw of params.getAll("filter")) {
    const parts = raw.split(":");
    if (parts.length < 3) continue;
    const [pid, comparator] = parts;
    const value = parts.slice(2).join(":");
    const input = (state.propertyFilters[pid] ??= {});
    if (comparator === "gte") input.min = value;
    else if (comparator === "lte") input.max = value;
    else if (comparator === "eq") input.eq = value;
  }
  return state;
}

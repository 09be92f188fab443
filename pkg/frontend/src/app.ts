/** Browser bootstrap: DOM wiring around the controller.
 *
 * The controller owns state and HTML; this file only binds events, swaps
 * innerHTML, and keeps the URL in sync (history.pushState on submit,
 * popstate -> restore).
 */

import { ApiClient } from "./api.js";
import { SearchController, type ViewState } from "./controller.js";

const API_BASE =
  new URLSearchParams(window.location.search).get("api") ??
  (window.location.port === "8080" ? "" : "http://127.0.0.1:8080");

function element<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function main(): void {
  const form = element<HTMLFormElement>("search-form");
  const queryInput = element<HTMLInputElement>("query");
  const fromInput = element<HTMLInputElement>("date-from");
  const toInput = element<HTMLInputElement>("date-to");
  const locationInput = element<HTMLInputElement>("location");
  const schemaSelect = element<HTMLSelectElement>("schema");
  const filterPanel = element<HTMLDivElement>("filter-panel");
  const mainView = element<HTMLDivElement>("main-view");
  const bannerSlot = element<HTMLDivElement>("banner");

  let lastQueryString = window.location.search.replace(/^\?/, "");

  const controller = new SearchController(new ApiClient(API_BASE), (view: ViewState) => {
    schemaSelect.innerHTML = view.schemaOptionsHtml;
    filterPanel.innerHTML = view.filterPanelHtml;
    mainView.innerHTML = view.mainHtml;
    bannerSlot.innerHTML = view.bannerHtml;
    queryInput.value = view.state.query;
    fromInput.value = view.state.dateFrom;
    toInput.value = view.state.dateTo;
    locationInput.value = view.state.location;
    if (view.queryString !== lastQueryString) {
      lastQueryString = view.queryString;
      const url = view.queryString ? `?${view.queryString}` : window.location.pathname;
      window.history.pushState({}, "", url);
    }
  });

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    controller.setQuery(queryInput.value);
    controller.setDates(fromInput.value, toInput.value);
    controller.setLocation(locationInput.value);
    void controller.runSearch();
  });

  schemaSelect.addEventListener("change", () => {
    void controller.selectSchema(schemaSelect.value);
  });

  filterPanel.addEventListener("input", (event) => {
    const target = event.target as HTMLInputElement;
    const pid = target.dataset.pid;
    const bound = target.dataset.bound as "min" | "max" | "eq" | undefined;
    if (pid && bound) controller.setPropertyFilter(pid, bound, target.value);
  });

  mainView.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const link = target.closest<HTMLElement>("[data-article-id]");
    if (target.closest("[data-action='back']")) {
      event.preventDefault();
      controller.backToResults();
      return;
    }
    const pageButton = target.closest<HTMLElement>("button[data-page]");
    if (pageButton?.dataset.page) {
      void controller.goToPage(Number(pageButton.dataset.page));
      return;
    }
    if (link?.dataset.articleId && target.closest(".hit-link")) {
      event.preventDefault();
      void controller.openArticle(link.dataset.articleId);
    }
  });

  window.addEventListener("popstate", () => {
    lastQueryString = window.location.search.replace(/^\?/, "");
    void controller.restore(lastQueryString);
  });

  void controller.start(lastQueryString);
}

main();

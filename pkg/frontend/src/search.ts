/**
 * Search view: a query form, a grid of result cards, and per-result grading.
 * Grades are posted against the query_id the service handed back, so the
 * view refuses to grade before the first successful search.
 */

import { ApiClient, ApiError, DEFAULT_K } from "./api.js";
import { clear, el } from "./dom.js";
import { GRADES, type Grade, type SearchHit, type SearchResponse } from "./models.js";

export class SearchView {
  private readonly status: HTMLParagraphElement;
  private readonly results: HTMLDivElement;
  private queryId = "";

  constructor(
    root: HTMLElement,
    private readonly api: ApiClient,
    private readonly raterId = "webui",
  ) {
    const input = el("input", {
      type: "search",
      name: "query",
      placeholder: "describe the music you are after",
      "aria-label": "search query",
    });
    const genre = el("input", {
      type: "text",
      name: "genre",
      placeholder: "genre (optional)",
      "aria-label": "genre filter",
    });
    const form = el("form", { class: "search-form" }, [
      input,
      genre,
      el("button", { type: "submit", text: "search" }),
    ]);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.runSearch(input.value, genre.value.trim() || undefined);
    });
    this.status = el("p", { class: "search-status" });
    this.results = el("div", { class: "result-grid" });
    root.append(form, this.status, this.results);
  }

  /** Run one query and render up to k cards (default 9, a full grid). */
  async runSearch(query: string, genre?: string, k = DEFAULT_K): Promise<void> {
    clear(this.results);
    if (!query.trim()) {
      this.status.textContent = "enter a query first";
      return;
    }
    this.status.textContent = "searching...";
    let resp: SearchResponse;
    try {
      resp = await this.api.search(query, { genre, k });
    } catch (err) {
      this.status.textContent =
        err instanceof ApiError ? `search failed: ${err.message}` : "search failed";
      return;
    }
    this.queryId = resp.query_id;
    this.status.textContent = resp.results.length
      ? `${resp.results.length} results for "${resp.query}"`
      : `no results for "${resp.query}"`;
    for (const hit of resp.results) {
      this.results.append(this.card(hit));
    }
  }

  /**
   * Post a grade for one result card. Returns true when the service
   * acknowledged the rating; the card is then marked and its buttons locked.
   */
  async grade(youtubeId: string, grade: Grade): Promise<boolean> {
    const card = this.results.querySelector<HTMLElement>(
      `[data-youtube-id="${youtubeId}"]`,
    );
    if (!this.queryId || !card) {
      return false;
    }
    try {
      await this.api.rate(this.queryId, youtubeId, grade, this.raterId);
    } catch (err) {
      this.status.textContent =
        err instanceof ApiError ? `rating failed: ${err.message}` : "rating failed";
      return false;
    }
    card.classList.add("rated");
    card.setAttribute("data-grade", grade);
    for (const button of card.querySelectorAll("button")) {
      button.disabled = true;
    }
    return true;
  }

  private card(hit: SearchHit): HTMLElement {
    const card = el("article", {
      class: "result-card",
      "data-youtube-id": hit.youtube_id,
    }, [
      el("img", {
        class: "thumb",
        src: hit.thumbnail_url,
        alt: `thumbnail for ${hit.youtube_id}`,
        loading: "lazy",
      }),
      el("h3", {}, [
        el("span", { class: "rank", text: `${hit.rank}.` }),
        " ",
        el("a", { href: hit.url, target: "_blank", rel: "noopener", text: hit.youtube_id }),
      ]),
      el("p", { class: "meta", text: `${hit.genre ?? "unknown genre"} · ${hit.similarity.toFixed(4)}` }),
      el("p", { class: "caption", text: hit.caption ?? "" }),
    ]);
    const row = el("div", { class: "grade-row" });
    for (const grade of GRADES) {
      const button = el("button", { type: "button", class: "grade", text: grade });
      button.addEventListener("click", () => void this.grade(hit.youtube_id, grade));
      row.append(button);
    }
    card.append(row);
    return card;
  }
}

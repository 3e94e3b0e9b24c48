/**
 * Human evaluation wizard. One session walks an evaluator through the items
 * in order; every item shows the candidate captions under slot labels only
 * (the service keeps the slot-to-method mapping to itself until the final
 * report), and each caption collects one 0..2 score per perspective.
 */

import { ApiClient, ApiError } from "./api.js";
import { clear, el } from "./dom.js";
import {
  PERSPECTIVES,
  SCORE_LABELS,
  type NextItem,
  type Perspective,
  type ScoreAck,
  type SlotScores,
} from "./models.js";

const PERSPECTIVE_TITLES: Record<Perspective, string> = {
  situation: "Situation",
  time_season: "Time / season",
  emotion: "Emotion",
};

export class HumevalWizard {
  /** The item currently on screen; null before start and after exhaustion. */
  current: NextItem | null = null;

  private sessionId = "";
  private readonly screen: HTMLDivElement;
  private readonly status: HTMLParagraphElement;

  constructor(
    root: HTMLElement,
    private readonly api: ApiClient,
  ) {
    this.status = el("p", { class: "humeval-status" });
    this.screen = el("div", { class: "humeval-screen" });
    root.append(this.status, this.screen);
    this.renderStartForm();
  }

  /** Create a session for the evaluator and load its first item. */
  async start(evaluatorId: string, seed?: number): Promise<void> {
    try {
      const created = await this.api.createSession(
        evaluatorId,
        seed === undefined ? {} : { seed },
      );
      this.sessionId = created.session_id;
      this.status.textContent = `session started (${created.n_items} items)`;
    } catch (err) {
      this.status.textContent =
        err instanceof ApiError ? `could not start: ${err.message}` : "could not start";
      return;
    }
    await this.advance();
  }

  /** Set one select to a score; the DOM stays the single source of truth. */
  setScore(slot: string, perspective: Perspective, value: number): void {
    const select = this.screen.querySelector<HTMLSelectElement>(
      `select[data-slot="${slot}"][data-perspective="${perspective}"]`,
    );
    if (!select) {
      throw new Error(`no score select for slot ${slot} / ${perspective}`);
    }
    select.value = String(value);
  }

  /** Read every select back into the wire shape the scores route expects. */
  readScores(): SlotScores {
    const scores: SlotScores = {};
    for (const select of this.screen.querySelectorAll<HTMLSelectElement>("select[data-slot]")) {
      const slot = select.getAttribute("data-slot")!;
      const perspective = select.getAttribute("data-perspective") as Perspective;
      (scores[slot] ??= {} as Record<Perspective, number>)[perspective] = Number(select.value);
    }
    return scores;
  }

  /**
   * Post the on-screen scores for the current item and move on. Returns the
   * service acknowledgement, or null when there is nothing to submit.
   */
  async submit(): Promise<ScoreAck | null> {
    if (!this.current) {
      return null;
    }
    let ack: ScoreAck;
    try {
      ack = await this.api.postScores(this.sessionId, this.current.item_id, this.readScores());
    } catch (err) {
      this.status.textContent =
        err instanceof ApiError ? `scores rejected: ${err.message}` : "scores rejected";
      return null;
    }
    this.status.textContent = ack.remaining
      ? `${ack.remaining} item(s) remaining`
      : "session complete";
    await this.advance();
    return ack;
  }

  private async advance(): Promise<void> {
    const next = await this.api.nextItem(this.sessionId);
    this.current = next;
    if (next === null) {
      await this.renderReport();
      return;
    }
    this.renderItem(next);
  }

  private renderStartForm(): void {
    clear(this.screen);
    const input = el("input", {
      type: "text",
      name: "evaluator",
      placeholder: "evaluator id",
      "aria-label": "evaluator id",
    });
    const form = el("form", { class: "humeval-start" }, [
      input,
      el("button", { type: "submit", text: "start session" }),
    ]);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.start(input.value.trim());
    });
    this.screen.append(form);
  }

  private renderItem(item: NextItem): void {
    clear(this.screen);
    this.screen.append(
      el("p", { class: "progress", text: `item ${item.index + 1} of ${item.n_items}` }),
      el("h2", {}, [
        el("a", { href: item.watch_url, target: "_blank", rel: "noopener", text: item.item_id }),
      ]),
      el("img", { class: "thumb", src: item.thumbnail_url, alt: `thumbnail for ${item.item_id}` }),
    );
    for (const entry of item.captions) {
      const panel = el("fieldset", { class: "slot-panel", "data-slot": entry.slot }, [
        el("legend", { text: `Caption ${entry.slot}` }),
        el("blockquote", { class: "caption", text: entry.caption }),
      ]);
      for (const perspective of PERSPECTIVES) {
        const select = el("select", {
          "data-slot": entry.slot,
          "data-perspective": perspective,
          "aria-label": `${PERSPECTIVE_TITLES[perspective]} score for caption ${entry.slot}`,
        });
        for (const score of [2, 1, 0]) {
          select.append(el("option", { value: String(score), text: `${score} (${SCORE_LABELS[score]})` }));
        }
        panel.append(el("label", { class: "score" }, [PERSPECTIVE_TITLES[perspective], select]));
      }
      this.screen.append(panel);
    }
    const button = el("button", { type: "button", class: "submit-scores", text: "submit scores" });
    button.addEventListener("click", () => void this.submit());
    this.screen.append(button);
  }

  private async renderReport(): Promise<void> {
    clear(this.screen);
    const report = await this.api.humevalReport();
    if (!report.methods.length) {
      this.screen.append(el("p", { text: "no complete method reports yet" }));
      return;
    }
    const head = el("tr", {}, ["method", "items", "evaluators", "situation",
      "time/season", "emotion", "total", "all 2s"].map((h) => el("th", { text: h })));
    const table = el("table", { class: "report" }, [el("thead", {}, [head])]);
    const body = el("tbody");
    for (const row of report.methods) {
      body.append(el("tr", {}, [
        el("td", { text: row.method }),
        el("td", { text: String(row.n_items) }),
        el("td", { text: String(row.n_evaluators) }),
        el("td", { text: row.situation.toFixed(1) }),
        el("td", { text: row.time_season.toFixed(1) }),
        el("td", { text: row.emotion.toFixed(1) }),
        el("td", { text: row.total.toFixed(1) }),
        el("td", { text: row.all_2s.toFixed(1) }),
      ]));
    }
    table.append(body);
    this.screen.append(el("h2", { text: "Results" }), table);
  }
}

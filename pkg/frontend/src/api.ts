/**
 * Thin typed client over fetch. Each method maps to one service route and
 * returns the parsed body; non-2xx responses throw ApiError carrying the
 * HTTP status and the service's detail message. A fetch-compatible function
 * can be injected for tests.
 */

import type {
  Grade,
  HumevalReport,
  ItemDetail,
  NextItem,
  RatingAck,
  RatingsSummary,
  ScoreAck,
  SearchResponse,
  SessionCreated,
  SessionStatus,
  SlotScores,
} from "./models.js";

/** Default result count for the search view (a 3x3 card grid). */
export const DEFAULT_K = 9;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.base + path, init);
    if (resp.status === 204) {
      return null as T;
    }
    const payload: unknown = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      const detail = (payload as { detail?: unknown }).detail;
      throw new ApiError(
        resp.status,
        typeof detail === "string" ? detail : `${resp.status} ${resp.statusText}`,
      );
    }
    return payload as T;
  }

  search(query: string, opts: { k?: number; genre?: string } = {}): Promise<SearchResponse> {
    const body: Record<string, unknown> = { query, k: opts.k ?? DEFAULT_K };
    if (opts.genre) {
      body.genre = opts.genre;
    }
    return this.request("POST", "/api/search", body);
  }

  rate(queryId: string, youtubeId: string, grade: Grade, raterId: string): Promise<RatingAck> {
    return this.request("POST", "/api/ratings", {
      query_id: queryId,
      youtube_id: youtubeId,
      grade,
      rater_id: raterId,
    });
  }

  ratingsSummary(): Promise<RatingsSummary> {
    return this.request("GET", "/api/ratings/summary");
  }

  item(youtubeId: string): Promise<ItemDetail> {
    return this.request("GET", `/api/items/${encodeURIComponent(youtubeId)}`);
  }

  createSession(
    evaluatorId: string,
    opts: { items?: string[]; seed?: number } = {},
  ): Promise<SessionCreated> {
    const body: Record<string, unknown> = { evaluator_id: evaluatorId };
    if (opts.items !== undefined) {
      body.items = opts.items;
    }
    if (opts.seed !== undefined) {
      body.seed = opts.seed;
    }
    return this.request("POST", "/api/humeval/sessions", body);
  }

  sessionStatus(sessionId: string): Promise<SessionStatus> {
    return this.request("GET", `/api/humeval/sessions/${encodeURIComponent(sessionId)}`);
  }

  /** Resolves to null once the session is exhausted (the 204 case). */
  nextItem(sessionId: string): Promise<NextItem | null> {
    return this.request("GET", `/api/humeval/sessions/${encodeURIComponent(sessionId)}/next`);
  }

  postScores(sessionId: string, itemId: string, scores: SlotScores): Promise<ScoreAck> {
    return this.request("POST", `/api/humeval/sessions/${encodeURIComponent(sessionId)}/scores`, {
      item_id: itemId,
      scores,
    });
  }

  humevalReport(): Promise<HumevalReport> {
    return this.request("GET", "/api/humeval/report");
  }
}

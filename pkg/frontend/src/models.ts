/**
 * Payload shapes for the thumbcap JSON API. Field names mirror the wire
 * format exactly (snake_case), so request bodies and parsed responses can be
 * passed around without any mapping layer.
 */

export interface SearchHit {
  rank: number; // 1-based
  youtube_id: string;
  url: string;
  genre: string | null;
  caption: string | null;
  thumbnail_url: string;
  similarity: number; // cosine in [-1, 1]
}

export interface SearchResponse {
  query_id: string;
  query: string;
  results: SearchHit[];
}

export const GRADES = ["excellent", "good", "fair", "poor"] as const;
export type Grade = (typeof GRADES)[number];

export interface RatingAck {
  recorded: boolean;
  rating: Record<string, unknown>;
}

export interface RatingsSummary {
  counts: Record<Grade, number>;
  total: number;
}

export interface ItemDetail {
  youtube_id: string;
  url: string;
  genre: string;
  caption: string;
  sentence: string;
  thumbnail_url: string;
}

export interface SessionCreated {
  session_id: string;
  n_items: number;
}

export interface SessionStatus {
  session_id: string;
  evaluator_id: string;
  n_items: number;
  cursor: number;
  exhausted: boolean;
}

/**
 * One blinded caption. The server maps slot labels to methods internally;
 * the client must never learn which method produced which caption.
 */
export interface SlotCaption {
  slot: string; // "A", "B", ...
  caption: string;
}

export interface NextItem {
  item_id: string;
  index: number; // 0-based position in the session
  n_items: number;
  captions: SlotCaption[];
  watch_url: string;
  thumbnail_url: string;
}

export const PERSPECTIVES = ["situation", "time_season", "emotion"] as const;
export type Perspective = (typeof PERSPECTIVES)[number];

/** Score vocabulary shared with the service: 2 positive, 1 neutral, 0 negative. */
export const SCORE_LABELS: Record<number, string> = {
  2: "positive",
  1: "neutral",
  0: "negative",
};

export type PerspectiveScores = Record<Perspective, number>;

/** Slot label to the three perspective scores for that caption. */
export type SlotScores = Record<string, PerspectiveScores>;

export interface ScoreAck {
  recorded: number;
  remaining: number;
}

export interface MethodReportRow {
  method: string;
  n_items: number;
  n_evaluators: number;
  situation: number;
  time_season: number;
  emotion: number;
  total: number;
  all_2s: number;
}

export interface HumevalReport {
  methods: MethodReportRow[];
  incomplete: { method: string; reason: string }[];
}

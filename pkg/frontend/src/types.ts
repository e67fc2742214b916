/** Wire types of the search service JSON API. */

export interface SearchHit {
  rank: number;
  score: number;
  record_id: string;
  value: string;
  /** Verbatim quantity text; always a substring of `evidence`. */
  surface: string;
  description: string;
  evidence: string;
  doc_id: string;
  sentence_id: number;
}

export interface SearchResponse {
  query: string;
  method: string;
  hits: SearchHit[];
}

export interface MethodInfo {
  name: string;
  available: boolean;
}

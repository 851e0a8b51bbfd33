/** Wire types for the search service JSON API. */

export interface IntentInfo {
  kind: "navigational" | "informational" | "transactional";
  confidence: number;
  evidence: string;
}

export interface MemberSummary {
  record_id: string;
  title?: string;
  subtitle?: string | null;
  authors?: string[];
  publication_year?: number;
  document_type?: string;
  language?: string;
  availability?: string;
}

export interface FactorBreakdown {
  text: number;
  popularity: number;
  freshness: number;
  locality: number;
  other: number;
}

export interface WireCluster {
  position: number;
  score: number;
  representative: string;
  members: MemberSummary[];
  breakdown?: FactorBreakdown;
}

export interface WireDescription {
  text: string;
  /** [start, end) offsets into `text`, one per highlighted query token. */
  spans: [number, number][];
}

export type FacetValue = [string, number];

export interface ResultPageWire {
  query: string;
  intent: IntentInfo;
  zero_result: boolean;
  suggestions: string[];
  page: number;
  page_size: number;
  total_results: number;
  total_clusters: number;
  clusters: WireCluster[];
  descriptions: Record<string, WireDescription>;
  facets: Record<string, FacetValue[]>;
}

export interface FacetFilter {
  dimension: string;
  value: string;
}

export type UserLocation = "home" | "campus" | "library";
export type UserGroup = "student" | "graduate" | "professor" | "anonymous";

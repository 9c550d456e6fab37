// Payload shapes mirrored from the service; the client never mutates
// analytical numbers, it only renders them.

export interface ChatMessage {
  seq: number;
  role: string;
  text: string;
  meta: Record<string, unknown>;
}

export interface SessionCounts {
  retrieved: number;
  embedded: number;
  topics: number;
}

export interface SessionView {
  session_id: string;
  state: string;
  in_flight: boolean;
  draft: string | null;
  corpus_id: string;
  messages: ChatMessage[];
  counts: SessionCounts;
}

export interface MessageResponse {
  messages: ChatMessage[];
  state: string;
  in_flight: boolean;
}

export interface ApproveResponse {
  messages: ChatMessage[];
  state: string;
  counts: SessionCounts;
}

export interface LandscapePoint {
  uid: string;
  x: number;
  y: number;
  topic: number;
}

export interface TopicSummary {
  id: number;
  size: number;
  terms: [string, number][];
}

export interface LandscapePayload {
  points: LandscapePoint[];
  topics: TopicSummary[];
  outlier_count: number;
  degenerate: boolean;
}

export interface Representative {
  uid: string;
  title: string;
  score: number;
}

export interface TopicDetail {
  topic_id: number;
  size: number;
  terms: [string, number][];
  representatives: Representative[];
  trend: [number, number][];
}

export interface CorpusUploadResponse {
  corpus_id: string;
  stats: {
    accepted: number;
    rejected: number;
    deduplicated: number;
    rejected_by_category: Record<string, number>;
  };
}

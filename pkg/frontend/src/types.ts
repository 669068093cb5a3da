/** Everything the client extracts from a rendered Q&A page.
 *
 * The canonical plugin fields are: page url, question title, question text,
 * questioner name, questioner url, time of posting the question, question
 * category, best answer text, answerer name, answerer url, time of posting
 * the answer, and the answer's rating. The engagement counters (likes on
 * the best answer, number of competing answers) ride along because the
 * scoring service's session record wants them; pages that display neither
 * simply report zero.
 */
export interface ExtractedSession {
  pageUrl: string;
  questionTitle: string;
  questionText: string;
  questionerName: string;
  questionerUrl: string;
  /** epoch seconds, UTC */
  askTime: number;
  category: string | null;
  bestAnswerText: string;
  answererName: string;
  answererUrl: string;
  /** epoch seconds, UTC */
  answerTime: number;
  rating: number | null;
  likes: number;
  otherAnswers: number;
}

/** The session record as the scoring service expects it on POST /session. */
export interface SessionRecord {
  url: string;
  title: string;
  question_text: string;
  answer_text: string;
  questioner_id: string;
  answerer_id: string;
  ask_time: number;
  answer_time: number;
  likes: number;
  other_answers: number;
  category?: string;
  rating?: number;
}

/** Verdict body returned by POST /session. */
export interface VerdictWire {
  alert: boolean;
  cold: boolean;
  features: [number, number, number];
  label: 0 | 1;
  model_version: number;
  score: number;
}

/** Body returned by POST /score. */
export type ScoreLookupWire =
  | { found: false }
  | { found: true; label: 0 | 1; model_version: number; score: number };

/** What the UI renders after asking for a verdict. */
export type VerdictView =
  | {
      state: "verdict";
      url: string;
      score: number;
      label: 0 | 1;
      alert: boolean;
      cold: boolean;
      modelVersion: number;
      /** true when phase 1 already had the answer and no payload was sent */
      cached: boolean;
    }
  | { state: "rejected"; status: number; message: string }
  | { state: "unreachable"; detail: string };

/** What the UI renders after submitting feedback. */
export type FeedbackView =
  | { state: "accepted"; modelVersion: number; retrained: boolean }
  | { state: "rejected"; status: number; message: string }
  | { state: "unreachable"; detail: string };

/** Admin/introspection results share the same error arms. */
export type AdminRetrainView =
  | { state: "ok"; version: number; trainingSize: number }
  | { state: "rejected"; status: number; message: string }
  | { state: "unreachable"; detail: string };

export interface ModelWire {
  neutral_sgtext: number;
  theta: [number, number, number, number];
  threshold: number;
  trained_count: number;
  version: number;
}

export type ModelView =
  | { state: "ok"; model: ModelWire }
  | { state: "rejected"; status: number; message: string }
  | { state: "unreachable"; detail: string };

export type HealthView =
  | { state: "ok"; modelVersion: number; sessions: number }
  | { state: "rejected"; status: number; message: string }
  | { state: "unreachable"; detail: string };

/**
 * The wire record derived from an extraction. Key order is fixed so the
 * serialized payload is reproducible byte for byte; optional fields are
 * omitted entirely when the page has none.
 */
export function toSessionRecord(s: ExtractedSession): SessionRecord {
  const record: SessionRecord = {
    url: s.pageUrl,
    title: s.questionTitle,
    question_text: s.questionText,
    answer_text: s.bestAnswerText,
    // profile urls, not display names: names collide, profile urls are the
    // stable identity the detector's user-history features need
    questioner_id: s.questionerUrl,
    answerer_id: s.answererUrl,
    ask_time: s.askTime,
    answer_time: s.answerTime,
    likes: s.likes,
    other_answers: s.otherAnswers,
  };
  if (s.category !== null) record.category = s.category;
  if (s.rating !== null) record.rating = s.rating;
  return record;
}

/** Exact bytes the client puts on the wire for POST /session. */
export function sessionRecordBody(s: ExtractedSession): string {
  return JSON.stringify(toSessionRecord(s));
}

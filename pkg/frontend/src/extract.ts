/** Field extraction from a rendered Q&A page, driven by a selector profile. */

import type { ExtractedSession } from "./types.js";
import type { FieldRule, SelectorProfile } from "./profiles.js";
import { matchProfile } from "./profiles.js";

/** Raised when a page matched a profile but required content is absent. */
export class ExtractionIncomplete extends Error {
  readonly missing: string[];

  constructor(missing: string[]) {
    super(`extraction incomplete, missing: ${missing.join(", ")}`);
    this.name = "ExtractionIncomplete";
    this.missing = missing;
  }
}

/** Human names used in ExtractionIncomplete, keyed by session field. */
const FIELD_LABELS = {
  questionTitle: "question title",
  questionText: "question text",
  questionerName: "questioner name",
  questionerUrl: "questioner url",
  askTime: "time of posting question",
  bestAnswerText: "best answer",
  answererName: "answerer name",
  answererUrl: "answerer url",
  answerTime: "time of posting answer",
} as const;

type RequiredField = keyof typeof FIELD_LABELS;

/** Resolve until the document is completely loaded — extraction must never
 * run against a half-rendered page. */
export function whenDocumentReady(doc: Document): Promise<void> {
  if (doc.readyState === "complete") return Promise.resolve();
  return new Promise((resolve) => {
    const done = () => {
      if (doc.readyState === "complete") {
        doc.removeEventListener("readystatechange", done);
        resolve();
      }
    };
    doc.addEventListener("readystatechange", done);
    doc.defaultView?.addEventListener("load", () => resolve(), { once: true });
  });
}

function readRule(doc: Document, rule: FieldRule): string | null {
  if (rule.kind === "count") {
    return String(doc.querySelectorAll(rule.selector).length);
  }
  const el = doc.querySelector(rule.selector);
  if (el === null) return null;
  const raw = rule.attr !== undefined ? el.getAttribute(rule.attr) : el.textContent;
  if (raw === null) return null;
  const text = raw.replace(/\s+/g, " ").trim();
  return text.length > 0 ? text : null;
}

const EPOCH_SECONDS = /^-?\d+$/;
const ISO_LIKE = /^(\d{4}-\d{2}-\d{2})[ T](\d{2}:\d{2}(?::\d{2})?)(Z|[+-]\d{2}:?\d{2})?$/;

/**
 * Timestamps as pages carry them: epoch seconds, or an ISO-8601-like
 * date-time ("2015-06-12 09:30:00", "2024-03-01T08:15Z", with or without an
 * explicit offset — zoneless values are read as UTC so extraction does not
 * depend on the viewer's machine).
 */
export function parseTimestamp(raw: string): number | null {
  const text = raw.trim();
  if (EPOCH_SECONDS.test(text)) return Number.parseInt(text, 10);
  const m = ISO_LIKE.exec(text);
  if (m === null) return null;
  const time = m[2]!.length === 5 ? `${m[2]}:00` : m[2]!;
  const zone = m[3] ?? "Z";
  const ms = Date.parse(`${m[1]}T${time}${zone}`);
  return Number.isNaN(ms) ? null : Math.floor(ms / 1000);
}

/** First integer appearing in the text ("12 likes" → 12), or null. */
export function parseLeadingInt(raw: string): number | null {
  const m = /-?\d+/.exec(raw);
  return m ? Number.parseInt(m[0], 10) : null;
}

/**
 * Pull every session field out of the document according to the profile
 * matching `pageUrl` (which defaults to the document's own location).
 * Throws NoMatchingProfile for pages these profiles do not cover and
 * ExtractionIncomplete listing every required field that could not be
 * recovered.
 */
export function extractSessionFields(
  doc: Document,
  profiles: SelectorProfile[],
  pageUrl?: string,
): ExtractedSession {
  const url = pageUrl ?? doc.location?.href ?? "";
  const profile = matchProfile(profiles, url);
  const missing: string[] = [];

  const text = (field: RequiredField): string => {
    const value = readRule(doc, profile.fields[field]);
    if (value === null) {
      missing.push(FIELD_LABELS[field]);
      return "";
    }
    return value;
  };
  const time = (field: "askTime" | "answerTime"): number => {
    const value = readRule(doc, profile.fields[field]);
    const parsed = value === null ? null : parseTimestamp(value);
    if (parsed === null) {
      missing.push(FIELD_LABELS[field]);
      return 0;
    }
    return parsed;
  };
  const optionalText = (rule: FieldRule | undefined): string | null =>
    rule === undefined ? null : readRule(doc, rule);
  const optionalInt = (rule: FieldRule | undefined): number | null => {
    const value = rule === undefined ? null : readRule(doc, rule);
    return value === null ? null : parseLeadingInt(value);
  };

  const session: ExtractedSession = {
    pageUrl: url,
    questionTitle: text("questionTitle"),
    questionText: text("questionText"),
    questionerName: text("questionerName"),
    questionerUrl: text("questionerUrl"),
    askTime: time("askTime"),
    category: optionalText(profile.fields.category),
    bestAnswerText: text("bestAnswerText"),
    answererName: text("answererName"),
    answererUrl: text("answererUrl"),
    answerTime: time("answerTime"),
    rating: optionalInt(profile.fields.rating),
    likes: optionalInt(profile.fields.likes) ?? 0,
    otherAnswers: optionalInt(profile.fields.otherAnswers) ?? 0,
  };

  if (url.length === 0) missing.unshift("page url");
  if (missing.length > 0) throw new ExtractionIncomplete(missing);
  return session;
}

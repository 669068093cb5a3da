export type {
  AdminRetrainView,
  ExtractedSession,
  FeedbackView,
  HealthView,
  ModelView,
  ModelWire,
  ScoreLookupWire,
  SessionRecord,
  VerdictView,
  VerdictWire,
} from "./types.js";
export { sessionRecordBody, toSessionRecord } from "./types.js";
export { decodeHtml, sniffCharset } from "./encoding.js";
export type { FieldRule, SelectorProfile } from "./profiles.js";
export {
  InvalidProfile,
  NoMatchingProfile,
  matchProfile,
  parseProfiles,
} from "./profiles.js";
export {
  ExtractionIncomplete,
  extractSessionFields,
  parseTimestamp,
  whenDocumentReady,
} from "./extract.js";
export type { FetchLike } from "./api.js";
export { CqaguardClient } from "./api.js";
export { BADGE_CLASS, renderVerdictBadge } from "./badge.js";
export type { FeedbackPanelOptions } from "./feedback.js";
export { renderFeedbackPanel } from "./feedback.js";
export type { StorageLike } from "./options.js";
export {
  MemoryStorage,
  TOKEN_KEY,
  TokenStore,
  renderOptionsPanel,
} from "./options.js";

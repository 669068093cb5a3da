/** Selector profiles: per-site extraction configuration as data.
 *
 * Supporting a new Q&A site means adding a profile to the bundled JSON (or
 * passing one in), never changing client code. A profile names a CSS
 * selector per field plus how to read the matched element: its text, one of
 * its attributes, or the number of elements the selector matches.
 */

export interface FieldRule {
  selector: string;
  /** read this attribute instead of the element's text */
  attr?: string;
  /** "count" rules report how many elements match instead of reading one */
  kind?: "text" | "count";
}

export interface SelectorProfile {
  /** human-readable site name, unique within a profile set */
  site: string;
  /** regular expression (source string) matched against the page url */
  urlPattern: string;
  fields: {
    questionTitle: FieldRule;
    questionText: FieldRule;
    questionerName: FieldRule;
    questionerUrl: FieldRule;
    askTime: FieldRule;
    bestAnswerText: FieldRule;
    answererName: FieldRule;
    answererUrl: FieldRule;
    answerTime: FieldRule;
    category?: FieldRule;
    rating?: FieldRule;
    likes?: FieldRule;
    otherAnswers?: FieldRule;
  };
}

export class NoMatchingProfile extends Error {
  constructor(url: string) {
    super(`no selector profile matches ${url}`);
    this.name = "NoMatchingProfile";
  }
}

export class InvalidProfile extends Error {
  constructor(message: string) {
    super(message);
    this.name = "InvalidProfile";
  }
}

const REQUIRED_RULES = [
  "questionTitle",
  "questionText",
  "questionerName",
  "questionerUrl",
  "askTime",
  "bestAnswerText",
  "answererName",
  "answererUrl",
  "answerTime",
] as const;

export type RequiredRuleName = (typeof REQUIRED_RULES)[number];

function checkRule(site: string, name: string, rule: unknown): FieldRule {
  if (typeof rule !== "object" || rule === null) {
    throw new InvalidProfile(`${site}: field ${name} must be an object`);
  }
  const r = rule as Record<string, unknown>;
  if (typeof r.selector !== "string" || r.selector.length === 0) {
    throw new InvalidProfile(`${site}: field ${name} needs a selector`);
  }
  if (r.attr !== undefined && typeof r.attr !== "string") {
    throw new InvalidProfile(`${site}: field ${name}: attr must be a string`);
  }
  if (r.kind !== undefined && r.kind !== "text" && r.kind !== "count") {
    throw new InvalidProfile(`${site}: field ${name}: kind must be text or count`);
  }
  return r as unknown as FieldRule;
}

/** Validate profile data (e.g. freshly parsed JSON) into typed profiles. */
export function parseProfiles(data: unknown): SelectorProfile[] {
  if (typeof data !== "object" || data === null || !Array.isArray((data as any).profiles)) {
    throw new InvalidProfile("profile data must be {\"profiles\": [...]}");
  }
  const out: SelectorProfile[] = [];
  for (const entry of (data as { profiles: unknown[] }).profiles) {
    const p = entry as Record<string, unknown>;
    if (typeof p.site !== "string" || p.site.length === 0) {
      throw new InvalidProfile("every profile needs a site name");
    }
    if (typeof p.urlPattern !== "string") {
      throw new InvalidProfile(`${p.site}: urlPattern must be a string`);
    }
    try {
      new RegExp(p.urlPattern);
    } catch (err) {
      throw new InvalidProfile(`${p.site}: bad urlPattern: ${(err as Error).message}`);
    }
    if (typeof p.fields !== "object" || p.fields === null) {
      throw new InvalidProfile(`${p.site}: fields must be an object`);
    }
    const fields = p.fields as Record<string, unknown>;
    for (const name of REQUIRED_RULES) {
      if (fields[name] === undefined) {
        throw new InvalidProfile(`${p.site}: missing field rule ${name}`);
      }
    }
    for (const [name, rule] of Object.entries(fields)) {
      checkRule(p.site, name, rule);
    }
    out.push(p as unknown as SelectorProfile);
  }
  return out;
}

/** First profile whose url pattern matches, or throw. */
export function matchProfile(profiles: SelectorProfile[], url: string): SelectorProfile {
  for (const p of profiles) {
    if (new RegExp(p.urlPattern).test(url)) return p;
  }
  throw new NoMatchingProfile(url);
}

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { Window } from "happy-dom";

import { decodeHtml } from "../src/encoding.js";
import { parseProfiles, type SelectorProfile } from "../src/profiles.js";
import type { ExtractedSession, SessionRecord } from "../src/types.js";

const HERE = dirname(fileURLToPath(import.meta.url));
export const FRONTEND_ROOT = join(HERE, "..");
export const REPO_ROOT = join(FRONTEND_ROOT, "..");

export interface FixtureTruth {
  name: string;
  file: string;
  site: string;
  pageUrl: string;
  session: ExtractedSession;
  record: SessionRecord;
}

export function loadGroundTruth(): FixtureTruth[] {
  const raw = readFileSync(join(FRONTEND_ROOT, "fixtures", "ground-truth.json"), "utf-8");
  return (JSON.parse(raw) as { fixtures: FixtureTruth[] }).fixtures;
}

export function loadProfiles(): SelectorProfile[] {
  const raw = readFileSync(join(FRONTEND_ROOT, "selectors", "profiles.json"), "utf-8");
  return parseProfiles(JSON.parse(raw));
}

export function fixtureBytes(file: string): Uint8Array {
  return new Uint8Array(readFileSync(join(FRONTEND_ROOT, "fixtures", file)));
}

/** Parse markup the way a browser would hand it to a content script. */
export function parseHtml(html: string): Document {
  const window = new Window();
  const parser = new window.DOMParser();
  return parser.parseFromString(html, "text/html") as unknown as Document;
}

export function fixtureDocument(file: string): Document {
  return parseHtml(decodeHtml(fixtureBytes(file)));
}

/** A fresh empty document for rendering tests. */
export function blankDocument(): Document {
  return new Window().document as unknown as Document;
}

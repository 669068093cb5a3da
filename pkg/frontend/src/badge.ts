/** Verdict badge rendering.
 *
 * The badge shows both the binary alert and the raw score: the service
 * exposes both, regular readers get the full picture, and the styling is
 * keyed strictly off the server's own label — the client never applies a
 * threshold of its own.
 */

import type { VerdictView } from "./types.js";

export const BADGE_CLASS = "cqaguard-badge";

function line(doc: Document, parent: Element, cls: string, text: string): void {
  const el = doc.createElement("div");
  el.className = cls;
  el.textContent = text;
  parent.appendChild(el);
}

/** Replace `container`'s content with the rendered badge; returns container. */
export function renderVerdictBadge(container: Element, view: VerdictView): Element {
  const doc = container.ownerDocument;
  container.textContent = "";

  const badge = doc.createElement("div");
  container.appendChild(badge);

  if (view.state === "unreachable") {
    badge.className = `${BADGE_CLASS} cqaguard-unreachable`;
    line(doc, badge, "cqaguard-headline", "detector unreachable");
    line(doc, badge, "cqaguard-detail", view.detail);
    return container;
  }
  if (view.state === "rejected") {
    badge.className = `${BADGE_CLASS} cqaguard-error`;
    line(doc, badge, "cqaguard-headline", "detector refused the request");
    line(doc, badge, "cqaguard-detail", `${view.status}: ${view.message}`);
    return container;
  }

  badge.className = view.alert
    ? `${BADGE_CLASS} cqaguard-alert`
    : `${BADGE_CLASS} cqaguard-normal`;
  line(
    doc,
    badge,
    "cqaguard-headline",
    view.alert ? "campaign alert" : "looks organic",
  );
  line(doc, badge, "cqaguard-score", `score ${view.score.toFixed(3)}`);
  line(
    doc,
    badge,
    "cqaguard-model",
    view.cold
      ? "no trained model yet — provisional verdict"
      : `model v${view.modelVersion}${view.cached ? " (cached)" : ""}`,
  );
  return container;
}

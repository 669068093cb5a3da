/** The human-in-the-loop feedback form.
 *
 * Only rendered when a token is configured: without one the badge is
 * read-only and no form exists at all. The service decides whether the
 * token may annotate; this form just mirrors its verdicts.
 */

import type { CqaguardClient } from "./api.js";
import type { FeedbackView } from "./types.js";
import type { TokenStore } from "./options.js";

export interface FeedbackPanelOptions {
  client: CqaguardClient;
  url: string;
  tokens: TokenStore;
  /** observe outcomes (tests, toolbars); rendering happens regardless */
  onResult?: (view: FeedbackView) => void;
}

function describe(view: FeedbackView): { cls: string; text: string } {
  if (view.state === "accepted") {
    return {
      cls: "cqaguard-feedback-ok",
      text: view.retrained
        ? `label recorded — model retrained to v${view.modelVersion}`
        : `label recorded (model v${view.modelVersion})`,
    };
  }
  if (view.state === "rejected") {
    if (view.status === 403) {
      return {
        cls: "cqaguard-feedback-denied",
        text: "this token is not allowed to annotate",
      };
    }
    if (view.status === 404) {
      return {
        cls: "cqaguard-feedback-error",
        text: "the detector does not know this session yet",
      };
    }
    return {
      cls: "cqaguard-feedback-error",
      text: `rejected (${view.status}): ${view.message}`,
    };
  }
  return { cls: "cqaguard-feedback-error", text: "detector unreachable" };
}

/**
 * Render the feedback form into `container`. Returns the form element, or
 * null when no token is configured (nothing is rendered in that case).
 */
export function renderFeedbackPanel(
  container: Element,
  options: FeedbackPanelOptions,
): Element | null {
  container.textContent = "";
  if (options.tokens.getToken() === null) return null;

  const doc = container.ownerDocument;
  const panel = doc.createElement("form");
  panel.className = "cqaguard-feedback";

  const status = doc.createElement("div");
  status.className = "cqaguard-feedback-status";

  const vote = (labelText: string, cls: string, label: 0 | 1) => {
    const button = doc.createElement("button");
    button.className = cls;
    button.setAttribute("type", "button");
    button.textContent = labelText;
    button.addEventListener("click", () => {
      const token = options.tokens.getToken();
      if (token === null) return;
      status.textContent = "sending…";
      void options.client.submitFeedback(options.url, label, token).then((view) => {
        const { cls: statusCls, text } = describe(view);
        status.className = `cqaguard-feedback-status ${statusCls}`;
        status.textContent = text;
        options.onResult?.(view);
      });
    });
    return button;
  };

  panel.appendChild(vote("report campaign", "cqaguard-vote-campaign", 1));
  panel.appendChild(vote("looks organic", "cqaguard-vote-organic", 0));
  panel.appendChild(status);
  container.appendChild(panel);
  return panel;
}

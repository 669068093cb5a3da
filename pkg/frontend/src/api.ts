/** HTTP client for the scoring service.
 *
 * The client renders only what the server says — it computes no scores
 * locally — and follows the two-phase protocol: ask by url first, send the
 * full session payload only when the service has never seen the url.
 */

import type {
  AdminRetrainView,
  ExtractedSession,
  FeedbackView,
  HealthView,
  ModelView,
  ModelWire,
  ScoreLookupWire,
  VerdictView,
  VerdictWire,
} from "./types.js";
import { sessionRecordBody } from "./types.js";

export type FetchLike = (
  input: string,
  init?: {
    method?: string;
    headers?: Record<string, string>;
    body?: string;
  },
) => Promise<{
  status: number;
  text(): Promise<string>;
}>;

interface Reply {
  status: number;
  body: Record<string, unknown>;
}

function rejected(reply: Reply): { state: "rejected"; status: number; message: string } {
  const message =
    typeof reply.body.error === "string" ? reply.body.error : `http ${reply.status}`;
  return { state: "rejected", status: reply.status, message };
}

function unreachable(err: unknown): { state: "unreachable"; detail: string } {
  return {
    state: "unreachable",
    detail: err instanceof Error ? err.message : String(err),
  };
}

export class CqaguardClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;
  /** at most one in-flight verdict request per page */
  private inflight: Promise<VerdictView> | null = null;

  constructor(baseUrl: string, options: { fetchFn?: FetchLike } = {}) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    const fn = options.fetchFn ?? (globalThis.fetch as unknown as FetchLike);
    if (typeof fn !== "function") {
      throw new Error("no fetch implementation available");
    }
    this.fetchFn = fn;
  }

  private async post(path: string, body: string, declareCharset: boolean): Promise<Reply> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: {
        "content-type": declareCharset
          ? "application/json; charset=utf-8"
          : "application/json",
      },
      body,
    });
    return { status: response.status, body: await parseBody(response) };
  }

  private async get(path: string): Promise<Reply> {
    const response = await this.fetchFn(this.baseUrl + path);
    return { status: response.status, body: await parseBody(response) };
  }

  /**
   * Two-phase verdict: phase 1 asks by url; only a miss triggers phase 2
   * with the full payload. Concurrent callers share one request — the page
   * never has more than one verdict request in flight.
   */
  requestVerdict(session: ExtractedSession): Promise<VerdictView> {
    if (this.inflight === null) {
      this.inflight = this.requestVerdictNow(session).finally(() => {
        this.inflight = null;
      });
    }
    return this.inflight;
  }

  private async requestVerdictNow(session: ExtractedSession): Promise<VerdictView> {
    let lookup: Reply;
    try {
      lookup = await this.post("/score", JSON.stringify({ url: session.pageUrl }), false);
    } catch (err) {
      return unreachable(err);
    }
    if (lookup.status !== 200) return rejected(lookup);

    const hit = lookup.body as unknown as ScoreLookupWire;
    if (hit.found) {
      return {
        state: "verdict",
        url: session.pageUrl,
        score: hit.score,
        label: hit.label,
        alert: hit.label === 1,
        cold: hit.model_version === 0,
        modelVersion: hit.model_version,
        cached: true,
      };
    }

    let submitted: Reply;
    try {
      // session text may contain any script; the service requires the
      // charset to be declared on this endpoint
      submitted = await this.post("/session", sessionRecordBody(session), true);
    } catch (err) {
      return unreachable(err);
    }
    if (submitted.status !== 200) return rejected(submitted);

    const verdict = submitted.body as unknown as VerdictWire;
    return {
      state: "verdict",
      url: session.pageUrl,
      score: verdict.score,
      label: verdict.label,
      alert: verdict.alert,
      cold: verdict.cold,
      modelVersion: verdict.model_version,
      cached: false,
    };
  }

  async submitFeedback(url: string, label: 0 | 1, token: string): Promise<FeedbackView> {
    let reply: Reply;
    try {
      reply = await this.post("/feedback", JSON.stringify({ url, label, token }), false);
    } catch (err) {
      return unreachable(err);
    }
    if (reply.status !== 200) return rejected(reply);
    return {
      state: "accepted",
      modelVersion: reply.body.model_version as number,
      retrained: reply.body.retrained as boolean,
    };
  }

  async adminRetrain(token: string): Promise<AdminRetrainView> {
    let reply: Reply;
    try {
      reply = await this.post("/admin/retrain", JSON.stringify({ token }), false);
    } catch (err) {
      return unreachable(err);
    }
    if (reply.status !== 200) return rejected(reply);
    return {
      state: "ok",
      version: reply.body.version as number,
      trainingSize: reply.body.training_size as number,
    };
  }

  async getModel(version?: number): Promise<ModelView> {
    const path = version === undefined ? "/model" : `/model?version=${version}`;
    let reply: Reply;
    try {
      reply = await this.get(path);
    } catch (err) {
      return unreachable(err);
    }
    if (reply.status !== 200) return rejected(reply);
    return { state: "ok", model: reply.body as unknown as ModelWire };
  }

  async health(): Promise<HealthView> {
    let reply: Reply;
    try {
      reply = await this.get("/health");
    } catch (err) {
      return unreachable(err);
    }
    if (reply.status !== 200) return rejected(reply);
    return {
      state: "ok",
      modelVersion: reply.body.model_version as number,
      sessions: reply.body.sessions as number,
    };
  }
}

async function parseBody(response: { text(): Promise<string> }): Promise<Record<string, unknown>> {
  const text = await response.text();
  try {
    const parsed = JSON.parse(text) as unknown;
    if (typeof parsed === "object" && parsed !== null && !Array.isArray(parsed)) {
      return parsed as Record<string, unknown>;
    }
  } catch {
    // fall through: a non-JSON body is reported as its raw text
  }
  return { error: text };
}

import type { Category, QueueItem, StatsPayload } from "./types.js";

/** Minimal fetch signature so tests can inject a fake transport. */
export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseJson(response: Response): Promise<unknown> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return response.json();
}

/** Thin typed client over the annotation service; never reshapes payloads. */
export class ApiClient {
  constructor(
    private readonly fetchImpl: FetchLike,
    private readonly base = "",
  ) {}

  async queue(annotator: string, k: number): Promise<QueueItem[]> {
    const url = `${this.base}/api/queue?annotator=${encodeURIComponent(annotator)}&k=${k}`;
    const payload = (await parseJson(await this.fetchImpl(url))) as {
      candidates: QueueItem[];
    };
    return payload.candidates;
  }

  async submitLabel(annotator: string, imageId: string, category: Category): Promise<number> {
    const response = await this.fetchImpl(`${this.base}/api/labels`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ annotator, image_id: imageId, category }),
    });
    const payload = (await parseJson(response)) as { revision: number };
    return payload.revision;
  }

  async stats(): Promise<StatsPayload> {
    return (await parseJson(await this.fetchImpl(`${this.base}/api/stats`))) as StatsPayload;
  }
}

import type { FetchLike } from "../src/api.js";
import type { QueueItem, StatsPayload } from "../src/types.js";

export function fixtures(n: number): QueueItem[] {
  return Array.from({ length: n }, (_, k) => ({
    image_id: `img${String(k).padStart(3, "0")}.png`,
    g: (k + 1) * 1e-3,
    image_url: `/api/image/img${String(k).padStart(3, "0")}.png`,
  }));
}

export const STATS_FIXTURE: StatsPayload = {
  revision: 20,
  n_candidates: 10,
  n_doubly_labeled: 10,
  annotators: {
    alice: { labeled: 10, total: 10 },
    bob: { labeled: 10, total: 10 },
  },
  kappa: 0.85,
  consensus: { strict: 3, loose: 6 },
  prevalence: {
    n_sample: 254275,
    strict_count: 3,
    loose_count: 6,
    lower_rate: 1.1798e-5,
    upper_rate: 2.3596e-5,
    lower_percent: "0.001%",
    upper_percent: "0.002%",
    kappa: 0.85,
    extrapolation_base: 40199195,
    extrapolated_low: 474,
    extrapolated_high: 948,
    tweet_lower_rate: null,
    tweet_upper_rate: null,
    tweet_lower_percent: null,
    tweet_upper_percent: null,
  },
};

export interface FakeService {
  fetchImpl: FetchLike;
  posts: Array<{ annotator: string; image_id: string; category: number }>;
  /** Force the next N label POSTs to fail with a 500. */
  failNextLabels(n: number): void;
}

function json(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/**
 * In-memory stand-in for the annotation service: the queue returns items the
 * annotator has not labeled yet, labels append and supersede.
 */
export function fakeService(items: QueueItem[], stats: StatsPayload = STATS_FIXTURE): FakeService {
  const labeled = new Map<string, Set<string>>();
  const posts: FakeService["posts"] = [];
  let revision = 0;
  let failures = 0;

  const fetchImpl: FetchLike = async (url, init) => {
    const parsed = new URL(url, "http://service.local");
    if (parsed.pathname === "/api/queue") {
      const annotator = parsed.searchParams.get("annotator") ?? "";
      const k = Number(parsed.searchParams.get("k") ?? "10");
      const done = labeled.get(annotator) ?? new Set();
      return json({ candidates: items.filter((i) => !done.has(i.image_id)).slice(0, k) });
    }
    if (parsed.pathname === "/api/labels" && init?.method === "POST") {
      if (failures > 0) {
        failures -= 1;
        return json({ detail: "injected failure" }, 500);
      }
      const body = JSON.parse(String(init.body)) as {
        annotator: string;
        image_id: string;
        category: number;
      };
      if (![1, 2, 3].includes(body.category)) return json({ detail: "bad category" }, 400);
      if (!items.some((i) => i.image_id === body.image_id)) {
        return json({ detail: "unknown image" }, 404);
      }
      posts.push(body);
      let done = labeled.get(body.annotator);
      if (!done) {
        done = new Set();
        labeled.set(body.annotator, done);
      }
      done.add(body.image_id);
      revision += 1;
      return json({ revision });
    }
    if (parsed.pathname === "/api/stats") {
      return json(stats);
    }
    return json({ detail: "not found" }, 404);
  };

  return {
    fetchImpl,
    posts,
    failNextLabels(n: number) {
      failures = n;
    },
  };
}

export async function waitFor(
  predicate: () => boolean,
  what = "condition",
  timeoutMs = 2000,
): Promise<void> {
  const start = Date.now();
  while (!predicate()) {
    if (Date.now() - start > timeoutMs) throw new Error(`timed out waiting for ${what}`);
    await new Promise((resolve) => setTimeout(resolve, 2));
  }
}

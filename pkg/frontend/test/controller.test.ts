import assert from "node:assert/strict";
import test from "node:test";

import { ApiClient } from "../src/api.js";
import { ReviewController, type ReviewView } from "../src/controller.js";
import type { Category, QueueItem } from "../src/types.js";
import { fakeService, fixtures } from "./helpers.js";

class RecordingView implements ReviewView {
  shown: Array<{ id: string; preselected: Category | null }> = [];
  completed = false;
  errors: string[] = [];
  progress: Array<[number, number]> = [];

  showItem(item: QueueItem, preselected: Category | null): void {
    this.completed = false;
    this.shown.push({ id: item.image_id, preselected });
  }
  showCompletion(): void {
    this.completed = true;
  }
  showError(message: string): void {
    this.errors.push(message);
  }
  clearError(): void {}
  updateProgress(submitted: number, queueDepth: number): void {
    this.progress.push([submitted, queueDepth]);
  }
}

function session(n: number, batchSize = 10) {
  const service = fakeService(fixtures(n));
  const view = new RecordingView();
  const controller = new ReviewController(
    new ApiClient(service.fetchImpl),
    view,
    "tester",
    batchSize,
  );
  return { service, view, controller };
}

test("labeling everything issues one POST per item and completes", async () => {
  const { service, view, controller } = session(10, 4);
  await controller.start();
  while (!controller.isComplete) {
    await controller.submit(2);
  }
  assert.equal(service.posts.length, 10);
  assert.equal(new Set(service.posts.map((p) => p.image_id)).size, 10);
  assert.equal(controller.submittedCount, 10);
  assert.ok(view.completed);
});

test("items arrive in queue order", async () => {
  const { view, controller } = session(5);
  await controller.start();
  await controller.submit(1);
  await controller.submit(3);
  assert.deepEqual(
    view.shown.map((s) => s.id),
    ["img000.png", "img001.png", "img002.png"],
  );
});

test("a second submit while one is in flight is dropped", async () => {
  const items = fixtures(3);
  const posts: unknown[] = [];
  let release: ((response: Response) => void) | null = null;
  const view = new RecordingView();
  const api = new ApiClient(async (url, init) => {
    const parsed = new URL(url, "http://x");
    if (parsed.pathname === "/api/labels") {
      posts.push(JSON.parse(String(init?.body)));
      return new Promise<Response>((resolve) => {
        release = resolve;
      });
    }
    return new Response(JSON.stringify({ candidates: items }), { status: 200 });
  });
  const controller = new ReviewController(api, view, "tester");
  await controller.start();

  const first = controller.submit(1);
  const second = controller.submit(2); // must be ignored: one POST per keypress
  release!(new Response(JSON.stringify({ revision: 1 }), { status: 200 }));
  await Promise.all([first, second]);
  assert.equal(posts.length, 1);
});

test("failed submission shows a retry banner and keeps the item", async () => {
  const { service, view, controller } = session(2);
  await controller.start();
  service.failNextLabels(1);
  await controller.submit(1);
  assert.equal(view.errors.length, 1);
  assert.equal(controller.currentItem?.image_id, "img000.png"); // not lost
  assert.equal(controller.submittedCount, 0);
  await controller.submit(1); // retry succeeds
  assert.equal(controller.submittedCount, 1);
  assert.equal(service.posts.length, 1);
});

test("undo redisplays the previous item with its label preselected", async () => {
  const { service, view, controller } = session(3);
  await controller.start();
  await controller.submit(2);
  assert.equal(controller.currentItem?.image_id, "img001.png");
  controller.undo();
  assert.equal(controller.currentItem?.image_id, "img000.png");
  const last = view.shown.at(-1);
  assert.deepEqual(last, { id: "img000.png", preselected: 2 });
  // Relabeling after undo supersedes server-side with a fresh POST.
  await controller.submit(1);
  assert.equal(service.posts.length, 2);
  assert.equal(controller.currentItem?.image_id, "img001.png");
});

test("skip defers without labeling and the item returns at the end", async () => {
  const { service, controller } = session(3);
  await controller.start();
  await controller.skip(); // defers img000
  assert.equal(controller.currentItem?.image_id, "img001.png");
  await controller.submit(1);
  await controller.submit(1);
  // Fresh queue exhausted; the deferred item comes back.
  assert.equal(controller.currentItem?.image_id, "img000.png");
  await controller.submit(3);
  assert.ok(controller.isComplete);
  assert.equal(service.posts.length, 3);
});

test("completion screen appears when the queue is empty from the start", async () => {
  const { view, controller } = session(0);
  await controller.start();
  assert.ok(view.completed);
  assert.ok(controller.isComplete);
});

test("queue depth and progress are reported", async () => {
  const { view, controller } = session(4, 10);
  await controller.start();
  assert.deepEqual(view.progress.at(-1), [0, 4]);
  await controller.submit(1);
  assert.deepEqual(view.progress.at(-1), [1, 3]);
});

test("refilling tolerates items that already came through", async () => {
  const { controller } = session(3, 2); // batches overlap across refills
  await controller.start();
  await controller.submit(1);
  await controller.submit(1);
  await controller.submit(1);
  assert.ok(controller.isComplete);
  assert.equal(controller.submittedCount, 3);
});

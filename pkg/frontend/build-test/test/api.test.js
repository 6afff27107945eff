import assert from "node:assert/strict";
import test from "node:test";
import { ApiClient, ApiError } from "../src/api.js";
import { fakeService, fixtures, STATS_FIXTURE } from "./helpers.js";
test("queue hits the right URL and unwraps candidates", async () => {
    const service = fakeService(fixtures(3));
    const seen = [];
    const api = new ApiClient(async (url, init) => {
        seen.push(url);
        return service.fetchImpl(url, init);
    });
    const items = await api.queue("ann one", 2);
    assert.equal(items.length, 2);
    assert.equal(items[0]?.image_id, "img000.png");
    assert.equal(seen[0], "/api/queue?annotator=ann%20one&k=2");
});
test("submitLabel posts a JSON body and returns the revision", async () => {
    const service = fakeService(fixtures(3));
    const api = new ApiClient(service.fetchImpl);
    const first = await api.submitLabel("a", "img000.png", 2);
    const second = await api.submitLabel("a", "img001.png", 1);
    assert.equal(first, 1);
    assert.equal(second, 2);
    assert.deepEqual(service.posts, [
        { annotator: "a", image_id: "img000.png", category: 2 },
        { annotator: "a", image_id: "img001.png", category: 1 },
    ]);
});
test("stats returns the payload untouched", async () => {
    const service = fakeService(fixtures(1));
    const api = new ApiClient(service.fetchImpl);
    assert.deepEqual(await api.stats(), STATS_FIXTURE);
});
test("http errors surface as ApiError with status and detail", async () => {
    const service = fakeService(fixtures(1));
    const api = new ApiClient(service.fetchImpl);
    await assert.rejects(api.submitLabel("a", "ghost.png", 1), (error) => error instanceof ApiError && error.status === 404);
    await assert.rejects(
    // @ts-expect-error deliberately bad category on the wire
    api.submitLabel("a", "img000.png", 9), (error) => error instanceof ApiError && error.status === 400);
});

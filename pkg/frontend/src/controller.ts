import type { ApiClient } from "./api.js";
import type { Category, QueueItem } from "./types.js";

/** What the review flow needs from the surrounding page. */
export interface ReviewView {
  showItem(item: QueueItem, preselected: Category | null): void;
  showCompletion(): void;
  showError(message: string): void;
  clearError(): void;
  updateProgress(submitted: number, queueDepth: number): void;
}

interface Submission {
  item: QueueItem;
  category: Category;
}

/**
 * One annotator's review session: pulls candidate batches, advances on
 * submission, supports single-step undo and label-free skipping.
 *
 * Submissions are serialized: while one POST is in flight every further
 * submit is ignored, so a key press can never produce more than one label.
 * Failed submissions keep the current item on screen behind a retry banner.
 */
export class ReviewController {
  private buffer: QueueItem[] = [];
  private current: QueueItem | null = null;
  private previous: Submission | null = null;
  private skippedIds = new Set<string>();
  private skippedItems: QueueItem[] = [];
  private seenIds = new Set<string>();
  private submitted = 0;
  private inFlight = false;
  private completed = false;

  constructor(
    private readonly api: ApiClient,
    private readonly view: ReviewView,
    readonly annotator: string,
    private readonly batchSize = 10,
  ) {}

  get submittedCount(): number {
    return this.submitted;
  }

  get queueDepth(): number {
    return this.buffer.length + this.skippedItems.length + (this.current ? 1 : 0);
  }

  get isComplete(): boolean {
    return this.completed;
  }

  get currentItem(): QueueItem | null {
    return this.current;
  }

  async start(): Promise<void> {
    await this.advance();
  }

  private async refill(): Promise<void> {
    let batch: QueueItem[];
    try {
      batch = await this.api.queue(this.annotator, this.batchSize);
    } catch (error) {
      this.view.showError(`queue fetch failed: ${describe(error)}`);
      return;
    }
    this.view.clearError();
    for (const item of batch) {
      // Tolerate items we already hold or deliberately deferred.
      if (this.seenIds.has(item.image_id) || this.skippedIds.has(item.image_id)) continue;
      if (this.current && this.current.image_id === item.image_id) continue;
      this.seenIds.add(item.image_id);
      this.buffer.push(item);
    }
  }

  private async advance(): Promise<void> {
    if (this.buffer.length === 0) {
      await this.refill();
    }
    let next = this.buffer.shift() ?? null;
    if (next === null && this.skippedItems.length > 0) {
      // Everything fresh is exhausted; cycle back over deferred items.
      next = this.skippedItems.shift() ?? null;
      if (next) this.skippedIds.delete(next.image_id);
    }
    this.current = next;
    if (this.current === null) {
      this.completed = true;
      this.view.updateProgress(this.submitted, 0);
      this.view.showCompletion();
      return;
    }
    this.completed = false;
    this.view.updateProgress(this.submitted, this.queueDepth);
    this.view.showItem(this.current, null);
  }

  /** Label the current item; resolves when the next item is on screen. */
  async submit(category: Category): Promise<void> {
    if (this.inFlight || this.current === null) return;
    const item = this.current;
    this.inFlight = true;
    try {
      await this.api.submitLabel(this.annotator, item.image_id, category);
    } catch (error) {
      this.view.showError(`label not saved, try again: ${describe(error)}`);
      return;
    } finally {
      this.inFlight = false;
    }
    this.view.clearError();
    this.submitted += 1;
    this.previous = { item, category };
    await this.advance();
  }

  /** Bring the previously labeled item back, its label preselected. */
  undo(): void {
    if (this.inFlight || this.previous === null) return;
    if (this.current !== null) {
      this.buffer.unshift(this.current);
    }
    const { item, category } = this.previous;
    this.previous = null;
    this.current = item;
    this.completed = false;
    this.view.updateProgress(this.submitted, this.queueDepth);
    this.view.showItem(item, category);
  }

  /** Defer the current item without labeling; it returns after the rest. */
  async skip(): Promise<void> {
    if (this.inFlight || this.current === null) return;
    this.skippedIds.add(this.current.image_id);
    this.skippedItems.push(this.current);
    this.current = null;
    await this.advance();
  }
}

function describe(error: unknown): string {
  return error instanceof Error ? error.message : String(error);
}

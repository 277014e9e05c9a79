/**
 * Client-side selection state and the request discipline around it.
 *
 * The store never computes admissibility, scores, or facts itself: it only
 * remembers which nodes the user chose and the latest engine reply. Replies
 * carry a monotonic request sequence number and the snapshot version; a
 * delayed reply to an earlier request (or one from an older snapshot) is
 * discarded, so the rendered panels always reflect the newest applied
 * evaluation.
 */

import { WhatIfPayload } from "./contracts.js";

export type Listener = () => void;

export class SelectionStore {
  private chosen = new Set<string>();
  private lastResponse: WhatIfPayload | null = null;
  private snapshotVersion = 0;
  private issuedSeq = 0;
  private appliedSeq = 0;
  private listeners = new Set<Listener>();

  /** The chosen node ids, in the order they were chosen. */
  selection(): string[] {
    return [...this.chosen];
  }

  has(id: string): boolean {
    return this.chosen.has(id);
  }

  get size(): number {
    return this.chosen.size;
  }

  toggle(id: string): void {
    if (!this.chosen.delete(id)) this.chosen.add(id);
    this.emit();
  }

  replaceSelection(ids: Iterable<string>): void {
    this.chosen = new Set(ids);
    this.emit();
  }

  clear(): void {
    this.chosen.clear();
    this.emit();
  }

  /** The latest applied engine evaluation, if any. */
  get response(): WhatIfPayload | null {
    return this.lastResponse;
  }

  /** Snapshot version of the latest applied evaluation (0 before any). */
  get version(): number {
    return this.snapshotVersion;
  }

  /** Per-node status from the latest evaluation, or "" when unknown. */
  statusOf(id: string): string {
    return this.lastResponse?.statuses[id] ?? "";
  }

  /** Hand out the sequence number for a request about to be issued. */
  nextSeq(): number {
    return ++this.issuedSeq;
  }

  /**
   * Apply one evaluation reply. Returns false (and changes nothing) when a
   * reply with a newer sequence number was already applied, or when the
   * reply comes from an older engine snapshot than one already seen.
   */
  apply(seq: number, version: number, response: WhatIfPayload): boolean {
    if (seq <= this.appliedSeq) return false;
    if (version < this.snapshotVersion) return false;
    this.appliedSeq = seq;
    this.snapshotVersion = version;
    this.lastResponse = response;
    this.emit();
    return true;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }
}

type RunWhatIf = (selection: string[]) => Promise<unknown>;

/**
 * Debounced, single-in-flight dispatcher for what-if evaluations.
 *
 * Rapid toggles within the debounce window collapse into one request. While
 * a request is in flight, further toggles only replace the trailing
 * selection; when the in-flight request settles, the trailing one (if any)
 * is issued immediately. At most one request is ever outstanding.
 */
export class WhatIfScheduler {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inFlight = false;
  private trailing: string[] | null = null;

  constructor(
    private readonly run: RunWhatIf,
    private readonly delayMs: number = 120,
  ) {}

  request(selection: string[]): void {
    if (this.inFlight) {
      this.trailing = selection;
      return;
    }
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.launch(selection);
    }, this.delayMs);
  }

  private async launch(selection: string[]): Promise<void> {
    this.inFlight = true;
    try {
      await this.run(selection);
    } catch {
      // the runner owns error reporting; scheduling only needs settlement
    } finally {
      this.inFlight = false;
      const next = this.trailing;
      this.trailing = null;
      if (next !== null) void this.launch(next);
    }
  }
}

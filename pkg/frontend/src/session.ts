// Session driver: which pair is on screen, what happens on a choice,
// and how a failed submission is retried.
//
// The server owns all session state.  The driver only ever reports
// "complete" when the server-reported answered count equals the total,
// and it renders pairs exactly as the server laid them out (the
// left/right placement is the server's randomization; no re-shuffle).
// A choice that fails to reach the server stays queued locally and can
// be retried; nothing advances until the server confirms.

import { ApiClient, ApiError, PayloadError } from "./api.js";
import type { PairPayload, SessionInfo, Side } from "./types.js";

export type Phase = "loading" | "answering" | "complete" | "error";

export interface PendingChoice {
  index: number;
  side: Side;
}

export class SessionDriver {
  info: SessionInfo | null = null;
  pair: PairPayload | null = null;
  phase: Phase = "loading";
  pending: PendingChoice | null = null;
  lastError: string | null = null;

  constructor(private readonly client: ApiClient) {}

  get complete(): boolean {
    return this.info !== null && this.info.answered === this.info.total;
  }

  async start(): Promise<void> {
    this.info = await this.client.session();
    await this.advance();
  }

  /** Show the first unanswered pair, or the completion state. */
  async advance(): Promise<void> {
    if (!this.info) throw new Error("driver not started");
    if (this.complete) {
      this.pair = null;
      this.phase = "complete";
      return;
    }
    for (let i = 0; i < this.info.total; i++) {
      let pair: PairPayload;
      try {
        pair = await this.client.pair(i);
      } catch (err) {
        if (err instanceof PayloadError || err instanceof ApiError) {
          // show the problem; do not advance past an undisplayable pair
          this.pair = null;
          this.phase = "error";
          this.lastError = err.message;
          return;
        }
        throw err;
      }
      if (pair.answered === null) {
        this.pair = pair;
        this.phase = "answering";
        return;
      }
    }
    // the server says something is unanswered but every pair has a
    // choice recorded; trust the per-pair state and refresh
    this.info = await this.client.session();
    this.phase = this.complete ? "complete" : "error";
  }

  /** Submit a choice for the visible pair; queue it if the network fails. */
  async choose(side: Side): Promise<void> {
    if (!this.pair) throw new Error("no pair on screen");
    await this.submit({ index: this.pair.index, side });
  }

  /** Retry a queued choice after a failure. */
  async retry(): Promise<void> {
    if (!this.pending) return;
    await this.submit(this.pending);
  }

  private async submit(choice: PendingChoice): Promise<void> {
    try {
      this.info = await this.client.choose(choice.index, choice.side);
      this.pending = null;
      this.lastError = null;
      await this.advance();
    } catch (err) {
      if (err instanceof ApiError) {
        this.pending = choice;
        this.lastError = err.message;
        return; // stay on the current pair; nothing was lost
      }
      throw err;
    }
  }

  exportPreferences() {
    return this.client.exportPreferences();
  }
}

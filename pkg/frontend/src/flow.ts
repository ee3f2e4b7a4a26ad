// The session loop: poll the pending query, collect an answer, submit,
// repeat until done. Network failures retry with exponential backoff; the
// pull protocol means a resumed loop simply re-fetches the pending query.

import { ApiError, SessionApi } from "./api.js";
import type { Answer, QueryPayload, ResultsJson } from "./api.js";

export type AnswerPolicy = (query: QueryPayload) => Promise<Answer>;

export interface FlowCallbacks {
  onQuery?: (query: QueryPayload, answered: number) => void;
  onAnswered?: (query: QueryPayload, answer: Answer) => void;
  onDone?: (results: ResultsJson) => void;
  onRetry?: (attempt: number, error: unknown) => void;
}

export interface FlowOptions {
  maxRetries?: number;
  retryDelayMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class SessionFlow {
  private answered = 0;
  private stopped = false;

  constructor(
    private api: SessionApi,
    readonly sessionId: string,
    private policy: AnswerPolicy,
    private callbacks: FlowCallbacks = {},
    private options: FlowOptions = {},
  ) {}

  stop(): void {
    this.stopped = true;
  }

  private async withRetry<T>(operation: () => Promise<T>): Promise<T> {
    const maxRetries = this.options.maxRetries ?? 6;
    const baseDelay = this.options.retryDelayMs ?? 500;
    const sleep = this.options.sleep ?? defaultSleep;
    for (let attempt = 0; ; attempt++) {
      try {
        return await operation();
      } catch (error) {
        // Client errors are contract violations, not connectivity blips.
        if (error instanceof ApiError && error.status < 500) throw error;
        if (attempt >= maxRetries) throw error;
        this.callbacks.onRetry?.(attempt + 1, error);
        await sleep(baseDelay * 2 ** attempt);
      }
    }
  }

  async run(): Promise<ResultsJson> {
    while (!this.stopped) {
      const next = await this.withRetry(() => this.api.next(this.sessionId));
      if ("done" in next && next.done) {
        const results = await this.withRetry(() => this.api.results(this.sessionId));
        this.callbacks.onDone?.(results);
        return results;
      }
      const query = next as QueryPayload;
      this.callbacks.onQuery?.(query, this.answered);
      const answer = await this.policy(query);
      try {
        await this.withRetry(() => this.api.answer(this.sessionId, query.query_id, answer));
      } catch (error) {
        // A conflict means this answer already landed (e.g. a retried POST
        // whose first attempt succeeded); the next poll moves us forward.
        if (!(error instanceof ApiError && error.status === 409)) throw error;
      }
      this.answered += 1;
      this.callbacks.onAnswered?.(query, answer);
    }
    throw new Error("session flow stopped");
  }
}

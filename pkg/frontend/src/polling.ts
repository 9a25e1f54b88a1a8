import type { JobStatus } from "./types.js";

export interface PollOptions {
  intervalMs?: number;
  backoffFactor?: number;
  maxIntervalMs?: number;
  timeoutMs?: number;
  onProgress?: (status: JobStatus) => void;
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/**
 * Polls job status endpoints until a terminal state, starting at 1 s and
 * backing off. Concurrent waits on the same eventIdentifier share one
 * polling loop, so a re-rendered component never doubles the request rate.
 */
export class JobPoller {
  private readonly inflight = new Map<string, Promise<JobStatus>>();

  constructor(private readonly defaults: PollOptions = {}) {}

  waitFor(
    eventIdentifier: string,
    fetchStatus: (eventIdentifier: string) => Promise<JobStatus>,
    options: PollOptions = {},
  ): Promise<JobStatus> {
    const existing = this.inflight.get(eventIdentifier);
    if (existing) {
      return existing;
    }
    const merged = { ...this.defaults, ...options };
    const loop = this.run(eventIdentifier, fetchStatus, merged).finally(() => {
      this.inflight.delete(eventIdentifier);
    });
    this.inflight.set(eventIdentifier, loop);
    return loop;
  }

  get activePolls(): number {
    return this.inflight.size;
  }

  private async run(
    eventIdentifier: string,
    fetchStatus: (eventIdentifier: string) => Promise<JobStatus>,
    options: PollOptions,
  ): Promise<JobStatus> {
    const intervalMs = options.intervalMs ?? 1000;
    const backoffFactor = options.backoffFactor ?? 1.5;
    const maxIntervalMs = options.maxIntervalMs ?? 5000;
    const timeoutMs = options.timeoutMs ?? 120_000;
    const startedAt = Date.now();
    let interval = intervalMs;
    for (;;) {
      const status = await fetchStatus(eventIdentifier);
      options.onProgress?.(status);
      if (status.state === "Succeeded" || status.state === "Failed") {
        return status;
      }
      if (Date.now() - startedAt > timeoutMs) {
        throw new Error(`job ${eventIdentifier} still ${status.state} after ${timeoutMs}ms`);
      }
      await sleep(interval);
      interval = Math.min(interval * backoffFactor, maxIntervalMs);
    }
  }
}

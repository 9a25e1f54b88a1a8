import { ApiError, type CmsApi } from "./api.js";
import type { JobPoller } from "./polling.js";
import type { ContentCard, JobStatus, TranscodingInfo } from "./types.js";

export interface ProgressHooks {
  onProgress?: (status: JobStatus) => void;
}

export type AggregationOutcome =
  | { kind: "done"; job: JobStatus; notice: string }
  | { kind: "failed"; job: JobStatus; error: string }
  | { kind: "error"; error: string };

/**
 * Aggregation: submit the selected feed items, then poll to completion.
 * A dead feed or bad selection surfaces as an inline error, not a throw.
 */
export async function aggregationFlow(
  api: CmsApi,
  poller: JobPoller,
  input: { feedUrl: string; selection: Array<number | string>; reference?: string },
  hooks: ProgressHooks = {},
): Promise<AggregationOutcome> {
  let eventIdentifier: string;
  try {
    eventIdentifier = await api.aggregateContent({
      reference: input.reference ?? "webtv-ui",
      feedURL: input.feedUrl,
      selection: input.selection,
    });
  } catch (err) {
    return { kind: "error", error: err instanceof Error ? err.message : String(err) };
  }
  return resumeAggregation(api, poller, eventIdentifier, hooks);
}

/**
 * Pick a submitted aggregation back up by its event identifier; used after
 * a mid-flight page refresh to restore the progress view.
 */
export async function resumeAggregation(
  api: CmsApi,
  poller: JobPoller,
  eventIdentifier: string,
  hooks: ProgressHooks = {},
): Promise<AggregationOutcome> {
  const job = await poller.waitFor(eventIdentifier, (id) => api.aggregationStatus(id), {
    onProgress: hooks.onProgress,
  });
  if (job.state === "Succeeded") {
    return { kind: "done", job, notice: job.detail || "aggregation complete" };
  }
  return { kind: "failed", job, error: job.detail || "aggregation failed" };
}

export type MediationOutcome =
  | { kind: "ready"; location: string; transcoded: boolean }
  | { kind: "original"; location: string }
  | { kind: "failed"; error: string };

/**
 * Mediation: check for an existing variant first; only on a miss ask the
 * user for consent, and only with consent submit a transcode. Declining
 * offers the original. transcodeContent is never reached on any other path.
 */
export async function mediationFlow(
  api: CmsApi,
  poller: JobPoller,
  card: ContentCard,
  info: TranscodingInfo,
  consent: () => boolean | Promise<boolean>,
  hooks: ProgressHooks = {},
): Promise<MediationOutcome> {
  const existing = await api.isExistContent(card.record.crid, info);
  if (existing.exists && existing.location) {
    return { kind: "ready", location: existing.location, transcoded: false };
  }
  if (!(await consent())) {
    return { kind: "original", location: card.record.storageLocation };
  }
  const eventIdentifier = await api.transcodeContent("webtv-ui", card.record.crid, info);
  const job = await poller.waitFor(eventIdentifier, (id) => api.mediationStatus(id), {
    onProgress: hooks.onProgress,
  });
  if (job.state === "Succeeded" && job.resultLocation) {
    return { kind: "ready", location: job.resultLocation, transcoded: true };
  }
  return { kind: "failed", error: job.detail || "transcode failed" };
}

export type DeploymentOutcome =
  | { kind: "shared"; postId: string; contentUrl: string }
  | { kind: "invalid"; hint: string }
  | { kind: "login-required" }
  | { kind: "error"; error: string };

/**
 * Deployment: post a review plus the content link to an SNS sink. An empty
 * review is rejected client-side; a 401 routes the user back to login.
 */
export async function deploymentFlow(
  api: CmsApi,
  input: { contentUrl: string; review: string; sink: string; account: string },
): Promise<DeploymentOutcome> {
  if (!input.review.trim()) {
    return { kind: "invalid", hint: "write a short review before sharing" };
  }
  try {
    const post = await api.share(input.sink, input.account, input.review, input.contentUrl);
    return { kind: "shared", postId: post.postId, contentUrl: post.contentUrl };
  } catch (err) {
    if (err instanceof ApiError && err.status === 401) {
      return { kind: "login-required" };
    }
    return { kind: "error", error: err instanceof Error ? err.message : String(err) };
  }
}

import { describe, expect, it } from "vitest";

import { aggregationFlow, deploymentFlow, mediationFlow, resumeAggregation } from "../src/flows.js";
import { JobPoller } from "../src/polling.js";
import { FakeApi, card } from "./fakes.js";

const fastPoller = () => new JobPoller({ intervalMs: 1, backoffFactor: 1 });

describe("aggregationFlow", () => {
  it("submits then polls to completion", async () => {
    const api = new FakeApi();
    api.pendingPolls = 2;
    const outcome = await aggregationFlow(api, fastPoller(), {
      feedUrl: "/fixtures/feed.xml",
      selection: [0, 1],
    });
    expect(outcome.kind).toBe("done");
    const paths = api.loggedPaths();
    expect(paths[0]).toBe("/api/v1/aggregation/aggregateContent");
    expect(paths.filter((p) => p.startsWith("/api/v1/aggregation/status/"))).toHaveLength(3);
  });

  it("reports a dead feed as an inline error", async () => {
    const api = new FakeApi();
    api.failAggregation = true;
    const outcome = await aggregationFlow(api, fastPoller(), {
      feedUrl: "http://dead.example/feed.xml",
      selection: [0],
    });
    expect(outcome.kind).toBe("error");
    expect(outcome.kind === "error" && outcome.error).toContain("not a feed");
  });

  it("restores progress from the status endpoint after a refresh", async () => {
    const api = new FakeApi();
    api.pendingPolls = 1;
    const eventIdentifier = await api.aggregateContent({
      reference: "ui",
      feedURL: "/fixtures/feed.xml",
      selection: [0],
    });
    // Simulated refresh: a new poller resumes purely from the identifier.
    const outcome = await resumeAggregation(api, fastPoller(), eventIdentifier);
    expect(outcome.kind).toBe("done");
    const submits = api.loggedPaths().filter((p) => p === "/api/v1/aggregation/aggregateContent");
    expect(submits).toHaveLength(1);
  });
});

describe("mediationFlow consent invariant", () => {
  it("plays an existing variant without consent or transcode", async () => {
    const api = new FakeApi();
    api.existing = {
      exists: true,
      location: "/media/201206020002/movie_201206020002_h264.mp4",
      crid: "crid://etri.re.kr/webtv/201206020002",
    };
    let consentAsked = false;
    const outcome = await mediationFlow(
      api,
      fastPoller(),
      card(),
      { deviceId: "iphone-1" },
      () => {
        consentAsked = true;
        return true;
      },
    );
    expect(outcome).toEqual({
      kind: "ready",
      location: "/media/201206020002/movie_201206020002_h264.mp4",
      transcoded: false,
    });
    expect(consentAsked).toBe(false);
    expect(api.loggedPaths()).not.toContain("/api/v1/mediation/transcodeContent");
  });

  it("offers the original when the user declines", async () => {
    const api = new FakeApi();
    const outcome = await mediationFlow(
      api,
      fastPoller(),
      card(),
      { deviceId: "iphone-1" },
      () => false,
    );
    expect(outcome.kind).toBe("original");
    expect(outcome.kind === "original" && outcome.location).toBe(
      "/data/mediator-tmp/201206020001/movie.mp4",
    );
    expect(api.loggedPaths()).not.toContain("/api/v1/mediation/transcodeContent");
  });

  it("transcodes only after a miss plus consent, in that order", async () => {
    const api = new FakeApi();
    api.pendingPolls = 1;
    const outcome = await mediationFlow(
      api,
      fastPoller(),
      card(),
      { deviceId: "iphone-1" },
      () => true,
    );
    expect(outcome.kind).toBe("ready");
    expect(outcome.kind === "ready" && outcome.transcoded).toBe(true);
    const paths = api.loggedPaths();
    const existIndex = paths.indexOf("/api/v1/mediation/isExistContent");
    const transcodeIndex = paths.indexOf("/api/v1/mediation/transcodeContent");
    expect(existIndex).toBeGreaterThanOrEqual(0);
    expect(transcodeIndex).toBeGreaterThan(existIndex);
  });

  it("request log never shows transcode without a preceding existence check", async () => {
    // Exhaustive over the flow's decision points.
    for (const exists of [false, true]) {
      for (const consent of [false, true]) {
        const api = new FakeApi();
        api.existing = exists
          ? { exists: true, location: "/media/x/y.mp4", crid: "crid://a/b/201206020009" }
          : { exists: false, location: null, crid: null };
        await mediationFlow(api, fastPoller(), card(), { deviceId: "iphone-1" }, () => consent);
        const paths = api.loggedPaths();
        const transcodeIndex = paths.indexOf("/api/v1/mediation/transcodeContent");
        if (transcodeIndex !== -1) {
          expect(exists).toBe(false);
          expect(consent).toBe(true);
          expect(paths.slice(0, transcodeIndex)).toContain("/api/v1/mediation/isExistContent");
        }
      }
    }
  });

  it("surfaces a failed transcode", async () => {
    const api = new FakeApi();
    api.failTranscode = true;
    const outcome = await mediationFlow(
      api,
      fastPoller(),
      card(),
      { deviceId: "iphone-1" },
      () => true,
    );
    expect(outcome.kind).toBe("failed");
    expect(outcome.kind === "failed" && outcome.error).toContain("encoder");
  });
});

describe("deploymentFlow", () => {
  it("shares and returns the post id", async () => {
    const api = new FakeApi();
    const outcome = await deploymentFlow(api, {
      contentUrl: "/media/201206020002/movie.mp4",
      review: "loved it",
      sink: "twitter",
      account: "@me",
    });
    expect(outcome).toEqual({
      kind: "shared",
      postId: "twitter-0001",
      contentUrl: "/media/201206020002/movie.mp4",
    });
  });

  it("rejects an empty review before any request", async () => {
    const api = new FakeApi();
    const outcome = await deploymentFlow(api, {
      contentUrl: "/media/x/y.mp4",
      review: "   ",
      sink: "twitter",
      account: "@me",
    });
    expect(outcome.kind).toBe("invalid");
    expect(api.calls).toHaveLength(0);
  });

  it("routes 401 back to login", async () => {
    const api = new FakeApi();
    api.shareError = { status: 401 };
    const outcome = await deploymentFlow(api, {
      contentUrl: "/media/x/y.mp4",
      review: "fine",
      sink: "me2day",
      account: "@me",
    });
    expect(outcome.kind).toBe("login-required");
  });
});

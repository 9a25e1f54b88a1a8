/**
 * End-to-end check against the real backend: seeds a demo data directory,
 * starts the service as a child process, and drives the browser flows
 * (aggregate -> mediate-with-consent -> share) through the real ApiClient.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { buildContentCards } from "../src/cards.js";
import { aggregationFlow, deploymentFlow, mediationFlow } from "../src/flows.js";
import { JobPoller } from "../src/polling.js";

const SERVICE_BIN = "webtv-cms";

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

async function waitForService(base: string, timeoutMs = 15000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const response = await fetch(`${base}/fixtures/feed.xml`);
      if (response.ok) {
        return;
      }
    } catch {
      /* not up yet */
    }
    if (Date.now() > deadline) {
      throw new Error("service did not come up");
    }
    await new Promise((r) => setTimeout(r, 100));
  }
}

let child: ChildProcess | null = null;
let dataDir = "";
let base = "";

beforeAll(async () => {
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  dataDir = mkdtempSync(join(tmpdir(), "webtv-ui-"));
  const seeded = spawnSync(
    SERVICE_BIN,
    ["seed-demo", "--data-dir", dataDir, "--base-url", base],
    { encoding: "utf-8" },
  );
  if (seeded.status !== 0) {
    throw new Error(`seed-demo failed: ${seeded.stderr}`);
  }
  child = spawn(
    SERVICE_BIN,
    [
      "serve",
      "--data-dir", dataDir,
      "--user-file", join(dataDir, "users.txt"),
      "--port", String(port),
    ],
    { stdio: "ignore" },
  );
  await waitForService(base);
}, 30000);

afterAll(async () => {
  if (child) {
    child.kill("SIGTERM");
    await new Promise((resolve) => child!.once("exit", resolve));
  }
  if (dataDir) {
    rmSync(dataDir, { recursive: true, force: true });
  }
});

describe("flows against the live service", () => {
  const poller = new JobPoller({ intervalMs: 50, backoffFactor: 1 });

  it("completes aggregation, consent-gated mediation, and sharing", async () => {
    const api = new ApiClient(base);
    const session = await api.login("demo", "demo1234");
    expect(session.variant).toBe("full");

    const entries = await api.fetchFeed(`${base}/fixtures/feed.xml`);
    expect(entries.length).toBe(3);

    const aggregated = await aggregationFlow(api, poller, {
      feedUrl: `${base}/fixtures/feed.xml`,
      selection: [0, 1],
    });
    expect(aggregated.kind).toBe("done");

    const [records, profiles] = await Promise.all([api.listContent(), api.listProfiles()]);
    const cards = await buildContentCards(api, records, profiles);
    expect(cards.length).toBe(2);
    const card = cards[0];
    expect(card.variants.every((v) => !v.exists)).toBe(true);

    let consentAsked = 0;
    const mediated = await mediationFlow(
      api,
      poller,
      card,
      { deviceId: "iphone-1" },
      () => {
        consentAsked += 1;
        return true;
      },
    );
    expect(consentAsked).toBe(1);
    expect(mediated.kind).toBe("ready");
    if (mediated.kind !== "ready") {
      return;
    }

    // Consent invariant, audited on the real request log.
    const paths = api.requestLog.map((r) => r.path);
    const transcodeIndex = paths.indexOf("/api/v1/mediation/transcodeContent");
    expect(transcodeIndex).toBeGreaterThan(-1);
    expect(paths.slice(0, transcodeIndex)).toContain("/api/v1/mediation/isExistContent");

    // A second user on the same profile gets it instantly, no consent prompt.
    const otherApi = new ApiClient(base);
    await otherApi.login("demo", "demo1234");
    const otherCards = await buildContentCards(
      otherApi,
      await otherApi.listContent(),
      await otherApi.listProfiles(),
    );
    const sameCard = otherCards.find((c) => c.record.crid === card.record.crid)!;
    const instant = await mediationFlow(
      otherApi,
      poller,
      sameCard,
      { deviceId: "iphone-1" },
      () => {
        throw new Error("consent must not be requested for an existing variant");
      },
    );
    expect(instant.kind).toBe("ready");
    expect(instant.kind === "ready" && instant.transcoded).toBe(false);
    expect(otherApi.requestLog.map((r) => r.path)).not.toContain(
      "/api/v1/mediation/transcodeContent",
    );

    // Publish the variant, then share it.
    const uploadId = await api.uploadContent("ui", mediated.location, "media");
    const uploadJob = await poller.waitFor(uploadId, (id) => api.deploymentStatus(id));
    expect(uploadJob.state).toBe("Succeeded");
    const publicUrl = uploadJob.resultLocation!;
    const served = await fetch(`${base}${publicUrl}`);
    expect(served.status).toBe(200);

    const shared = await deploymentFlow(api, {
      contentUrl: publicUrl,
      review: "crisp on a small screen",
      sink: "twitter",
      account: "@demo",
    });
    expect(shared.kind).toBe("shared");
  }, 30000);

  it("serves the mobile variant for an iphone user-agent", async () => {
    const response = await fetch(`${base}/api/v1/login`, {
      method: "POST",
      headers: {
        "Content-Type": "application/json",
        "User-Agent": "Mozilla/5.0 (iPhone; CPU iPhone OS 5_0 like Mac OS X)",
      },
      body: JSON.stringify({ userId: "demo", password: "demo1234" }),
    });
    const session = await response.json();
    expect(session.deviceClass).toBe("iPhone");
    expect(session.variant).toBe("mobile");
  });

  it("rejects anonymous enabler calls", async () => {
    const response = await fetch(`${base}/api/v1/content`);
    expect(response.status).toBe(401);
  });
});

import { ApiClient, ApiError } from "./api.js";
import { buildContentCards } from "./cards.js";
import { deploymentFlow, mediationFlow, resumeAggregation } from "./flows.js";
import { JobPoller } from "./polling.js";
import type { ContentCard, JobStatus, UiSession } from "./types.js";

const PENDING_AGGREGATION_KEY = "webtv.pendingAggregation";

const api = new ApiClient("");
const poller = new JobPoller({ intervalMs: 1000 });
let session: UiSession | null = null;

const $ = <T extends HTMLElement>(selector: string): T => {
  const el = document.querySelector<T>(selector);
  if (!el) {
    throw new Error(`missing element ${selector}`);
  }
  return el;
};

function setStatus(text: string): void {
  $("#status").textContent = text;
}

function progressReporter(prefix: string): (status: JobStatus) => void {
  return (status) => setStatus(`${prefix}: ${status.state.toLowerCase()}`);
}

function applyVariant(variant: "full" | "mobile"): void {
  document.body.classList.remove("layout-full", "layout-mobile");
  document.body.classList.add(variant === "mobile" ? "layout-mobile" : "layout-full");
}

async function handleLogin(event: Event): Promise<void> {
  event.preventDefault();
  const userId = $<HTMLInputElement>("#login-user").value;
  const password = $<HTMLInputElement>("#login-password").value;
  try {
    session = await api.login(userId, password);
  } catch (err) {
    setStatus(err instanceof ApiError ? `login failed: ${err.message}` : "login failed");
    return;
  }
  applyVariant(session.variant);
  $("#login-panel").hidden = true;
  $("#app-panel").hidden = false;
  setStatus(`signed in as ${session.userId} (${session.deviceClass})`);
  await restorePendingAggregation();
  await refreshLibrary();
}

async function restorePendingAggregation(): Promise<void> {
  const pending = sessionStorage.getItem(PENDING_AGGREGATION_KEY);
  if (!pending) {
    return;
  }
  setStatus("restoring aggregation progress...");
  const outcome = await resumeAggregation(api, poller, pending, {
    onProgress: progressReporter("aggregation"),
  });
  sessionStorage.removeItem(PENDING_AGGREGATION_KEY);
  setStatus(outcome.kind === "done" ? outcome.notice : `aggregation: ${outcome.kind}`);
}

async function handleLoadFeed(): Promise<void> {
  const url = $<HTMLInputElement>("#feed-url").value;
  const list = $("#feed-entries");
  list.textContent = "";
  try {
    const entries = await api.fetchFeed(url);
    entries.forEach((entry, index) => {
      const item = document.createElement("li");
      const label = document.createElement("label");
      const checkbox = document.createElement("input");
      checkbox.type = "checkbox";
      checkbox.value = String(index);
      label.append(checkbox, ` ${entry.title || entry.contentUrl}`);
      item.append(label);
      list.append(item);
    });
    $("#aggregate-button").hidden = entries.length === 0;
  } catch (err) {
    const item = document.createElement("li");
    item.className = "error";
    item.textContent = err instanceof Error ? err.message : "feed failed";
    list.append(item);
  }
}

async function handleAggregate(): Promise<void> {
  const selection = Array.from(
    $("#feed-entries").querySelectorAll<HTMLInputElement>("input:checked"),
  ).map((box) => Number(box.value));
  if (selection.length === 0) {
    setStatus("select at least one item");
    return;
  }
  const feedUrl = $<HTMLInputElement>("#feed-url").value;
  setStatus("aggregating...");
  let eventIdentifier: string;
  try {
    eventIdentifier = await api.aggregateContent({
      reference: "webtv-ui",
      feedURL: feedUrl,
      selection,
    });
  } catch (err) {
    setStatus(`aggregation failed: ${err instanceof Error ? err.message : err}`);
    return;
  }
  // Survives a page refresh: restorePendingAggregation picks the poll back up.
  sessionStorage.setItem(PENDING_AGGREGATION_KEY, eventIdentifier);
  const outcome = await resumeAggregation(api, poller, eventIdentifier, {
    onProgress: progressReporter("aggregation"),
  });
  sessionStorage.removeItem(PENDING_AGGREGATION_KEY);
  if (outcome.kind === "done") {
    setStatus(outcome.notice);
    await refreshLibrary();
  } else {
    setStatus(`aggregation failed: ${outcome.error}`);
  }
}

async function ensurePublished(location: string): Promise<string | null> {
  if (location.startsWith("/media/")) {
    return location;
  }
  const eventIdentifier = await api.uploadContent("webtv-ui", location, "media");
  const job = await poller.waitFor(eventIdentifier, (id) => api.deploymentStatus(id), {
    onProgress: progressReporter("publishing"),
  });
  return job.state === "Succeeded" ? job.resultLocation : null;
}

async function watchCard(card: ContentCard, deviceId: string): Promise<void> {
  const outcome = await mediationFlow(
    api,
    poller,
    card,
    { deviceId },
    () => window.confirm(`No ${deviceId} version of "${card.record.title}" yet. Convert it now?`),
    { onProgress: progressReporter("transcoding") },
  );
  if (outcome.kind === "failed") {
    setStatus(`mediation failed: ${outcome.error}`);
    return;
  }
  if (outcome.kind === "original") {
    setStatus("playing the original version");
  }
  const publicUrl = await ensurePublished(outcome.location);
  if (!publicUrl) {
    setStatus("could not publish the content for playback");
    return;
  }
  const player = $<HTMLVideoElement>("#player");
  player.src = publicUrl;
  player.hidden = false;
  player.play().catch(() => {
    /* autoplay may be blocked; controls remain */
  });
  setStatus(`ready: ${publicUrl}`);
  await refreshLibrary();
}

async function shareCard(card: ContentCard): Promise<void> {
  const review = $<HTMLTextAreaElement>("#share-review").value;
  const sink = $<HTMLSelectElement>("#share-sink").value;
  const account = $<HTMLInputElement>("#share-account").value || "@viewer";
  const published = card.record.storageLocation.startsWith("/media/")
    ? card.record.storageLocation
    : card.variants.find((v) => v.exists && v.location?.startsWith("/media/"))?.location;
  if (!published) {
    setStatus("publish the content before sharing");
    return;
  }
  const outcome = await deploymentFlow(api, { contentUrl: published, review, sink, account });
  switch (outcome.kind) {
    case "shared":
      setStatus(`shared as ${outcome.postId}`);
      break;
    case "invalid":
      setStatus(outcome.hint);
      break;
    case "login-required":
      $("#login-panel").hidden = false;
      $("#app-panel").hidden = true;
      setStatus("session expired, sign in again");
      break;
    default:
      setStatus(`share failed: ${outcome.error}`);
  }
}

async function refreshLibrary(): Promise<void> {
  const [records, profiles] = await Promise.all([api.listContent(), api.listProfiles()]);
  const cards = await buildContentCards(api, records, profiles);
  const container = $("#library");
  container.textContent = "";
  for (const card of cards) {
    const box = document.createElement("article");
    box.className = "card";
    const title = document.createElement("h3");
    title.textContent = card.record.title;
    const badges = document.createElement("p");
    badges.className = "badges";
    badges.textContent = card.variants
      .map((v) => `${v.profile.deviceId}: ${v.exists ? "ready" : "on demand"}`)
      .join("  ·  ");
    const actions = document.createElement("p");
    for (const variant of card.variants) {
      const button = document.createElement("button");
      button.textContent = `Watch on ${variant.profile.deviceClass}`;
      button.addEventListener("click", () => void watchCard(card, variant.profile.deviceId));
      actions.append(button);
    }
    const shareButton = document.createElement("button");
    shareButton.textContent = "Share";
    shareButton.addEventListener("click", () => void shareCard(card));
    actions.append(shareButton);
    box.append(title, badges, actions);
    container.append(box);
  }
}

export function boot(): void {
  applyVariant(
    navigator.userAgent.toLowerCase().includes("iphone") ? "mobile" : "full",
  );
  $("#login-form").addEventListener("submit", (event) => void handleLogin(event));
  $("#load-feed").addEventListener("click", () => void handleLoadFeed());
  $("#aggregate-button").addEventListener("click", () => void handleAggregate());
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  boot();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", boot);
}

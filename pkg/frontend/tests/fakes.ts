import type { CmsApi, LoggedRequest } from "../src/api.js";
import type {
  AggregateRequest,
  ContentCard,
  ContentRecord,
  DeviceProfile,
  ExistResult,
  FeedEntry,
  JobStatus,
  SharePost,
  TranscodingInfo,
  UiSession,
} from "../src/types.js";

let counter = 0;
const nextId = () => `evt-${++counter}`;

export function record(overrides: Partial<ContentRecord> = {}): ContentRecord {
  return {
    crid: "crid://etri.re.kr/webtv/201206020001",
    title: "movie",
    sourceUrl: "http://feeds.example/movie.mp4",
    storageLocation: "/data/mediator-tmp/201206020001/movie.mp4",
    originalCrid: null,
    profileHash: null,
    createdAt: "2012-06-02T00:00:00+00:00",
    updatedAt: null,
    viewCount: 0,
    mediationCount: 0,
    ...overrides,
  };
}

export function card(overrides: Partial<ContentRecord> = {}): ContentCard {
  return { record: record(overrides), variants: [] };
}

function job(state: JobStatus["state"], resultLocation: string | null = null): JobStatus {
  return {
    eventIdentifier: nextId(),
    kind: "Transcode",
    state,
    reference: "test",
    detail: "",
    resultLocation,
  };
}

/**
 * In-memory stand-in for the service with a request log the invariant
 * tests audit. Jobs complete after `pendingPolls` status reads.
 */
export class FakeApi implements CmsApi {
  readonly calls: LoggedRequest[] = [];
  existing: ExistResult = { exists: false, location: null, crid: null };
  transcodeResult = "/data/mediator-tmp/201206020002/movie_201206020002_h264.mp4";
  pendingPolls = 0;
  failAggregation = false;
  failTranscode = false;
  shareError: { status: number } | null = null;
  private readonly pollCountdown = new Map<string, number>();

  private log(method: string, path: string, body?: unknown): void {
    this.calls.push({ method, path, body });
  }

  loggedPaths(): string[] {
    return this.calls.map((c) => c.path);
  }

  async login(userId: string): Promise<UiSession> {
    this.log("POST", "/api/v1/login");
    return { token: "t", userId, deviceClass: "PC", variant: "full" };
  }

  async fetchFeed(url: string): Promise<FeedEntry[]> {
    this.log("GET", `/api/v1/feeds?url=${url}`);
    return [
      { title: "one", contentUrl: "http://x/one.mp4", mimeTypeHint: "video/mp4", sizeHint: null },
    ];
  }

  async aggregateContent(request: AggregateRequest): Promise<string> {
    this.log("POST", "/api/v1/aggregation/aggregateContent", request);
    if (this.failAggregation) {
      throw new Error("not a feed");
    }
    const id = nextId();
    this.pollCountdown.set(id, this.pendingPolls);
    return id;
  }

  async aggregationStatus(id: string): Promise<JobStatus> {
    this.log("GET", `/api/v1/aggregation/status/${id}`);
    return this.settle(id, "aggregated 2 items", "/data/mediator-tmp");
  }

  async isExistContent(src: string, info: TranscodingInfo): Promise<ExistResult> {
    this.log("POST", "/api/v1/mediation/isExistContent", { src, info });
    return this.existing;
  }

  async transcodeContent(reference: string, src: string, info: TranscodingInfo): Promise<string> {
    this.log("POST", "/api/v1/mediation/transcodeContent", { reference, src, info });
    const id = nextId();
    this.pollCountdown.set(id, this.pendingPolls);
    return id;
  }

  async mediationStatus(id: string): Promise<JobStatus> {
    this.log("GET", `/api/v1/mediation/status/${id}`);
    if (this.failTranscode) {
      return { ...job("Failed"), eventIdentifier: id, detail: "encoder exploded" };
    }
    return this.settle(id, "mediated", this.transcodeResult);
  }

  async uploadContent(reference: string, src: string, dst: string): Promise<string> {
    this.log("POST", "/api/v1/deployment/uploadContent", { reference, src, dst });
    const id = nextId();
    this.pollCountdown.set(id, this.pendingPolls);
    return id;
  }

  async deploymentStatus(id: string): Promise<JobStatus> {
    this.log("GET", `/api/v1/deployment/status/${id}`);
    return this.settle(id, "published", "/media/201206020002/movie_201206020002_h264.mp4");
  }

  async share(sink: string, account: string, review: string, contentUrl: string): Promise<SharePost> {
    this.log("POST", "/api/v1/deployment/share", { sink, account, review, contentUrl });
    if (this.shareError) {
      const { ApiError } = await import("../src/api.js");
      throw new ApiError(this.shareError.status, "AuthenticationError", "no session");
    }
    return { postId: `${sink}-0001`, account, review, contentUrl, postedAt: "now" };
  }

  async listContent(): Promise<ContentRecord[]> {
    this.log("GET", "/api/v1/content");
    return [record()];
  }

  async listProfiles(): Promise<DeviceProfile[]> {
    this.log("GET", "/api/v1/profiles");
    return [
      {
        deviceId: "iphone-1",
        deviceClass: "iPhone",
        width: 960,
        height: 640,
        videoEncoding: "H.264",
        audioEncoding: "faac",
        profileHash: "960x640-h264-faac",
      },
    ];
  }

  private settle(id: string, detail: string, resultLocation: string): JobStatus {
    const remaining = this.pollCountdown.get(id) ?? 0;
    if (remaining > 0) {
      this.pollCountdown.set(id, remaining - 1);
      return { ...job("Running"), eventIdentifier: id };
    }
    return { ...job("Succeeded", resultLocation), eventIdentifier: id, detail };
  }
}

import type {
  AggregateRequest,
  ContentRecord,
  DeviceProfile,
  ExistResult,
  FeedEntry,
  JobStatus,
  SharePost,
  TranscodingInfo,
  UiSession,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly kind: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface LoggedRequest {
  method: string;
  path: string;
  body?: unknown;
}

/** The surface the flows consume; fakes in tests implement the same shape. */
export interface CmsApi {
  login(userId: string, password: string): Promise<UiSession>;
  fetchFeed(url: string, credentials?: { id: string; password: string }): Promise<FeedEntry[]>;
  aggregateContent(request: AggregateRequest): Promise<string>;
  aggregationStatus(eventIdentifier: string): Promise<JobStatus>;
  isExistContent(srcContentURL: string, info: TranscodingInfo): Promise<ExistResult>;
  transcodeContent(reference: string, srcContentURL: string, info: TranscodingInfo): Promise<string>;
  mediationStatus(eventIdentifier: string): Promise<JobStatus>;
  uploadContent(reference: string, srcLocation: string, dstLocation: string): Promise<string>;
  deploymentStatus(eventIdentifier: string): Promise<JobStatus>;
  share(sink: string, account: string, review: string, contentUrl: string): Promise<SharePost>;
  listContent(): Promise<ContentRecord[]>;
  listProfiles(): Promise<DeviceProfile[]>;
}

/**
 * Thin fetch wrapper around the service API. Every request is appended to
 * `requestLog`, which the test harness audits (e.g. to prove no transcode
 * call happens without a prior existence check or explicit consent).
 */
export class ApiClient implements CmsApi {
  token: string | null = null;
  readonly requestLog: LoggedRequest[] = [];

  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    this.requestLog.push({ method, path, body });
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) {
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    let payload: unknown = null;
    try {
      payload = text ? JSON.parse(text) : null;
    } catch {
      payload = null;
    }
    if (!response.ok) {
      const data = (payload ?? {}) as { error?: string; detail?: unknown };
      throw new ApiError(
        response.status,
        data.error ?? "HttpError",
        typeof data.detail === "string" ? data.detail : `${method} ${path} -> ${response.status}`,
      );
    }
    return payload as T;
  }

  async login(userId: string, password: string): Promise<UiSession> {
    const session = await this.request<UiSession>("POST", "/api/v1/login", { userId, password });
    this.token = session.token;
    return session;
  }

  async fetchFeed(url: string, credentials?: { id: string; password: string }): Promise<FeedEntry[]> {
    const params = new URLSearchParams({ url });
    if (credentials) {
      params.set("id", credentials.id);
      params.set("password", credentials.password);
    }
    const data = await this.request<{ entries: FeedEntry[] }>(
      "GET",
      `/api/v1/feeds?${params.toString()}`,
    );
    return data.entries;
  }

  async aggregateContent(request: AggregateRequest): Promise<string> {
    const data = await this.request<{ eventIdentifier: string }>(
      "POST",
      "/api/v1/aggregation/aggregateContent",
      request,
    );
    return data.eventIdentifier;
  }

  aggregationStatus(eventIdentifier: string): Promise<JobStatus> {
    return this.request("GET", `/api/v1/aggregation/status/${eventIdentifier}`);
  }

  isExistContent(srcContentURL: string, info: TranscodingInfo): Promise<ExistResult> {
    return this.request("POST", "/api/v1/mediation/isExistContent", {
      srcContentURL,
      transcodingInfo: info,
    });
  }

  async transcodeContent(
    reference: string,
    srcContentURL: string,
    info: TranscodingInfo,
  ): Promise<string> {
    const data = await this.request<{ eventIdentifier: string }>(
      "POST",
      "/api/v1/mediation/transcodeContent",
      { reference, srcContentURL, transcodingInfo: info },
    );
    return data.eventIdentifier;
  }

  mediationStatus(eventIdentifier: string): Promise<JobStatus> {
    return this.request("GET", `/api/v1/mediation/status/${eventIdentifier}`);
  }

  async uploadContent(reference: string, srcLocation: string, dstLocation: string): Promise<string> {
    const data = await this.request<{ eventIdentifier: string }>(
      "POST",
      "/api/v1/deployment/uploadContent",
      { reference, srcLocation, dstLocation },
    );
    return data.eventIdentifier;
  }

  deploymentStatus(eventIdentifier: string): Promise<JobStatus> {
    return this.request("GET", `/api/v1/deployment/status/${eventIdentifier}`);
  }

  share(sink: string, account: string, review: string, contentUrl: string): Promise<SharePost> {
    return this.request("POST", "/api/v1/deployment/share", { sink, account, review, contentUrl });
  }

  async listContent(): Promise<ContentRecord[]> {
    const data = await this.request<{ records: ContentRecord[] }>("GET", "/api/v1/content");
    return data.records;
  }

  async listProfiles(): Promise<DeviceProfile[]> {
    const data = await this.request<{ profiles: DeviceProfile[] }>("GET", "/api/v1/profiles");
    return data.profiles;
  }
}

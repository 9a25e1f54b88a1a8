/** Wire shapes of the CMS HTTP API. Field names mirror the service JSON. */

export type DeviceClass = "PC" | "iPad" | "iPhone";
export type PageVariant = "full" | "mobile";
export type JobState = "Pending" | "Running" | "Succeeded" | "Failed";

export interface UiSession {
  token: string;
  userId: string;
  deviceClass: DeviceClass;
  variant: PageVariant;
}

export interface FeedEntry {
  title: string;
  contentUrl: string;
  mimeTypeHint: string | null;
  sizeHint: number | null;
}

export interface JobStatus {
  eventIdentifier: string;
  kind: string;
  state: JobState;
  reference: string;
  detail: string;
  resultLocation: string | null;
}

export interface ContentRecord {
  crid: string;
  title: string;
  sourceUrl: string;
  storageLocation: string;
  originalCrid: string | null;
  profileHash: string | null;
  createdAt: string;
  updatedAt: string | null;
  viewCount: number;
  mediationCount: number;
}

export interface DeviceProfile {
  deviceId: string;
  deviceClass: DeviceClass;
  width: number;
  height: number;
  videoEncoding: string;
  audioEncoding: string;
  profileHash: string;
}

export interface TranscodingInfo {
  deviceId?: string;
  width?: number;
  height?: number;
  videoEncoding?: string;
  audioEncoding?: string;
}

export interface ExistResult {
  exists: boolean;
  location: string | null;
  crid: string | null;
}

export interface SharePost {
  postId: string;
  account: string;
  review: string;
  contentUrl: string;
  postedAt: string;
}

export interface AggregateRequest {
  reference: string;
  feedURL: string;
  selection: Array<number | string>;
  id?: string;
  password?: string;
}

/**
 * View model for one content item: the record plus, per device profile,
 * whether a transcoded variant already exists.
 */
export interface ContentCard {
  record: ContentRecord;
  variants: Array<{ profile: DeviceProfile; exists: boolean; location: string | null }>;
}

import type { CmsApi } from "./api.js";
import type { ContentCard, ContentRecord, DeviceProfile } from "./types.js";

/**
 * Assemble content cards for the originals in the library: one existence
 * check per (original, profile) pair tells the card which variants are
 * instantly playable and which would need a transcode.
 */
export async function buildContentCards(
  api: CmsApi,
  records: ContentRecord[],
  profiles: DeviceProfile[],
): Promise<ContentCard[]> {
  const originals = records.filter((r) => r.originalCrid === null);
  return Promise.all(
    originals.map(async (record) => {
      const variants = await Promise.all(
        profiles.map(async (profile) => {
          const result = await api.isExistContent(record.crid, { deviceId: profile.deviceId });
          return { profile, exists: result.exists, location: result.location };
        }),
      );
      return { record, variants };
    }),
  );
}

export function variantLocation(card: ContentCard, deviceId: string): string | null {
  const entry = card.variants.find((v) => v.profile.deviceId === deviceId);
  return entry?.exists ? entry.location : null;
}

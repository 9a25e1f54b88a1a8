import type { DeviceClass, PageVariant } from "./types.js";

/** Client-side mirror of the service's user-agent classification rule. */
export function classifyUserAgent(userAgent: string): DeviceClass {
  const ua = userAgent.toLowerCase();
  if (ua.includes("iphone") || ua.includes("ipod")) {
    return "iPhone";
  }
  if (ua.includes("ipad")) {
    return "iPad";
  }
  return "PC";
}

/** iPhone-class devices get the mobile page; PC and iPad share the full one. */
export function variantFor(deviceClass: DeviceClass): PageVariant {
  return deviceClass === "iPhone" ? "mobile" : "full";
}

export function variantForUserAgent(userAgent: string): PageVariant {
  return variantFor(classifyUserAgent(userAgent));
}

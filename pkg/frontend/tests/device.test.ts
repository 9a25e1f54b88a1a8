import { describe, expect, it } from "vitest";

import { classifyUserAgent, variantFor, variantForUserAgent } from "../src/device.js";

describe("device classification", () => {
  it("recognizes iPhone and iPod as iPhone-class", () => {
    expect(classifyUserAgent("Mozilla/5.0 (iPhone; CPU iPhone OS 5_0)")).toBe("iPhone");
    expect(classifyUserAgent("Mozilla/5.0 (iPod touch)")).toBe("iPhone");
  });

  it("recognizes iPad", () => {
    expect(classifyUserAgent("Mozilla/5.0 (iPad; CPU OS 5_0)")).toBe("iPad");
  });

  it("defaults to PC", () => {
    expect(classifyUserAgent("")).toBe("PC");
    expect(classifyUserAgent("Mozilla/5.0 (Windows NT 10.0)")).toBe("PC");
  });

  it("is case-insensitive", () => {
    expect(classifyUserAgent("IPHONE")).toBe("iPhone");
  });

  it("an iphone user-agent yields the mobile layout", () => {
    expect(variantForUserAgent("Mozilla/5.0 (iPhone)")).toBe("mobile");
  });

  it("PC and iPad share the full layout", () => {
    expect(variantFor("PC")).toBe("full");
    expect(variantFor("iPad")).toBe("full");
    expect(variantFor("iPhone")).toBe("mobile");
  });
});

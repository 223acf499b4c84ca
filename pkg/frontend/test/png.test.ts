import { describe, expect, it } from "vitest";

import { encodePng, pngDimensions } from "../src/png.js";

const SIGNATURE = [0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a];

function solidRgba(width: number, height: number, rgba: [number, number, number, number]): Uint8Array {
  const buf = new Uint8Array(width * height * 4);
  for (let i = 0; i < width * height; i += 1) buf.set(rgba, i * 4);
  return buf;
}

describe("png encoding", () => {
  it("emits the signature and declared dimensions", () => {
    const png = encodePng(3, 2, solidRgba(3, 2, [10, 20, 30, 255]));
    for (let i = 0; i < SIGNATURE.length; i += 1) expect(png[i]).toBe(SIGNATURE[i]);
    expect(pngDimensions(png)).toEqual({ width: 3, height: 2 });
  });

  it("is deterministic for identical input", () => {
    const pixels = new Uint8Array(16 * 9 * 4);
    for (let i = 0; i < pixels.length; i += 1) pixels[i] = (i * 37) % 256;
    const a = encodePng(16, 9, pixels.slice());
    const b = encodePng(16, 9, pixels.slice());
    expect(Buffer.from(a).equals(Buffer.from(b))).toBe(true);
  });

  it("distinguishes different pixel content", () => {
    const a = encodePng(4, 4, solidRgba(4, 4, [0, 0, 0, 255]));
    const b = encodePng(4, 4, solidRgba(4, 4, [1, 0, 0, 255]));
    expect(Buffer.from(a).equals(Buffer.from(b))).toBe(false);
  });

  it("rejects a pixel buffer of the wrong size", () => {
    expect(() => encodePng(2, 2, new Uint8Array(15))).toThrowError(/pixel buffer/);
  });

  it("rejects non-positive dimensions", () => {
    expect(() => encodePng(0, 2, new Uint8Array(0))).toThrowError(/dimensions/);
  });

  it("rejects reading dimensions from a non-png buffer", () => {
    expect(() => pngDimensions(Buffer.from([1, 2, 3]))).toThrowError(/png/i);
  });
});

/**
 * Minimal deterministic PNG encoder (8-bit RGBA, no ancillary chunks).
 *
 * The output of {@link encodePng} depends only on the pixel buffer and the
 * dimensions: rows use filter type 0 and the stream is compressed with
 * zlib at a fixed level, so re-encoding identical pixels yields identical
 * bytes — which is what makes rendered figures reproducible byte-for-byte.
 */

import { deflateSync, constants as zconst } from "node:zlib";

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n += 1) {
    let c = n;
    for (let k = 0; k < 8; k += 1) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(buf: Uint8Array): number {
  let c = 0xffffffff;
  for (let i = 0; i < buf.length; i += 1) {
    c = CRC_TABLE[(c ^ buf[i]) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Uint8Array): Buffer {
  const out = Buffer.alloc(12 + payload.length);
  out.writeUInt32BE(payload.length, 0);
  out.write(type, 4, "ascii");
  Buffer.from(payload).copy(out, 8);
  const body = out.subarray(4, 8 + payload.length);
  out.writeUInt32BE(crc32(body), 8 + payload.length);
  return out;
}

/**
 * Encode an opaque RGBA pixel buffer (length `4 * width * height`,
 * row-major, top row first) as a PNG file image.
 */
export function encodePng(width: number, height: number, rgba: Uint8Array): Buffer {
  if (width <= 0 || height <= 0 || !Number.isInteger(width) || !Number.isInteger(height)) {
    throw new Error(`invalid image dimensions ${width}x${height}`);
  }
  if (rgba.length !== 4 * width * height) {
    throw new Error(`pixel buffer has ${rgba.length} bytes, expected ${4 * width * height}`);
  }

  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 6; // color type: truecolor with alpha
  ihdr[10] = 0; // compression
  ihdr[11] = 0; // filter method
  ihdr[12] = 0; // interlace: none

  // Raw scanlines, each prefixed by filter byte 0 (None).
  const stride = 4 * width;
  const raw = Buffer.alloc((stride + 1) * height);
  for (let y = 0; y < height; y += 1) {
    raw[y * (stride + 1)] = 0;
    Buffer.from(rgba.buffer, rgba.byteOffset + y * stride, stride).copy(raw, y * (stride + 1) + 1);
  }
  const idat = deflateSync(raw, {
    level: 9,
    memLevel: 9,
    strategy: zconst.Z_DEFAULT_STRATEGY,
  });

  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk("IHDR", ihdr),
    chunk("IDAT", idat),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

/** Read back the dimensions of a PNG produced by {@link encodePng}. */
export function pngDimensions(png: Buffer): { width: number; height: number } {
  if (png.length < 24 || png.readUInt32BE(0) !== 0x89504e47) {
    throw new Error("not a PNG file");
  }
  return { width: png.readUInt32BE(16), height: png.readUInt32BE(20) };
}

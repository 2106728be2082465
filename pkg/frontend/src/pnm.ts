// Binary netpbm I/O matching the watermarking toolkit's conventions:
// P5 at 8 or 16 bit and 8-bit P6 in (color collapses to BT.601 luma),
// 8-bit P5 out. Samples normalize to [0, 1] float.

import * as fs from "node:fs";

import { IoError } from "./errors.js";

export interface GrayImage {
  width: number;
  height: number;
  data: Float64Array; // row-major, values in [0, 1]
}

const LUMA = [0.299, 0.587, 0.114];

function isSpace(byte: number): boolean {
  // ' ' \t \n \v \f \r
  return byte === 0x20 || (byte >= 0x09 && byte <= 0x0d);
}

/** Next header token, skipping whitespace and '#' comment lines. */
function readToken(data: Uint8Array, pos: number): [string, number] {
  const n = data.length;
  while (pos < n) {
    if (data[pos] === 0x23) {
      while (pos < n && data[pos] !== 0x0a) pos += 1;
    } else if (isSpace(data[pos])) {
      pos += 1;
    } else {
      break;
    }
  }
  const start = pos;
  while (pos < n && !isSpace(data[pos])) pos += 1;
  if (start === pos) throw new IoError("truncated netpbm header");
  return [Buffer.from(data.slice(start, pos)).toString("ascii"), pos];
}

function parseHeader(data: Uint8Array): [string, number, number, number, number] {
  let pos = 0;
  let magic: string;
  [magic, pos] = readToken(data, pos);
  if (magic !== "P5" && magic !== "P6") {
    throw new IoError(`unsupported netpbm magic ${JSON.stringify(magic)} (want P5 or P6)`);
  }
  const fields: number[] = [];
  for (let i = 0; i < 3; i += 1) {
    let tok: string;
    [tok, pos] = readToken(data, pos);
    if (!/^[0-9]+$/.test(tok)) {
      throw new IoError(`malformed netpbm header token ${JSON.stringify(tok)}`);
    }
    fields.push(Number(tok));
  }
  const [width, height, maxval] = fields;
  if (width < 1 || height < 1) throw new IoError(`invalid dimensions ${width}x${height}`);
  if (maxval !== 255 && maxval !== 65535) {
    throw new IoError(`unsupported maxval ${maxval} (want 255 or 65535)`);
  }
  // exactly one whitespace byte separates the header from the samples
  if (pos >= data.length || !isSpace(data[pos])) {
    throw new IoError("missing separator after netpbm header");
  }
  return [magic, width, height, maxval, pos + 1];
}

export function decodePnm(data: Uint8Array): GrayImage {
  const [magic, width, height, maxval, pos] = parseHeader(data);
  const n = width * height;
  const out = new Float64Array(n);
  if (magic === "P6") {
    if (maxval !== 255) throw new IoError("16-bit P6 input is not supported");
    if (data.length - pos < n * 3) throw new IoError("P6 sample data shorter than header promises");
    for (let i = 0; i < n; i += 1) {
      const o = pos + i * 3;
      out[i] = (LUMA[0] * data[o] + LUMA[1] * data[o + 1] + LUMA[2] * data[o + 2]) / 255.0;
    }
    return { width, height, data: out };
  }
  if (maxval === 255) {
    if (data.length - pos < n) throw new IoError("P5 sample data shorter than header promises");
    for (let i = 0; i < n; i += 1) out[i] = data[pos + i] / 255.0;
  } else {
    if (data.length - pos < n * 2) throw new IoError("P5 sample data shorter than header promises");
    for (let i = 0; i < n; i += 1) {
      const o = pos + i * 2; // big-endian
      out[i] = (data[o] * 256 + data[o + 1]) / 65535.0;
    }
  }
  return { width, height, data: out };
}

export function readImageFile(path: string): GrayImage {
  let bytes: Buffer;
  try {
    bytes = fs.readFileSync(path);
  } catch (err) {
    throw new IoError(`cannot read image ${path}: ${(err as Error).message}`);
  }
  return decodePnm(bytes);
}

/** Round-half-away quantization to 8 bits, binary P5. */
export function encodePgm8(img: GrayImage, comment?: string): Buffer {
  let header = "P5\n";
  if (comment !== undefined) {
    for (const line of comment.split("\n")) header += `# ${line}\n`;
  }
  header += `${img.width} ${img.height}\n255\n`;
  const samples = Buffer.alloc(img.width * img.height);
  for (let i = 0; i < samples.length; i += 1) {
    const v = Math.round(img.data[i] * 255.0);
    samples[i] = v < 0 ? 0 : v > 255 ? 255 : v;
  }
  return Buffer.concat([Buffer.from(header, "ascii"), samples]);
}

export function writePgm8(img: GrayImage, path: string, comment?: string): void {
  try {
    fs.writeFileSync(path, encodePgm8(img, comment));
  } catch (err) {
    throw new IoError(`cannot write ${path}: ${(err as Error).message}`);
  }
}

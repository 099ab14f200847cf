/**
 * SEMB writer/reader: the binary interchange format the alignment CLI
 * consumes. Little-endian, 25-byte header then a row-major payload:
 *
 *   offset 0   magic   "SEMB"
 *   offset 4   version u32     1
 *   offset 8   dtype   u8      1 = float32, 2 = float64
 *   offset 9   rows    u64
 *   offset 17  cols    u64
 *
 * The extractor always emits dtype 1: encoder activations are float32.
 */

import { writeFileSync, readFileSync } from "node:fs";

export const SEMB_MAGIC = "SEMB";
export const SEMB_VERSION = 1;
export const HEADER_BYTES = 25;
export const DTYPE_FLOAT32 = 1;

export function writeSemb(rows: ArrayLike<number>[], dim: number, path: string): void {
  if (rows.length < 1 || dim < 1) {
    throw new Error(`empty matrix (${rows.length}x${dim})`);
  }
  const header = Buffer.alloc(HEADER_BYTES);
  header.write(SEMB_MAGIC, 0, "ascii");
  header.writeUInt32LE(SEMB_VERSION, 4);
  header.writeUInt8(DTYPE_FLOAT32, 8);
  header.writeBigUInt64LE(BigInt(rows.length), 9);
  header.writeBigUInt64LE(BigInt(dim), 17);

  const payload = new Float32Array(rows.length * dim);
  for (let i = 0; i < rows.length; i++) {
    const row = rows[i];
    if (row.length !== dim) {
      throw new Error(`row ${i} has ${row.length} values, expected ${dim}`);
    }
    for (let j = 0; j < dim; j++) {
      const value = row[j];
      if (!Number.isFinite(value)) {
        throw new Error(`non-finite value at row ${i}, col ${j}`);
      }
      payload[i * dim + j] = value;
    }
  }
  // Float32Array is little-endian on every platform Node supports.
  writeFileSync(path, Buffer.concat([header, Buffer.from(payload.buffer)]));
}

export interface SembMatrix {
  rows: number;
  cols: number;
  data: Float32Array;
}

export function readSemb(path: string): SembMatrix {
  const raw = readFileSync(path);
  if (raw.length < HEADER_BYTES || raw.toString("ascii", 0, 4) !== SEMB_MAGIC) {
    throw new Error(`${path}: not a SEMB file`);
  }
  const version = raw.readUInt32LE(4);
  if (version !== SEMB_VERSION) {
    throw new Error(`${path}: unsupported SEMB version ${version}`);
  }
  const dtype = raw.readUInt8(8);
  if (dtype !== DTYPE_FLOAT32) {
    throw new Error(`${path}: expected float32 payload, got dtype ${dtype}`);
  }
  const rows = Number(raw.readBigUInt64LE(9));
  const cols = Number(raw.readBigUInt64LE(17));
  const expected = rows * cols * 4;
  if (raw.length - HEADER_BYTES !== expected) {
    throw new Error(
      `${path}: payload length mismatch (expected ${expected} bytes ` +
      `for ${rows}x${cols}, found ${raw.length - HEADER_BYTES})`);
  }
  const data = new Float32Array(rows * cols);
  for (let i = 0; i < data.length; i++) {
    data[i] = raw.readFloatLE(HEADER_BYTES + 4 * i);
  }
  return { rows, cols, data };
}

import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { spawnSync } from "node:child_process";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { poolTokens, PoolingStrategy } from "../src/pooling.js";
import { readSemb } from "../src/semb.js";

function flat(rows: number[][]): Float32Array {
  return Float32Array.from(rows.flat());
}

/** Slow per-column mean over an explicit row slice, as the oracle. */
function slowMean(rows: number[][]): number[] {
  const dim = rows[0].length;
  const out = new Array(dim).fill(0);
  for (const row of rows) {
    for (let j = 0; j < dim; j++) {
      out[j] += row[j] / rows.length;
    }
  }
  return out;
}

const TOKENS = [
  [10, 0],
  [2, 4],
  [6, -2],
  [0, 10],
];

describe("mean_all_tokens", () => {
  it("matches a hand-computed mean", () => {
    const got = poolTokens(flat(TOKENS), 4, 2, "mean_all_tokens", 512);
    expect(Array.from(got)).toEqual([4.5, 3]);
  });

  it("matches the slow oracle on random matrices", () => {
    for (let trial = 0; trial < 20; trial++) {
      const nTokens = 1 + (trial % 7);
      const dim = 1 + ((trial * 3) % 5);
      const rows: number[][] = [];
      for (let t = 0; t < nTokens; t++) {
        const row: number[] = [];
        for (let j = 0; j < dim; j++) {
          row.push(Math.sin(trial * 100 + t * 10 + j) * 5);
        }
        rows.push(row);
      }
      const got = poolTokens(flat(rows), nTokens, dim, "mean_all_tokens", 512);
      const want = slowMean(rows);
      for (let j = 0; j < dim; j++) {
        expect(Math.abs(got[j] - want[j])).toBeLessThan(1e-6);
      }
    }
  });

  it("is the identity on a single token", () => {
    const got = poolTokens(flat([[7, -3, 2]]), 1, 3, "mean_all_tokens", 512);
    expect(Array.from(got)).toEqual([7, -3, 2]);
  });
});

describe("mean_excluding_special", () => {
  it("drops the first and last token rows", () => {
    const got = poolTokens(flat(TOKENS), 4, 2, "mean_excluding_special", 512);
    expect(Array.from(got)).toEqual([4, 1]);
  });

  it("falls back to all rows when only the wrapper tokens remain", () => {
    const two = poolTokens(flat([[2, 4], [6, 8]]), 2, 2, "mean_excluding_special", 512);
    expect(Array.from(two)).toEqual([4, 6]);
    const one = poolTokens(flat([[5, -1]]), 1, 2, "mean_excluding_special", 512);
    expect(Array.from(one)).toEqual([5, -1]);
  });

  it("differs from mean_all_tokens when wrappers are outliers", () => {
    const all = poolTokens(flat(TOKENS), 4, 2, "mean_all_tokens", 512);
    const interior = poolTokens(flat(TOKENS), 4, 2, "mean_excluding_special", 512);
    expect(Array.from(all)).not.toEqual(Array.from(interior));
  });
});

describe("max token cap", () => {
  it("truncates before pooling", () => {
    const got = poolTokens(flat(TOKENS), 4, 2, "mean_all_tokens", 2);
    expect(Array.from(got)).toEqual([6, 2]);
  });

  it("treats the last kept row as the special token after truncation", () => {
    const got = poolTokens(flat(TOKENS), 4, 2, "mean_excluding_special", 3);
    expect(Array.from(got)).toEqual([2, 4]);
  });

  it("falls back to all kept rows when the cap leaves no interior", () => {
    const got = poolTokens(flat(TOKENS), 4, 2, "mean_excluding_special", 2);
    expect(Array.from(got)).toEqual([6, 2]);
  });

  it("has no effect on sequences within the cap", () => {
    const capped = poolTokens(flat(TOKENS), 4, 2, "mean_all_tokens", 4);
    const uncapped = poolTokens(flat(TOKENS), 4, 2, "mean_all_tokens", 512);
    expect(Array.from(capped)).toEqual(Array.from(uncapped));
  });
});

describe("validation", () => {
  it("rejects empty matrices", () => {
    expect(() => poolTokens(new Float32Array(0), 0, 2, "mean_all_tokens", 512))
      .toThrow(/empty token matrix/);
    expect(() => poolTokens(new Float32Array(0), 2, 0, "mean_all_tokens", 512))
      .toThrow(/empty token matrix/);
  });

  it("rejects a data buffer that disagrees with the shape", () => {
    expect(() => poolTokens(new Float32Array(5), 2, 3, "mean_all_tokens", 512))
      .toThrow(/has 5 values, expected 6/);
  });

  it("rejects unknown strategies and bad caps", () => {
    expect(() => poolTokens(flat(TOKENS), 4, 2, "median" as PoolingStrategy, 512))
      .toThrow(/unknown pooling strategy/);
    expect(() => poolTokens(flat(TOKENS), 4, 2, "mean_all_tokens", 0))
      .toThrow(/max tokens must be positive/);
  });
});

describe("agreement with the aligner's pool command", () => {
  const alignerAvailable = !spawnSync("sembalign", ["--version"]).error;

  it.runIf(alignerAvailable)("mean_all_tokens matches sembalign pool on TSV fixtures", () => {
    const dir = mkdtempSync(join(tmpdir(), "semb-pool-"));
    try {
      const matrices = [
        [[0.5, -1.25, 3], [2, 0.75, -0.5]],
        [[1, 2, 3], [4, 5, 6], [7, 8, 10]],
      ];
      const paths = matrices.map((rows, i) => {
        const path = join(dir, `tokens${i}.tsv`);
        writeFileSync(path, rows.map((r) => r.join("\t")).join("\n") + "\n");
        return path;
      });
      const out = join(dir, "pooled.semb");
      const result = spawnSync("sembalign", ["pool", "--tokens", ...paths, "--out", out]);
      expect(result.status).toBe(0);

      const pooled = readSemb(out);
      expect(pooled.rows).toBe(2);
      expect(pooled.cols).toBe(3);
      matrices.forEach((rows, i) => {
        const mine = poolTokens(flat(rows), rows.length, 3, "mean_all_tokens", 512);
        for (let j = 0; j < 3; j++) {
          expect(Math.abs(pooled.data[i * 3 + j] - mine[j])).toBeLessThan(1e-5);
        }
      });
    } finally {
      rmSync(dir, { recursive: true, force: true });
    }
  });
});

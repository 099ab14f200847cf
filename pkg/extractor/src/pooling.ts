/**
 * Token-level pooling. The encoder hands back one vector per token; the
 * alignment pipeline wants one vector per sentence.
 */

export type PoolingStrategy = "mean_all_tokens" | "mean_excluding_special";

export const POOLING_STRATEGIES: PoolingStrategy[] = [
  "mean_all_tokens",
  "mean_excluding_special",
];

/** Mean over token rows `start..end` (exclusive) of a [tokens x dim] matrix. */
function meanRows(tokens: Float32Array, dim: number, start: number, end: number): Float32Array {
  // Accumulate in float64 so the only float32 rounding is the final cast.
  const sums = new Float64Array(dim);
  for (let t = start; t < end; t++) {
    for (let j = 0; j < dim; j++) {
      sums[j] += tokens[t * dim + j];
    }
  }
  const count = end - start;
  const out = new Float32Array(dim);
  for (let j = 0; j < dim; j++) {
    out[j] = sums[j] / count;
  }
  return out;
}

/**
 * Pool a [tokens x dim] activation matrix (flattened row-major) into one
 * sentence vector. Sequences longer than maxTokens are truncated first, so
 * the special tokens excluded are always the first and last row that remain.
 *
 * "mean_excluding_special" drops the first and last token row (the
 * tokenizer's BOS/EOS wrappers). Sequences of two or fewer tokens have no
 * interior, so the mean falls back to all rows.
 */
export function poolTokens(
  tokens: Float32Array,
  nTokens: number,
  dim: number,
  strategy: PoolingStrategy,
  maxTokens: number,
): Float32Array {
  if (nTokens < 1 || dim < 1) {
    throw new Error(`empty token matrix (${nTokens}x${dim})`);
  }
  if (tokens.length !== nTokens * dim) {
    throw new Error(`token matrix has ${tokens.length} values, expected ${nTokens * dim}`);
  }
  if (maxTokens < 1) {
    throw new Error(`max tokens must be positive, got ${maxTokens}`);
  }
  const kept = Math.min(nTokens, maxTokens);
  if (strategy === "mean_all_tokens") {
    return meanRows(tokens, dim, 0, kept);
  }
  if (strategy === "mean_excluding_special") {
    if (kept <= 2) {
      return meanRows(tokens, dim, 0, kept);
    }
    return meanRows(tokens, dim, 1, kept - 1);
  }
  throw new Error(`unknown pooling strategy ${JSON.stringify(strategy)}`);
}

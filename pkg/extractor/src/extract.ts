/**
 * Sentence embedding extraction: read one sentence per line, run each
 * through a feature-extraction encoder, pool the token activations, and
 * write the resulting matrix as a SEMB file.
 */

import { readFileSync } from "node:fs";

import { poolTokens, PoolingStrategy } from "./pooling.js";
import { writeSemb } from "./semb.js";

/** Raised when the encoder itself cannot be loaded or fails to run. */
export class ModelError extends Error {}

/** Token-level output of a feature-extraction pipeline. */
export interface TokenTensor {
  data: Float32Array | number[];
  dims: number[];
}

export type FeatureExtractor = (text: string) => Promise<TokenTensor>;
export type PipelineLoader = (modelId: string) => Promise<FeatureExtractor>;

export interface ExtractionJob {
  inputPath: string;
  modelId: string;
  pooling: PoolingStrategy;
  maxTokens: number;
  outPath: string;
}

export interface ExtractionResult {
  sentences: number;
  dim: number;
}

function describe(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

/** One sentence per line. Blank lines would silently embed the empty string. */
export function readSentences(path: string): string[] {
  const text = readFileSync(path, "utf-8");
  const lines = text.split(/\r?\n/);
  // A final newline is a terminator, not an extra blank line.
  if (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines.length === 0) {
    throw new Error(`${path}: no sentences`);
  }
  for (let i = 0; i < lines.length; i++) {
    if (lines[i].trim() === "") {
      throw new Error(`${path}: line ${i + 1} is empty`);
    }
  }
  return lines;
}

/** Accept [tokens x dim] or batch-of-one [1 x tokens x dim] tensors. */
function tensorToTokens(tensor: TokenTensor): { nTokens: number; dim: number; data: Float32Array } {
  let dims = tensor.dims;
  if (dims.length === 3 && dims[0] === 1) {
    dims = dims.slice(1);
  }
  if (dims.length !== 2) {
    throw new ModelError(`expected a [tokens x dim] tensor, got dims [${tensor.dims.join(", ")}]`);
  }
  const [nTokens, dim] = dims;
  const data = tensor.data instanceof Float32Array
    ? tensor.data
    : Float32Array.from(tensor.data);
  if (data.length !== nTokens * dim) {
    throw new ModelError(`tensor data has ${data.length} values, expected ${nTokens * dim}`);
  }
  return { nTokens, dim, data };
}

export async function defaultLoader(modelId: string): Promise<FeatureExtractor> {
  let pipeline;
  try {
    ({ pipeline } = await import("@xenova/transformers"));
  } catch (err) {
    throw new ModelError(`cannot load the transformers runtime: ${describe(err)}`);
  }
  let encoder: (text: string) => Promise<unknown>;
  try {
    encoder = await pipeline("feature-extraction", modelId);
  } catch (err) {
    throw new ModelError(`cannot load model ${modelId}: ${describe(err)}`);
  }
  // No pooling/normalize options: we want the raw token-level activations.
  return async (text: string) => (await encoder(text)) as TokenTensor;
}

export async function extract(
  job: ExtractionJob,
  loadPipeline: PipelineLoader = defaultLoader,
): Promise<ExtractionResult> {
  const sentences = readSentences(job.inputPath);
  const run = await loadPipeline(job.modelId);

  const pooled: Float32Array[] = [];
  let dim = 0;
  for (let i = 0; i < sentences.length; i++) {
    let tensor: TokenTensor;
    try {
      tensor = await run(sentences[i]);
    } catch (err) {
      if (err instanceof ModelError) {
        throw err;
      }
      throw new ModelError(`inference failed on line ${i + 1}: ${describe(err)}`);
    }
    const tokens = tensorToTokens(tensor);
    if (i === 0) {
      dim = tokens.dim;
    } else if (tokens.dim !== dim) {
      throw new ModelError(`line ${i + 1} embedded with dim ${tokens.dim}, expected ${dim}`);
    }
    pooled.push(poolTokens(tokens.data, tokens.nTokens, tokens.dim, job.pooling, job.maxTokens));
  }

  writeSemb(pooled, dim, job.outPath);
  return { sentences: sentences.length, dim };
}

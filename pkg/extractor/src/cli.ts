#!/usr/bin/env node
/**
 * semb-extract: embed a file of sentences (one per line) into a SEMB
 * matrix ready for the alignment toolchain.
 *
 * Exit codes: 0 success, 1 usage error, 2 data error, 3 model failure.
 */

import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { extract, ModelError, PipelineLoader } from "./extract.js";
import { POOLING_STRATEGIES, PoolingStrategy } from "./pooling.js";

export const VERSION = "0.1.0";
export const DEFAULT_MODEL = "Xenova/xlm-roberta-base";
export const DEFAULT_MAX_TOKENS = 512;

const HELP = `usage: semb-extract --input <sentences.txt> --out <vectors.semb>
                    [--model <id>] [--pooling <strategy>] [--max-tokens <n>]

Embed a text file (one sentence per line) and write the pooled sentence
vectors as a float32 SEMB matrix, one row per line.

options:
  --input <path>       text file with one sentence per line
  --out <path>         destination SEMB file
  --model <id>         feature-extraction model id
                       (default: ${DEFAULT_MODEL})
  --pooling <name>     ${POOLING_STRATEGIES.join(" | ")}
                       (default: mean_excluding_special)
  --max-tokens <n>     truncate sequences beyond this many tokens
                       (default: ${DEFAULT_MAX_TOKENS})
  --help               show this message and exit
  --version            print the version and exit
`;

function describe(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

function usageError(message: string): void {
  process.stderr.write(`semb-extract: error: ${message}\n`);
  process.stderr.write(`run semb-extract --help for usage\n`);
}

export async function main(argv: string[], loadPipeline?: PipelineLoader): Promise<number> {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        input: { type: "string" },
        out: { type: "string" },
        model: { type: "string", default: DEFAULT_MODEL },
        pooling: { type: "string", default: "mean_excluding_special" },
        "max-tokens": { type: "string", default: String(DEFAULT_MAX_TOKENS) },
        help: { type: "boolean", default: false },
        version: { type: "boolean", default: false },
      },
      strict: true,
      allowPositionals: false,
    }));
  } catch (err) {
    usageError(describe(err));
    return 1;
  }

  if (values.help) {
    process.stdout.write(HELP);
    return 0;
  }
  if (values.version) {
    process.stdout.write(`${VERSION}\n`);
    return 0;
  }
  if (values.input === undefined || values.out === undefined) {
    usageError("--input and --out are required");
    return 1;
  }
  if (!POOLING_STRATEGIES.includes(values.pooling as PoolingStrategy)) {
    usageError(`--pooling must be one of: ${POOLING_STRATEGIES.join(", ")}`);
    return 1;
  }
  const maxTokens = Number(values["max-tokens"]);
  if (!Number.isInteger(maxTokens) || maxTokens < 1) {
    usageError(`--max-tokens must be a positive integer, got ${values["max-tokens"]}`);
    return 1;
  }

  try {
    const result = await extract(
      {
        inputPath: values.input,
        modelId: values.model as string,
        pooling: values.pooling as PoolingStrategy,
        maxTokens,
        outPath: values.out,
      },
      loadPipeline,
    );
    process.stdout.write(JSON.stringify({
      tool: "semb-extract",
      version: VERSION,
      input: values.input,
      out: values.out,
      model: values.model,
      pooling: values.pooling,
      max_tokens: maxTokens,
      sentences: result.sentences,
      dim: result.dim,
    }) + "\n");
    return 0;
  } catch (err) {
    process.stderr.write(`semb-extract: error: ${describe(err)}\n`);
    return err instanceof ModelError ? 3 : 2;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}

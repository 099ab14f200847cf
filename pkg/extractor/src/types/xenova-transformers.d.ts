/**
 * Minimal typing for the encoder runtime, which is loaded lazily at runtime
 * and only through this surface. Compiling does not require the package to
 * be installed.
 */
declare module "@xenova/transformers" {
  export function pipeline(
    task: "feature-extraction",
    model?: string,
    options?: Record<string, unknown>,
  ): Promise<(text: string, options?: Record<string, unknown>) => Promise<unknown>>;
}

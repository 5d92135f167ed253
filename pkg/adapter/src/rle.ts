/**
 * Row-major run-length encoding matching the consumer's mask schema:
 * alternating run lengths, first run counts background pixels (may be 0),
 * every later run positive, runs summing to width * height.
 */

export interface Rle {
  width_px: number;
  height_px: number;
  runs: number[];
}

export function encodeRle(mask: Uint8Array, width: number, height: number): Rle {
  if (mask.length !== width * height || mask.length === 0) {
    throw new Error(`mask length ${mask.length} does not match ${width}x${height}`);
  }
  const runs: number[] = [];
  let current = 0; // background first
  let run = 0;
  for (let i = 0; i < mask.length; i++) {
    const v = mask[i] ? 1 : 0;
    if (v === current) {
      run++;
    } else {
      runs.push(run);
      current = v;
      run = 1;
    }
  }
  runs.push(run);
  return { width_px: width, height_px: height, runs };
}

export function rlePixelCount(rle: Rle): number {
  let total = 0;
  for (let i = 1; i < rle.runs.length; i += 2) total += rle.runs[i];
  return total;
}

export function validateRle(rle: Rle): string[] {
  const problems: string[] = [];
  if (rle.width_px < 1 || rle.height_px < 1) problems.push("non-positive dimensions");
  if (rle.runs.length === 0) problems.push("no runs");
  if (rle.runs.some((r) => r < 0 || !Number.isInteger(r))) problems.push("non-natural run length");
  if (rle.runs.slice(1).some((r) => r === 0)) problems.push("zero-length run after the first");
  const total = rle.runs.reduce((a, b) => a + b, 0);
  if (total !== rle.width_px * rle.height_px) {
    problems.push(`run sum ${total} != ${rle.width_px * rle.height_px}`);
  }
  return problems;
}

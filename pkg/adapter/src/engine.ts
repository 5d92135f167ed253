/**
 * Segmentation engines.
 *
 * The adapter never reimplements the segmenter; it drives one of:
 *  - "command": a configured external command wrapping the real
 *    text-grounded segmentation stack (checkpoints and device are passed
 *    through).  The command is called once per (tile, prompt) and must
 *    print a JSON array of {score, rle} instances for that prompt.
 *  - "stub": a deterministic procedural engine used for development and
 *    CI, which bands the tile's luma plane into plausible instances.
 */

import { execFileSync } from "child_process";
import { GrayImage } from "./png";
import { Rle, encodeRle, validateRle } from "./rle";

export interface RawInstance {
  score: number;
  rle: Rle;
}

export interface SegmentationEngine {
  name: string;
  segment(tileName: string, image: GrayImage, prompt: string): RawInstance[];
}

export interface EngineOptions {
  engine: string;
  /** External command (argv[0]) for the "command" engine. */
  command?: string;
  /** Opaque checkpoint identifiers handed to the external stack. */
  checkpoints?: string;
  device?: string;
}

export class EngineError extends Error {}

// ---------------------------------------------------------------------------
// Deterministic stub

function fnv1a(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export class StubEngine implements SegmentationEngine {
  name = "stub";

  segment(tileName: string, image: GrayImage, prompt: string): RawInstance[] {
    const rand = mulberry32(fnv1a(`${tileName}:${prompt}`));
    const { width, height, gray } = image;
    const instances: RawInstance[] = [];
    if (prompt === "building") {
      const mask = new Uint8Array(width * height);
      for (let i = 0; i < mask.length; i++) mask[i] = gray[i] >= 96 ? 1 : 0;
      instances.push({ score: round4(0.55 + 0.4 * rand()), rle: encodeRle(mask, width, height) });
      return instances;
    }
    const count = 1 + Math.floor(rand() * 2);
    for (let k = 0; k < count; k++) {
      const lo = 16 + Math.floor(rand() * 160);
      const hi = lo + 64;
      const x0 = Math.floor(rand() * (width / 2));
      const y0 = Math.floor(rand() * (height / 2));
      const x1 = Math.min(width, x0 + 8 + Math.floor(rand() * (width - x0)));
      const y1 = Math.min(height, y0 + 8 + Math.floor(rand() * (height - y0)));
      const mask = new Uint8Array(width * height);
      let any = false;
      for (let y = y0; y < y1; y++) {
        for (let x = x0; x < x1; x++) {
          const v = gray[y * width + x];
          if (v >= lo && v < hi) {
            mask[y * width + x] = 1;
            any = true;
          }
        }
      }
      if (!any) continue;
      instances.push({ score: round4(0.1 + 0.85 * rand()), rle: encodeRle(mask, width, height) });
    }
    return instances;
  }
}

function round4(x: number): number {
  return Math.round(x * 10000) / 10000;
}

// ---------------------------------------------------------------------------
// External command engine

export class CommandEngine implements SegmentationEngine {
  name = "command";

  constructor(private opts: EngineOptions) {
    if (!opts.command) {
      throw new EngineError("command engine requires --command");
    }
  }

  segment(tileName: string, image: GrayImage, prompt: string): RawInstance[] {
    let stdout: string;
    try {
      stdout = execFileSync(this.opts.command!, [tileName, prompt], {
        encoding: "utf-8",
        env: {
          ...process.env,
          SAM_CHECKPOINTS: this.opts.checkpoints ?? "",
          SAM_DEVICE: this.opts.device ?? "cpu",
        },
        maxBuffer: 256 * 1024 * 1024,
      });
    } catch (err) {
      throw new EngineError(`segmentation command failed for ${tileName}: ${(err as Error).message}`);
    }
    let parsed: unknown;
    try {
      parsed = JSON.parse(stdout);
    } catch {
      throw new EngineError(`segmentation command printed invalid JSON for ${tileName}`);
    }
    if (!Array.isArray(parsed)) {
      throw new EngineError(`segmentation command must print a JSON array for ${tileName}`);
    }
    return parsed.map((raw, i) => {
      const inst = raw as RawInstance;
      if (typeof inst.score !== "number" || inst.score < 0 || inst.score > 1) {
        throw new EngineError(`instance ${i} for ${tileName}: score out of [0, 1]`);
      }
      const issues = validateRle(inst.rle ?? ({} as Rle));
      if (issues.length > 0) {
        throw new EngineError(`instance ${i} for ${tileName}: ${issues.join("; ")}`);
      }
      if (inst.rle.width_px !== image.width || inst.rle.height_px !== image.height) {
        throw new EngineError(`instance ${i} for ${tileName}: mask does not match tile dimensions`);
      }
      return { score: inst.score, rle: inst.rle };
    });
  }
}

export function createEngine(opts: EngineOptions): SegmentationEngine {
  if (opts.engine === "stub") return new StubEngine();
  if (opts.engine === "command") return new CommandEngine(opts);
  throw new EngineError(`unknown engine ${opts.engine}; expected "stub" or "command"`);
}

/**
 * Batch inference over a tile directory with the six-prompt protocol.
 *
 * For every readable PNG tile, each configured category prompt and the
 * all-buildings prompt are rendered and sent to the engine; all scored
 * instances are emitted unfiltered (thresholding belongs to the consumer)
 * unless emitAllScores is disabled, which drops scores below 0.1.
 */

import * as fs from "fs";
import * as path from "path";
import {
  EngineOptions,
  SegmentationEngine,
  createEngine,
} from "./engine";
import { readPngLuma } from "./png";
import {
  ALL_BUILDINGS_PROMPT,
  CATEGORIES,
  DEFAULT_ASSIGNMENTS,
  categoryByKey,
  renderPrompt,
} from "./prompts";
import { InstanceOut, PredictionFile, validatePrediction } from "./schema";

export interface AdapterConfig extends EngineOptions {
  tilesDir: string;
  outDir: string;
  /** Template id per category key; defaults applied for missing keys. */
  assignments?: Record<string, string>;
  /** Emit the all-buildings stream (default true). */
  allBuildings?: boolean;
  /** Emit every candidate score (default true); false drops scores < 0.1. */
  emitAllScores?: boolean;
}

export interface RunSummary {
  tilesProcessed: number;
  tilesSkipped: number;
  filesWritten: string[];
}

const MIN_EMITTED_SCORE = 0.1;

export function resolveAssignments(overrides?: Record<string, string>): Record<string, string> {
  const assignments = { ...DEFAULT_ASSIGNMENTS };
  for (const [key, templateId] of Object.entries(overrides ?? {})) {
    categoryByKey(key); // validates the category
    renderPrompt(templateId, "x"); // validates the template id
    assignments[key] = templateId;
  }
  return assignments;
}

export function runInference(config: AdapterConfig): RunSummary {
  const engine = createEngine(config);
  const assignments = resolveAssignments(config.assignments);
  const emitAll = config.allBuildings !== false;

  if (!fs.existsSync(config.tilesDir) || !fs.statSync(config.tilesDir).isDirectory()) {
    throw new Error(`tiles directory not found: ${config.tilesDir}`);
  }
  fs.mkdirSync(config.outDir, { recursive: true });

  const tiles = fs
    .readdirSync(config.tilesDir)
    .filter((name) => name.toLowerCase().endsWith(".png"))
    .sort();
  if (tiles.length === 0) {
    console.warn(`warning: no PNG tiles in ${config.tilesDir}; nothing to do`);
    return { tilesProcessed: 0, tilesSkipped: 0, filesWritten: [] };
  }

  const summary: RunSummary = { tilesProcessed: 0, tilesSkipped: 0, filesWritten: [] };
  for (const name of tiles) {
    const tileId = path.basename(name, path.extname(name));
    let image;
    try {
      image = readPngLuma(fs.readFileSync(path.join(config.tilesDir, name)));
    } catch (err) {
      console.warn(`warning: skipping unreadable tile ${name}: ${(err as Error).message}`);
      summary.tilesSkipped++;
      continue;
    }

    const instances: InstanceOut[] = [];
    for (const category of CATEGORIES) {
      const templateId = assignments[category.key];
      const prompt = renderPrompt(templateId, category.displayName);
      for (const raw of engine.segment(tileId, image, prompt)) {
        instances.push({
          category: category.code,
          score: raw.score,
          prompt_id: templateId,
          rle: raw.rle,
        });
      }
    }
    if (emitAll) {
      for (const raw of engine.segment(tileId, image, ALL_BUILDINGS_PROMPT)) {
        instances.push({
          category: "all",
          score: raw.score,
          prompt_id: ALL_BUILDINGS_PROMPT,
          rle: raw.rle,
        });
      }
    }

    const kept =
      config.emitAllScores === false
        ? instances.filter((i) => i.score >= MIN_EMITTED_SCORE)
        : instances;
    const doc: PredictionFile = { tile_id: tileId, instances: kept };
    const problems = validatePrediction(doc);
    if (problems.length > 0) {
      throw new Error(`internal error: emission for ${tileId} violates schema: ${problems[0]}`);
    }
    const outPath = path.join(config.outDir, `${tileId}.json`);
    fs.writeFileSync(outPath, JSON.stringify(doc, null, 1) + "\n");
    summary.filesWritten.push(outPath);
    summary.tilesProcessed++;
  }
  return summary;
}

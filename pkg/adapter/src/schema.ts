/**
 * Prediction-file schema shared with the consumer: one JSON document per
 * tile with scored, category-labeled RLE instances.
 */

import { Rle, validateRle } from "./rle";

export interface InstanceOut {
  category: number | "all";
  score: number;
  prompt_id?: string;
  rle: Rle;
}

export interface PredictionFile {
  tile_id: string;
  instances: InstanceOut[];
}

/** Returns a list of schema violations; empty means valid. */
export function validatePrediction(doc: unknown): string[] {
  const problems: string[] = [];
  if (typeof doc !== "object" || doc === null) {
    return ["document is not an object"];
  }
  const d = doc as Record<string, unknown>;
  if (typeof d.tile_id !== "string" || d.tile_id.length === 0) {
    problems.push("tile_id missing or empty");
  }
  if (!Array.isArray(d.instances)) {
    return [...problems, "instances is not an array"];
  }
  d.instances.forEach((inst, i) => {
    if (typeof inst !== "object" || inst === null) {
      problems.push(`instances[${i}] is not an object`);
      return;
    }
    const obj = inst as Record<string, unknown>;
    const cat = obj.category;
    const codeOk = typeof cat === "number" && Number.isInteger(cat) && cat >= 1 && cat <= 6;
    if (!codeOk && cat !== "all") {
      problems.push(`instances[${i}].category must be 1..6 or "all"`);
    }
    if (typeof obj.score !== "number" || obj.score < 0 || obj.score > 1) {
      problems.push(`instances[${i}].score must be in [0, 1]`);
    }
    if (obj.prompt_id !== undefined && typeof obj.prompt_id !== "string") {
      problems.push(`instances[${i}].prompt_id must be a string`);
    }
    const rle = obj.rle as Rle | undefined;
    if (!rle || !Array.isArray(rle.runs)) {
      problems.push(`instances[${i}].rle missing`);
    } else {
      for (const issue of validateRle(rle)) {
        problems.push(`instances[${i}].rle: ${issue}`);
      }
    }
  });
  return problems;
}

#!/usr/bin/env node
/**
 * CLI: segment a tile directory with the six-prompt protocol and emit one
 * prediction file per tile.
 *
 *   sam-tile-adapter --tiles <dir> --out <dir> [--engine stub|command]
 *       [--command <path>] [--checkpoints <ids>] [--device cpu|cuda]
 *       [--category <Key> --template <TPid>]... [--all-buildings false]
 *       [--emit-all-scores false]
 */

import { EngineError } from "./engine";
import { AdapterConfig, runInference } from "./run";

const USAGE =
  "usage: sam-tile-adapter --tiles <dir> --out <dir> [--engine stub|command] " +
  "[--command <path>] [--checkpoints <ids>] [--device cpu|cuda] " +
  "[--category <Key> --template <TPid>]... [--all-buildings false] [--emit-all-scores false]";

function parseArgs(argv: string[]): AdapterConfig {
  const config: AdapterConfig = {
    tilesDir: "",
    outDir: "",
    engine: "stub",
    assignments: {},
  };
  let pendingCategory: string | null = null;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      i++;
      if (i >= argv.length) throw new Error(`${arg} expects a value`);
      return argv[i];
    };
    switch (arg) {
      case "--tiles":
        config.tilesDir = next();
        break;
      case "--out":
        config.outDir = next();
        break;
      case "--engine":
        config.engine = next();
        break;
      case "--command":
        config.command = next();
        break;
      case "--checkpoints":
        config.checkpoints = next();
        break;
      case "--device":
        config.device = next();
        break;
      case "--category": {
        const value = next();
        if (value.includes("=")) {
          const [key, templateId] = value.split("=", 2);
          config.assignments![key] = templateId;
        } else {
          pendingCategory = value;
        }
        break;
      }
      case "--template": {
        if (!pendingCategory) {
          throw new Error("--template must follow a bare --category <Key>");
        }
        config.assignments![pendingCategory] = next();
        pendingCategory = null;
        break;
      }
      case "--all-buildings":
        config.allBuildings = next() !== "false";
        break;
      case "--emit-all-scores":
        config.emitAllScores = next() !== "false";
        break;
      case "--help":
      case "-h":
        console.log(USAGE);
        process.exit(0);
        break;
      default:
        throw new Error(`unknown flag ${arg}`);
    }
  }
  if (pendingCategory) {
    throw new Error(`--category ${pendingCategory} has no matching --template`);
  }
  if (!config.tilesDir || !config.outDir) {
    throw new Error("--tiles and --out are required");
  }
  return config;
}

export function main(argv: string[]): number {
  let config: AdapterConfig;
  try {
    config = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
  try {
    const summary = runInference(config);
    console.log(
      `processed ${summary.tilesProcessed} tile(s), skipped ${summary.tilesSkipped}, ` +
        `wrote ${summary.filesWritten.length} prediction file(s) to ${config.outDir}`
    );
    return 0;
  } catch (err) {
    if (err instanceof EngineError) {
      console.error(`engine error: ${err.message}`);
      return 3;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}

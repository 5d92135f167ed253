import assert from "node:assert/strict";
import { execFileSync, spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { test } from "node:test";
import { main } from "../src/cli";
import { createEngine, EngineError, StubEngine } from "../src/engine";
import { writeGrayPng } from "../src/png";
import { validatePrediction } from "../src/schema";
import { runInference } from "../src/run";

const REPO_ROOT = path.resolve(__dirname, "..", "..", "..");
const PRIMARY_SRC = path.join(REPO_ROOT, "src");

function makeTmp(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "sam-adapter-"));
}

/** Two 64x64 sample tiles with gradients and constant blocks. */
function writeSampleTiles(dir: string): string[] {
  fs.mkdirSync(dir, { recursive: true });
  const names = ["tile_a", "tile_b"];
  names.forEach((name, t) => {
    const gray = new Uint8Array(64 * 64);
    for (let y = 0; y < 64; y++) {
      for (let x = 0; x < 64; x++) {
        gray[y * 64 + x] = (x * 3 + y * 5 + t * 37) % 256;
      }
    }
    // a couple of flat "roofs"
    for (let y = 8; y < 20; y++) for (let x = 8; x < 28; x++) gray[y * 64 + x] = 200;
    for (let y = 36; y < 52; y++) for (let x = 30; x < 60; x++) gray[y * 64 + x] = 120;
    fs.writeFileSync(path.join(dir, `${name}.png`), writeGrayPng({ width: 64, height: 64, gray }));
  });
  return names;
}

test("stub inference emits schema-valid files for both sample tiles", () => {
  const tmp = makeTmp();
  const tiles = path.join(tmp, "tiles");
  const out = path.join(tmp, "out");
  writeSampleTiles(tiles);

  const summary = runInference({ tilesDir: tiles, outDir: out, engine: "stub" });
  assert.equal(summary.tilesProcessed, 2);
  assert.equal(summary.filesWritten.length, 2);

  const allowedPrompts = new Set(["TP1", "TP2", "TP3", "TP4", "TP5", "TP6", "building"]);
  for (const file of summary.filesWritten) {
    const doc = JSON.parse(fs.readFileSync(file, "utf-8"));
    assert.deepEqual(validatePrediction(doc), []);
    assert.ok(doc.instances.length > 0, "tile emitted no instances");
    for (const inst of doc.instances) {
      assert.ok(allowedPrompts.has(inst.prompt_id), `prompt_id ${inst.prompt_id}`);
      assert.ok(inst.score >= 0 && inst.score <= 1);
      assert.equal(inst.rle.width_px, 64);
      assert.equal(inst.rle.height_px, 64);
    }
    const categories = new Set(doc.instances.map((i: { category: number | string }) => i.category));
    assert.ok(categories.has("all"), "all-buildings stream missing");
  }
});

test("emissions load cleanly in the primary package", (t) => {
  const probe = spawnSync("python3", ["-c", "import bipvkit"], {
    env: { ...process.env, PYTHONPATH: PRIMARY_SRC },
  });
  if (probe.status !== 0) {
    t.skip("python3 with the primary package is unavailable");
    return;
  }
  const tmp = makeTmp();
  const tiles = path.join(tmp, "tiles");
  const out = path.join(tmp, "out");
  writeSampleTiles(tiles);
  runInference({ tilesDir: tiles, outDir: out, engine: "stub" });

  const script = [
    "import pathlib, sys",
    "from bipvkit.masks import load_prediction",
    "paths = sorted(pathlib.Path(sys.argv[1]).glob('*.json'))",
    "assert len(paths) == 2, paths",
    "for p in paths:",
    "    pred = load_prediction(p, strict=True)",
    "    assert pred.instances",
    "print('LOADED', len(paths))",
  ].join("\n");
  const result = spawnSync("python3", ["-c", script, out], {
    encoding: "utf-8",
    env: { ...process.env, PYTHONPATH: PRIMARY_SRC },
  });
  assert.equal(result.status, 0, result.stderr);
  assert.match(result.stdout, /LOADED 2/);
});

test("stub output is deterministic across runs", () => {
  const tmp = makeTmp();
  const tiles = path.join(tmp, "tiles");
  writeSampleTiles(tiles);
  runInference({ tilesDir: tiles, outDir: path.join(tmp, "a"), engine: "stub" });
  runInference({ tilesDir: tiles, outDir: path.join(tmp, "b"), engine: "stub" });
  for (const name of fs.readdirSync(path.join(tmp, "a"))) {
    assert.deepEqual(
      fs.readFileSync(path.join(tmp, "a", name)),
      fs.readFileSync(path.join(tmp, "b", name)),
      name
    );
  }
});

test("category template overrides change the recorded prompt_id", () => {
  const tmp = makeTmp();
  const tiles = path.join(tmp, "tiles");
  const out = path.join(tmp, "out");
  writeSampleTiles(tiles);
  runInference({
    tilesDir: tiles,
    outDir: out,
    engine: "stub",
    assignments: { Factory: "TP2" },
  });
  const doc = JSON.parse(fs.readFileSync(path.join(out, "tile_a.json"), "utf-8"));
  const factoryPrompts = new Set(
    doc.instances
      .filter((i: { category: number | string }) => i.category === 4)
      .map((i: { prompt_id: string }) => i.prompt_id)
  );
  assert.deepEqual([...factoryPrompts], ["TP2"]);
});

test("unreadable tile is skipped with the rest processed", () => {
  const tmp = makeTmp();
  const tiles = path.join(tmp, "tiles");
  const out = path.join(tmp, "out");
  writeSampleTiles(tiles);
  fs.writeFileSync(path.join(tiles, "broken.png"), Buffer.from("garbage"));
  const summary = runInference({ tilesDir: tiles, outDir: out, engine: "stub" });
  assert.equal(summary.tilesSkipped, 1);
  assert.equal(summary.tilesProcessed, 2);
});

test("empty tile folder: zero files, success exit", () => {
  const tmp = makeTmp();
  const tiles = path.join(tmp, "tiles");
  fs.mkdirSync(tiles);
  const code = main(["--tiles", tiles, "--out", path.join(tmp, "out")]);
  assert.equal(code, 0);
  assert.deepEqual(fs.readdirSync(path.join(tmp, "out")), []);
});

test("command engine consumes an external stack and validates it", () => {
  const tmp = makeTmp();
  const script = path.join(tmp, "fake-stack.js");
  fs.writeFileSync(
    script,
    "#!/usr/bin/env node\n" +
      "const [tile, prompt] = process.argv.slice(2);\n" +
      "const n = 64 * 64;\n" +
      "console.log(JSON.stringify([{score: 0.5, rle: {width_px: 64, height_px: 64, runs: [8, 16, n - 24]}}]));\n"
  );
  fs.chmodSync(script, 0o755);

  const tiles = path.join(tmp, "tiles");
  const out = path.join(tmp, "out");
  writeSampleTiles(tiles);
  const summary = runInference({
    tilesDir: tiles,
    outDir: out,
    engine: "command",
    command: script,
    checkpoints: "grounding:v1,mask:v1",
    device: "cpu",
  });
  assert.equal(summary.tilesProcessed, 2);
  const doc = JSON.parse(fs.readFileSync(path.join(out, "tile_a.json"), "utf-8"));
  assert.deepEqual(validatePrediction(doc), []);
  assert.equal(doc.instances.length, 6); // five categories + all stream
});

test("command engine aborts when the stack fails", () => {
  const tmp = makeTmp();
  const script = path.join(tmp, "dead-stack.js");
  fs.writeFileSync(script, "#!/usr/bin/env node\nprocess.exit(7);\n");
  fs.chmodSync(script, 0o755);
  const tiles = path.join(tmp, "tiles");
  writeSampleTiles(tiles);
  assert.throws(
    () =>
      runInference({
        tilesDir: tiles,
        outDir: path.join(tmp, "out"),
        engine: "command",
        command: script,
      }),
    EngineError
  );
});

test("engine factory validates its inputs", () => {
  assert.throws(() => createEngine({ engine: "onnx" }), EngineError);
  assert.throws(() => createEngine({ engine: "command" }), EngineError);
  assert.ok(createEngine({ engine: "stub" }) instanceof StubEngine);
});

test("cli end to end via the compiled entry point", () => {
  const tmp = makeTmp();
  const tiles = path.join(tmp, "tiles");
  const out = path.join(tmp, "out");
  writeSampleTiles(tiles);
  const cliPath = path.resolve(__dirname, "..", "src", "cli.js");
  const stdout = execFileSync(
    process.execPath,
    [cliPath, "--tiles", tiles, "--out", out, "--category", "Factory=TP6", "--device", "cpu"],
    { encoding: "utf-8" }
  );
  assert.match(stdout, /processed 2 tile\(s\)/);
  assert.equal(fs.readdirSync(out).length, 2);
});

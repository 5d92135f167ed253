import assert from "node:assert/strict";
import { test } from "node:test";
import { readPngLuma, writeGrayPng } from "../src/png";

function gradient(width: number, height: number): Uint8Array {
  const gray = new Uint8Array(width * height);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      gray[y * width + x] = (x * 7 + y * 13) % 256;
    }
  }
  return gray;
}

test("gray PNG round trip", () => {
  const gray = gradient(48, 32);
  const decoded = readPngLuma(writeGrayPng({ width: 48, height: 32, gray }));
  assert.equal(decoded.width, 48);
  assert.equal(decoded.height, 32);
  assert.deepEqual(decoded.gray, gray);
});

test("non-PNG input is rejected", () => {
  assert.throws(() => readPngLuma(Buffer.from("not a png at all")), /not a PNG/);
});

test("truncated PNG is rejected", () => {
  const buf = writeGrayPng({ width: 8, height: 8, gray: gradient(8, 8) });
  assert.throws(() => readPngLuma(buf.subarray(0, 20)));
});

import fs from "fs";
import os from "os";
import path from "path";

import { describe, expect, it } from "vitest";

import { loadBundles } from "../src/bundles";

function tmpdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "exporter-"));
}

const EXPLICIT = {
  periodicity: [0.9, 0.8],
  period_length: [8, 16],
  period_score: [1.0, 0.5],
};

describe("loadBundles", () => {
  it("reads a directory of per-video files, sorted by name", () => {
    const dir = tmpdir();
    fs.writeFileSync(path.join(dir, "b.json"), JSON.stringify(EXPLICIT));
    fs.writeFileSync(path.join(dir, "a.json"), JSON.stringify(EXPLICIT));
    fs.writeFileSync(path.join(dir, "notes.txt"), "ignored");
    const bundles = loadBundles(dir, 2, 64);
    expect(bundles.map(b => b.videoId)).toEqual(["a", "b"]);
    expect(bundles[0].speed).toBe(2);
    expect(bundles[0].windowSize).toBe(64);
    expect(bundles[0].periodicity).toEqual([0.9, 0.8]);
  });

  it("reads a single-file archive keyed by video id", () => {
    const dir = tmpdir();
    const archive = path.join(dir, "dumps.json");
    fs.writeFileSync(archive, JSON.stringify({ v2: EXPLICIT, v1: EXPLICIT }));
    const bundles = loadBundles(archive, 1, 64);
    expect(bundles.map(b => b.videoId)).toEqual(["v1", "v2"]);
  });

  it("rejects an empty directory", () => {
    expect(() => loadBundles(tmpdir(), 1, 64)).toThrow(/no video dumps/);
  });

  it("rejects unknown keys, naming the dump", () => {
    const dir = tmpdir();
    fs.writeFileSync(path.join(dir, "v.json"), JSON.stringify({ ...EXPLICIT, speed: 3 }));
    expect(() => loadBundles(dir, 1, 64)).toThrow(/v\.json: unknown keys \["speed"\]/);
  });

  it("rejects malformed members and files", () => {
    const dir = tmpdir();
    fs.writeFileSync(path.join(dir, "v.json"), "{not json");
    expect(() => loadBundles(dir, 1, 64)).toThrow(/invalid JSON/);

    const dir2 = tmpdir();
    fs.writeFileSync(path.join(dir2, "v.json"), JSON.stringify([1, 2]));
    expect(() => loadBundles(dir2, 1, 64)).toThrow(/object of named arrays/);

    const dir3 = tmpdir();
    fs.writeFileSync(path.join(dir3, "v.json"), JSON.stringify({ periodicity: "high" }));
    expect(() => loadBundles(dir3, 1, 64)).toThrow(/periodicity must be an array/);

    const dir4 = tmpdir();
    fs.writeFileSync(path.join(dir4, "dumps.json"), JSON.stringify([EXPLICIT]));
    expect(() => loadBundles(path.join(dir4, "dumps.json"), 1, 64)).toThrow(/mapping video ids/);
  });

  it("rejects a matrix that is not an array of rows", () => {
    const dir = tmpdir();
    const dump = { periodicity: [0.9], period_class_scores: [0.5] };
    fs.writeFileSync(path.join(dir, "v.json"), JSON.stringify(dump));
    expect(() => loadBundles(dir, 1, 64)).toThrow(/array of per-frame rows/);
  });
});

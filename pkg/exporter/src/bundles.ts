import fs from "fs";
import path from "path";

import { ArrayBundle } from "./convert";

const ARRAY_KEYS = ["periodicity", "period_class_scores", "period_length", "period_score"];

interface RawDump {
  periodicity: number[];
  period_class_scores?: number[][];
  period_length?: number[];
  period_score?: number[];
}

function parseDumpObject(name: string, value: unknown): RawDump {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    throw new Error(`${name}: dump must be an object of named arrays`);
  }
  const obj = value as Record<string, unknown>;
  const unknown = Object.keys(obj).filter(k => !ARRAY_KEYS.includes(k));
  if (unknown.length > 0) {
    throw new Error(`${name}: unknown keys ${JSON.stringify(unknown)}, expected a subset of ${JSON.stringify(ARRAY_KEYS)}`);
  }
  if (!Array.isArray(obj.periodicity)) {
    throw new Error(`${name}: periodicity must be an array`);
  }
  for (const key of ["period_length", "period_score"]) {
    if (key in obj && !Array.isArray(obj[key])) {
      throw new Error(`${name}: ${key} must be an array`);
    }
  }
  if ("period_class_scores" in obj) {
    const matrix = obj.period_class_scores;
    if (!Array.isArray(matrix) || matrix.some(row => !Array.isArray(row))) {
      throw new Error(`${name}: period_class_scores must be an array of per-frame rows`);
    }
  }
  return obj as unknown as RawDump;
}

function toBundle(videoId: string, dump: RawDump, speed: number, windowSize: number): ArrayBundle {
  return {
    videoId,
    speed,
    windowSize,
    periodicity: dump.periodicity,
    periodClassScores: dump.period_class_scores,
    periodLength: dump.period_length,
    periodScore: dump.period_score,
  };
}

/**
 * Load per-video array dumps from either layout: a directory of
 * <video_id>.json files, or a single .json file mapping video ids to
 * dumps. The name carries the video id; speed and window size come from
 * the caller and apply to every bundle.
 */
export function loadBundles(inPath: string, speed: number, windowSize: number): ArrayBundle[] {
  const stat = fs.statSync(inPath);
  const bundles: ArrayBundle[] = [];
  if (stat.isDirectory()) {
    const names = fs.readdirSync(inPath).filter(n => n.endsWith(".json")).sort();
    for (const name of names) {
      const filePath = path.join(inPath, name);
      const videoId = name.slice(0, -".json".length);
      const dump = parseDumpObject(name, parseJsonFile(filePath));
      bundles.push(toBundle(videoId, dump, speed, windowSize));
    }
  } else {
    const archive = parseJsonFile(inPath);
    if (typeof archive !== "object" || archive === null || Array.isArray(archive)) {
      throw new Error(`${inPath}: archive must be an object mapping video ids to dumps`);
    }
    for (const videoId of Object.keys(archive).sort()) {
      const dump = parseDumpObject(videoId, (archive as Record<string, unknown>)[videoId]);
      bundles.push(toBundle(videoId, dump, speed, windowSize));
    }
  }
  if (bundles.length === 0) {
    throw new Error(`${inPath}: no video dumps found`);
  }
  return bundles;
}

function parseJsonFile(filePath: string): unknown {
  const text = fs.readFileSync(filePath, "utf8");
  try {
    return JSON.parse(text);
  } catch (err) {
    throw new Error(`${filePath}: invalid JSON (${(err as Error).message})`);
  }
}

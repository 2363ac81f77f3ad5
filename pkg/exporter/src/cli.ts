#!/usr/bin/env node
import fs from "fs";
import { parseArgs } from "util";

import { loadBundles } from "./bundles";
import { checkWindowSize, convert, serializeRecord } from "./convert";

const USAGE = "usage: repeval-exporter export --in <dir-or-json> --out <preds.jsonl> [--speed S] [--window W]";

function parsePositiveInt(name: string, raw: string): number {
  if (!/^\d+$/.test(raw) || Number(raw) < 1) {
    throw new Error(`--${name} must be a positive integer, got '${raw}'`);
  }
  return Number(raw);
}

export function runExport(inPath: string, outPath: string, speed: number, windowSize: number): number {
  checkWindowSize(windowSize);
  const bundles = loadBundles(inPath, speed, windowSize);
  // Validate everything before touching the output file.
  const lines = bundles.map(b => serializeRecord(convert(b)));
  fs.writeFileSync(outPath, lines.join("\n") + "\n");
  console.log(`wrote ${lines.length} records to ${outPath}`);
  return 0;
}

export function run(argv: string[]): number {
  if (argv.length === 0 || argv[0] === "--help" || argv[0] === "-h") {
    console.log(USAGE);
    return argv.length === 0 ? 1 : 0;
  }
  if (argv[0] !== "export") {
    console.error(`error: unknown command '${argv[0]}'\n${USAGE}`);
    return 1;
  }
  let parsed;
  try {
    parsed = parseArgs({
      args: argv.slice(1),
      options: {
        in: { type: "string" },
        out: { type: "string" },
        speed: { type: "string", default: "1" },
        window: { type: "string", default: "64" },
      },
      strict: true,
    });
  } catch (err) {
    console.error(`error: ${(err as Error).message}\n${USAGE}`);
    return 1;
  }
  const { in: inPath, out: outPath, speed, window } = parsed.values;
  if (!inPath || !outPath) {
    console.error(`error: --in and --out are required\n${USAGE}`);
    return 1;
  }
  try {
    return runExport(inPath, outPath, parsePositiveInt("speed", speed!), parsePositiveInt("window", window!));
  } catch (err) {
    if (err instanceof Error && "code" in err && typeof (err as NodeJS.ErrnoException).code === "string") {
      console.error(`error: ${err.message}`);
      return 2;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

// typeof guard: this module is also imported from ESM test contexts
// where `require` does not exist.
if (typeof require !== "undefined" && typeof module !== "undefined" && require.main === module) {
  process.exit(run(process.argv.slice(2)));
}

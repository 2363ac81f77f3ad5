export interface ArrayBundle {
  videoId: string;
  speed: number;
  windowSize: number;
  periodicity: number[];
  /** T x K per-frame class score rows; mutually exclusive with the explicit pair. */
  periodClassScores?: number[][];
  periodLength?: number[];
  periodScore?: number[];
}

/** Wire shape of one prediction track; keys match the interchange stream. */
export interface PredictionRecord {
  video_id: string;
  speed: number;
  window_size: number;
  periodicity: number[];
  period_length: number[];
  period_score: number[];
}

const SUM_TOLERANCE = 1e-5;

export function checkWindowSize(windowSize: number): void {
  if (!Number.isSafeInteger(windowSize) || windowSize < 4 || windowSize % 2 !== 0) {
    throw new Error(`window_size must be an even integer >= 4, got ${windowSize}`);
  }
}

/**
 * Reduce one frame's period-class score vector to a (length, score) pair.
 *
 * Class index 0 stands for period length 2, the last index for
 * windowSize / 2, so the vector must have windowSize / 2 - 1 entries.
 * Scores are renormalized when their sum strays from 1 by more than 1e-5;
 * ties resolve to the smallest length.
 */
export function classScoresToPeriod(
  dist: number[],
  windowSize: number,
): { periodLen: number; periodScore: number } {
  checkWindowSize(windowSize);
  const k = windowSize / 2 - 1;
  if (dist.length !== k) {
    throw new Error(`score vector has ${dist.length} classes, expected ${k} for window_size ${windowSize}`);
  }
  let sum = 0;
  for (let i = 0; i < dist.length; i++) {
    const v = dist[i];
    if (!Number.isFinite(v) || v < 0) {
      throw new Error(`scores must be finite and non-negative, got ${v} at class ${i}`);
    }
    sum += v;
  }
  if (sum === 0) {
    throw new Error("scores sum to 0, cannot renormalize");
  }
  const scale = Math.abs(sum - 1) > SUM_TOLERANCE ? sum : 1;
  let best = 0;
  for (let i = 1; i < dist.length; i++) {
    if (dist[i] > dist[best]) best = i;
  }
  // An unrenormalized sum may sit up to 1e-5 above 1, carrying the max
  // with it; the stream requires scores in [0, 1].
  const periodScore = Math.min(dist[best] / scale, 1);
  return { periodLen: best + 2, periodScore };
}

/** Reject a record the interchange stream's reader would reject. */
export function validatePredictionRecord(record: PredictionRecord): void {
  if (typeof record.video_id !== "string" || record.video_id.length === 0) {
    throw new Error("video_id must be a non-empty string");
  }
  if (!Number.isSafeInteger(record.speed) || record.speed < 1) {
    throw new Error(`speed must be a positive integer, got ${record.speed}`);
  }
  checkWindowSize(record.window_size);
  const lengths = {
    periodicity: record.periodicity.length,
    period_length: record.period_length.length,
    period_score: record.period_score.length,
  };
  if (new Set(Object.values(lengths)).size !== 1) {
    throw new Error(`per-frame arrays must have equal lengths, got ${JSON.stringify(lengths)}`);
  }
  if (record.periodicity.length === 0) {
    throw new Error("per-frame arrays must be non-empty");
  }
  const half = record.window_size / 2;
  for (const name of ["periodicity", "period_score"] as const) {
    const values = record[name];
    for (let i = 0; i < values.length; i++) {
      const v = values[i];
      if (!Number.isFinite(v) || v < 0 || v > 1) {
        throw new Error(`${name}[${i}] must lie in [0, 1], got ${v}`);
      }
    }
  }
  for (let i = 0; i < record.period_length.length; i++) {
    const v = record.period_length[i];
    if (!Number.isFinite(v) || v < 2 || v > half) {
      throw new Error(`period_length[${i}] outside [2, ${half}], got ${v}`);
    }
  }
}

/**
 * Convert one bundle of saved arrays into a validated prediction record.
 *
 * Explicit length/score arrays pass through untouched; a class-score
 * matrix is reduced row by row via classScoresToPeriod.
 */
export function convert(bundle: ArrayBundle): PredictionRecord {
  const hasMatrix = bundle.periodClassScores != null;
  const hasLength = bundle.periodLength != null;
  const hasScore = bundle.periodScore != null;
  if (hasMatrix && (hasLength || hasScore)) {
    throw new Error(`${bundle.videoId}: exactly one of class scores or explicit length/score arrays, got both`);
  }
  if (!hasMatrix && !(hasLength && hasScore)) {
    throw new Error(`${bundle.videoId}: exactly one of class scores or explicit length/score arrays, got neither`);
  }

  let periodLength: number[];
  let periodScore: number[];
  if (hasMatrix) {
    const matrix = bundle.periodClassScores!;
    if (matrix.length !== bundle.periodicity.length) {
      throw new Error(
        `${bundle.videoId}: period_class_scores has ${matrix.length} rows for ${bundle.periodicity.length} periodicity frames`,
      );
    }
    periodLength = new Array(matrix.length);
    periodScore = new Array(matrix.length);
    for (let i = 0; i < matrix.length; i++) {
      try {
        const { periodLen, periodScore: score } = classScoresToPeriod(matrix[i], bundle.windowSize);
        periodLength[i] = periodLen;
        periodScore[i] = score;
      } catch (err) {
        throw new Error(`${bundle.videoId}: period_class_scores at frame ${i}: ${(err as Error).message}`);
      }
    }
  } else {
    periodLength = bundle.periodLength!.slice();
    periodScore = bundle.periodScore!.slice();
  }

  const record: PredictionRecord = {
    video_id: bundle.videoId,
    speed: bundle.speed,
    window_size: bundle.windowSize,
    periodicity: bundle.periodicity.slice(),
    period_length: periodLength,
    period_score: periodScore,
  };
  try {
    validatePredictionRecord(record);
  } catch (err) {
    throw new Error(`${bundle.videoId}: ${(err as Error).message}`);
  }
  return record;
}

export function serializeRecord(record: PredictionRecord): string {
  return JSON.stringify({
    video_id: record.video_id,
    speed: record.speed,
    window_size: record.window_size,
    periodicity: record.periodicity,
    period_length: record.period_length,
    period_score: record.period_score,
  });
}

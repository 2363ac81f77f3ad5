export {
  ArrayBundle,
  PredictionRecord,
  classScoresToPeriod,
  convert,
  serializeRecord,
  validatePredictionRecord,
} from "./convert";
export { loadBundles } from "./bundles";
export { run, runExport } from "./cli";

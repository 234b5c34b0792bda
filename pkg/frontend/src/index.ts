export { mulberry32, fnv1a, shuffleInPlace, gauss } from "./rng.js";
export {
  EmptyDocumentError,
  buildDocument,
  loadStopwords,
  tokenize,
  type DocumentText,
} from "./text.js";
export {
  MISSING,
  labeledOnly,
  loadMapping,
  loadRecords,
  stratifiedSplit,
  type CollegeMapping,
  type ThesisRecord,
} from "./records.js";
export {
  CLS_TOKEN,
  SEP_TOKEN,
  HashEncoder,
  prepareInputs,
  type PreparedExample,
} from "./encoder.js";
export {
  CONFIG_DEFAULTS,
  accuracy,
  finetune,
  loadModel,
  predictLabel,
  predictProbs,
  resolveConfig,
  saveModel,
  softmax,
  type FinetuneConfig,
  type FinetunedModel,
  type ResolvedConfig,
} from "./model.js";
export { PREDICTION_HEADER, predictToFile, type PredictOptions } from "./predict.js";

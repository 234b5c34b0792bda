/**
 * The classifier head and its training loop.
 *
 * The head is a single linear map from the pooled document vector to one
 * logit per college. Weights start at zero, so before the first update
 * every class is equally likely and the mean cross-entropy equals
 * ln(number of classes). Training is plain minibatch SGD on the exact
 * softmax cross-entropy gradient; with a fixed seed the whole run is
 * bit-reproducible.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { HashEncoder, type PreparedExample } from "./encoder.js";
import { MISSING } from "./records.js";
import { mulberry32, shuffleInPlace } from "./rng.js";

export interface FinetuneConfig {
  /** Identifier of the embedding backend; also the model column in output files. */
  pretrainedModel: string;
  seed: number;
  maxSeqLength?: number;
  epochs?: number;
  learningRate?: number;
  batchSize?: number;
  embeddingDim?: number;
}

export interface ResolvedConfig {
  pretrainedModel: string;
  seed: number;
  maxSeqLength: number;
  epochs: number;
  learningRate: number;
  batchSize: number;
  embeddingDim: number;
}

export const CONFIG_DEFAULTS = {
  maxSeqLength: 128,
  epochs: 3,
  learningRate: 2e-5,
  batchSize: 16,
  embeddingDim: 768,
} as const;

export function resolveConfig(config: FinetuneConfig): ResolvedConfig {
  const full: ResolvedConfig = {
    pretrainedModel: config.pretrainedModel,
    seed: config.seed,
    maxSeqLength: config.maxSeqLength ?? CONFIG_DEFAULTS.maxSeqLength,
    epochs: config.epochs ?? CONFIG_DEFAULTS.epochs,
    learningRate: config.learningRate ?? CONFIG_DEFAULTS.learningRate,
    batchSize: config.batchSize ?? CONFIG_DEFAULTS.batchSize,
    embeddingDim: config.embeddingDim ?? CONFIG_DEFAULTS.embeddingDim,
  };
  if (!full.pretrainedModel) throw new Error("pretrainedModel must be non-empty");
  if (!Number.isInteger(full.seed) || full.seed < 0) {
    throw new Error("seed must be a non-negative integer");
  }
  if (!Number.isInteger(full.maxSeqLength) || full.maxSeqLength < 3) {
    throw new Error("maxSeqLength must be an integer >= 3");
  }
  if (!Number.isInteger(full.epochs) || full.epochs < 1) {
    throw new Error("epochs must be a positive integer");
  }
  if (!(Number.isFinite(full.learningRate) && full.learningRate > 0)) {
    throw new Error("learningRate must be positive and finite");
  }
  if (!Number.isInteger(full.batchSize) || full.batchSize < 1) {
    throw new Error("batchSize must be a positive integer");
  }
  if (!Number.isInteger(full.embeddingDim) || full.embeddingDim < 1) {
    throw new Error("embeddingDim must be a positive integer");
  }
  return full;
}

export interface FinetunedModel {
  config: ResolvedConfig;
  /** Output classes, one logit each, in mapping order. */
  classes: string[];
  /** Row-major classes.length x embeddingDim weight matrix. */
  weights: Float64Array;
  bias: Float64Array;
  /** Mean cross-entropy before training and after each epoch. */
  lossHistory: number[];
}

export function softmax(logits: Float64Array | number[]): Float64Array {
  let max = -Infinity;
  for (const v of logits) if (v > max) max = v;
  const out = new Float64Array(logits.length);
  let total = 0;
  for (let i = 0; i < logits.length; i++) {
    out[i] = Math.exp(logits[i] - max);
    total += out[i];
  }
  for (let i = 0; i < out.length; i++) out[i] /= total;
  return out;
}

function logSumExp(logits: Float64Array): number {
  let max = -Infinity;
  for (const v of logits) if (v > max) max = v;
  let total = 0;
  for (const v of logits) total += Math.exp(v - max);
  return max + Math.log(total);
}

function headLogits(
  weights: Float64Array,
  bias: Float64Array,
  h: Float64Array,
  nClasses: number,
  dim: number,
): Float64Array {
  const logits = new Float64Array(nClasses);
  for (let c = 0; c < nClasses; c++) {
    let acc = bias[c];
    const base = c * dim;
    for (let i = 0; i < dim; i++) acc += weights[base + i] * h[i];
    logits[c] = acc;
  }
  return logits;
}

function meanLoss(
  weights: Float64Array,
  bias: Float64Array,
  hs: Float64Array[],
  ys: number[],
  nClasses: number,
  dim: number,
): number {
  let total = 0;
  for (let n = 0; n < hs.length; n++) {
    const logits = headLogits(weights, bias, hs[n], nClasses, dim);
    total += logSumExp(logits) - logits[ys[n]];
  }
  return total / hs.length;
}

/**
 * Train the classifier head on prepared examples.
 *
 * Every example must carry a label drawn from `classes`, and at least
 * two distinct labels must be present. The returned model carries its
 * full config (seed included), so it can be saved and rebuilt exactly.
 */
export function finetune(
  dataset: PreparedExample[],
  classes: string[],
  config: FinetuneConfig,
): FinetunedModel {
  const cfg = resolveConfig(config);
  if (classes.length < 2) {
    throw new Error("need at least two classes to fine-tune");
  }
  if (new Set(classes).size !== classes.length) {
    throw new Error("classes must be distinct");
  }
  if (dataset.length === 0) {
    throw new Error("dataset is empty");
  }
  const classIndex = new Map(classes.map((c, i) => [c, i]));
  const ys: number[] = [];
  for (const ex of dataset) {
    if (ex.college === null || ex.college === MISSING) {
      throw new Error(`record ${ex.recordId} is unlabeled; fine-tuning needs labeled records`);
    }
    const idx = classIndex.get(ex.college);
    if (idx === undefined) {
      throw new Error(`record ${ex.recordId} has label ${JSON.stringify(ex.college)} outside the class list`);
    }
    ys.push(idx);
  }
  if (new Set(ys).size < 2) {
    throw new Error("dataset covers fewer than two classes");
  }

  const dim = cfg.embeddingDim;
  const nClasses = classes.length;
  const encoder = new HashEncoder(cfg.pretrainedModel, dim);
  const hs = dataset.map((ex) => encoder.pooled(ex.inputTokens));

  const weights = new Float64Array(nClasses * dim);
  const bias = new Float64Array(nClasses);
  const lossHistory = [meanLoss(weights, bias, hs, ys, nClasses, dim)];

  const rand = mulberry32(cfg.seed);
  const order = hs.map((_, i) => i);
  const gradW = new Float64Array(nClasses * dim);
  const gradB = new Float64Array(nClasses);

  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    shuffleInPlace(order, rand);
    for (let start = 0; start < order.length; start += cfg.batchSize) {
      const batch = order.slice(start, start + cfg.batchSize);
      gradW.fill(0);
      gradB.fill(0);
      for (const n of batch) {
        const h = hs[n];
        const probs = softmax(headLogits(weights, bias, h, nClasses, dim));
        probs[ys[n]] -= 1; // now the dL/dlogits vector for this example
        for (let c = 0; c < nClasses; c++) {
          const g = probs[c];
          if (g === 0) continue;
          const base = c * dim;
          for (let i = 0; i < dim; i++) gradW[base + i] += g * h[i];
          gradB[c] += g;
        }
      }
      // Divide by the configured batch size, not the batch's own length:
      // every example then carries the same step weight, so a short final
      // batch cannot skew the epoch's net update toward its class mix.
      const step = cfg.learningRate / cfg.batchSize;
      for (let i = 0; i < weights.length; i++) weights[i] -= step * gradW[i];
      for (let c = 0; c < nClasses; c++) bias[c] -= step * gradB[c];
    }
    const loss = meanLoss(weights, bias, hs, ys, nClasses, dim);
    if (!Number.isFinite(loss)) {
      throw new Error(`loss diverged at epoch ${epoch + 1}`);
    }
    lossHistory.push(loss);
  }

  return { config: cfg, classes: [...classes], weights, bias, lossHistory };
}

/** Class probabilities for one prepared example. Rows sum to 1. */
export function predictProbs(model: FinetunedModel, example: PreparedExample): Float64Array {
  const encoder = new HashEncoder(model.config.pretrainedModel, model.config.embeddingDim);
  const h = encoder.pooled(example.inputTokens);
  return softmax(
    headLogits(model.weights, model.bias, h, model.classes.length, model.config.embeddingDim),
  );
}

/** The argmax class label; ties resolve to the earlier class. */
export function predictLabel(model: FinetunedModel, example: PreparedExample): string {
  const probs = predictProbs(model, example);
  let best = 0;
  for (let c = 1; c < probs.length; c++) {
    if (probs[c] > probs[best]) best = c;
  }
  return model.classes[best];
}

/** Fraction of examples whose argmax label matches their true label. */
export function accuracy(model: FinetunedModel, dataset: PreparedExample[]): number {
  if (dataset.length === 0) throw new Error("dataset is empty");
  let correct = 0;
  for (const ex of dataset) {
    if (predictLabel(model, ex) === ex.college) correct += 1;
  }
  return correct / dataset.length;
}

const MODEL_FORMAT = "collabel-finetune-model";

export function saveModel(model: FinetunedModel, path: string): void {
  const payload = {
    format: MODEL_FORMAT,
    version: 1,
    config: model.config,
    classes: model.classes,
    weights: Array.from(model.weights),
    bias: Array.from(model.bias),
    loss_history: model.lossHistory,
  };
  writeFileSync(path, JSON.stringify(payload, null, 2) + "\n", "utf-8");
}

export function loadModel(path: string): FinetunedModel {
  const raw = JSON.parse(readFileSync(path, "utf-8")) as Record<string, unknown>;
  if (raw.format !== MODEL_FORMAT) {
    throw new Error(`${path}: not a ${MODEL_FORMAT} file`);
  }
  const config = resolveConfig(raw.config as FinetuneConfig);
  const classes = raw.classes as string[];
  const weights = Float64Array.from(raw.weights as number[]);
  const bias = Float64Array.from(raw.bias as number[]);
  if (bias.length !== classes.length || weights.length !== classes.length * config.embeddingDim) {
    throw new Error(`${path}: weight shapes do not match the class list and embedding dim`);
  }
  return { config, classes, weights, bias, lossHistory: (raw.loss_history as number[]) ?? [] };
}

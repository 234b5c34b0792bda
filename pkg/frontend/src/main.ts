/**
 * Minimal command line around the fine-tuning library.
 *
 *   node dist/main.js train   --records R.jsonl --mapping M.json --stopwords S.txt \
 *                             --model-out model.json [--train-fraction 0.8] [training flags]
 *   node dist/main.js predict --model model.json --records R.jsonl --stopwords S.txt \
 *                             --out predictions.csv
 *
 * The records, mapping, and stopword files are the same ones the Python
 * CLI reads, and the prediction CSV is scoreable by its score command.
 */

import { parseArgs } from "node:util";

import { prepareInputs } from "./encoder.js";
import { finetune, loadModel, saveModel, type FinetuneConfig } from "./model.js";
import { labeledOnly, loadMapping, loadRecords, stratifiedSplit } from "./records.js";
import { loadStopwords } from "./text.js";
import { predictToFile } from "./predict.js";

function usageError(message: string): never {
  console.error(`error: ${message}`);
  console.error("usage: main.js <train|predict> [options]; see frontend/README.md");
  process.exit(2);
}

function intFlag(value: string | undefined, name: string): number | undefined {
  if (value === undefined) return undefined;
  const parsed = Number(value);
  if (!Number.isInteger(parsed)) usageError(`--${name} must be an integer`);
  return parsed;
}

function runTrain(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      records: { type: "string" },
      mapping: { type: "string" },
      stopwords: { type: "string" },
      "model-out": { type: "string" },
      "train-fraction": { type: "string" },
      "model-id": { type: "string", default: "hash-encoder-base" },
      seed: { type: "string", default: "0" },
      epochs: { type: "string" },
      "learning-rate": { type: "string" },
      "batch-size": { type: "string" },
      "max-seq-length": { type: "string" },
      "embedding-dim": { type: "string" },
    },
  });
  for (const flag of ["records", "mapping", "stopwords", "model-out"] as const) {
    if (!values[flag]) usageError(`--${flag} is required`);
  }
  const lr = values["learning-rate"] === undefined ? undefined : Number(values["learning-rate"]);
  if (lr !== undefined && !Number.isFinite(lr)) usageError("--learning-rate must be a number");
  const config: FinetuneConfig = {
    pretrainedModel: values["model-id"] as string,
    seed: intFlag(values.seed, "seed") as number,
    epochs: intFlag(values.epochs, "epochs"),
    learningRate: lr,
    batchSize: intFlag(values["batch-size"], "batch-size"),
    maxSeqLength: intFlag(values["max-seq-length"], "max-seq-length"),
    embeddingDim: intFlag(values["embedding-dim"], "embedding-dim"),
  };

  const mapping = loadMapping(values.mapping as string);
  const stopwords = loadStopwords(values.stopwords as string);
  let trainRecords = labeledOnly(loadRecords(values.records as string));
  if (values["train-fraction"] !== undefined) {
    const fraction = Number(values["train-fraction"]);
    if (!(fraction > 0 && fraction < 1)) usageError("--train-fraction must be in (0, 1)");
    trainRecords = stratifiedSplit(trainRecords, fraction, config.seed).train;
  }
  if (trainRecords.length === 0) usageError("no labeled records to train on");

  const maxLen = config.maxSeqLength ?? 128;
  const dataset = prepareInputs(trainRecords, stopwords, maxLen);
  const model = finetune(dataset, mapping.colleges, config);
  saveModel(model, values["model-out"] as string);
  const finalLoss = model.lossHistory[model.lossHistory.length - 1];
  console.log(
    `trained on ${dataset.length} records, ${model.classes.length} classes; ` +
      `loss ${model.lossHistory[0].toFixed(4)} -> ${finalLoss.toFixed(4)}`,
  );
  console.log(`model written to ${values["model-out"]}`);
}

function runPredict(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      model: { type: "string" },
      records: { type: "string" },
      stopwords: { type: "string" },
      out: { type: "string" },
      "model-name": { type: "string" },
      "sample-id": { type: "string" },
    },
  });
  for (const flag of ["model", "records", "stopwords", "out"] as const) {
    if (!values[flag]) usageError(`--${flag} is required`);
  }
  const model = loadModel(values.model as string);
  const stopwords = loadStopwords(values.stopwords as string);
  const records = labeledOnly(loadRecords(values.records as string));
  if (records.length === 0) usageError("no labeled records to predict on");
  const rows = predictToFile(model, records, stopwords, values.out as string, {
    modelName: values["model-name"],
    sampleId: intFlag(values["sample-id"], "sample-id"),
  });
  const correct = rows.filter((r) => r.trueLabel === r.predictedLabel).length;
  console.log(`${rows.length} predictions written to ${values.out} (${correct} match the true label)`);
}

function main(): void {
  const [command, ...rest] = process.argv.slice(2);
  try {
    if (command === "train") runTrain(rest);
    else if (command === "predict") runPredict(rest);
    else usageError(`unknown command ${JSON.stringify(command ?? "")}`);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    process.exit(1);
  }
}

main();

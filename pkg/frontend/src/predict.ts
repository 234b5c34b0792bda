/**
 * Prediction output. The CSV written here is a PredictionSet in exactly
 * the shape the Python `score` subcommand reads: a fixed five-column
 * header, one row per record, labels drawn from the college mapping.
 */

import { writeFileSync } from "node:fs";

import { prepareInputs, type PreparedExample } from "./encoder.js";
import { predictLabel, type FinetunedModel } from "./model.js";
import { MISSING, type ThesisRecord } from "./records.js";

export const PREDICTION_HEADER = ["record_id", "true_label", "predicted_label", "model", "sample_id"];

function csvField(value: string): string {
  if (/[",\r\n]/.test(value)) {
    return '"' + value.replaceAll('"', '""') + '"';
  }
  return value;
}

export interface PredictOptions {
  /** Value for the model column; defaults to the config's pretrained model id. */
  modelName?: string;
  /** Value for the sample_id column; defaults to 1. */
  sampleId?: number;
}

/**
 * Classify records and write them as a PredictionSet CSV.
 *
 * Every record must carry its true college so the file can be scored;
 * an unlabeled record is rejected rather than written as unscoreable.
 * Returns the rows written, one per record in input order.
 */
export function predictToFile(
  model: FinetunedModel,
  records: ThesisRecord[],
  stopwords: Set<string>,
  outPath: string,
  options: PredictOptions = {},
): { recordId: string; trueLabel: string; predictedLabel: string }[] {
  const modelName = options.modelName ?? model.config.pretrainedModel;
  const sampleId = options.sampleId ?? 1;
  if (!Number.isInteger(sampleId) || sampleId < 1) {
    throw new Error("sampleId must be a positive integer");
  }
  for (const rec of records) {
    if (rec.college === null || rec.college === MISSING) {
      throw new Error(`record ${rec.id} has no college label; scored output needs true labels`);
    }
  }
  const examples = prepareInputs(records, stopwords, model.config.maxSeqLength);
  const rows = examples.map((ex: PreparedExample) => ({
    recordId: ex.recordId,
    trueLabel: ex.college as string,
    predictedLabel: predictLabel(model, ex),
  }));
  const lines = [PREDICTION_HEADER.join(",")];
  for (const row of rows) {
    lines.push(
      [row.recordId, row.trueLabel, row.predictedLabel, modelName, String(sampleId)]
        .map(csvField)
        .join(","),
    );
  }
  writeFileSync(outPath, lines.join("\r\n") + "\r\n", "utf-8");
  return rows;
}

// Constructs the bundled segmentation network and writes it to a model
// directory (default ./model). The weights are closed-form, not trained:
// layer 1 computes a 5x5 local mean pushed through tanh edge detectors at
// fixed intensity thresholds, layer 2 combines each detector pair into a
// band-pass instance map. Two instance channels per class, with the
// person pair overlapping so union semantics are exercised on real
// outputs. Everything is deterministic by construction.

import * as fs from "node:fs";
import * as path from "node:path";

import * as tf from "@tensorflow/tfjs";

import { MODEL_INPUT_SIZE } from "./model.js";

// one instance channel per row; intensity band (lo, hi) of the local mean
const INSTANCE_BANDS = [
  { cls: "person", lo: 0.6, hi: 0.66 },
  { cls: "person", lo: 0.63, hi: 0.69 },
  { cls: "car", lo: 0.27, hi: 0.33 },
  { cls: "car", lo: 0.3, hi: 0.36 },
];
const SLOPE = 40.0; // tanh edge sharpness per unit intensity
const GAIN = 6.0; // band-pass contrast ahead of the output sigmoid

function buildModel(): tf.LayersModel {
  const size = MODEL_INPUT_SIZE;
  const nDetectors = INSTANCE_BANDS.length * 2;
  const model = tf.sequential();
  model.add(
    tf.layers.conv2d({
      inputShape: [size, size, 1],
      kernelSize: 5,
      filters: nDetectors,
      padding: "same",
      activation: "tanh",
    }),
  );
  model.add(
    tf.layers.conv2d({
      kernelSize: 1,
      filters: INSTANCE_BANDS.length,
      activation: "sigmoid",
    }),
  );

  // 5x5 box kernel scaled so the pre-activation is SLOPE * local mean
  const k1 = new Float32Array(5 * 5 * 1 * nDetectors).fill(SLOPE / 25.0);
  const b1 = new Float32Array(nDetectors);
  INSTANCE_BANDS.forEach((band, j) => {
    b1[2 * j] = -SLOPE * band.lo;
    b1[2 * j + 1] = -SLOPE * band.hi;
  });

  // channel j = sigmoid(GAIN * ((lo detector - hi detector) - 1))
  const k2 = new Float32Array(1 * 1 * nDetectors * INSTANCE_BANDS.length);
  const b2 = new Float32Array(INSTANCE_BANDS.length).fill(-GAIN);
  INSTANCE_BANDS.forEach((_, j) => {
    k2[(2 * j) * INSTANCE_BANDS.length + j] = GAIN;
    k2[(2 * j + 1) * INSTANCE_BANDS.length + j] = -GAIN;
  });

  model.setWeights([
    tf.tensor4d(k1, [5, 5, 1, nDetectors]),
    tf.tensor1d(b1),
    tf.tensor4d(k2, [1, 1, nDetectors, INSTANCE_BANDS.length]),
    tf.tensor1d(b2),
  ]);
  return model;
}

function labelMap(): Record<string, number[]> {
  const labels: Record<string, number[]> = {};
  INSTANCE_BANDS.forEach((band, j) => {
    (labels[band.cls] ??= []).push(j);
  });
  return labels;
}

async function main(): Promise<void> {
  const outDir = process.argv[2] ?? "model";
  fs.mkdirSync(outDir, { recursive: true });
  const model = buildModel();

  await tf.setBackend("cpu");
  await model.save({
    save: async (artifacts) => {
      const data = artifacts.weightData!;
      const parts = Array.isArray(data) ? data : [data];
      const weights = Buffer.concat(parts.map((p) => Buffer.from(p)));
      fs.writeFileSync(path.join(outDir, "weights.bin"), weights);
      const manifest = {
        format: "layers-model",
        generatedBy: "maskgen build-model",
        convertedBy: null,
        modelTopology: artifacts.modelTopology,
        weightsManifest: [{ paths: ["weights.bin"], weights: artifacts.weightSpecs }],
      };
      fs.writeFileSync(path.join(outDir, "model.json"), JSON.stringify(manifest));
      return {
        modelArtifactsInfo: {
          dateSaved: new Date(0),
          modelTopologyType: "JSON",
        },
      };
    },
  });
  fs.writeFileSync(
    path.join(outDir, "labels.json"),
    JSON.stringify(labelMap(), null, 2) + "\n",
  );
  console.log(`wrote segmentation model to ${outDir}`);
}

main().catch((err) => {
  console.error(err);
  process.exit(1);
});

// Loading and running the bundled segmentation network.
//
// The model lives on disk as a layers-model (model.json + weights.bin)
// plus a labels.json mapping each class name to the output channels that
// hold its instances. Inference runs on the deterministic CPU backend at
// a fixed 64x64 resolution; each output channel is one instance map with
// sigmoid activations, and an instance's detection score is its peak
// activation.

import * as fs from "node:fs";
import * as path from "node:path";

import * as tf from "@tensorflow/tfjs";

import { SetupError } from "./errors.js";

export const MODEL_INPUT_SIZE = 64;

export interface SegmentationModel {
  model: tf.LayersModel;
  labels: Record<string, number[]>; // class name -> output channel indices
  inputSize: number;
}

export interface InstanceMap {
  score: number; // peak activation in [0, 1]
  values: Float32Array; // inputSize x inputSize activations
}

function toArrayBuffer(buf: Buffer): ArrayBuffer {
  const copy = new ArrayBuffer(buf.byteLength);
  new Uint8Array(copy).set(buf);
  return copy;
}

export async function loadModel(modelDir: string): Promise<SegmentationModel> {
  const topoPath = path.join(modelDir, "model.json");
  const labelsPath = path.join(modelDir, "labels.json");
  if (!fs.existsSync(topoPath) || !fs.existsSync(labelsPath)) {
    throw new SetupError(
      `no segmentation model at ${modelDir} (expected model.json and labels.json)`,
    );
  }
  let labels: Record<string, number[]>;
  let artifacts: tf.io.ModelArtifacts;
  try {
    labels = JSON.parse(fs.readFileSync(labelsPath, "utf8"));
    const manifest = JSON.parse(fs.readFileSync(topoPath, "utf8"));
    const group = manifest.weightsManifest[0];
    const weightData = toArrayBuffer(
      fs.readFileSync(path.join(modelDir, group.paths[0])),
    );
    artifacts = {
      modelTopology: manifest.modelTopology,
      weightSpecs: group.weights,
      weightData,
    };
  } catch (err) {
    throw new SetupError(`corrupt model files in ${modelDir}: ${(err as Error).message}`);
  }
  await tf.setBackend("cpu");
  await tf.ready();
  let model: tf.LayersModel;
  try {
    model = await tf.loadLayersModel({ load: async () => artifacts });
  } catch (err) {
    throw new SetupError(`cannot load model: ${(err as Error).message}`);
  }
  return { model, labels, inputSize: MODEL_INPUT_SIZE };
}

/** All instance maps for one image, indexed by output channel. */
export function runInference(seg: SegmentationModel, pixels: Float64Array): InstanceMap[] {
  const size = seg.inputSize;
  if (pixels.length !== size * size) {
    throw new SetupError(`inference input must be ${size}x${size}`);
  }
  const out = tf.tidy(() => {
    const input = tf.tensor4d(Float32Array.from(pixels), [1, size, size, 1]);
    return seg.model.predict(input) as tf.Tensor;
  });
  const [, h, w, channels] = out.shape as number[];
  const flat = out.dataSync() as Float32Array;
  out.dispose();
  const maps: InstanceMap[] = [];
  for (let c = 0; c < channels; c += 1) {
    const values = new Float32Array(h * w);
    let score = 0;
    for (let i = 0; i < h * w; i += 1) {
      const v = flat[i * channels + c];
      values[i] = v;
      if (v > score) score = v;
    }
    maps.push({ score, values });
  }
  return maps;
}

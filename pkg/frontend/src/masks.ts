// Mask generation: run the segmentation model on one image and write one
// binary 512x512 PGM per requested class plus a key=value manifest the
// watermarking CLI's --class flags can point at directly.

import * as fs from "node:fs";
import * as path from "node:path";

import { IoError, ValidationError } from "./errors.js";
import { SegmentationModel, loadModel, runInference } from "./model.js";
import { GrayImage, readImageFile, writePgm8 } from "./pnm.js";
import { resizeBilinear } from "./resize.js";

export const MASK_SIZE = 512;
export const VERSION = "0.1.0";

export interface MaskManifest {
  image: string;
  threshold: number;
  classes: string[];
  maskPaths: Record<string, string>; // class -> written PGM path
  coverage: Record<string, number>; // class -> fraction of mask pixels set
  manifestPath: string;
}

export function parseClasses(raw: string): string[] {
  const classes = raw.split(",").map((c) => c.trim());
  if (classes.some((c) => c.length === 0)) {
    throw new ValidationError(`malformed class list ${JSON.stringify(raw)}`);
  }
  if (new Set(classes).size !== classes.length) {
    throw new ValidationError(`duplicate class in ${JSON.stringify(raw)}`);
  }
  return classes;
}

export function checkThreshold(threshold: number): number {
  if (!Number.isFinite(threshold) || threshold <= 0.0 || threshold > 1.0) {
    throw new ValidationError(`threshold must be in (0, 1], got ${threshold}`);
  }
  return threshold;
}

/** Union of the class's instance maps that score at least the threshold. */
export function unionInstances(
  instances: { score: number; values: Float32Array }[],
  threshold: number,
  size: number,
): Float64Array {
  const union = new Float64Array(size * size);
  for (const inst of instances) {
    if (inst.score < threshold) continue;
    for (let i = 0; i < union.length; i += 1) {
      if (inst.values[i] >= 0.5) union[i] = 1.0;
    }
  }
  return union;
}

/** Resize a binary map to the output size and re-binarize at 0.5. */
export function projectMask(union: Float64Array, srcSize: number): GrayImage {
  const up = resizeBilinear(
    { width: srcSize, height: srcSize, data: union },
    MASK_SIZE,
    MASK_SIZE,
  );
  for (let i = 0; i < up.data.length; i += 1) {
    up.data[i] = up.data[i] >= 0.5 ? 1.0 : 0.0;
  }
  return up;
}

export interface GenerateOptions {
  imagePath: string;
  classes: string[];
  threshold: number;
  outDir: string;
  modelDir: string;
}

export async function generateMasks(opts: GenerateOptions): Promise<MaskManifest> {
  const threshold = checkThreshold(opts.threshold);
  if (opts.classes.length === 0) {
    throw new ValidationError("at least one class is required");
  }
  const seg: SegmentationModel = await loadModel(opts.modelDir);
  const known = Object.keys(seg.labels);
  for (const cls of opts.classes) {
    if (!(cls in seg.labels)) {
      throw new ValidationError(
        `class ${JSON.stringify(cls)} not in the model's label set (${known.join(", ")})`,
      );
    }
  }

  const image = readImageFile(opts.imagePath);
  const small = resizeBilinear(image, seg.inputSize, seg.inputSize);
  const maps = runInference(seg, small.data);

  try {
    fs.mkdirSync(opts.outDir, { recursive: true });
  } catch (err) {
    throw new IoError(`cannot create ${opts.outDir}: ${(err as Error).message}`);
  }

  const stem = path.basename(opts.imagePath).replace(/\.[^.]*$/, "");
  const maskPaths: Record<string, string> = {};
  const coverage: Record<string, number> = {};
  for (const cls of opts.classes) {
    const instances = seg.labels[cls].map((channel) => maps[channel]);
    const union = unionInstances(instances, threshold, seg.inputSize);
    const mask = projectMask(union, seg.inputSize);
    let set = 0;
    for (const v of mask.data) set += v;
    const maskPath = path.join(opts.outDir, `${stem}_${cls}.pgm`);
    writePgm8(mask, maskPath, `maskgen ${VERSION} class=${cls}`);
    maskPaths[cls] = maskPath;
    coverage[cls] = set / mask.data.length;
  }

  const manifestPath = path.join(opts.outDir, `${stem}.manifest`);
  const lines = [
    `# maskgen ${VERSION} image=${opts.imagePath} threshold=${threshold}`,
    `image=${opts.imagePath}`,
    `classes=${opts.classes.join(",")}`,
    `threshold=${threshold}`,
  ];
  for (const cls of opts.classes) {
    lines.push(`mask_${cls}=${maskPaths[cls]}`);
  }
  try {
    fs.writeFileSync(manifestPath, lines.join("\n") + "\n");
  } catch (err) {
    throw new IoError(`cannot write ${manifestPath}: ${(err as Error).message}`);
  }

  return {
    image: opts.imagePath,
    threshold,
    classes: opts.classes,
    maskPaths,
    coverage,
    manifestPath,
  };
}

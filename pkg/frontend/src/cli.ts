#!/usr/bin/env node
// maskgen: emit per-class binary masks for one image.
//
// Exit codes follow the consumer's convention: 0 success, 1 validation
// error, 2 I/O error, 3 setup/internal error (model missing or broken).

import * as path from "node:path";
import { fileURLToPath } from "node:url";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { IoError, SetupError, ValidationError } from "./errors.js";
import { VERSION, generateMasks, parseClasses } from "./masks.js";

const DEFAULT_MODEL_DIR = path.join(
  path.dirname(fileURLToPath(import.meta.url)),
  "..",
  "model",
);

async function main(): Promise<void> {
  const argv = await yargs(hideBin(process.argv))
    .scriptName("maskgen")
    .version(VERSION)
    .option("image", { type: "string", demandOption: true, describe: "input PGM/PPM image" })
    .option("classes", {
      type: "string",
      demandOption: true,
      describe: "comma list of class names, e.g. person,car",
    })
    .option("threshold", {
      type: "number",
      default: 0.5,
      describe: "minimum instance detection score in (0, 1]",
    })
    .option("out", { type: "string", demandOption: true, describe: "output directory" })
    .option("model-dir", {
      type: "string",
      default: DEFAULT_MODEL_DIR,
      describe: "segmentation model directory",
    })
    .strict()
    .parseAsync();

  const manifest = await generateMasks({
    imagePath: argv.image,
    classes: parseClasses(argv.classes),
    threshold: argv.threshold,
    outDir: argv.out,
    modelDir: argv["model-dir"],
  });
  for (const cls of manifest.classes) {
    const pct = (100 * manifest.coverage[cls]).toFixed(1);
    console.log(`wrote ${manifest.maskPaths[cls]} (coverage ${pct}%)`);
  }
  console.log(`wrote ${manifest.manifestPath}`);
}

main().catch((err) => {
  if (err instanceof ValidationError || err instanceof IoError || err instanceof SetupError) {
    console.error(`maskgen: ${err.message}`);
    process.exit(err.exitCode);
  }
  console.error(err);
  process.exit(3);
});

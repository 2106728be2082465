// Error taxonomy mirroring the watermarking CLI's exit codes:
// validation 1, I/O 2, setup/internal 3.

export class ValidationError extends Error {
  readonly exitCode = 1;
}

export class IoError extends Error {
  readonly exitCode = 2;
}

export class SetupError extends Error {
  readonly exitCode = 3;
}

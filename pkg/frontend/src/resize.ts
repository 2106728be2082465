// Bilinear resampling with half-pixel-centered sampling, the same
// convention the watermarking toolkit uses: destination pixel centers map
// to source coordinates (i + 0.5) * src/dst - 0.5, clamped at the borders.
// Keeping one geometry authority means masks resized here binarize to the
// exact pixels the consumer would compute itself.

import { GrayImage } from "./pnm.js";

function axis(dst: number, src: number): [Int32Array, Int32Array, Float64Array] {
  const lo = new Int32Array(dst);
  const hi = new Int32Array(dst);
  const w = new Float64Array(dst);
  for (let i = 0; i < dst; i += 1) {
    let pos = (i + 0.5) * (src / dst) - 0.5;
    if (pos < 0) pos = 0;
    if (pos > src - 1) pos = src - 1;
    const f = Math.floor(pos);
    lo[i] = f;
    hi[i] = Math.min(f + 1, src - 1);
    w[i] = pos - f;
  }
  return [lo, hi, w];
}

export function resizeBilinear(img: GrayImage, width: number, height: number): GrayImage {
  if (width < 1 || height < 1) throw new Error("target dimensions must be >= 1");
  const [y0, y1, wy] = axis(height, img.height);
  const [x0, x1, wx] = axis(width, img.width);
  const out = new Float64Array(width * height);
  const src = img.data;
  for (let y = 0; y < height; y += 1) {
    const r0 = y0[y] * img.width;
    const r1 = y1[y] * img.width;
    const fy = wy[y];
    for (let x = 0; x < width; x += 1) {
      const fx = wx[x];
      const top = src[r0 + x0[x]] * (1.0 - fx) + src[r0 + x1[x]] * fx;
      const bot = src[r1 + x0[x]] * (1.0 - fx) + src[r1 + x1[x]] * fx;
      let v = top * (1.0 - fy) + bot * fy;
      if (v < 0.0) v = 0.0;
      if (v > 1.0) v = 1.0;
      out[y * width + x] = v;
    }
  }
  return { width, height, data: out };
}

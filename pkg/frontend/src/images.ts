/** Render tensor payloads as SVG pixel grids.
 *
 * Images arrive as base64 float32 blobs with shape (c, h, w); values are
 * already in [0, 1] (diff images arrive pre-normalized by the API, so no
 * client-side rescaling happens here). Channels are averaged to grayscale
 * for display only.
 */

import type { TensorPayload } from "./types.js";

export function decodeTensor(payload: TensorPayload): Float32Array {
  const binary = atob(payload.data);
  const bytes = new Uint8Array(binary.length);
  for (let i = 0; i < binary.length; i++) {
    bytes[i] = binary.charCodeAt(i);
  }
  return new Float32Array(bytes.buffer);
}

export function imageSvg(payload: TensorPayload, cell = 6): SVGSVGElement {
  const [channels, height, width] = payload.shape;
  const values = decodeTensor(payload);
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("width", String(width * cell));
  svg.setAttribute("height", String(height * cell));
  svg.setAttribute("class", "pixel-image");
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      let v = 0;
      for (let ch = 0; ch < channels; ch++) {
        v += values[ch * height * width + y * width + x];
      }
      v /= channels;
      const level = Math.max(0, Math.min(255, Math.round(v * 255)));
      const rect = document.createElementNS("http://www.w3.org/2000/svg", "rect");
      rect.setAttribute("x", String(x * cell));
      rect.setAttribute("y", String(y * cell));
      rect.setAttribute("width", String(cell));
      rect.setAttribute("height", String(cell));
      rect.setAttribute("fill", `rgb(${level},${level},${level})`);
      svg.appendChild(rect);
    }
  }
  return svg;
}

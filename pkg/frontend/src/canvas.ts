/**
 * World <-> screen mapping for the 2-D input canvas.
 *
 * The only geometry the UI performs is this affine transform (plus its
 * inverse for picking).  Polygons, segments and shades arrive fully formed
 * from the service and are merely mapped point-by-point through it.
 */

import type { Transform } from "./state.js";

/**
 * Fit the world box `bounds` ([[xlo,xhi],[ylo,yhi]]) into a width x height
 * screen with `pad` pixels of margin, preserving aspect ratio.
 */
export function fitTransform(
  bounds: number[][],
  width: number,
  height: number,
  pad = 24,
): Transform {
  const [xlo, xhi] = bounds[0];
  const [ylo, yhi] = bounds[1];
  const spanX = xhi - xlo;
  const spanY = yhi - ylo;
  const scale = Math.min(
    (width - 2 * pad) / spanX,
    (height - 2 * pad) / spanY,
  );
  // Center the box: offsets are the screen position of world (0, 0).
  const cx = (xlo + xhi) / 2;
  const cy = (ylo + yhi) / 2;
  return {
    scale,
    offsetX: width / 2 - cx * scale,
    offsetY: height / 2 + cy * scale,
  };
}

/** World point to screen pixels.  Screen y grows downward. */
export function toScreen(t: Transform, p: number[]): number[] {
  return [t.offsetX + p[0] * t.scale, t.offsetY - p[1] * t.scale];
}

/** Screen pixels back to world coordinates. */
export function toWorld(t: Transform, s: number[]): number[] {
  return [(s[0] - t.offsetX) / t.scale, (t.offsetY - s[1]) / t.scale];
}

/** Zoom by `factor` about a fixed screen point (the cursor). */
export function zoomAt(t: Transform, anchor: number[], factor: number): Transform {
  const scale = t.scale * factor;
  return {
    scale,
    offsetX: anchor[0] - (anchor[0] - t.offsetX) * factor,
    offsetY: anchor[1] - (anchor[1] - t.offsetY) * factor,
  };
}

/** Translate the view by a screen-space delta. */
export function panBy(t: Transform, dx: number, dy: number): Transform {
  return { ...t, offsetX: t.offsetX + dx, offsetY: t.offsetY + dy };
}

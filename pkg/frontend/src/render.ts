/**
 * Canvas painting.  Every shape drawn here comes straight out of a service
 * payload — region polygons, constraint segments, shade polygons, witness
 * points — pushed through the screen transform and nothing else.
 */

import type { Transform, ViewState } from "./state.js";
import { cachedRegions, highlightSegments, whyNotWitness } from "./state.js";
import { toScreen } from "./canvas.js";

/** Fill colors per class index, cycled when a model has more classes. */
const CLASS_FILLS = [
  "rgba(66, 133, 244, 0.18)",
  "rgba(219, 68, 55, 0.18)",
  "rgba(15, 157, 88, 0.18)",
  "rgba(244, 160, 0, 0.20)",
  "rgba(171, 71, 188, 0.18)",
  "rgba(0, 172, 193, 0.18)",
];

const CLASS_STROKES = [
  "#4285f4",
  "#db4437",
  "#0f9d58",
  "#f4a000",
  "#ab47bc",
  "#00acc1",
];

export function classFill(classIndex: number): string {
  return CLASS_FILLS[classIndex % CLASS_FILLS.length];
}

export function classStroke(classIndex: number): string {
  return CLASS_STROKES[classIndex % CLASS_STROKES.length];
}

function tracePolygon(
  ctx: CanvasRenderingContext2D,
  t: Transform,
  polygon: number[][],
): void {
  ctx.beginPath();
  polygon.forEach((p, i) => {
    const [sx, sy] = toScreen(t, p);
    if (i === 0) ctx.moveTo(sx, sy);
    else ctx.lineTo(sx, sy);
  });
  ctx.closePath();
}

function drawSegment(
  ctx: CanvasRenderingContext2D,
  t: Transform,
  segment: number[][],
): void {
  const [a, b] = segment;
  const [ax, ay] = toScreen(t, a);
  const [bx, by] = toScreen(t, b);
  ctx.beginPath();
  ctx.moveTo(ax, ay);
  ctx.lineTo(bx, by);
  ctx.stroke();
}

function drawDot(
  ctx: CanvasRenderingContext2D,
  t: Transform,
  p: number[],
  radius: number,
  fill: string,
): void {
  const [sx, sy] = toScreen(t, p);
  ctx.beginPath();
  ctx.arc(sx, sy, radius, 0, 2 * Math.PI);
  ctx.fillStyle = fill;
  ctx.fill();
}

function drawBounds(
  ctx: CanvasRenderingContext2D,
  t: Transform,
  bounds: number[][],
): void {
  const [xlo, xhi] = bounds[0];
  const [ylo, yhi] = bounds[1];
  tracePolygon(ctx, t, [
    [xlo, ylo],
    [xhi, ylo],
    [xhi, yhi],
    [xlo, yhi],
  ]);
  ctx.strokeStyle = "#888";
  ctx.lineWidth = 1;
  ctx.stroke();
}

/** Repaint the whole scene from the current state. */
export function drawScene(
  ctx: CanvasRenderingContext2D,
  state: ViewState,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  const t = state.transform;
  const model = state.model;
  if (t === null || model === null || model.input_dim !== 2) return;

  // Region sweep, behind everything else.
  if (state.showRegions) {
    const sweep = cachedRegions(state);
    if (sweep !== null) {
      for (const region of sweep.regions) {
        tracePolygon(ctx, t, region.polygon);
        ctx.fillStyle = classFill(region.class_index);
        ctx.fill();
        ctx.strokeStyle = "rgba(0, 0, 0, 0.15)";
        ctx.lineWidth = 1;
        ctx.stroke();
      }
    }
  }

  drawBounds(ctx, t, model.bounds);

  // Why: shade the satisfied side of each minimal constraint, then the
  // boundary segments on top.
  if (state.why !== null) {
    for (const c of state.why.minimal_constraints) {
      if (c.shade != null) {
        tracePolygon(ctx, t, c.shade);
        ctx.fillStyle = "rgba(66, 133, 244, 0.08)";
        ctx.fill();
      }
    }
    for (const c of state.why.minimal_constraints) {
      if (c.segment != null) {
        ctx.strokeStyle = c.strict ? "#d97706" : "#2563eb";
        ctx.lineWidth = 2;
        ctx.setLineDash(c.strict ? [6, 4] : []);
        drawSegment(ctx, t, c.segment);
        ctx.setLineDash([]);
      }
    }
  }

  // Why-not: highlighted crossed hyperplanes, witness, and the hop arrow.
  const highlights = highlightSegments(state);
  for (const seg of highlights) {
    ctx.strokeStyle = "#dc2626";
    ctx.lineWidth = 3;
    drawSegment(ctx, t, seg);
  }
  const witness = whyNotWitness(state);
  if (witness !== null && state.currentInput !== null) {
    const [ax, ay] = toScreen(t, state.currentInput);
    const [bx, by] = toScreen(t, witness);
    ctx.strokeStyle = "#dc2626";
    ctx.lineWidth = 1.5;
    ctx.setLineDash([4, 3]);
    ctx.beginPath();
    ctx.moveTo(ax, ay);
    ctx.lineTo(bx, by);
    ctx.stroke();
    ctx.setLineDash([]);
    drawDot(ctx, t, witness, 5, "#dc2626");
  }

  // Current input marker on top of everything.
  if (state.currentInput !== null) {
    const cls = state.prediction ? state.prediction.class_index : 0;
    drawDot(ctx, t, state.currentInput, 6, classStroke(cls));
    const [sx, sy] = toScreen(t, state.currentInput);
    ctx.strokeStyle = "#fff";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(sx, sy, 6, 0, 2 * Math.PI);
    ctx.stroke();
  }
}

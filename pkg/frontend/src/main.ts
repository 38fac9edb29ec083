/**
 * DOM wiring for the explorer page.
 *
 * Flow: load /model once, then every click (or form submit, for models with
 * more than two inputs) posts /predict, and the explanation panels fire
 * their own requests against the same input.  All text shown in the panels
 * is placed with textContent, verbatim from the service payloads.
 */

import { ApiClient, ApiError } from "./api.js";
import type { ModelInfo } from "./api.js";
import {
  applyModel,
  applyPrediction,
  applyRegions,
  applyWhy,
  applyWhyNot,
  badge,
  cachedRegions,
  initialState,
  modelKey,
  selectClass,
  setError,
  whyLines,
  whyNotLines,
  type ViewState,
} from "./state.js";
import { fitTransform, panBy, toWorld, zoomAt } from "./canvas.js";
import { classStroke, drawScene } from "./render.js";

const api = new ApiClient("");

let state: ViewState = initialState();

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
};

const canvas = $<HTMLCanvasElement>("plane");
const ctx = canvas.getContext("2d")!;
const badgeEl = $<HTMLSpanElement>("badge");
const chipEl = $<HTMLSpanElement>("chip");
const logitsEl = $<HTMLSpanElement>("logits");
const errorEl = $<HTMLDivElement>("error-strip");
const whyListEl = $<HTMLUListElement>("why-list");
const whyMetaEl = $<HTMLParagraphElement>("why-meta");
const whyNotListEl = $<HTMLUListElement>("whynot-list");
const whyNotMetaEl = $<HTMLParagraphElement>("whynot-meta");
const classSelect = $<HTMLSelectElement>("class-select");
const whyBtn = $<HTMLButtonElement>("why-btn");
const whyNotBtn = $<HTMLButtonElement>("whynot-btn");
const vrepToggle = $<HTMLInputElement>("vrep-toggle");
const regionsToggle = $<HTMLInputElement>("regions-toggle");
const formEl = $<HTMLFormElement>("input-form");
const modelNameEl = $<HTMLSpanElement>("model-name");
const modelShapeEl = $<HTMLSpanElement>("model-shape");

function setState(next: ViewState): void {
  state = next;
  paint();
}

function paint(): void {
  // Error strip.
  if (state.error !== null) {
    errorEl.textContent = state.error;
    errorEl.hidden = false;
  } else {
    errorEl.hidden = true;
  }

  // Prediction badge.
  const b = badge(state);
  if (b !== null) {
    badgeEl.textContent = b.label;
    badgeEl.style.background = classStroke(state.prediction!.class_index);
    chipEl.textContent = b.chip;
    const p = state.prediction!;
    const logits = p.logits.map((v) => v.toFixed(4));
    let line = `logits [${logits.join(", ")}]`;
    if (!p.inside_bounds) line += "  (outside bounds)";
    if (p.boundary) line += "  (on a region boundary)";
    logitsEl.textContent = line;
  } else {
    badgeEl.textContent = "–";
    badgeEl.style.background = "#999";
    chipEl.textContent = "";
    logitsEl.textContent = "";
  }

  // Why panel: verbatim constraint text, one line each.
  whyListEl.replaceChildren(
    ...whyLines(state).map((text) => {
      const li = document.createElement("li");
      li.textContent = text;
      return li;
    }),
  );
  if (state.why !== null) {
    whyMetaEl.textContent =
      `${state.why.minimal_constraints.length} constraint(s) kept, ` +
      `${state.why.removed_count} redundant one(s) removed`;
  } else {
    whyMetaEl.textContent = "";
  }

  // Why-not panel.
  whyNotListEl.replaceChildren(
    ...whyNotLines(state).map((text) => {
      const li = document.createElement("li");
      li.textContent = text;
      return li;
    }),
  );
  if (state.whyNot !== null && state.whyNot.kind === "different_region") {
    whyNotMetaEl.textContent =
      `distance ${state.whyNot.distance}, ` +
      `${state.whyNot.examined} signature(s) examined`;
  } else {
    whyNotMetaEl.textContent = "";
  }

  drawScene(ctx, state, canvas.width, canvas.height);
}

function reportError(err: unknown): void {
  if (err instanceof DOMException && err.name === "AbortError") {
    return; // superseded by a newer request; nothing to show
  }
  if (err instanceof ApiError) {
    let msg = `${err.code}: ${err.message}`;
    if (err.status === 422) {
      msg += " — pick a different counterfactual class.";
    }
    setState(setError(state, msg));
    return;
  }
  setState(setError(state, String(err)));
}

function currentFormInput(info: ModelInfo): number[] | null {
  const values: number[] = [];
  for (let i = 0; i < info.input_dim; i++) {
    const field = document.getElementById(`coord-${i}`) as HTMLInputElement;
    const v = Number(field.value);
    if (!Number.isFinite(v)) return null;
    values.push(v);
  }
  return values;
}

async function submitInput(input: number[]): Promise<void> {
  try {
    const resp = await api.predict(input);
    setState(applyPrediction(state, input, resp));
  } catch (err) {
    reportError(err);
  }
}

async function requestWhy(): Promise<void> {
  if (state.currentInput === null) {
    setState(setError(state, "pick an input point first"));
    return;
  }
  try {
    const resp = await api.explainWhy(state.currentInput, vrepToggle.checked);
    setState(applyWhy(state, resp));
  } catch (err) {
    reportError(err);
  }
}

async function requestWhyNot(): Promise<void> {
  if (state.currentInput === null) {
    setState(setError(state, "pick an input point first"));
    return;
  }
  if (state.selectedClass === null) {
    setState(setError(state, "pick a counterfactual class first"));
    return;
  }
  try {
    const resp = await api.explainWhyNot(state.currentInput, state.selectedClass);
    setState(applyWhyNot(state, resp));
  } catch (err) {
    reportError(err);
  }
}

async function toggleRegions(): Promise<void> {
  if (!regionsToggle.checked) {
    setState({ ...state, showRegions: false });
    return;
  }
  if (state.model === null) return;
  if (cachedRegions(state) !== null) {
    setState({ ...state, showRegions: true });
    return;
  }
  const center = state.model.bounds.map(([lo, hi]) => (lo + hi) / 2);
  try {
    const resp = await api.regions(center, 256);
    setState(applyRegions(state, modelKey(state.model), resp));
  } catch (err) {
    regionsToggle.checked = false;
    reportError(err);
  }
}

function buildClassPicker(info: ModelInfo): void {
  classSelect.replaceChildren(
    ...info.class_names.map((name, i) => {
      const opt = document.createElement("option");
      opt.value = String(i);
      opt.textContent = name;
      return opt;
    }),
  );
  classSelect.addEventListener("change", () => {
    setState(selectClass(state, Number(classSelect.value)));
  });
  setState(selectClass(state, Number(classSelect.value)));
}

function buildForm(info: ModelInfo): void {
  const rows = info.bounds.map(([lo, hi], i) => {
    const label = document.createElement("label");
    label.textContent = `x${i + 1} ∈ [${lo}, ${hi}] `;
    const field = document.createElement("input");
    field.type = "number";
    field.step = "any";
    field.id = `coord-${i}`;
    field.value = String((lo + hi) / 2);
    label.appendChild(field);
    return label;
  });
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Predict";
  formEl.replaceChildren(...rows, submit);
  formEl.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const input = currentFormInput(info);
    if (input === null) {
      setState(setError(state, "every coordinate needs a number"));
      return;
    }
    void submitInput(input);
  });
}

function wireCanvas(info: ModelInfo): void {
  canvas.hidden = false;
  setState({
    ...state,
    transform: fitTransform(info.bounds, canvas.width, canvas.height),
  });

  let dragging = false;
  let moved = false;
  let last: number[] = [0, 0];

  canvas.addEventListener("mousedown", (ev) => {
    dragging = true;
    moved = false;
    last = [ev.offsetX, ev.offsetY];
  });
  canvas.addEventListener("mousemove", (ev) => {
    if (!dragging || state.transform === null) return;
    const dx = ev.offsetX - last[0];
    const dy = ev.offsetY - last[1];
    if (Math.abs(dx) + Math.abs(dy) > 2) moved = true;
    if (moved) {
      last = [ev.offsetX, ev.offsetY];
      setState({ ...state, transform: panBy(state.transform, dx, dy) });
    }
  });
  window.addEventListener("mouseup", (ev) => {
    if (!dragging) return;
    dragging = false;
    if (moved || state.transform === null) return;
    const rect = canvas.getBoundingClientRect();
    const world = toWorld(state.transform, [
      ev.clientX - rect.left,
      ev.clientY - rect.top,
    ]);
    void submitInput(world);
  });
  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    if (state.transform === null) return;
    const factor = ev.deltaY < 0 ? 1.15 : 1 / 1.15;
    setState({
      ...state,
      transform: zoomAt(state.transform, [ev.offsetX, ev.offsetY], factor),
    });
  });
}

async function boot(): Promise<void> {
  let info: ModelInfo;
  try {
    info = await api.getModel();
  } catch (err) {
    reportError(err);
    return;
  }
  setState(applyModel(state, info));
  modelNameEl.textContent = `${info.class_names.length}-class ReLU net`;
  modelShapeEl.textContent = info.layer_widths.join(" → ");
  buildClassPicker(info);

  if (info.input_dim === 2) {
    wireCanvas(info);
    formEl.hidden = true;
  } else {
    // Higher-dimensional models fall back to a coordinate form and
    // text-only explanations; the canvas and overlay stay hidden.
    canvas.hidden = true;
    regionsToggle.disabled = true;
    vrepToggle.disabled = true;
    buildForm(info);
  }

  whyBtn.addEventListener("click", () => void requestWhy());
  whyNotBtn.addEventListener("click", () => void requestWhyNot());
  regionsToggle.addEventListener("change", () => void toggleRegions());
  paint();
}

void boot();

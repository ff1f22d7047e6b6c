/** Form-side mirror of the API's parameter contract.
 *
 * fgsm takes epsilon only; bim and pgd take epsilon plus steps. A form state
 * validates only when the active attack's parameter set is exactly
 * satisfied, so a permitted launch is never rejected by the API for
 * parameter-shape reasons.
 */

import type { AttackAlgorithm, DefenseKind } from "./types.js";

export interface AttackFormState {
  algorithm: AttackAlgorithm;
  epsilon: string; // raw field text
  steps: string;
  sampleCount: string;
  seed: string;
}

export interface DefenseFormState {
  kind: DefenseKind;
  mixRatio: string;
  epochs: string;
  lr: string;
  latentDim: string;
  windowCapacity: string;
  similarityThreshold: string;
  riskThreshold: string;
}

export function attackNeedsSteps(algorithm: AttackAlgorithm): boolean {
  return algorithm === "bim" || algorithm === "pgd";
}

function asNumber(text: string): number | null {
  if (text.trim() === "") return null;
  const value = Number(text);
  return Number.isFinite(value) ? value : null;
}

function asInteger(text: string): number | null {
  const value = asNumber(text);
  return value !== null && Number.isInteger(value) ? value : null;
}

export function attackFormErrors(form: AttackFormState): string[] {
  const errors: string[] = [];
  const epsilon = asNumber(form.epsilon);
  if (epsilon === null || epsilon < 0) {
    errors.push("epsilon must be a number >= 0");
  }
  if (attackNeedsSteps(form.algorithm)) {
    const steps = asInteger(form.steps);
    if (steps === null || steps < 1) {
      errors.push(`${form.algorithm} requires integer steps >= 1`);
    }
  }
  const samples = asInteger(form.sampleCount);
  if (samples === null || samples < 1) {
    errors.push("sample count must be an integer >= 1");
  }
  if (asInteger(form.seed) === null) {
    errors.push("seed must be an integer");
  }
  return errors;
}

export function defenseFormErrors(form: DefenseFormState): string[] {
  const errors: string[] = [];
  const optional = (
    text: string,
    label: string,
    check: (v: number) => boolean,
    integer = false,
  ) => {
    if (text.trim() === "") return;
    const value = integer ? asInteger(text) : asNumber(text);
    if (value === null || !check(value)) errors.push(label);
  };
  switch (form.kind) {
    case "none":
      break;
    case "adversarial_training":
      optional(form.mixRatio, "mix ratio must be in [0, 1]", (v) => v >= 0 && v <= 1);
      optional(form.epochs, "epochs must be an integer >= 0", (v) => v >= 0, true);
      optional(form.lr, "learning rate must be > 0", (v) => v > 0);
      break;
    case "dim_reduction_input":
    case "dim_reduction_embedding":
      optional(form.latentDim, "latent dim must be an integer >= 1", (v) => v >= 1, true);
      optional(form.epochs, "epochs must be an integer >= 0", (v) => v >= 0, true);
      optional(form.lr, "learning rate must be > 0", (v) => v > 0);
      break;
    case "prediction_similarity":
      optional(form.windowCapacity, "window capacity must be an integer >= 1",
               (v) => v >= 1, true);
      optional(form.similarityThreshold, "similarity threshold must be in (0, 1]",
               (v) => v > 0 && v <= 1);
      optional(form.riskThreshold, "risk threshold must be in (0, 1]",
               (v) => v > 0 && v <= 1);
      break;
  }
  return errors;
}

/** Request bodies built from a validated form; fields the user left blank
 * are omitted so API defaults apply. */
export function buildAttackBlock(form: AttackFormState): Record<string, unknown> {
  const block: Record<string, unknown> = {
    algorithm: form.algorithm,
    epsilon: Number(form.epsilon),
  };
  if (attackNeedsSteps(form.algorithm)) {
    block.steps = Number(form.steps);
  }
  const seed = Number(form.seed);
  if (seed !== 0) block.seed = seed;
  return block;
}

export function buildDefenseBlock(
  attack: AttackFormState,
  form: DefenseFormState,
): Record<string, unknown> | null {
  if (form.kind === "none") return null;
  const block: Record<string, unknown> = { kind: form.kind };
  const put = (key: string, text: string, integer = false) => {
    if (text.trim() === "") return;
    block[key] = integer ? Math.trunc(Number(text)) : Number(text);
  };
  if (form.kind === "adversarial_training") {
    block.attack = buildAttackBlock(attack);
    put("mix_ratio", form.mixRatio);
    put("epochs", form.epochs, true);
    put("lr", form.lr);
  } else if (form.kind === "dim_reduction_input" || form.kind === "dim_reduction_embedding") {
    put("latent_dim", form.latentDim, true);
    put("epochs", form.epochs, true);
    put("lr", form.lr);
  } else {
    put("window_capacity", form.windowCapacity, true);
    put("similarity_threshold", form.similarityThreshold);
    put("risk_threshold", form.riskThreshold);
  }
  return block;
}

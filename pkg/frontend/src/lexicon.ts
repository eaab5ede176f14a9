/** Lexicon inspector math: weight bars and the client-side response heatmap.
 *
 * The heatmap is the one place the client computes a model quantity itself:
 * sigmoid(w·x + b) over a 21×21 grid of a chosen 2-feature slice, with the
 * remaining features fixed at 0.5 (lateral, the only signed feature, at 0).
 */

import type { LexiconWordView } from "./types.js";

export const FEATURE_NAMES = [
  "size",
  "elongation",
  "cornerness",
  "intensity",
  "lateral",
  "depth",
] as const;

export const LATERAL_INDEX = 4;

/** Inclusive [lo, hi] per feature; lateral is signed. */
export function featureRange(index: number): [number, number] {
  return index === LATERAL_INDEX ? [-1, 1] : [0, 1];
}

export function sigmoid(z: number): number {
  return z >= 0 ? 1 / (1 + Math.exp(-z)) : Math.exp(z) / (1 + Math.exp(z));
}

export function responseAt(word: LexiconWordView, x: readonly number[]): number {
  let z = word.bias;
  for (let i = 0; i < word.weights.length; i++) z += word.weights[i] * x[i];
  return sigmoid(z);
}

/** The neutral probe point the heatmap slices through. */
export function baselinePoint(): number[] {
  return FEATURE_NAMES.map((_, i) => (i === LATERAL_INDEX ? 0 : 0.5));
}

export interface Heatmap {
  featureI: number;
  featureJ: number;
  /** Grid coordinates along each axis, low to high. */
  axisI: number[];
  axisJ: number[];
  /** values[row][col] = response at (axisI[row], axisJ[col]). */
  values: number[][];
}

export function heatmap(
  word: LexiconWordView,
  featureI: number,
  featureJ: number,
  gridSize = 21,
): Heatmap {
  if (featureI === featureJ) throw new Error("heatmap needs two distinct features");
  const axis = (index: number) => {
    const [lo, hi] = featureRange(index);
    return Array.from({ length: gridSize }, (_, k) => lo + ((hi - lo) * k) / (gridSize - 1));
  };
  const axisI = axis(featureI);
  const axisJ = axis(featureJ);
  const base = baselinePoint();
  const values = axisI.map((vi) =>
    axisJ.map((vj) => {
      const x = base.slice();
      x[featureI] = vi;
      x[featureJ] = vj;
      return responseAt(word, x);
    }),
  );
  return { featureI, featureJ, axisI, axisJ, values };
}

export interface WeightBar {
  name: string;
  value: number;
}

/** Bars are the payload weights verbatim — no scaling, no rounding. */
export function weightBars(word: LexiconWordView): WeightBar[] {
  return word.weights.map((value, i) => ({
    name: word.feature_names[i] ?? FEATURE_NAMES[i],
    value,
  }));
}

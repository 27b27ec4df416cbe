// Pure view-model derivation from the service's state payload.  All
// dose-finding logic lives on the server; this module only reshapes the
// payload for display and never computes a recommendation of its own.

import type { Decision, Dose, TrialView } from "./types.js";

export interface GridCell {
  dose: Dose;
  n: number;
  y: number;
  estimate: number | null;
  tried: boolean;
  current: boolean;
  recommended: boolean;
  shade: number; // 0..4 heat bucket from estimate quantiles, -1 when unknown
}

export interface GridViewModel {
  rows: GridCell[][]; // agent-B levels from highest (top) to lowest (bottom)
  banner: string;
  terminated: boolean;
  recommendation: Decision;
}

function sameDose(a: Dose | null, b: Dose | null): boolean {
  return !!a && !!b && a.j === b.j && a.k === b.k;
}

// Quantile-based shading: scenarios vary too widely for fixed bins, so each
// estimate is bucketed by its rank among the currently displayed estimates.
export function shadeBuckets(estimates: (number | null)[]): number[] {
  const present = estimates.filter((v): v is number => v !== null).slice().sort((a, b) => a - b);
  return estimates.map((v) => {
    if (v === null || present.length === 0) return -1;
    const below = present.filter((x) => x < v).length;
    const rank = below / present.length;
    return Math.min(4, Math.floor(rank * 5));
  });
}

export function statusBanner(view: TrialView): string {
  if (view.recommendation.action === "terminate") {
    const why = view.recommendation.reason;
    return `Trial stopped (${why}) after ${view.patients} patients, ${view.dlts} DLTs.`;
  }
  const dose = view.recommendation.dose!;
  return (
    `${view.design}: ${view.phase} phase, ${view.patients}/${view.study.max_n} patients, ` +
    `${view.dlts} DLTs. Next: (${dose.j}, ${dose.k}).`
  );
}

export function renderGrid(view: TrialView): GridViewModel {
  const { J, K } = view.grid;
  const current = view.log.length ? view.log[view.log.length - 1].dose : null;
  const recommended = view.recommendation.action === "assign" ? view.recommendation.dose : null;

  const flatEstimates: (number | null)[] = [];
  for (let k = 0; k < K; k++) {
    for (let j = 0; j < J; j++) {
      flatEstimates.push(view.estimates ? view.estimates[k][j] : null);
    }
  }
  const shades = shadeBuckets(flatEstimates);

  const rows: GridCell[][] = [];
  for (let k = K; k >= 1; k--) {
    const row: GridCell[] = [];
    for (let j = 1; j <= J; j++) {
      const dose = { j, k };
      const idx = (k - 1) * J + (j - 1);
      row.push({
        dose,
        n: view.n[k - 1][j - 1],
        y: view.y[k - 1][j - 1],
        estimate: flatEstimates[idx],
        tried: view.n[k - 1][j - 1] > 0,
        current: sameDose(current, dose),
        recommended: sameDose(recommended, dose),
        shade: shades[idx],
      });
    }
    rows.push(row);
  }
  return {
    rows,
    banner: statusBanner(view),
    terminated: view.recommendation.action === "terminate",
    recommendation: view.recommendation,
  };
}

export function recommendedCells(model: GridViewModel): GridCell[] {
  return model.rows.flat().filter((c) => c.recommended);
}

export interface TimelineEntry {
  index: number; // 1-based cohort number
  label: string;
  dose: Dose;
  patients: number;
  dlts: number;
}

export function historyTimeline(log: TrialView["log"]): TimelineEntry[] {
  return log.map((entry, i) => ({
    index: i + 1,
    label: `#${i + 1}: (${entry.dose.j}, ${entry.dose.k}) ${entry.dlts}/${entry.patients} DLT`,
    dose: entry.dose,
    patients: entry.patients,
    dlts: entry.dlts,
  }));
}

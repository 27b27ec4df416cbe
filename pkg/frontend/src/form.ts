// Cohort entry: validation mirrors the server rules, posts carry an
// idempotency key so a retried submission is never double-applied, and a
// revision conflict surfaces the fresh state instead of overwriting it.

import { ApiError, ConductClient } from "./api.js";
import type { Dose, PostCohortResponse, TrialView } from "./types.js";

export interface CohortFormInput {
  dose: Dose;
  patients: number;
  dlts: number;
  override?: boolean;
  note?: string;
}

export function validateCohortForm(input: CohortFormInput): string[] {
  const errors: string[] = [];
  if (!Number.isInteger(input.patients) || input.patients < 1) {
    errors.push("patients must be a positive whole number");
  }
  if (!Number.isInteger(input.dlts) || input.dlts < 0) {
    errors.push("DLT count must be a non-negative whole number");
  }
  if (Number.isInteger(input.patients) && Number.isInteger(input.dlts) && input.dlts > input.patients) {
    errors.push("DLT count cannot exceed the number of patients");
  }
  if (input.override && !input.note?.trim()) {
    errors.push("an audit note is required when overriding the recommendation");
  }
  return errors;
}

export function newIdempotencyKey(): string {
  const rnd = Math.random().toString(16).slice(2);
  return `ui-${Date.now().toString(16)}-${rnd}`;
}

export type SubmitResult =
  | { kind: "applied"; response: PostCohortResponse }
  | { kind: "conflict"; fresh: TrialView }
  | { kind: "invalid"; errors: string[] };

export async function submitCohort(
  client: ConductClient,
  trialId: string,
  revision: number,
  input: CohortFormInput,
  key: string = newIdempotencyKey(),
  retries: number = 2,
): Promise<SubmitResult> {
  const errors = validateCohortForm(input);
  if (errors.length) {
    return { kind: "invalid", errors };
  }
  const body = {
    dose: input.dose,
    patients: input.patients,
    dlts: input.dlts,
    idempotency_key: key,
    expected_revision: revision,
    override: input.override ?? false,
    note: input.note,
  };
  for (let attempt = 0; ; attempt++) {
    try {
      const response = await client.postCohort(trialId, body);
      return { kind: "applied", response };
    } catch (err) {
      if (err instanceof ApiError) {
        if (err.status === 409 && err.code === "revision-conflict") {
          const fresh = await client.getTrial(trialId);
          return { kind: "conflict", fresh };
        }
        if (err.status === 422) {
          return { kind: "invalid", errors: [err.message] };
        }
        throw err;
      }
      // network failure: retry with the same key so the server applies at
      // most one cohort for this submission
      if (attempt >= retries) throw err;
    }
  }
}

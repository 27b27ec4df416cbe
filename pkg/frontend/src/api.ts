// Thin typed client for the conduct service.

import type { DesignInfo, PostCohortBody, PostCohortResponse, TrialView } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ConductClient {
  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(this.base + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    const body = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      throw new ApiError(resp.status, body.code ?? "error", body.message ?? resp.statusText);
    }
    return body as T;
  }

  designs(): Promise<{ designs: DesignInfo[] }> {
    return this.request("/api/designs");
  }

  createTrial(req: Record<string, unknown>): Promise<TrialView> {
    return this.request("/api/trials", { method: "POST", body: JSON.stringify(req) });
  }

  getTrial(id: string): Promise<TrialView> {
    return this.request(`/api/trials/${id}`);
  }

  listTrials(): Promise<string[]> {
    return this.request("/api/trials");
  }

  postCohort(id: string, body: PostCohortBody): Promise<PostCohortResponse> {
    return this.request(`/api/trials/${id}/cohorts`, { method: "POST", body: JSON.stringify(body) });
  }

  undo(id: string): Promise<TrialView> {
    return this.request(`/api/trials/${id}/undo`, { method: "POST" });
  }
}

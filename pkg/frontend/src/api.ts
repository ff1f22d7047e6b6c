/** Thin fetch client for the workbench API. One base-URL setting. */

import type {
  DatasetSummary,
  ModelSummary,
  RunIndexEntry,
  RunRecord,
} from "./types.js";

const BASE_URL_KEY = "advlab-base-url";
export const DEFAULT_BASE_URL = "http://127.0.0.1:8000";

export function getBaseUrl(): string {
  try {
    return localStorage.getItem(BASE_URL_KEY) ?? DEFAULT_BASE_URL;
  } catch {
    return DEFAULT_BASE_URL;
  }
}

export function setBaseUrl(url: string): void {
  try {
    localStorage.setItem(BASE_URL_KEY, url);
  } catch {
    // storage unavailable: keep the default for this session
  }
}

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, detail: string) {
    super(detail);
    this.status = status;
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(`${getBaseUrl()}${path}`, init);
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const detail =
      typeof (body as { detail?: unknown }).detail === "string"
        ? (body as { detail: string }).detail
        : `HTTP ${response.status}`;
    throw new ApiError(response.status, detail);
  }
  return body as T;
}

export const api = {
  listModels: () => request<ModelSummary[]>("/models"),
  getModel: (id: string) =>
    request<{ id: string; manifest: Record<string, unknown> }>(`/models/${id}`),
  listDatasets: () => request<DatasetSummary[]>("/datasets"),
  listRuns: () => request<RunIndexEntry[]>("/runs"),
  getRun: (id: string) => request<RunRecord>(`/runs/${id}`),
  launchAttack: (body: Record<string, unknown>) =>
    request<RunRecord>("/attacks", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }),
  launchDefense: (body: Record<string, unknown>) =>
    request<RunRecord>("/defenses", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }),
};

// Thin typed client over the session endpoints. All state lives on the
// server; this module never invents or caches engine output.

import type {
  AnswerBody,
  CreateResponse,
  MetricsResponse,
  SessionSnapshot,
  TurnResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`API error ${status}: ${detail}`);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class TutorApi {
  constructor(readonly baseUrl: string = "") {}

  createSession(seed?: number): Promise<CreateResponse> {
    return request<CreateResponse>(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: JSON.stringify(seed === undefined ? {} : { seed }),
    });
  }

  submitAnswer(sessionId: string, answer: AnswerBody): Promise<TurnResponse> {
    return request<TurnResponse>(`${this.baseUrl}/sessions/${sessionId}/answer`, {
      method: "POST",
      body: JSON.stringify(answer),
    });
  }

  getState(sessionId: string): Promise<SessionSnapshot> {
    return request<SessionSnapshot>(`${this.baseUrl}/sessions/${sessionId}`);
  }

  getMetrics(sessionId: string): Promise<MetricsResponse> {
    return request<MetricsResponse>(`${this.baseUrl}/sessions/${sessionId}/metrics`);
  }

  deleteSession(sessionId: string): Promise<{ deleted: boolean }> {
    return request<{ deleted: boolean }>(`${this.baseUrl}/sessions/${sessionId}`, {
      method: "DELETE",
    });
  }
}

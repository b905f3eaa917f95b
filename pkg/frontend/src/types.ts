// Payload shapes of the tutoring session API.

export interface PromptJson {
  kind: string;
  text: string;
  expected: "free-text" | "yes-no" | "ordering" | "none" | string;
  context: Record<string, unknown>;
}

export interface TurnResponse {
  messages: PromptJson[];
  prompt: PromptJson | null;
  status: string;
  generation: number;
  solved_at: number | null;
}

export interface CreateResponse extends TurnResponse {
  id: string;
}

export interface AnswerBody {
  text: string;
  affirmative?: boolean | null;
}

export interface KnownRow {
  object: number;
  eqn: number;
  var: number;
  symbol: string;
  zone: number;
  response: string;
  provenance: string;
}

export interface ZoneRow {
  object: number;
  zone: number;
  description: string;
}

export interface EventJson {
  generation: number;
  kind: string;
  payload: Record<string, unknown>;
  timestamp: number;
}

export interface SessionSnapshot {
  status: string;
  generation: number;
  solved_at: number | null;
  target: { var: string; object_text: string; zone_text: string } | null;
  objects: Record<string, string>;
  objects_closed: boolean;
  zones: ZoneRow[];
  knowns: KnownRow[];
  pending: PromptJson | null;
  events: EventJson[];
}

export interface GenerationRow {
  generation: number;
  responses: number;
  min_fitness: number;
  mean_fitness: number;
  max_fitness: number;
}

export interface TimelineRow {
  generation: number;
  object: number;
  eqn: number;
  var: string;
  zone: number;
  provenance: string;
  response: string;
}

export interface MetricsResponse {
  per_generation: GenerationRow[];
  knowns_timeline: TimelineRow[];
  solved_at: number | null;
}

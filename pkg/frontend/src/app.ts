// Application wiring: one session, one pending prompt at a time.
//
// State renders exclusively from server responses; submissions are disabled
// while a request is in flight, honoring the server's one-pending-prompt
// contract. On a terminal status the input area is frozen for good.

import { TutorApi } from "./api.js";
import {
  appendTurn,
  engineLine,
  studentLine,
  type TranscriptLine,
} from "./transcript.js";
import {
  renderCharts,
  renderKnownsPanel,
  renderObjectsPanel,
  renderPromptControls,
  renderStatus,
  renderTranscript,
  renderZonesPanel,
  setControlsEnabled,
} from "./render.js";
import type { AnswerBody, PromptJson, TurnResponse } from "./types.js";

export interface AppElements {
  transcript: HTMLElement;
  controls: HTMLElement;
  status: HTMLElement;
  objects: HTMLElement;
  zones: HTMLElement;
  knowns: HTMLElement;
  charts: HTMLElement;
}

export class TutorApp {
  readonly api: TutorApi;
  sessionId: string | null = null;
  lines: TranscriptLine[] = [];
  pending: PromptJson | null = null;
  status = "running";
  private inFlight = false;

  constructor(
    private readonly elements: AppElements,
    api?: TutorApi,
    readonly seed?: number,
  ) {
    this.api = api ?? new TutorApi();
  }

  get busy(): boolean {
    return this.inFlight;
  }

  async start(): Promise<void> {
    const created = await this.api.createSession(this.seed);
    this.sessionId = created.id;
    this.applyTurn(created);
    await this.refreshPanels();
    this.renderControls();
  }

  /** Handle one server turn: extend the transcript, park the new pending
   * prompt, re-render the dialog (controls are re-rendered only once the
   * whole cycle, panels included, is done — clicks in between would be
   * dropped by the in-flight guard). */
  private applyTurn(turn: TurnResponse): void {
    this.lines = appendTurn(this.lines, turn);
    this.pending = turn.prompt;
    this.status = turn.status;
    renderTranscript(this.elements.transcript, this.lines);
    renderStatus(this.elements.status, turn.status, turn.generation, turn.solved_at);
  }

  private renderControls(): void {
    this.elements.controls.replaceChildren();
    if (this.pending === null) {
      // terminal: frozen input
      const done = document.createElement("p");
      done.className = "frozen-input";
      done.textContent = `session ${this.status}; input closed`;
      this.elements.controls.appendChild(done);
      return;
    }
    this.elements.controls.appendChild(
      renderPromptControls(this.pending, (answer) => void this.submit(answer)),
    );
  }

  async submit(answer: AnswerBody): Promise<void> {
    if (this.inFlight || this.sessionId === null || this.pending === null) return;
    this.inFlight = true;
    setControlsEnabled(this.elements.controls, false);
    try {
      this.lines = [...this.lines, studentLine(answer.text)];
      const turn = await this.api.submitAnswer(this.sessionId, answer);
      this.applyTurn(turn);
      await this.refreshPanels();
    } finally {
      this.inFlight = false;
      this.renderControls();
    }
  }

  async refreshPanels(): Promise<void> {
    if (this.sessionId === null) return;
    const state = await this.api.getState(this.sessionId);
    renderObjectsPanel(this.elements.objects, state.objects, state.objects_closed);
    renderZonesPanel(this.elements.zones, state.zones);
    const metrics = await this.api.getMetrics(this.sessionId);
    renderKnownsPanel(this.elements.knowns, metrics.knowns_timeline);
    renderCharts(this.elements.charts, metrics.per_generation);
  }
}

export function mount(root: Document = document, baseUrl = ""): TutorApp {
  const byId = (id: string): HTMLElement => {
    const element = root.getElementById(id);
    if (!element) throw new Error(`missing #${id}`);
    return element;
  };
  const app = new TutorApp(
    {
      transcript: byId("transcript"),
      controls: byId("controls"),
      status: byId("status"),
      objects: byId("panel-objects"),
      zones: byId("panel-zones"),
      knowns: byId("panel-knowns"),
      charts: byId("panel-charts"),
    },
    new TutorApi(baseUrl),
  );
  void app.start();
  return app;
}

export { engineLine };

// DOM rendering: transcript lines, the answer controls for each prompt
// kind, and the side panels. Engine text renders plain, student text bold,
// caution prompts quote the prior response, zone ordering is a
// drag-to-order list, and unknown prompt kinds fall back to a plain text
// box so nothing is ever swallowed.

import type {
  GenerationRow,
  KnownRow,
  PromptJson,
  TimelineRow,
  ZoneRow,
} from "./types.js";
import type { TranscriptLine } from "./transcript.js";
import type { AnswerBody } from "./types.js";

export type SubmitHandler = (answer: AnswerBody) => void;

export function renderTranscript(container: HTMLElement, lines: TranscriptLine[]): void {
  container.replaceChildren();
  for (const line of lines) {
    const element = document.createElement("div");
    element.className = `line ${line.speaker}`;
    if (line.speaker === "student") {
      const bold = document.createElement("strong");
      bold.textContent = line.text;
      element.appendChild(bold);
    } else {
      element.textContent = line.text;
      element.dataset.kind = line.kind;
    }
    container.appendChild(element);
  }
  container.scrollTop = container.scrollHeight;
}

function yesNoControls(prompt: PromptJson, onSubmit: SubmitHandler): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "controls yes-no";
  for (const [label, value] of [
    ["yes", true],
    ["no", false],
  ] as const) {
    const button = document.createElement("button");
    button.textContent = label;
    button.dataset.answer = label;
    button.addEventListener("click", () => onSubmit({ text: label, affirmative: value }));
    wrap.appendChild(button);
  }
  return wrap;
}

function freeTextControls(onSubmit: SubmitHandler): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "controls free-text";
  const input = document.createElement("input");
  input.type = "text";
  input.placeholder = "your answer";
  const button = document.createElement("button");
  button.textContent = "send";
  const submit = () => {
    if (input.value.trim()) onSubmit({ text: input.value });
  };
  button.addEventListener("click", submit);
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") submit();
  });
  wrap.append(input, button);
  return wrap;
}

function orderingControls(prompt: PromptJson, onSubmit: SubmitHandler): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "controls ordering";
  const zones = (prompt.context.zones ?? []) as { zone: number; description: string }[];
  const list = document.createElement("ul");
  list.className = "order-list";
  for (const zone of zones) {
    const item = document.createElement("li");
    item.draggable = true;
    item.dataset.zone = String(zone.zone);
    item.textContent = `[${zone.zone}] ${zone.description}`;
    item.addEventListener("dragstart", () => item.classList.add("dragging"));
    item.addEventListener("dragend", () => item.classList.remove("dragging"));
    list.appendChild(item);
  }
  list.addEventListener("dragover", (event) => {
    event.preventDefault();
    const dragging = list.querySelector<HTMLElement>(".dragging");
    const target = (event.target as HTMLElement).closest("li");
    if (!dragging || !target || target === dragging) return;
    const items = Array.from(list.children);
    const from = items.indexOf(dragging);
    const to = items.indexOf(target);
    if (from < to) target.after(dragging);
    else target.before(dragging);
  });
  const button = document.createElement("button");
  button.textContent = "this order";
  button.addEventListener("click", () => {
    const order = Array.from(list.querySelectorAll<HTMLElement>("li"))
      .map((item) => item.dataset.zone)
      .join(" ");
    onSubmit({ text: order });
  });
  wrap.append(list, button);
  return wrap;
}

/** Controls for the pending prompt. Caution prompts additionally surface
 * the quoted prior response so the student can see what they are
 * confirming against. */
export function renderPromptControls(
  prompt: PromptJson,
  onSubmit: SubmitHandler,
): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = `prompt kind-${prompt.kind}`;
  if (prompt.kind === "caution-confirm") {
    const past = prompt.context.past as { response?: string } | undefined;
    if (past?.response) {
      const quote = document.createElement("blockquote");
      quote.className = "quoted-response";
      quote.textContent = past.response;
      wrap.appendChild(quote);
    }
  }
  switch (prompt.expected) {
    case "yes-no":
      wrap.appendChild(yesNoControls(prompt, onSubmit));
      break;
    case "ordering":
      wrap.appendChild(orderingControls(prompt, onSubmit));
      break;
    case "free-text":
      wrap.appendChild(freeTextControls(onSubmit));
      break;
    default:
      // unknown prompt shape: show raw text entry rather than dropping it
      wrap.appendChild(freeTextControls(onSubmit));
      break;
  }
  return wrap;
}

export function setControlsEnabled(root: HTMLElement, enabled: boolean): void {
  for (const element of root.querySelectorAll<HTMLButtonElement | HTMLInputElement>(
    "button, input",
  )) {
    element.disabled = !enabled;
  }
}

export function renderKnownsPanel(container: HTMLElement, rows: TimelineRow[]): void {
  container.replaceChildren();
  const table = document.createElement("table");
  table.className = "knowns";
  const head = document.createElement("tr");
  for (const column of ["Generation", "Equation", "Variable", "Zone", "Response"]) {
    const cell = document.createElement("th");
    cell.textContent = column;
    head.appendChild(cell);
  }
  table.appendChild(head);
  for (const row of rows) {
    const tr = document.createElement("tr");
    tr.className = `provenance-${row.provenance}`;
    for (const value of [row.generation, row.eqn, row.var, row.zone, row.response]) {
      const cell = document.createElement("td");
      cell.textContent = String(value);
      tr.appendChild(cell);
    }
    table.appendChild(tr);
  }
  container.appendChild(table);
}

export function renderObjectsPanel(
  container: HTMLElement,
  objects: Record<string, string>,
  closed: boolean,
): void {
  container.replaceChildren();
  const list = document.createElement("ul");
  for (const [index, description] of Object.entries(objects)) {
    const item = document.createElement("li");
    item.textContent = `#${index}: ${description}`;
    list.appendChild(item);
  }
  container.appendChild(list);
  if (closed) {
    const note = document.createElement("p");
    note.className = "registry-closed";
    note.textContent = "no more objects";
    container.appendChild(note);
  }
}

export function renderZonesPanel(container: HTMLElement, zones: ZoneRow[]): void {
  container.replaceChildren();
  const list = document.createElement("ul");
  for (const zone of zones) {
    const item = document.createElement("li");
    item.textContent = `object ${zone.object}, zone ${zone.zone}: ${zone.description}`;
    list.appendChild(item);
  }
  container.appendChild(list);
}

export function renderStatus(
  container: HTMLElement,
  status: string,
  generation: number,
  solvedAt: number | null,
): void {
  container.textContent =
    status === "solved"
      ? `solved at generation ${solvedAt}`
      : `${status} (generation ${generation})`;
  container.dataset.status = status;
}

export function renderCharts(container: HTMLElement, rows: GenerationRow[]): void {
  container.replaceChildren();
  const fitness = rows.map((row) => row.mean_fitness);
  const productivity = rows.map((row) => row.responses);
  container.appendChild(labelled("mean fitness", sparkline(fitness)));
  container.appendChild(labelled("productivity", bars(productivity)));
}

function labelled(text: string, chart: SVGElement): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "chart";
  const label = document.createElement("span");
  label.textContent = text;
  wrap.append(label, chart);
  return wrap;
}

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 160;
const HEIGHT = 36;

/** Inline line sparkline; no charting stack, just a polyline. */
export function sparkline(values: number[]): SVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "sparkline");
  if (values.length === 0) return svg;
  const low = Math.min(...values);
  const high = Math.max(...values);
  const span = high - low || 1;
  const step = values.length > 1 ? WIDTH / (values.length - 1) : 0;
  const points = values
    .map((value, index) => {
      const x = values.length > 1 ? index * step : WIDTH / 2;
      const y = HEIGHT - 2 - ((value - low) / span) * (HEIGHT - 4);
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
  const line = document.createElementNS(SVG_NS, "polyline");
  line.setAttribute("points", points);
  line.setAttribute("fill", "none");
  svg.appendChild(line);
  return svg;
}

/** Inline bar sparkline for small count series. */
export function bars(values: number[]): SVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "sparkbars");
  if (values.length === 0) return svg;
  const high = Math.max(...values, 1);
  const slot = WIDTH / values.length;
  values.forEach((value, index) => {
    const bar = document.createElementNS(SVG_NS, "rect");
    const height = (value / high) * (HEIGHT - 4);
    bar.setAttribute("x", (index * slot + 1).toFixed(1));
    bar.setAttribute("y", (HEIGHT - 2 - height).toFixed(1));
    bar.setAttribute("width", Math.max(slot - 2, 1).toFixed(1));
    bar.setAttribute("height", height.toFixed(1));
    svg.appendChild(bar);
  });
  return svg;
}

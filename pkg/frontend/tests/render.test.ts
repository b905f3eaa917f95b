import { beforeEach, describe, expect, it, vi } from "vitest";

import {
  bars,
  renderKnownsPanel,
  renderPromptControls,
  renderStatus,
  renderTranscript,
  setControlsEnabled,
  sparkline,
} from "../src/render.js";
import type { PromptJson } from "../src/types.js";

const caution: PromptJson = {
  kind: "caution-confirm",
  text: "Do you know the initial position of the car…?",
  expected: "yes-no",
  context: {
    new_symbol: "x0",
    object: 1,
    zone: 0,
    past: { symbol: "a", response: "5 m/s^2" },
  },
};

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("renderPromptControls", () => {
  it("caution prompts show yes/no buttons and quote the prior response", () => {
    const element = renderPromptControls(caution, () => {});
    const quote = element.querySelector(".quoted-response");
    expect(quote?.textContent).toBe("5 m/s^2");
    const labels = [...element.querySelectorAll("button")].map((b) => b.textContent);
    expect(labels).toEqual(["yes", "no"]);
  });

  it("yes/no buttons submit the matching affirmative", () => {
    const onSubmit = vi.fn();
    const element = renderPromptControls(caution, onSubmit);
    (element.querySelector("button[data-answer=no]") as HTMLButtonElement).click();
    expect(onSubmit).toHaveBeenCalledWith({ text: "no", affirmative: false });
  });

  it("free-text prompts submit trimmed-nonempty input on click or enter", () => {
    const onSubmit = vi.fn();
    const element = renderPromptControls(
      { kind: "know-variable", text: "?", expected: "free-text", context: {} },
      onSubmit,
    );
    const input = element.querySelector("input") as HTMLInputElement;
    const button = element.querySelector("button") as HTMLButtonElement;
    button.click();
    expect(onSubmit).not.toHaveBeenCalled();
    input.value = "0 m/s";
    button.click();
    expect(onSubmit).toHaveBeenCalledWith({ text: "0 m/s" });
  });

  it("unknown prompt kinds fall back to a text box", () => {
    const element = renderPromptControls(
      { kind: "telepathy", text: "?", expected: "mindmeld", context: {} },
      () => {},
    );
    expect(element.querySelector("input")).not.toBeNull();
  });

  it("zone ordering renders a draggable list and submits the visual order", () => {
    const onSubmit = vi.fn();
    const element = renderPromptControls(
      {
        kind: "zone-order",
        text: "order?",
        expected: "ordering",
        context: {
          zones: [
            { zone: 6, description: "coasting" },
            { zone: 5, description: "accelerating" },
          ],
        },
      },
      onSubmit,
    );
    document.body.appendChild(element);
    const items = element.querySelectorAll("li");
    expect(items).toHaveLength(2);
    expect(items[0]!.draggable).toBe(true);

    // drag the second item above the first
    const list = element.querySelector("ul")!;
    const dragged = items[1]!;
    dragged.dispatchEvent(new Event("dragstart", { bubbles: true }));
    items[0]!.dispatchEvent(new Event("dragover", { bubbles: true, cancelable: true }));
    dragged.dispatchEvent(new Event("dragend", { bubbles: true }));
    expect(
      [...list.querySelectorAll("li")].map((item) => item.dataset.zone),
    ).toEqual(["5", "6"]);

    (element.querySelector("button") as HTMLButtonElement).click();
    expect(onSubmit).toHaveBeenCalledWith({ text: "5 6" });
  });
});

describe("renderTranscript", () => {
  it("styles engine lines plain and student lines bold", () => {
    const container = document.createElement("div");
    renderTranscript(container, [
      { speaker: "engine", kind: "know-variable", text: "Do you know x?" },
      { speaker: "student", kind: "answer", text: "42 m" },
    ]);
    const lines = container.querySelectorAll(".line");
    expect(lines[0]!.classList.contains("engine")).toBe(true);
    expect(lines[0]!.querySelector("strong")).toBeNull();
    expect(lines[1]!.querySelector("strong")?.textContent).toBe("42 m");
  });
});

describe("panels and status", () => {
  it("knowns panel shows generation/equation/variable/zone/response", () => {
    const container = document.createElement("div");
    renderKnownsPanel(container, [
      {
        generation: 1, object: 1, eqn: 2, var: "v0x", zone: 0,
        provenance: "student", response: "0 m/s",
      },
    ]);
    const headers = [...container.querySelectorAll("th")].map((th) => th.textContent);
    expect(headers).toEqual(["Generation", "Equation", "Variable", "Zone", "Response"]);
    expect(container.querySelector("tr.provenance-student")).not.toBeNull();
  });

  it("status reflects solved generation", () => {
    const container = document.createElement("div");
    renderStatus(container, "solved", 2, 2);
    expect(container.textContent).toBe("solved at generation 2");
    expect(container.dataset.status).toBe("solved");
  });

  it("setControlsEnabled toggles buttons and inputs", () => {
    const element = renderPromptControls(caution, () => {});
    setControlsEnabled(element, false);
    expect([...element.querySelectorAll("button")].every((b) => b.disabled)).toBe(true);
    setControlsEnabled(element, true);
    expect([...element.querySelectorAll("button")].every((b) => !b.disabled)).toBe(true);
  });
});

describe("sparklines", () => {
  it("line sparkline maps the series into the viewbox", () => {
    const svg = sparkline([5000, 4990, 4950]);
    const points = svg.querySelector("polyline")?.getAttribute("points") ?? "";
    expect(points.split(" ")).toHaveLength(3);
  });

  it("bar sparkline draws one rect per value", () => {
    expect(bars([2, 0, 1]).querySelectorAll("rect")).toHaveLength(3);
  });

  it("empty series render empty charts", () => {
    expect(sparkline([]).querySelector("polyline")).toBeNull();
    expect(bars([]).querySelectorAll("rect")).toHaveLength(0);
  });
});

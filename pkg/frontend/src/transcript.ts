// The dialog transcript: an ordered list of engine and student lines.
//
// Lines are only ever appended from server responses (prompts, messages)
// or from answers the student actually submitted, so the transcript can be
// checked verbatim against the server's event log. `linesFromEvents` is
// that check: it derives the expected line sequence from the log.

import type { EventJson, PromptJson, TurnResponse } from "./types.js";

export interface TranscriptLine {
  speaker: "engine" | "student";
  kind: string;
  text: string;
}

export function engineLine(prompt: PromptJson): TranscriptLine {
  return { speaker: "engine", kind: prompt.kind, text: prompt.text };
}

export function studentLine(text: string): TranscriptLine {
  return { speaker: "student", kind: "answer", text };
}

/** Append one server turn: informational messages first, then the next
 * pending prompt, exactly in server order. */
export function appendTurn(lines: TranscriptLine[], turn: TurnResponse): TranscriptLine[] {
  const next = lines.slice();
  for (const message of turn.messages) {
    next.push(engineLine(message));
  }
  if (turn.prompt !== null) {
    next.push(engineLine(turn.prompt));
  }
  return next;
}

/** The line sequence implied by the server event log. Question and caution
 * events carry both the engine text and the student's reply; solve events
 * carry advice the engine printed. */
export function linesFromEvents(events: EventJson[]): TranscriptLine[] {
  const lines: TranscriptLine[] = [];
  for (const event of events) {
    if (event.kind === "question" || event.kind === "caution") {
      const payload = event.payload as {
        prompt_kind?: string;
        text?: string;
        reply?: string | null;
      };
      lines.push({
        speaker: "engine",
        kind: payload.prompt_kind ?? event.kind,
        text: payload.text ?? "",
      });
      if (payload.reply !== null && payload.reply !== undefined) {
        lines.push(studentLine(payload.reply));
      }
    } else if (event.kind === "solve") {
      const payload = event.payload as { advice?: string };
      lines.push({ speaker: "engine", kind: "solve-advice", text: payload.advice ?? "" });
    }
  }
  return lines;
}

/** True when every engine line in the transcript appears, in order, in the
 * sequence derived from the event log — the no-fabrication invariant. */
export function matchesEventLog(lines: TranscriptLine[], events: EventJson[]): boolean {
  const expected = linesFromEvents(events);
  if (lines.length !== expected.length) return false;
  return lines.every(
    (line, index) =>
      line.speaker === expected[index]!.speaker && line.text === expected[index]!.text,
  );
}

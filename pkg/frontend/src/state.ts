// UI flow state machine. Every question shown came from the service's
// /next endpoint and every answer is a literal "yes" or "no"; this module
// never invents idents or diagnostic text.

import type { SessionResult } from "./api.js";

export type Phase =
  | { kind: "idle" }
  | { kind: "asking"; ident: string; prompt: string }
  | { kind: "result"; result: SessionResult }
  | { kind: "error"; message: string };

export interface TranscriptRow {
  ident: string;
  prompt: string;
  answer: "yes" | "no";
}

export type Listener = () => void;

/** The slice of the HTTP client the controller depends on. */
export interface SessionApi {
  createSession(): Promise<string>;
  nextQuestion(sessionId: string): Promise<{ ident: string; prompt: string } | null>;
  postAnswer(
    sessionId: string,
    ident: string,
    answer: "yes" | "no",
  ): Promise<{ status: string; questionsAsked: number }>;
  fetchResult(sessionId: string): Promise<SessionResult>;
}

export class FlowController {
  phase: Phase = { kind: "idle" };
  transcript: TranscriptRow[] = [];
  busy = false;

  private readonly api: SessionApi;
  private readonly listeners: Listener[] = [];
  private sessionId: string | null = null;
  // Bumped on every (re)start; stale in-flight responses are dropped.
  private generation = 0;

  constructor(api: SessionApi) {
    this.api = api;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  /** Create a session and show its first question. */
  async start(): Promise<void> {
    if (this.busy) return;
    const gen = ++this.generation;
    this.busy = true;
    this.sessionId = null;
    this.transcript = [];
    this.emit();
    try {
      const sessionId = await this.api.createSession();
      if (gen !== this.generation) return;
      this.sessionId = sessionId;
      await this.advance(gen, sessionId);
    } catch (err) {
      this.fail(gen, err);
    }
  }

  /** Restart doubles as the retry affordance: always a fresh session. */
  async restart(): Promise<void> {
    this.phase = { kind: "idle" };
    this.busy = false;
    await this.start();
  }

  /** No-op unless a question is showing and nothing is in flight. */
  async answer(answer: "yes" | "no"): Promise<void> {
    if (this.busy || this.phase.kind !== "asking" || this.sessionId === null) {
      return;
    }
    const gen = this.generation;
    const sessionId = this.sessionId;
    const { ident, prompt } = this.phase;
    this.busy = true;
    this.emit();
    try {
      const outcome = await this.api.postAnswer(sessionId, ident, answer);
      if (gen !== this.generation) return;
      this.transcript.push({ ident, prompt, answer });
      if (outcome.status === "in_progress") {
        await this.advance(gen, sessionId);
      } else {
        await this.finish(gen, sessionId);
      }
    } catch (err) {
      this.fail(gen, err);
    }
  }

  private async advance(gen: number, sessionId: string): Promise<void> {
    const question = await this.api.nextQuestion(sessionId);
    if (gen !== this.generation) return;
    if (question === null) {
      // The dialog already ended server-side; show what it concluded.
      await this.finish(gen, sessionId);
      return;
    }
    this.phase = { kind: "asking", ident: question.ident, prompt: question.prompt };
    this.busy = false;
    this.emit();
  }

  private async finish(gen: number, sessionId: string): Promise<void> {
    const result = await this.api.fetchResult(sessionId);
    if (gen !== this.generation) return;
    this.phase = { kind: "result", result };
    this.busy = false;
    this.emit();
  }

  private fail(gen: number, err: unknown): void {
    if (gen !== this.generation) return;
    const message = err instanceof Error ? err.message : String(err);
    this.phase = { kind: "error", message };
    this.busy = false;
    this.emit();
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }
}

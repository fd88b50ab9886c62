// Scripted stand-ins for the session service so flow tests run without a
// backend. Scripts mirror real dialog shapes: a fixed ask order and a
// terminal outcome after a set number of answers.

import type { SessionResult } from "../src/api.js";
import type { SessionApi } from "../src/state.js";

export interface ScriptStep {
  ident: string;
  prompt: string;
}

export interface Script {
  questions: ScriptStep[];
  terminalAfter: number;
  terminalStatus: "diagnosed" | "no_match";
  result: SessionResult;
}

export interface AnsweredEntry {
  session: string;
  ident: string;
  answer: string;
}

export class ScriptedApi implements SessionApi {
  readonly answered: AnsweredEntry[] = [];
  createCalls = 0;
  // Optional gate awaited inside postAnswer, for in-flight assertions.
  gate: (() => Promise<void>) | null = null;

  private session = "";
  private answers = 0;

  constructor(private readonly script: Script) {}

  async createSession(): Promise<string> {
    this.createCalls += 1;
    this.session = `s${this.createCalls}`;
    this.answers = 0;
    return this.session;
  }

  async nextQuestion(sessionId: string): Promise<ScriptStep | null> {
    this.expectSession(sessionId);
    return this.script.questions[this.answers] ?? null;
  }

  async postAnswer(
    sessionId: string,
    ident: string,
    answer: "yes" | "no",
  ): Promise<{ status: string; questionsAsked: number }> {
    if (this.gate) await this.gate();
    // Checked after the gate: a call that was parked across a restart must
    // reject the way a real server rejects a dead session id.
    this.expectSession(sessionId);
    this.answered.push({ session: sessionId, ident, answer });
    this.answers += 1;
    const status =
      this.answers >= this.script.terminalAfter
        ? this.script.terminalStatus
        : "in_progress";
    return { status, questionsAsked: this.answers };
  }

  async fetchResult(sessionId: string): Promise<SessionResult> {
    this.expectSession(sessionId);
    return this.script.result;
  }

  private expectSession(sessionId: string): void {
    if (sessionId !== this.session) {
      throw new Error(`unknown session '${sessionId}', expected '${this.session}'`);
    }
  }
}

/** Rejects every call the way a dead backend does. */
export class DownApi implements SessionApi {
  async createSession(): Promise<string> {
    throw new TypeError("fetch failed");
  }

  async nextQuestion(): Promise<ScriptStep | null> {
    throw new TypeError("fetch failed");
  }

  async postAnswer(): Promise<{ status: string; questionsAsked: number }> {
    throw new TypeError("fetch failed");
  }

  async fetchResult(): Promise<SessionResult> {
    throw new TypeError("fetch failed");
  }
}

export function deferred<T>(): {
  promise: Promise<T>;
  resolve: (value: T) => void;
  reject: (err: unknown) => void;
} {
  let resolve!: (value: T) => void;
  let reject!: (err: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

export const CP_SCRIPT: Script = {
  questions: [
    { ident: "progress", prompt: "Is the condition progressive, worsening over time?" },
    { ident: "age", prompt: "Did symptoms appear before 18 months of age?" },
    { ident: "gait", prompt: "Does the patient have difficulty in gait or walking?" },
    {
      ident: "spasticity",
      prompt: "Is the patient affected by spasticity, such as stiff or tight muscles?",
    },
  ],
  terminalAfter: 4,
  terminalStatus: "diagnosed",
  result: {
    status: "diagnosed",
    transcript: [
      { ident: "progress", answer: "no" },
      { ident: "age", answer: "yes" },
      { ident: "gait", answer: "yes" },
      { ident: "spasticity", answer: "yes" },
    ],
    diagnoses: [
      {
        rule: "Cerebral-Palsy",
        diagnosis: "The patient is suffering from Cerebral Palsy",
        tests:
          "Consult a neurologist; confirmatory tests include clinical examination and imaging as advised.",
        treatments:
          "Discuss treatment options with a specialist; supportive care such as physiotherapy is commonly advised.",
      },
    ],
  },
};

export const CP_ANSWERS: Array<"yes" | "no"> = ["no", "yes", "yes", "yes"];

export const MS_SCRIPT: Script = {
  questions: [
    { ident: "progress", prompt: "Is the condition progressive, worsening over time?" },
    {
      ident: "posture",
      prompt: "Does the patient show postural instability, such as a stooped stance?",
    },
    {
      ident: "muscle-wasting",
      prompt: "Is there muscle wasting, with visible loss of muscle tissue?",
    },
    {
      ident: "sensation",
      prompt: "Has the patient noticed changes in sensation, such as pricking or tingling?",
    },
    { ident: "balance", prompt: "Does the patient have difficulty in maintaining balance?" },
    { ident: "vision", prompt: "Is the patient's vision affected?" },
    { ident: "strength", prompt: "Has the patient's strength changed or weakened?" },
  ],
  terminalAfter: 7,
  terminalStatus: "diagnosed",
  result: {
    status: "diagnosed",
    transcript: [
      { ident: "progress", answer: "yes" },
      { ident: "posture", answer: "no" },
      { ident: "muscle-wasting", answer: "no" },
      { ident: "sensation", answer: "yes" },
      { ident: "balance", answer: "yes" },
      { ident: "vision", answer: "yes" },
      { ident: "strength", answer: "yes" },
    ],
    diagnoses: [
      {
        rule: "multiple-sclerosis",
        diagnosis: "The patient is suffering from Multiple Sclerosis.",
        tests:
          "Consult a neurologist; confirmatory tests include clinical examination and imaging as advised.",
        treatments:
          "Discuss treatment options with a specialist; supportive care such as physiotherapy is commonly advised.",
      },
    ],
  },
};

export const MS_ANSWERS: Array<"yes" | "no"> = [
  "yes",
  "no",
  "no",
  "yes",
  "yes",
  "yes",
  "yes",
];

export const NO_MATCH_SCRIPT: Script = {
  questions: [
    { ident: "progress", prompt: "Is the condition progressive, worsening over time?" },
    { ident: "age", prompt: "Did symptoms appear before 18 months of age?" },
    {
      ident: "posture",
      prompt: "Does the patient show postural instability, such as a stooped stance?",
    },
    {
      ident: "muscle-wasting",
      prompt: "Is there muscle wasting, with visible loss of muscle tissue?",
    },
    {
      ident: "sensation",
      prompt: "Has the patient noticed changes in sensation, such as pricking or tingling?",
    },
  ],
  terminalAfter: 5,
  terminalStatus: "no_match",
  result: {
    status: "no_match",
    transcript: [
      { ident: "progress", answer: "no" },
      { ident: "age", answer: "no" },
      { ident: "posture", answer: "no" },
      { ident: "muscle-wasting", answer: "no" },
      { ident: "sensation", answer: "no" },
    ],
    diagnoses: [],
  },
};

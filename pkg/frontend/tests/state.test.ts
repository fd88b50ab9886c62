import { describe, expect, it } from "vitest";

import { FlowController } from "../src/state.js";
import {
  CP_ANSWERS,
  CP_SCRIPT,
  DownApi,
  MS_ANSWERS,
  MS_SCRIPT,
  NO_MATCH_SCRIPT,
  ScriptedApi,
  deferred,
} from "./helpers.js";

describe("FlowController", () => {
  it("starts by asking the first served question", async () => {
    const api = new ScriptedApi(CP_SCRIPT);
    const controller = new FlowController(api);

    await controller.start();

    expect(controller.phase).toEqual({
      kind: "asking",
      ident: "progress",
      prompt: CP_SCRIPT.questions[0]?.prompt,
    });
    expect(controller.transcript).toEqual([]);
    expect(controller.busy).toBe(false);
  });

  it("walks the CP path to a diagnosed result in four answers", async () => {
    const api = new ScriptedApi(CP_SCRIPT);
    const controller = new FlowController(api);
    await controller.start();

    for (const answer of CP_ANSWERS) {
      await controller.answer(answer);
    }

    expect(controller.phase.kind).toBe("result");
    if (controller.phase.kind !== "result") return;
    expect(controller.phase.result.diagnoses[0]?.diagnosis).toBe(
      "The patient is suffering from Cerebral Palsy",
    );
    expect(controller.transcript).toHaveLength(4);
    expect(controller.transcript.map((row) => row.answer)).toEqual(CP_ANSWERS);
    expect(controller.busy).toBe(false);
  });

  it("only ever answers idents the service asked, in served order", async () => {
    const api = new ScriptedApi(CP_SCRIPT);
    const controller = new FlowController(api);
    await controller.start();

    for (const answer of CP_ANSWERS) {
      await controller.answer(answer);
    }

    expect(api.answered.map((entry) => entry.ident)).toEqual(
      CP_SCRIPT.questions.map((question) => question.ident),
    );
  });

  it("never shows the same prompt twice on the way to a result", async () => {
    const api = new ScriptedApi(MS_SCRIPT);
    const controller = new FlowController(api);
    const promptsSeen: string[] = [];
    controller.subscribe(() => {
      // Busy toggles re-emit the same question; track transitions only.
      if (controller.phase.kind === "asking") {
        const prompt = controller.phase.prompt;
        if (promptsSeen[promptsSeen.length - 1] !== prompt) promptsSeen.push(prompt);
      }
    });
    await controller.start();

    for (const answer of MS_ANSWERS) {
      await controller.answer(answer);
    }

    expect(new Set(promptsSeen).size).toBe(promptsSeen.length);
    expect(controller.transcript).toHaveLength(7);
  });

  it("reaches a no-match result with an empty diagnosis list", async () => {
    const api = new ScriptedApi(NO_MATCH_SCRIPT);
    const controller = new FlowController(api);
    await controller.start();

    for (let i = 0; i < 5; i += 1) {
      await controller.answer("no");
    }

    expect(controller.phase.kind).toBe("result");
    if (controller.phase.kind !== "result") return;
    expect(controller.phase.result.status).toBe("no_match");
    expect(controller.phase.result.diagnoses).toEqual([]);
  });

  it("records exactly one answer when the button is hit twice in flight", async () => {
    const api = new ScriptedApi(CP_SCRIPT);
    const gate = deferred<void>();
    api.gate = () => gate.promise;
    const controller = new FlowController(api);
    await controller.start();

    const first = controller.answer("no");
    const second = controller.answer("no");
    expect(controller.busy).toBe(true);
    gate.resolve();
    await Promise.all([first, second]);

    expect(api.answered).toHaveLength(1);
    expect(controller.transcript).toHaveLength(1);
  });

  it("ignores answers outside the asking phase", async () => {
    const api = new ScriptedApi(CP_SCRIPT);
    const controller = new FlowController(api);

    await controller.answer("yes");
    expect(api.answered).toHaveLength(0);

    await controller.start();
    for (const answer of CP_ANSWERS) {
      await controller.answer(answer);
    }
    await controller.answer("yes");

    expect(api.answered).toHaveLength(4);
  });

  it("moves to the error phase with the server message on a rejected answer", async () => {
    const api = new ScriptedApi(CP_SCRIPT);
    const controller = new FlowController(api);
    await controller.start();
    api.postAnswer = async () => {
      throw new Error("expected answer for 'progress', got 'vision'");
    };

    await controller.answer("yes");

    expect(controller.phase.kind).toBe("error");
    if (controller.phase.kind !== "error") return;
    expect(controller.phase.message).toContain("expected answer for 'progress'");
    expect(controller.busy).toBe(false);
  });

  it("lands in the error phase when the backend is down", async () => {
    const controller = new FlowController(new DownApi());

    await controller.start();

    expect(controller.phase.kind).toBe("error");
    if (controller.phase.kind !== "error") return;
    expect(controller.phase.message).toContain("fetch failed");
  });

  it("recovers from a failed start when restarted against a live backend", async () => {
    const api = new ScriptedApi(CP_SCRIPT);
    let failures = 1;
    const createSession = api.createSession.bind(api);
    api.createSession = async () => {
      if (failures > 0) {
        failures -= 1;
        throw new TypeError("fetch failed");
      }
      return createSession();
    };
    const controller = new FlowController(api);

    await controller.start();
    expect(controller.phase.kind).toBe("error");

    await controller.restart();

    expect(controller.phase.kind).toBe("asking");
    expect(controller.transcript).toEqual([]);
  });

  it("restart after a result opens a fresh session", async () => {
    const api = new ScriptedApi(CP_SCRIPT);
    const controller = new FlowController(api);
    await controller.start();
    for (const answer of CP_ANSWERS) {
      await controller.answer(answer);
    }

    await controller.restart();

    expect(api.createCalls).toBe(2);
    expect(controller.phase).toEqual({
      kind: "asking",
      ident: "progress",
      prompt: CP_SCRIPT.questions[0]?.prompt,
    });
    expect(controller.transcript).toEqual([]);
  });

  it("drops a stale in-flight response after a restart", async () => {
    const api = new ScriptedApi(CP_SCRIPT);
    const gate = deferred<void>();
    api.gate = () => gate.promise;
    const controller = new FlowController(api);
    await controller.start();

    const stale = controller.answer("no");
    api.gate = null;
    const restarted = controller.restart();
    gate.resolve();
    await Promise.all([stale, restarted]);

    expect(controller.transcript).toEqual([]);
    expect(controller.phase).toEqual({
      kind: "asking",
      ident: "progress",
      prompt: CP_SCRIPT.questions[0]?.prompt,
    });
  });
});

import { readFileSync, writeFileSync } from "node:fs";
import { fileURLToPath } from "node:url";

import { describe, expect, test } from "vitest";

import type { TaskKind, WorkflowDefObj } from "../src/model.js";
import { DRIVEN_WORKFLOWS, answerFor } from "./drives.js";

/**
 * Freezes the editor's output. Each recording is the payload the editor
 * drives produce for one task of a shipped workflow; the committed fixture
 * is replayed against the service by the server-side contract tests, so a
 * drift between editor serialization and service parsing fails loudly here
 * or there. Regenerate with: npm run record
 */

const FIXTURE = fileURLToPath(new URL("./fixtures/recorded-payloads.json", import.meta.url));

const WORKFLOWS_DIR = new URL("../../src/reductio/data/workflows/", import.meta.url);

interface Recording {
  workflowId: string;
  taskId: string;
  kind: TaskKind;
  payload: unknown;
}

function loadWorkflow(id: string): WorkflowDefObj {
  const raw = readFileSync(fileURLToPath(new URL(`${id}.json`, WORKFLOWS_DIR)), "utf8");
  return JSON.parse(raw) as WorkflowDefObj;
}

function generate(): Recording[] {
  const recordings: Recording[] = [];
  for (const workflowId of DRIVEN_WORKFLOWS) {
    const workflow = loadWorkflow(workflowId);
    for (const task of workflow.tasks) {
      recordings.push({
        workflowId,
        taskId: task.id,
        kind: task.kind,
        payload: answerFor(workflowId, task),
      });
    }
  }
  return recordings;
}

describe("recorded editor payloads", () => {
  test("the drives cover every task kind", () => {
    const kinds = new Set(generate().map((r) => r.kind));
    expect([...kinds].sort()).toEqual([
      "applyReduction",
      "graphConstruction",
      "multipleChoice",
      "reductionDesign",
      "selection",
      "solutionTransfer",
      "text",
    ]);
  });

  test("the committed fixture matches what the editor produces today", () => {
    const recordings = generate();
    if (process.env.RECORD_PAYLOADS) {
      writeFileSync(FIXTURE, JSON.stringify(recordings, null, 2) + "\n");
    }
    const committed = JSON.parse(readFileSync(FIXTURE, "utf8")) as Recording[];
    expect(committed).toEqual(recordings);
  });
});

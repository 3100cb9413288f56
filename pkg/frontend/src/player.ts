/**
 * The exercise player loop: fetch session state, offer open tasks, submit
 * attempts, surface verdicts and feedback, advance as tasks unlock.
 *
 * Verdicts are never computed here. Every AttemptResultObj handed to the
 * view is the service's response object, passed through untouched; the only
 * client-side additions are presentational (which nodes/edges a feedback
 * witness points at, and a one-line description of a counterexample).
 */

import { ApiClient, ApiError } from "./api.js";
import type {
  AttemptResultObj,
  CounterexampleObj,
  EdgePair,
  NodeId,
  SessionStateObj,
  TaskStateObj,
  WorkflowDefObj,
} from "./model.js";

/** Nodes and edges a rejected attempt's witnesses point at. */
export interface WitnessMarks {
  nodes: NodeId[];
  edges: EdgePair[];
}

/**
 * Turns the falsifying assignments in a grading verdict into marks the
 * canvas can overlay: every witnessed node is marked, and a two-variable
 * witness additionally marks the pair as an edge (an uncovered edge, say).
 */
export function witnessMarks(result: AttemptResultObj): WitnessMarks {
  const nodes: NodeId[] = [];
  const edges: EdgePair[] = [];
  const constraints = result.verdict.constraints;
  for (const witness of constraints?.witnesses ?? []) {
    const values = Object.values(witness.assignment);
    for (const value of values) {
      if (!nodes.includes(value)) {
        nodes.push(value);
      }
    }
    if (values.length === 2 && values[0] !== values[1]) {
      edges.push([values[0], values[1]]);
    }
  }
  return { nodes, edges };
}

/** The verifier counterexample attached to a rejected design attempt, if any. */
export function extractCounterexample(result: AttemptResultObj): CounterexampleObj | null {
  return result.verdict.verifier?.counterexample ?? null;
}

function budgetText(budget: number | undefined): string {
  return budget === undefined ? "" : ` (budget ${budget})`;
}

/** One-line reading of a counterexample for the read-only viewer. */
export function describeCounterexample(ce: CounterexampleObj): string {
  const source = `the source instance${budgetText(ce.source.budget)}`;
  const target = `the mapped target instance${budgetText(ce.target.budget)}`;
  if (ce.direction === "positiveLost") {
    return `${source} has a solution, but ${target} does not`;
  }
  if (ce.direction === "negativeGained") {
    return `${source} has no solution, but ${target} does`;
  }
  return `${source} and ${target} disagree (${ce.direction})`;
}

export interface AttemptChoice {
  taskId: string;
  payload: unknown;
}

/**
 * What the player needs from a user interface. The DOM shell implements
 * this interactively; tests implement it with scripted answers.
 */
export interface WorkflowView {
  /** Called with a fresh session snapshot before every attempt. */
  showTasks(state: SessionStateObj, workflow: WorkflowDefObj): void | Promise<void>;
  /** Picks the next attempt among the open tasks, or null to stop. */
  nextAttempt(
    openTasks: TaskStateObj[],
    state: SessionStateObj,
    workflow: WorkflowDefObj,
  ): AttemptChoice | null | Promise<AttemptChoice | null>;
  /** Renders the service's grading result, verbatim, plus witness marks. */
  showVerdict(
    taskId: string,
    result: AttemptResultObj,
    marks: WitnessMarks,
  ): void | Promise<void>;
  /** Renders a verifier counterexample in the read-only viewer. */
  showCounterexample(
    taskId: string,
    counterexample: CounterexampleObj,
    description: string,
  ): void | Promise<void>;
  /** Surfaces a service error body verbatim in the feedback panel. */
  showServiceError(taskId: string, error: ApiError): void | Promise<void>;
}

/**
 * Drives a session until every task is completed or the view stops. Each
 * round trips through the service: snapshot, attempt, verdict, snapshot.
 */
export async function playWorkflow(
  client: ApiClient,
  sessionId: string,
  view: WorkflowView,
): Promise<SessionStateObj> {
  let state = await client.getSession(sessionId);
  const workflow = await client.getWorkflow(state.workflowId);
  for (;;) {
    await view.showTasks(state, workflow);
    const open = state.tasks.filter((t) => t.status === "open");
    if (open.length === 0) {
      return state;
    }
    const choice = await view.nextAttempt(open, state, workflow);
    if (choice === null) {
      return state;
    }
    try {
      const result = await client.submitAttempt(sessionId, choice.taskId, choice.payload);
      await view.showVerdict(choice.taskId, result, witnessMarks(result));
      const counterexample = extractCounterexample(result);
      if (counterexample !== null) {
        await view.showCounterexample(
          choice.taskId,
          counterexample,
          describeCounterexample(counterexample),
        );
      }
    } catch (error) {
      if (error instanceof ApiError) {
        await view.showServiceError(choice.taskId, error);
      } else {
        throw error;
      }
    }
    state = await client.getSession(sessionId);
  }
}

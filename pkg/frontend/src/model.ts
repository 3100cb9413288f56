/**
 * Wire formats of the exercise service and the client-side editor state.
 *
 * The interfaces here mirror the JSON documents the service accepts and
 * produces; the editor state adds purely presentational extras (tool mode,
 * pinned terminals/ports, layout coordinates) that never reach the wire.
 */

export type NodeId = string;

/** An edge as it appears on the wire: a pair of node ids. */
export type EdgePair = [NodeId, NodeId];

export interface GraphObj {
  directed: boolean;
  nodes: NodeId[];
  edges: EdgePair[];
  selectedNodes?: NodeId[];
  highlightedNodes?: NodeId[];
  selectedEdges?: EdgePair[];
  highlightedEdges?: EdgePair[];
}

export interface InstanceObj {
  graph: GraphObj;
  budget?: number;
}

export interface EdgeGadgetObj {
  body: GraphObj;
  terminalU: NodeId;
  terminalV: NodeId;
}

export interface NodeGadgetObj {
  body: GraphObj;
  portIn: NodeId;
  portOut: NodeId;
}

export type GlobalPolicy = "ALL" | "NONE";

export interface GlobalGadgetObj {
  body: GraphObj;
  policy: Record<NodeId, GlobalPolicy>;
}

export type GadgetFamily = "edge" | "node" | "global";

export interface ReductionSpecObj {
  family: GadgetFamily;
  sourceProblem: string;
  targetProblem: string;
  edgeGadget?: EdgeGadgetObj;
  nonEdgeGadget?: EdgeGadgetObj;
  nodeGadget?: NodeGadgetObj;
  globalGadget?: GlobalGadgetObj;
  paramMap?: [number, number, number, number];
  fixedSourceBudget?: number;
}

export interface CounterexampleObj {
  source: InstanceObj;
  target: InstanceObj;
  direction: string;
  sourceWitness?: unknown;
  targetWitness?: unknown;
}

export interface VerifierVerdictObj {
  outcome: string;
  method: string;
  boundChecked?: number;
  counterexample?: CounterexampleObj;
  explanation: string;
}

export interface ConstraintWitnessObj {
  path: string;
  assignment: Record<string, NodeId>;
}

export interface ConstraintVerdictObj {
  satisfied: boolean;
  violations: { path: string; message: string }[];
  witnesses?: ConstraintWitnessObj[];
}

/** Task-kind specific grading details; `accepted` is always present. */
export interface AttemptVerdictObj {
  accepted: boolean;
  constraints?: ConstraintVerdictObj | null;
  verifier?: VerifierVerdictObj;
  [extra: string]: unknown;
}

export interface AttemptResultObj {
  verdict: AttemptVerdictObj;
  feedback: string;
  outputsPublished: boolean;
}

export type TaskKind =
  | "graphConstruction"
  | "selection"
  | "reductionDesign"
  | "applyReduction"
  | "solutionTransfer"
  | "multipleChoice"
  | "text";

export type TaskStatus = "locked" | "open" | "completed";

/** A task entry in a session-state snapshot. */
export interface TaskStateObj {
  id: string;
  title: string;
  kind: TaskKind;
  status: TaskStatus;
  attemptCount: number;
  outputs: Record<string, unknown> | null;
}

export interface SessionStateObj {
  sessionId: string;
  workflowId: string;
  tasks: TaskStateObj[];
}

export interface TaskRefObj {
  taskRef: string;
}

/**
 * A task definition as served by GET /workflows/{id}. The grading details
 * vary by kind; the client only reads the fields it needs to render.
 */
export interface TaskDefObj {
  id: string;
  kind: TaskKind;
  title?: string;
  prerequisites?: string[];
  body?: string;
  options?: string[];
  graph?: GraphObj | TaskRefObj;
  mode?: "nodes" | "edges";
  editable?: boolean;
  initial?: GraphObj | TaskRefObj;
  family?: GadgetFamily;
  sourceProblem?: string;
  targetProblem?: string;
  spec?: ReductionSpecObj | TaskRefObj;
  source?: InstanceObj;
  sourceSolution?: NodeId[];
  sampleInstance?: InstanceObj;
  [extra: string]: unknown;
}

export interface WorkflowSummaryObj {
  id: string;
  title: string;
}

export interface WorkflowDefObj {
  id: string;
  title: string;
  tasks: TaskDefObj[];
}

export interface ErrorBodyObj {
  code: string;
  message: string;
}

export function isTaskRef(value: unknown): value is TaskRefObj {
  return (
    typeof value === "object" &&
    value !== null &&
    typeof (value as TaskRefObj).taskRef === "string"
  );
}

// -- editor state ----------------------------------------------------------

export type ToolMode = "addNode" | "addEdge" | "select" | "highlight" | "delete";

export interface LayoutPoint {
  x: number;
  y: number;
}

/**
 * Everything the graph editor tracks. Only the graph structure and the
 * marks are serialized; tool mode, pins, policy and layout stay client-side
 * (pins and policy feed the gadget payload builders instead).
 */
export interface EditorState {
  directed: boolean;
  /** Selection tasks fix the graph: structural edits are refused. */
  structureLocked: boolean;
  nodes: NodeId[];
  edges: EdgePair[];
  selectedNodes: NodeId[];
  highlightedNodes: NodeId[];
  selectedEdges: EdgePair[];
  highlightedEdges: EdgePair[];
  mode: ToolMode;
  /** Pinned in order: [terminalU, terminalV]. */
  terminals: NodeId[];
  /** Pinned in order: [portIn, portOut]. */
  ports: NodeId[];
  policy: Record<NodeId, GlobalPolicy>;
  /** Client-only drawing coordinates; never serialized. */
  layout: Record<NodeId, LayoutPoint>;
  /** First endpoint of an in-progress edge in addEdge mode. */
  pendingEdgeFrom: NodeId | null;
}

/** Endpoints in storage order: undirected edges are kept sorted. */
export function canonicalEdge(directed: boolean, a: NodeId, b: NodeId): EdgePair {
  if (!directed && b < a) {
    return [b, a];
  }
  return [a, b];
}

export function sameEdge(directed: boolean, e: EdgePair, a: NodeId, b: NodeId): boolean {
  const [x, y] = canonicalEdge(directed, a, b);
  return e[0] === x && e[1] === y;
}

export function hasEdge(state: EditorState, a: NodeId, b: NodeId): boolean {
  return state.edges.some((e) => sameEdge(state.directed, e, a, b));
}

function sortedNodes(ids: NodeId[]): NodeId[] {
  return [...ids].sort();
}

function sortedEdges(edges: EdgePair[]): EdgePair[] {
  return edges
    .map((e): EdgePair => [e[0], e[1]])
    .sort((p, q) => (p[0] < q[0] || (p[0] === q[0] && p[1] < q[1]) ? -1 : 1));
}

/**
 * The wire form of the editor's graph. Drops everything presentational
 * (layout, tool mode, pins, policy); mark lists are sorted so identical
 * editor states serialize identically.
 */
export function serializeGraph(state: EditorState): GraphObj {
  const out: GraphObj = {
    directed: state.directed,
    nodes: [...state.nodes],
    edges: state.edges.map((e): EdgePair => [e[0], e[1]]),
  };
  if (state.selectedNodes.length > 0) {
    out.selectedNodes = sortedNodes(state.selectedNodes);
  }
  if (state.highlightedNodes.length > 0) {
    out.highlightedNodes = sortedNodes(state.highlightedNodes);
  }
  if (state.selectedEdges.length > 0) {
    out.selectedEdges = sortedEdges(state.selectedEdges);
  }
  if (state.highlightedEdges.length > 0) {
    out.highlightedEdges = sortedEdges(state.highlightedEdges);
  }
  return out;
}

/**
 * Client-side sanity check that a graph object is a well-formed wire
 * document (the service re-validates; this only powers editor guards).
 */
export function graphObjProblems(obj: GraphObj): string[] {
  const problems: string[] = [];
  const seen = new Set<NodeId>();
  for (const node of obj.nodes) {
    if (seen.has(node)) {
      problems.push(`duplicate node '${node}'`);
    }
    seen.add(node);
  }
  const allEdges = [
    ...obj.edges,
    ...(obj.selectedEdges ?? []),
    ...(obj.highlightedEdges ?? []),
  ];
  for (const [a, b] of allEdges) {
    if (!seen.has(a) || !seen.has(b)) {
      problems.push(`edge [${a}, ${b}] mentions an unknown node`);
    }
    if (a === b) {
      problems.push(`edge [${a}, ${b}] is a self-loop`);
    }
  }
  for (const node of [...(obj.selectedNodes ?? []), ...(obj.highlightedNodes ?? [])]) {
    if (!seen.has(node)) {
      problems.push(`mark on unknown node '${node}'`);
    }
  }
  return problems;
}

/**
 * Graph editor operations and per-task payload builders.
 *
 * All functions mutate an EditorState in place (the DOM layer re-renders
 * after each interaction). The builders produce exactly the payload shapes
 * the service grades; validation here is about whether a submission is
 * well-formed enough to send — never about whether it is a correct answer.
 */

import {
  canonicalEdge,
  hasEdge,
  sameEdge,
  serializeGraph,
} from "./model.js";
import type {
  EdgePair,
  EditorState,
  GadgetFamily,
  GlobalPolicy,
  GraphObj,
  LayoutPoint,
  NodeId,
  ToolMode,
} from "./model.js";

export function newEditor(directed: boolean): EditorState {
  return {
    directed,
    structureLocked: false,
    nodes: [],
    edges: [],
    selectedNodes: [],
    highlightedNodes: [],
    selectedEdges: [],
    highlightedEdges: [],
    mode: "addNode",
    terminals: [],
    ports: [],
    policy: {},
    layout: {},
    pendingEdgeFrom: null,
  };
}

/** Positions nodes evenly on a circle; used for graphs that arrive laid-out-less. */
function circleLayout(nodes: NodeId[]): Record<NodeId, LayoutPoint> {
  const layout: Record<NodeId, LayoutPoint> = {};
  const radius = 120;
  const cx = 160;
  const cy = 160;
  nodes.forEach((node, i) => {
    const angle = (2 * Math.PI * i) / Math.max(nodes.length, 1) - Math.PI / 2;
    layout[node] = {
      x: Math.round(cx + radius * Math.cos(angle)),
      y: Math.round(cy + radius * Math.sin(angle)),
    };
  });
  return layout;
}

export interface FromGraphOptions {
  structureLocked?: boolean;
  mode?: ToolMode;
}

/** Loads a wire graph into a fresh editor, marks included, layout invented. */
export function editorFromGraph(obj: GraphObj, options: FromGraphOptions = {}): EditorState {
  const state = newEditor(obj.directed);
  state.structureLocked = options.structureLocked ?? false;
  state.mode = options.mode ?? (state.structureLocked ? "select" : "addNode");
  state.nodes = [...obj.nodes];
  state.edges = obj.edges.map(([a, b]) => canonicalEdge(obj.directed, a, b));
  state.selectedNodes = [...(obj.selectedNodes ?? [])];
  state.highlightedNodes = [...(obj.highlightedNodes ?? [])];
  state.selectedEdges = (obj.selectedEdges ?? []).map(([a, b]) =>
    canonicalEdge(obj.directed, a, b),
  );
  state.highlightedEdges = (obj.highlightedEdges ?? []).map(([a, b]) =>
    canonicalEdge(obj.directed, a, b),
  );
  state.layout = circleLayout(state.nodes);
  return state;
}

export function setMode(state: EditorState, mode: ToolMode): void {
  state.mode = mode;
  state.pendingEdgeFrom = null;
}

/** First unused name of the form n1, n2, … */
function freshName(state: EditorState): NodeId {
  const taken = new Set(state.nodes);
  for (let i = 1; ; i++) {
    const candidate = `n${i}`;
    if (!taken.has(candidate)) {
      return candidate;
    }
  }
}

export function addNode(state: EditorState, id?: NodeId, at?: LayoutPoint): NodeId {
  if (state.structureLocked) {
    throw new Error("the graph of this task is fixed");
  }
  const name = id ?? freshName(state);
  if (name === "") {
    throw new Error("node names must be non-empty");
  }
  if (state.nodes.includes(name)) {
    throw new Error(`node '${name}' already exists`);
  }
  state.nodes.push(name);
  state.layout[name] = at ?? { x: 40 + 40 * (state.nodes.length - 1), y: 40 };
  return name;
}

export function addEdge(state: EditorState, a: NodeId, b: NodeId): void {
  if (state.structureLocked) {
    throw new Error("the graph of this task is fixed");
  }
  if (!state.nodes.includes(a) || !state.nodes.includes(b)) {
    throw new Error("both endpoints must exist");
  }
  if (a === b) {
    throw new Error("self-loops are not allowed");
  }
  if (hasEdge(state, a, b)) {
    throw new Error("that edge already exists");
  }
  state.edges.push(canonicalEdge(state.directed, a, b));
}

function dropEdges(edges: EdgePair[], touching: NodeId): EdgePair[] {
  return edges.filter((e) => e[0] !== touching && e[1] !== touching);
}

export function removeNode(state: EditorState, id: NodeId): void {
  if (state.structureLocked) {
    throw new Error("the graph of this task is fixed");
  }
  state.nodes = state.nodes.filter((n) => n !== id);
  state.edges = dropEdges(state.edges, id);
  state.selectedNodes = state.selectedNodes.filter((n) => n !== id);
  state.highlightedNodes = state.highlightedNodes.filter((n) => n !== id);
  state.selectedEdges = dropEdges(state.selectedEdges, id);
  state.highlightedEdges = dropEdges(state.highlightedEdges, id);
  state.terminals = state.terminals.filter((n) => n !== id);
  state.ports = state.ports.filter((n) => n !== id);
  delete state.policy[id];
  delete state.layout[id];
  if (state.pendingEdgeFrom === id) {
    state.pendingEdgeFrom = null;
  }
}

export function removeEdge(state: EditorState, a: NodeId, b: NodeId): void {
  if (state.structureLocked) {
    throw new Error("the graph of this task is fixed");
  }
  state.edges = state.edges.filter((e) => !sameEdge(state.directed, e, a, b));
  state.selectedEdges = state.selectedEdges.filter((e) => !sameEdge(state.directed, e, a, b));
  state.highlightedEdges = state.highlightedEdges.filter(
    (e) => !sameEdge(state.directed, e, a, b),
  );
}

function toggleIn(list: NodeId[], id: NodeId): NodeId[] {
  return list.includes(id) ? list.filter((n) => n !== id) : [...list, id];
}

export function toggleSelectNode(state: EditorState, id: NodeId): void {
  state.selectedNodes = toggleIn(state.selectedNodes, id);
}

export function toggleHighlightNode(state: EditorState, id: NodeId): void {
  state.highlightedNodes = toggleIn(state.highlightedNodes, id);
}

function toggleEdgeIn(state: EditorState, list: EdgePair[], a: NodeId, b: NodeId): EdgePair[] {
  if (list.some((e) => sameEdge(state.directed, e, a, b))) {
    return list.filter((e) => !sameEdge(state.directed, e, a, b));
  }
  return [...list, canonicalEdge(state.directed, a, b)];
}

export function toggleSelectEdge(state: EditorState, a: NodeId, b: NodeId): void {
  state.selectedEdges = toggleEdgeIn(state, state.selectedEdges, a, b);
}

export function toggleHighlightEdge(state: EditorState, a: NodeId, b: NodeId): void {
  state.highlightedEdges = toggleEdgeIn(state, state.highlightedEdges, a, b);
}

/**
 * Pin order is meaningful: the first pin becomes terminalU, the second
 * terminalV. Clicking a pinned node unpins it; a third pin is refused.
 */
export function pinTerminal(state: EditorState, id: NodeId): void {
  if (state.terminals.includes(id)) {
    state.terminals = state.terminals.filter((n) => n !== id);
    return;
  }
  if (state.terminals.length >= 2) {
    return;
  }
  state.terminals.push(id);
}

/** Same toggling rules as terminals: first pin is portIn, second portOut. */
export function pinPort(state: EditorState, id: NodeId): void {
  if (state.ports.includes(id)) {
    state.ports = state.ports.filter((n) => n !== id);
    return;
  }
  if (state.ports.length >= 2) {
    return;
  }
  state.ports.push(id);
}

export function setPolicy(state: EditorState, id: NodeId, policy: GlobalPolicy | null): void {
  if (policy === null) {
    delete state.policy[id];
  } else {
    state.policy[id] = policy;
  }
}

/** A node click, routed by the active tool mode. */
export function clickNode(state: EditorState, id: NodeId): void {
  switch (state.mode) {
    case "addNode":
      return;
    case "addEdge": {
      if (state.pendingEdgeFrom === null) {
        state.pendingEdgeFrom = id;
        return;
      }
      const from = state.pendingEdgeFrom;
      state.pendingEdgeFrom = null;
      if (from !== id && !hasEdge(state, from, id)) {
        addEdge(state, from, id);
      }
      return;
    }
    case "select":
      toggleSelectNode(state, id);
      return;
    case "highlight":
      toggleHighlightNode(state, id);
      return;
    case "delete":
      removeNode(state, id);
      return;
  }
}

/** An edge click, routed by the active tool mode. */
export function clickEdge(state: EditorState, a: NodeId, b: NodeId): void {
  switch (state.mode) {
    case "select":
      toggleSelectEdge(state, a, b);
      return;
    case "highlight":
      toggleHighlightEdge(state, a, b);
      return;
    case "delete":
      removeEdge(state, a, b);
      return;
    default:
      return;
  }
}

/** A background click: in addNode mode this drops a fresh node there. */
export function clickBackground(state: EditorState, x: number, y: number): void {
  if (state.mode === "addNode" && !state.structureLocked) {
    addNode(state, undefined, { x, y });
  }
  state.pendingEdgeFrom = null;
}

// -- submission checks and payload builders --------------------------------

export interface SubmissionContext {
  kind: string;
  family?: GadgetFamily;
}

/**
 * Local readiness checks before a payload may be sent. These messages guard
 * malformed submissions the service would reject outright; they say nothing
 * about whether the answer is right.
 */
export function validationMessages(state: EditorState, task: SubmissionContext): string[] {
  const messages: string[] = [];
  if (task.kind === "reductionDesign") {
    if (task.family === "edge" && state.terminals.length !== 2) {
      messages.push("pin both terminals before submitting");
    }
    if (task.family === "node" && state.ports.length !== 2) {
      messages.push("pin both ports before submitting");
    }
    if (task.family === "global") {
      const missing = state.nodes.filter((n) => !(n in state.policy));
      if (missing.length > 0) {
        messages.push("assign ALL or NONE to every node before submitting");
      }
    }
    if (state.nodes.length === 0) {
      messages.push("the gadget body needs at least one node");
    }
  }
  return messages;
}

export function buildSelectionPayload(state: EditorState): { graph: GraphObj } {
  return { graph: serializeGraph(state) };
}

export function buildConstructionPayload(state: EditorState): { graph: GraphObj } {
  return { graph: serializeGraph(state) };
}

export function buildApplyPayload(state: EditorState): { graph: GraphObj } {
  return { graph: serializeGraph(state) };
}

export function buildDesignPayload(
  state: EditorState,
  family: GadgetFamily,
): Record<string, unknown> {
  const body = serializeGraph(state);
  switch (family) {
    case "edge": {
      if (state.terminals.length !== 2) {
        throw new Error("pin both terminals before submitting");
      }
      const [terminalU, terminalV] = state.terminals;
      return { edgeGadget: { body, terminalU, terminalV } };
    }
    case "node": {
      if (state.ports.length !== 2) {
        throw new Error("pin both ports before submitting");
      }
      const [portIn, portOut] = state.ports;
      return { nodeGadget: { body, portIn, portOut } };
    }
    case "global": {
      const policy: Record<NodeId, GlobalPolicy> = {};
      for (const node of state.nodes) {
        const assigned = state.policy[node];
        if (assigned === undefined) {
          throw new Error("assign ALL or NONE to every node before submitting");
        }
        policy[node] = assigned;
      }
      return { globalGadget: { body, policy } };
    }
  }
}

export function buildTransferPayload(state: EditorState): { nodes: NodeId[] } {
  return { nodes: [...state.selectedNodes].sort() };
}

export function buildChoicePayload(selected: number[]): { selected: number[] } {
  return { selected: [...selected] };
}

export function buildTextPayload(): Record<string, never> {
  return {};
}

/**
 * Browser shell: renders workflows, the graph editor canvas, task panels,
 * and the feedback area, and drives them through the player loop.
 *
 * Everything here is presentation. Verdicts shown in the feedback panel are
 * the service's response objects; the only locally produced messages are
 * submission-readiness checks (e.g. unpinned terminals) which block the
 * request instead of judging the answer.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  buildApplyPayload,
  buildChoicePayload,
  buildConstructionPayload,
  buildDesignPayload,
  buildSelectionPayload,
  buildTextPayload,
  buildTransferPayload,
  clickBackground,
  clickEdge,
  clickNode,
  editorFromGraph,
  newEditor,
  pinPort,
  pinTerminal,
  setMode,
  setPolicy,
  validationMessages,
} from "./editor.js";
import { isTaskRef } from "./model.js";
import type {
  AttemptResultObj,
  CounterexampleObj,
  EditorState,
  GraphObj,
  InstanceObj,
  NodeId,
  ReductionSpecObj,
  SessionStateObj,
  TaskDefObj,
  TaskStateObj,
  ToolMode,
  WorkflowDefObj,
} from "./model.js";
import type { AttemptChoice, WitnessMarks, WorkflowView } from "./player.js";
import { playWorkflow } from "./player.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

// -- graph canvas ----------------------------------------------------------

export interface CanvasOptions {
  interactive: boolean;
  witness?: WitnessMarks;
  /** Which pin badges to draw for gadget tasks. */
  pins?: "terminals" | "ports" | "policy" | null;
  /** When set, node clicks pin instead of performing the tool action. */
  pinClicks?: boolean;
  onChange?: () => void;
}

function markerFor(svg: SVGSVGElement): void {
  const defs = document.createElementNS(SVG_NS, "defs");
  const marker = document.createElementNS(SVG_NS, "marker");
  marker.setAttribute("id", "arrow");
  marker.setAttribute("viewBox", "0 0 10 10");
  marker.setAttribute("refX", "22");
  marker.setAttribute("refY", "5");
  marker.setAttribute("markerWidth", "7");
  marker.setAttribute("markerHeight", "7");
  marker.setAttribute("orient", "auto-start-reverse");
  const path = document.createElementNS(SVG_NS, "path");
  path.setAttribute("d", "M 0 0 L 10 5 L 0 10 z");
  path.setAttribute("fill", "#555");
  marker.append(path);
  defs.append(marker);
  svg.append(defs);
}

function inWitness(marks: WitnessMarks | undefined, a: NodeId, b?: NodeId): boolean {
  if (!marks) {
    return false;
  }
  if (b === undefined) {
    return marks.nodes.includes(a);
  }
  return marks.edges.some(
    ([x, y]) => (x === a && y === b) || (x === b && y === a),
  );
}

function edgeSelected(state: EditorState, a: NodeId, b: NodeId): boolean {
  return state.selectedEdges.some(
    ([x, y]) => (x === a && y === b) || (!state.directed && x === b && y === a),
  );
}

function edgeHighlighted(state: EditorState, a: NodeId, b: NodeId): boolean {
  return state.highlightedEdges.some(
    ([x, y]) => (x === a && y === b) || (!state.directed && x === b && y === a),
  );
}

function pinBadge(state: EditorState, options: CanvasOptions, node: NodeId): string | null {
  if (options.pins === "terminals") {
    const index = state.terminals.indexOf(node);
    return index === 0 ? "U" : index === 1 ? "V" : null;
  }
  if (options.pins === "ports") {
    const index = state.ports.indexOf(node);
    return index === 0 ? "in" : index === 1 ? "out" : null;
  }
  if (options.pins === "policy") {
    return state.policy[node] ?? null;
  }
  return null;
}

/** Renders the editor state on an SVG canvas and wires click handling. */
export function renderCanvas(state: EditorState, options: CanvasOptions): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", "0 0 320 320");
  svg.setAttribute("class", "canvas");
  markerFor(svg);

  const changed = () => options.onChange?.();

  if (options.interactive) {
    svg.addEventListener("click", (event) => {
      if (event.target === svg) {
        const rect = svg.getBoundingClientRect();
        const scale = 320 / Math.max(rect.width, 1);
        clickBackground(
          state,
          Math.round((event.clientX - rect.left) * scale),
          Math.round((event.clientY - rect.top) * scale),
        );
        changed();
      }
    });
  }

  for (const [a, b] of state.edges) {
    const p = state.layout[a] ?? { x: 0, y: 0 };
    const q = state.layout[b] ?? { x: 0, y: 0 };
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(p.x));
    line.setAttribute("y1", String(p.y));
    line.setAttribute("x2", String(q.x));
    line.setAttribute("y2", String(q.y));
    let cls = "edge";
    if (edgeSelected(state, a, b)) {
      cls += " selected";
    }
    if (edgeHighlighted(state, a, b)) {
      cls += " highlighted";
    }
    if (inWitness(options.witness, a, b)) {
      cls += " witness";
    }
    line.setAttribute("class", cls);
    if (state.directed) {
      line.setAttribute("marker-end", "url(#arrow)");
    }
    svg.append(line);
    if (options.interactive) {
      const hit = line.cloneNode() as SVGLineElement;
      hit.setAttribute("class", "edge-hit");
      hit.removeAttribute("marker-end");
      hit.addEventListener("click", () => {
        clickEdge(state, a, b);
        changed();
      });
      svg.append(hit);
    }
  }

  for (const node of state.nodes) {
    const at = state.layout[node] ?? { x: 0, y: 0 };
    const group = document.createElementNS(SVG_NS, "g");
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(at.x));
    circle.setAttribute("cy", String(at.y));
    circle.setAttribute("r", "16");
    let cls = "node";
    if (state.selectedNodes.includes(node)) {
      cls += " selected";
    }
    if (state.highlightedNodes.includes(node)) {
      cls += " highlighted";
    }
    if (inWitness(options.witness, node)) {
      cls += " witness";
    }
    if (state.pendingEdgeFrom === node) {
      cls += " pending";
    }
    circle.setAttribute("class", cls);
    group.append(circle);

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(at.x));
    label.setAttribute("y", String(at.y + 4));
    label.setAttribute("class", "node-label");
    label.textContent = node;
    group.append(label);

    const badge = pinBadge(state, options, node);
    if (badge !== null) {
      const tag = document.createElementNS(SVG_NS, "text");
      tag.setAttribute("x", String(at.x));
      tag.setAttribute("y", String(at.y - 22));
      tag.setAttribute("class", "pin-label");
      tag.textContent = badge;
      group.append(tag);
    }

    if (options.interactive) {
      group.addEventListener("click", (event) => {
        event.stopPropagation();
        if (options.pinClicks) {
          if (options.pins === "terminals") {
            pinTerminal(state, node);
          } else if (options.pins === "ports") {
            pinPort(state, node);
          } else if (options.pins === "policy") {
            const current = state.policy[node];
            setPolicy(
              state,
              node,
              current === undefined ? "ALL" : current === "ALL" ? "NONE" : null,
            );
          }
        } else {
          clickNode(state, node);
        }
        changed();
      });
    }
    svg.append(group);
  }
  return svg;
}

/** A non-interactive canvas for a wire graph (counterexamples, sources). */
export function renderReadOnlyGraph(graph: GraphObj): SVGSVGElement {
  return renderCanvas(editorFromGraph(graph, { structureLocked: true }), {
    interactive: false,
  });
}

// -- task panels -----------------------------------------------------------

interface PanelResult {
  root: HTMLElement;
  /** Null when local validation refuses the submission. */
  collect: () => unknown | null;
  /** The graph being edited, when the panel has one; lets the feedback
   * panel redraw it with witness marks after a rejection. */
  state?: EditorState;
}

function toolbar(
  state: EditorState,
  modes: ToolMode[],
  rerender: () => void,
): HTMLElement {
  const bar = el("div", { class: "toolbar" });
  for (const mode of modes) {
    const button = el("button", { type: "button" }, mode);
    if (state.mode === mode) {
      button.setAttribute("class", "active");
    }
    button.addEventListener("click", () => {
      setMode(state, mode);
      rerender();
    });
    bar.append(button);
  }
  return bar;
}

function instanceCaption(instance: InstanceObj): string {
  return instance.budget === undefined
    ? "no budget"
    : `budget ${instance.budget}`;
}

function specCaption(spec: ReductionSpecObj | { taskRef: string }): string {
  if (isTaskRef(spec)) {
    return `using your design from task '${spec.taskRef}'`;
  }
  return `${spec.family} gadget: ${spec.sourceProblem} → ${spec.targetProblem}`;
}

function resolveGraph(
  value: GraphObj | { taskRef: string } | undefined,
  session: SessionStateObj,
): GraphObj | null {
  if (value === undefined) {
    return null;
  }
  if (isTaskRef(value)) {
    const outputs = session.tasks.find((t) => t.id === value.taskRef)?.outputs;
    return (outputs?.graph as GraphObj | undefined) ?? null;
  }
  return value;
}

/** Whether instances of a problem live on directed graphs. */
function directedProblem(problem: string | undefined): boolean {
  return problem === "ham-cycle-directed";
}

function resolveSpec(
  value: ReductionSpecObj | { taskRef: string } | undefined,
  session: SessionStateObj,
): ReductionSpecObj | null {
  if (value === undefined) {
    return null;
  }
  if (isTaskRef(value)) {
    const outputs = session.tasks.find((t) => t.id === value.taskRef)?.outputs;
    return (outputs?.spec as ReductionSpecObj | undefined) ?? null;
  }
  return value;
}

function editorPanel(
  state: EditorState,
  modes: ToolMode[],
  canvasOptions: Omit<CanvasOptions, "interactive" | "onChange">,
  note: string,
  build: () => unknown | null,
): PanelResult {
  const root = el("div", { class: "panel" });
  const messages = el("p", { class: "validation" });
  const rerender = () => {
    root.replaceChildren();
    if (modes.length > 0) {
      root.append(toolbar(state, modes, rerender));
    }
    root.append(
      renderCanvas(state, { ...canvasOptions, interactive: true, onChange: rerender }),
    );
    if (note) {
      root.append(el("p", { class: "note" }, note));
    }
    root.append(messages);
  };
  rerender();
  return { root, collect: () => build(), state };
}

function buildTaskPanel(
  task: TaskDefObj,
  session: SessionStateObj,
  client: ApiClient,
): PanelResult {
  switch (task.kind) {
    case "text": {
      const root = el("div", { class: "panel" }, el("p", {}, task.body ?? ""));
      return { root, collect: () => buildTextPayload() };
    }
    case "multipleChoice": {
      const root = el("div", { class: "panel" });
      const boxes: HTMLInputElement[] = [];
      (task.options ?? []).forEach((option, i) => {
        const box = el("input", { type: "checkbox", id: `opt${i}` });
        boxes.push(box);
        root.append(el("label", { for: `opt${i}` }, box, ` ${option}`), el("br"));
      });
      return {
        root,
        collect: () =>
          buildChoicePayload(
            boxes.flatMap((box, i) => (box.checked ? [i] : [])),
          ),
      };
    }
    case "selection": {
      const graph = resolveGraph(task.graph, session);
      const state = editorFromGraph(graph ?? { directed: false, nodes: [], edges: [] }, {
        structureLocked: true,
        mode: "select",
      });
      const note =
        task.mode === "edges" ? "select edges to answer" : "select nodes to answer";
      return editorPanel(state, [], {}, note, () => buildSelectionPayload(state));
    }
    case "graphConstruction": {
      const initial = resolveGraph(task.initial, session);
      const editable = task.editable ?? true;
      const state = initial
        ? editorFromGraph(initial, { structureLocked: !editable })
        : newEditor(false);
      const modes: ToolMode[] = editable
        ? ["addNode", "addEdge", "select", "highlight", "delete"]
        : ["select", "highlight"];
      return editorPanel(state, modes, {}, "", () => buildConstructionPayload(state));
    }
    case "applyReduction": {
      const root = el("div", { class: "panel" });
      if (task.spec !== undefined) {
        root.append(el("p", { class: "note" }, specCaption(task.spec)));
      }
      if (task.source) {
        root.append(
          el("p", { class: "note" }, `source instance, ${instanceCaption(task.source)}:`),
          renderReadOnlyGraph(task.source.graph),
        );
      }
      const resolved = resolveSpec(task.spec, session);
      const state = newEditor(directedProblem(resolved?.targetProblem));
      const inner = editorPanel(
        state,
        ["addNode", "addEdge", "delete"],
        {},
        "draw the target graph the reduction produces",
        () => buildApplyPayload(state),
      );
      root.append(inner.root);
      return { root, collect: inner.collect, state: inner.state };
    }
    case "solutionTransfer": {
      const root = el("div", { class: "panel" });
      const state = newEditor(false);
      state.structureLocked = true;
      state.mode = "select";
      const note = el("p", { class: "note" }, "loading the target instance…");
      root.append(note);
      const holder = el("div", {});
      root.append(holder);
      const spec = resolveSpec(task.spec, session);
      if (spec && task.source) {
        client
          .applySpec(spec, task.source)
          .then((target) => {
            const loaded = editorFromGraph(target.graph, {
              structureLocked: true,
              mode: "select",
            });
            Object.assign(state, loaded);
            note.textContent =
              `select the transferred solution on the target instance` +
              ` (${instanceCaption(target)})`;
            const rerender = () => {
              holder.replaceChildren(
                renderCanvas(state, { interactive: true, onChange: rerender }),
              );
            };
            rerender();
          })
          .catch((error: unknown) => {
            note.textContent =
              error instanceof ApiError
                ? `${error.body.code}: ${error.body.message}`
                : String(error);
          });
      }
      return { root, collect: () => buildTransferPayload(state), state };
    }
    case "reductionDesign": {
      const family = task.family ?? "edge";
      const state = newEditor(directedProblem(task.targetProblem));
      const pins = family === "edge" ? "terminals" : family === "node" ? "ports" : "policy";
      const root = el("div", { class: "panel" });
      root.append(
        el(
          "p",
          { class: "note" },
          `design a ${family} gadget for ${task.sourceProblem} → ${task.targetProblem}`,
        ),
      );
      const pinToggle = el("input", { type: "checkbox", id: "pin-mode" });
      const pinLabel =
        family === "edge" ? "pin terminals" : family === "node" ? "pin ports" : "set policy";
      const messages = el("p", { class: "validation" });
      const holder = el("div", {});
      const rerender = () => {
        holder.replaceChildren(
          toolbar(state, ["addNode", "addEdge", "delete"], rerender),
          renderCanvas(state, {
            interactive: true,
            pins,
            pinClicks: pinToggle.checked,
            onChange: rerender,
          }),
        );
        messages.textContent = validationMessages(state, { kind: task.kind, family }).join(
          "; ",
        );
      };
      pinToggle.addEventListener("change", rerender);
      root.append(el("label", { for: "pin-mode" }, pinToggle, ` ${pinLabel}`), holder, messages);
      rerender();
      return {
        root,
        collect: () => {
          const problems = validationMessages(state, { kind: task.kind, family });
          if (problems.length > 0) {
            messages.textContent = problems.join("; ");
            return null;
          }
          return buildDesignPayload(state, family);
        },
        state,
      };
    }
  }
}

// -- the interactive view --------------------------------------------------

class DomView implements WorkflowView {
  private readonly tasksBox: HTMLElement;
  private readonly panelBox: HTMLElement;
  private readonly feedbackBox: HTMLElement;
  private readonly client: ApiClient;
  private submittedEditor: EditorState | null = null;

  constructor(root: HTMLElement, client: ApiClient) {
    this.client = client;
    this.tasksBox = el("div", { class: "tasks" });
    this.panelBox = el("div", { class: "task-panel" });
    this.feedbackBox = el("div", { class: "feedback" });
    root.replaceChildren(
      this.tasksBox,
      el("div", { class: "main" }, this.panelBox, this.feedbackBox),
    );
  }

  showTasks(state: SessionStateObj, workflow: WorkflowDefObj): void {
    const list = el("ul", {});
    for (const task of state.tasks) {
      const item = el(
        "li",
        { class: `task ${task.status}` },
        `${task.title || task.id} — ${task.status}`,
      );
      list.append(item);
    }
    this.tasksBox.replaceChildren(el("h2", {}, workflow.title), list);
  }

  nextAttempt(
    openTasks: TaskStateObj[],
    state: SessionStateObj,
    workflow: WorkflowDefObj,
  ): Promise<AttemptChoice | null> {
    return new Promise((resolve) => {
      const pick = (taskState: TaskStateObj) => {
        const def = workflow.tasks.find((t) => t.id === taskState.id);
        if (!def) {
          resolve(null);
          return;
        }
        const panel = buildTaskPanel(def, state, this.client);
        const submit = el("button", { type: "button" }, "submit");
        submit.addEventListener("click", () => {
          const payload = panel.collect();
          if (payload !== null) {
            this.submittedEditor = panel.state ?? null;
            resolve({ taskId: def.id, payload });
          }
        });
        this.panelBox.replaceChildren(
          el("h3", {}, def.title ?? def.id),
          panel.root,
          submit,
        );
      };
      const chooser = el("div", { class: "chooser" });
      for (const taskState of openTasks) {
        const button = el("button", { type: "button" }, taskState.title || taskState.id);
        button.addEventListener("click", () => pick(taskState));
        chooser.append(button);
      }
      this.panelBox.replaceChildren(el("h3", {}, "pick an open task"), chooser);
      if (openTasks.length === 1) {
        pick(openTasks[0]);
      }
    });
  }

  showVerdict(taskId: string, result: AttemptResultObj, marks: WitnessMarks): void {
    const status = result.verdict.accepted ? "accepted" : "rejected";
    const parts: (Node | string)[] = [
      el("p", { class: `verdict ${status}` }, `${taskId}: ${status}`),
    ];
    if (result.feedback) {
      parts.push(el("p", { class: "feedback-text" }, result.feedback));
    }
    if (marks.nodes.length > 0 || marks.edges.length > 0) {
      if (marks.nodes.length > 0) {
        parts.push(
          el("p", { class: "witness-note" }, `look at: ${marks.nodes.join(", ")}`),
        );
      }
      if (this.submittedEditor !== null) {
        parts.push(
          renderCanvas(this.submittedEditor, { interactive: false, witness: marks }),
        );
      }
    }
    this.feedbackBox.replaceChildren(...parts);
  }

  showCounterexample(
    _taskId: string,
    counterexample: CounterexampleObj,
    description: string,
  ): void {
    this.feedbackBox.append(
      el(
        "div",
        { class: "counterexample" },
        el("h4", {}, "counterexample"),
        el("p", {}, description),
        el(
          "div",
          { class: "pair" },
          el(
            "figure",
            {},
            renderReadOnlyGraph(counterexample.source.graph),
            el("figcaption", {}, `source, ${instanceCaption(counterexample.source)}`),
          ),
          el(
            "figure",
            {},
            renderReadOnlyGraph(counterexample.target.graph),
            el("figcaption", {}, `target, ${instanceCaption(counterexample.target)}`),
          ),
        ),
      ),
    );
  }

  showServiceError(taskId: string, error: ApiError): void {
    this.feedbackBox.replaceChildren(
      el(
        "p",
        { class: "service-error" },
        `${taskId}: ${error.body.code}: ${error.body.message}`,
      ),
    );
  }
}

// -- entry point -----------------------------------------------------------

/** Renders the workflow list and runs the player on the chosen workflow. */
export async function mountApp(root: HTMLElement, client: ApiClient): Promise<void> {
  const workflows = await client.listWorkflows();
  const list = el("div", { class: "workflow-list" }, el("h1", {}, "exercises"));
  for (const workflow of workflows) {
    const button = el("button", { type: "button" }, workflow.title);
    button.addEventListener("click", () => {
      void (async () => {
        const sessionId = await client.createSession(workflow.id);
        const view = new DomView(root, client);
        const final = await playWorkflow(client, sessionId, view);
        const done = final.tasks.every((t) => t.status === "completed");
        root.append(
          el("p", { class: "done" }, done ? "workflow complete" : "stopped"),
        );
      })();
    });
    list.append(button);
  }
  root.replaceChildren(list);
}

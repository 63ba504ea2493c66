/**
 * Browser shell: palette on the left, canvas in the middle, ranked
 * plans on the right. All editing goes through the pure operations in
 * state.ts; all analysis content comes from the service report.
 */

import { AnalysisClient, ApiError } from "./api.js";
import type { PlanDocument } from "./api.js";
import type { EdgeKind, GraphEdge, NodeKind, Point } from "./format.js";
import {
  buildAnalysisBody,
  connect,
  createModel,
  designateAttacker,
  designateTarget,
  exportJson,
  loadDocument,
  moveNode,
  nodeById,
  placeNode,
  removeEdge,
  removeNode,
  select,
  setCatalog,
  setReport,
  togglePlanHighlight,
  toggleWatch,
} from "./state.js";
import type { WorkbenchModel } from "./state.js";
import { breakdownLabel, planEdgeIds, planOverlay, planTitle } from "./overlay.js";

type Tool =
  | { mode: "select" }
  | { mode: "place"; kind: NodeKind }
  | { mode: "connect"; kind: EdgeKind; from: string | null }
  | { mode: "watch" }
  | { mode: "attacker" }
  | { mode: "target" };

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) el.setAttribute(key, value);
  return el;
}

function htmlEl<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const el = document.createElement(tag);
  if (className) el.className = className;
  if (text) el.textContent = text;
  return el;
}

interface EdgeGeometry {
  edge: GraphEdge;
  a: Point;
  b: Point;
  mid: Point;
}

export class WorkbenchApp {
  private model: WorkbenchModel = createModel();
  private tool: Tool = { mode: "select" };
  private readonly client: AnalysisClient;
  private analyzing = false;
  private drag: { id: string; offset: Point } | null = null;

  private readonly canvas: SVGSVGElement;
  private readonly status: HTMLElement;
  private readonly planList: HTMLElement;
  private readonly toolButtons = new Map<string, HTMLButtonElement>();
  private readonly assetPicker: HTMLElement;
  private readonly fileInput: HTMLInputElement;

  constructor(root: HTMLElement, serviceUrl?: string) {
    this.client = new AnalysisClient(serviceUrl);

    const palette = htmlEl("aside", "palette");
    palette.append(htmlEl("h2", "", "palette"));
    this.addTool(palette, "select", "select / move", { mode: "select" });
    palette.append(htmlEl("h3", "", "nodes"));
    this.addTool(palette, "place-actor", "actor", { mode: "place", kind: "actor" });
    this.addTool(palette, "place-datasource", "datasource", { mode: "place", kind: "datasource" });
    palette.append(htmlEl("h3", "", "edges"));
    for (const kind of ["communicate", "respond", "read", "write"] as EdgeKind[]) {
      this.addTool(palette, `connect-${kind}`, kind, { mode: "connect", kind, from: null });
    }
    palette.append(htmlEl("h3", "", "marks"));
    this.addTool(palette, "watch", "watch (click a read edge)", { mode: "watch" });
    this.addTool(palette, "attacker", "designate attacker", { mode: "attacker" });
    this.addTool(palette, "target", "designate target", { mode: "target" });

    palette.append(htmlEl("h3", "", "model"));
    const analyze = htmlEl("button", "action", "run analysis");
    analyze.addEventListener("click", () => void this.runAnalysis());
    const save = htmlEl("button", "action", "save graph");
    save.addEventListener("click", () => this.saveFile());
    const load = htmlEl("button", "action", "load graph");
    this.fileInput = htmlEl("input");
    this.fileInput.type = "file";
    this.fileInput.accept = "application/json";
    this.fileInput.hidden = true;
    this.fileInput.addEventListener("change", () => void this.loadFile());
    load.addEventListener("click", () => this.fileInput.click());
    palette.append(analyze, save, load, this.fileInput);

    const canvasPane = htmlEl("main", "canvas-pane");
    this.status = htmlEl("div", "statusbar", "place nodes, connect them, designate attacker and target");
    this.canvas = svgEl("svg", { class: "canvas" });
    this.canvas.addEventListener("click", (event) => this.onCanvasClick(event));
    this.canvas.addEventListener("mousedown", (event) => this.onMouseDown(event));
    this.canvas.addEventListener("mousemove", (event) => this.onMouseMove(event));
    this.canvas.addEventListener("mouseup", () => (this.drag = null));
    canvasPane.append(this.status, this.canvas);

    const plansPane = htmlEl("aside", "plans-pane");
    plansPane.append(htmlEl("h2", "", "attack plans"));
    this.planList = htmlEl("div", "plan-list");
    plansPane.append(this.planList);

    this.assetPicker = htmlEl("div", "asset-picker");
    this.assetPicker.hidden = true;

    root.append(palette, canvasPane, plansPane, this.assetPicker);
    document.addEventListener("keydown", (event) => this.onKeyDown(event));

    void this.bootstrap();
    this.render();
  }

  private async bootstrap(): Promise<void> {
    try {
      this.model = setCatalog(this.model, await this.client.catalog());
    } catch (err) {
      this.note(`asset catalog unavailable: ${(err as Error).message}`, "error");
    }
  }

  private addTool(palette: HTMLElement, key: string, label: string, tool: Tool): void {
    const button = htmlEl("button", "tool", label);
    button.addEventListener("click", () => {
      this.tool = tool.mode === "connect" ? { ...tool, from: null } : tool;
      this.render();
    });
    this.toolButtons.set(key, button);
    palette.append(button);
  }

  private toolKey(): string {
    const tool = this.tool;
    switch (tool.mode) {
      case "place":
        return `place-${tool.kind}`;
      case "connect":
        return `connect-${tool.kind}`;
      default:
        return tool.mode;
    }
  }

  private note(message: string, level: "info" | "warn" | "error" = "info"): void {
    this.status.textContent = message;
    this.status.className = `statusbar ${level}`;
  }

  private canvasPoint(event: MouseEvent): Point {
    const rect = this.canvas.getBoundingClientRect();
    return { x: event.clientX - rect.left, y: event.clientY - rect.top };
  }

  // -- gestures ----------------------------------------------------------

  private onCanvasClick(event: MouseEvent): void {
    const at = this.canvasPoint(event);
    const hit = (event.target as Element).closest("[data-node], [data-edge], [data-watch]");
    const nodeId = hit?.getAttribute("data-node") ?? null;
    const edgeId = hit?.getAttribute("data-edge") ?? null;
    const watchKey = hit?.getAttribute("data-watch") ?? null;

    if (watchKey) {
      const [actor, datasource] = watchKey.split(" ");
      this.apply(toggleWatch(this.model, actor, datasource));
      return;
    }
    const tool = this.tool;
    switch (tool.mode) {
      case "place": {
        const placed = placeNode(this.model, tool.kind, at);
        this.model = select(placed.model, { kind: "node", id: placed.node.id });
        this.note(`placed ${placed.node.id}`);
        break;
      }
      case "connect": {
        if (!nodeId) break;
        if (tool.from === null) {
          this.tool = { ...tool, from: nodeId };
          this.note(`${tool.kind} from ${nodeId}: click the destination`);
        } else {
          const result = connect(this.model, tool.from, nodeId, tool.kind);
          this.tool = { ...tool, from: null };
          if (result.error) this.note(result.error, "error");
          else this.note(`added ${result.edge!.id} (${tool.kind})`);
          this.model = result.model;
        }
        break;
      }
      case "watch": {
        if (!edgeId) break;
        const edge = this.model.edges.find((e) => e.id === edgeId);
        if (!edge) break;
        if (edge.kind !== "read") {
          this.note("watches ride read edges", "error");
          break;
        }
        this.apply(toggleWatch(this.model, edge.from, edge.to));
        return;
      }
      case "attacker": {
        if (!nodeId) break;
        this.apply(designateAttacker(this.model, nodeId));
        return;
      }
      case "target": {
        if (!nodeId) break;
        this.pickAsset(nodeId);
        return;
      }
      case "select": {
        if (nodeId) this.model = select(this.model, { kind: "node", id: nodeId });
        else if (edgeId) this.model = select(this.model, { kind: "edge", id: edgeId });
        else this.model = select(this.model, null);
        break;
      }
    }
    this.render();
  }

  private onMouseDown(event: MouseEvent): void {
    if (this.tool.mode !== "select") return;
    const hit = (event.target as Element).closest("[data-node]");
    const id = hit?.getAttribute("data-node");
    if (!id) return;
    const at = this.canvasPoint(event);
    const pos = this.model.layout[id];
    this.drag = { id, offset: { x: at.x - pos.x, y: at.y - pos.y } };
  }

  private onMouseMove(event: MouseEvent): void {
    if (!this.drag) return;
    const at = this.canvasPoint(event);
    this.model = moveNode(this.model, this.drag.id, {
      x: at.x - this.drag.offset.x,
      y: at.y - this.drag.offset.y,
    });
    this.render();
  }

  private onKeyDown(event: KeyboardEvent): void {
    if (event.key !== "Delete" && event.key !== "Backspace") return;
    const selection = this.model.selection;
    if (!selection) return;
    if ((event.target as HTMLElement).tagName === "INPUT") return;
    this.model =
      selection.kind === "node"
        ? removeNode(this.model, selection.id)
        : removeEdge(this.model, selection.id);
    this.note(`removed ${selection.id}`);
    this.render();
  }

  private apply(result: { model: WorkbenchModel; error?: string; warning?: string }): void {
    this.model = result.model;
    if (result.error) this.note(result.error, "error");
    else if (result.warning) this.note(result.warning, "warn");
    else this.note("ok");
    this.render();
  }

  private pickAsset(nodeId: string): void {
    const node = nodeById(this.model, nodeId);
    if (!node || node.kind !== "actor") {
      this.apply(designateTarget(this.model, nodeId));
      return;
    }
    this.assetPicker.replaceChildren(
      htmlEl("h3", "", `protected asset on ${node.label}`),
      htmlEl("p", "", "pick the asset category the attacker is after:"),
    );
    for (const category of this.model.catalog) {
      const button = htmlEl("button", "asset", category.name);
      button.addEventListener("click", () => {
        this.assetPicker.hidden = true;
        this.apply(designateTarget(this.model, nodeId, category.id));
      });
      this.assetPicker.append(button);
    }
    const skip = htmlEl("button", "asset skip", "no specific asset");
    skip.addEventListener("click", () => {
      this.assetPicker.hidden = true;
      this.apply(designateTarget(this.model, nodeId));
    });
    this.assetPicker.append(skip);
    this.assetPicker.hidden = false;
  }

  // -- service -----------------------------------------------------------

  private async runAnalysis(): Promise<void> {
    if (this.analyzing) {
      this.note("analysis already running", "warn");
      return;
    }
    const prepared = buildAnalysisBody(this.model);
    if (!prepared.body) {
      this.note(prepared.error!, "error");
      return;
    }
    this.analyzing = true;
    this.note("analyzing...");
    try {
      const report = await this.client.analyze(prepared.body.graph, prepared.body.request);
      this.model = setReport(this.model, report);
      this.note(report.plan_count ? `${report.plan_count} plan(s) found` : "no attack path found");
    } catch (err) {
      if (err instanceof ApiError && err.violations.length) {
        this.note(err.violations.map((v) => v.message).join("; "), "error");
      } else {
        this.note((err as Error).message, "error");
      }
    } finally {
      this.analyzing = false;
      this.render();
    }
  }

  private saveFile(): void {
    const blob = new Blob([exportJson(this.model)], { type: "application/json" });
    const anchor = document.createElement("a");
    anchor.href = URL.createObjectURL(blob);
    anchor.download = "graph.json";
    anchor.click();
    URL.revokeObjectURL(anchor.href);
    this.note("graph saved");
  }

  private async loadFile(): Promise<void> {
    const file = this.fileInput.files?.[0];
    if (!file) return;
    this.apply(loadDocument(this.model, await file.text()));
    this.fileInput.value = "";
  }

  // -- rendering ---------------------------------------------------------

  private highlightedPlanDoc(): PlanDocument | null {
    const { report, highlightedPlan } = this.model;
    if (!report || highlightedPlan === null) return null;
    return report.plans.find((p) => p.rank === highlightedPlan) ?? null;
  }

  private edgeGeometry(): EdgeGeometry[] {
    const groups = new Map<string, GraphEdge[]>();
    for (const edge of this.model.edges) {
      const key = edge.from < edge.to ? `${edge.from} ${edge.to}` : `${edge.to} ${edge.from}`;
      const group = groups.get(key) ?? [];
      group.push(edge);
      groups.set(key, group);
    }
    const out: EdgeGeometry[] = [];
    for (const group of groups.values()) {
      group.sort((x, y) => (x.id < y.id ? -1 : 1));
      group.forEach((edge, index) => {
        const a = this.model.layout[edge.from];
        const b = this.model.layout[edge.to];
        if (!a || !b) return;
        // fan parallel edges apart with a perpendicular midpoint offset
        const spread = (index - (group.length - 1) / 2) * 26;
        const len = Math.hypot(b.x - a.x, b.y - a.y) || 1;
        const nx = -(b.y - a.y) / len;
        const ny = (b.x - a.x) / len;
        out.push({
          edge,
          a,
          b,
          mid: { x: (a.x + b.x) / 2 + nx * spread, y: (a.y + b.y) / 2 + ny * spread },
        });
      });
    }
    return out;
  }

  render(): void {
    for (const [key, button] of this.toolButtons) {
      button.classList.toggle("active", key === this.toolKey());
    }
    this.renderCanvas();
    this.renderPlans();
  }

  private renderCanvas(): void {
    const defs = svgEl("defs");
    const marker = svgEl("marker", {
      id: "arrow",
      viewBox: "0 0 10 10",
      refX: "9",
      refY: "5",
      markerWidth: "7",
      markerHeight: "7",
      orient: "auto-start-reverse",
    });
    marker.append(svgEl("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: "context-stroke" }));
    defs.append(marker);
    this.canvas.replaceChildren(defs);

    const highlighted = this.highlightedPlanDoc();
    const onPlan = highlighted ? planEdgeIds(highlighted) : new Set<string>();

    for (const geo of this.edgeGeometry()) {
      const { edge, a, b, mid } = geo;
      const classes = ["edge", edge.kind];
      if (onPlan.has(edge.id)) classes.push("on-plan");
      if (this.model.selection?.kind === "edge" && this.model.selection.id === edge.id) {
        classes.push("selected");
      }
      const path = svgEl("path", {
        d: `M ${a.x} ${a.y} Q ${mid.x} ${mid.y} ${b.x} ${b.y}`,
        class: classes.join(" "),
        "marker-end": "url(#arrow)",
        fill: "none",
        "data-edge": edge.id,
      });
      this.canvas.append(path);
      const label = svgEl("text", { x: String(mid.x), y: String(mid.y - 6), class: "edge-label" });
      label.textContent = edge.kind;
      label.setAttribute("data-edge", edge.id);
      this.canvas.append(label);

      if (edge.kind === "read" && this.hasWatchOn(edge)) {
        const glyph = svgEl("g", {
          class: "watch-glyph",
          "data-watch": `${edge.from} ${edge.to}`,
          transform: `translate(${mid.x}, ${mid.y + 12})`,
        });
        glyph.append(svgEl("circle", { r: "9" }));
        const eye = svgEl("text", { y: "4", class: "watch-text" });
        eye.textContent = "w";
        glyph.append(eye);
        this.canvas.append(glyph);
      }
    }

    for (const node of this.model.nodes) {
      const at = this.model.layout[node.id];
      if (!at) continue;
      const group = svgEl("g", {
        class: `node ${node.kind}`,
        transform: `translate(${at.x}, ${at.y})`,
        "data-node": node.id,
      });
      if (this.model.selection?.kind === "node" && this.model.selection.id === node.id) {
        group.classList.add("selected");
      }
      if (node.kind === "actor") {
        group.append(svgEl("rect", { x: "-52", y: "-24", width: "104", height: "48", rx: "8" }));
      } else {
        group.append(svgEl("ellipse", { rx: "56", ry: "26" }));
      }
      const label = svgEl("text", { y: "4", class: "node-label" });
      label.textContent = node.label;
      group.append(label);
      if (this.model.attacker === node.id) {
        const badge = svgEl("text", { x: "-48", y: "-30", class: "badge attacker-badge" });
        badge.textContent = "attacker";
        group.append(badge);
      }
      if (this.model.target === node.id) {
        const badge = svgEl("text", { x: "-48", y: "-30", class: "badge target-badge" });
        if (this.model.attacker === node.id) badge.setAttribute("y", "-44");
        badge.textContent = this.model.targetAsset ? `target: ${this.model.targetAsset}` : "target";
        group.append(badge);
      }
      this.canvas.append(group);
    }

    if (highlighted) {
      for (const badge of planOverlay(highlighted, this.model.edges, this.model.layout)) {
        const group = svgEl("g", {
          class: `plan-badge ${badge.role}`,
          transform: `translate(${badge.at.x}, ${badge.at.y})`,
        });
        group.append(svgEl("circle", { r: "11" }));
        const num = svgEl("text", { y: "4", class: "plan-badge-text" });
        num.textContent = String(badge.seq);
        group.append(num);
        this.canvas.append(group);
      }
    }
  }

  private hasWatchOn(edge: GraphEdge): boolean {
    return this.model.watches.some((w) => w.actor === edge.from && w.datasource === edge.to);
  }

  private renderPlans(): void {
    this.planList.replaceChildren();
    const report = this.model.report;
    if (!report) {
      this.planList.append(htmlEl("p", "empty-state", "run analysis to see ranked plans"));
      return;
    }
    if (!report.plans.length) {
      this.planList.append(
        htmlEl("p", "empty-state", "no attack path found within the configured bounds"),
      );
      return;
    }
    for (const plan of report.plans) {
      const row = htmlEl("div", "plan");
      if (this.model.highlightedPlan === plan.rank) row.classList.add("highlighted");
      const head = htmlEl("button", "plan-head", planTitle(plan));
      head.addEventListener("click", () => {
        this.model = togglePlanHighlight(this.model, plan.rank);
        this.render();
      });
      row.append(head, htmlEl("div", "plan-cost", breakdownLabel(plan)));
      const steps = htmlEl("ol", "plan-steps");
      for (const step of plan.steps) {
        steps.append(htmlEl("li", "", step.narrative));
      }
      row.append(steps);
      this.planList.append(row);
    }
  }
}

// auto-init in the browser; importing this module elsewhere is harmless
if (typeof document !== "undefined") {
  const root = document.getElementById("workbench-root");
  if (root) new WorkbenchApp(root);
}

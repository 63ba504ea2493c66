/**
 * Workbench model: the graph under edit plus canvas and session state.
 *
 * Operations are pure: each takes a model and returns an updated copy,
 * reporting problems as values so the shell can show them inline.
 * Endpoint-kind rules are pre-checked here, mirroring the service, so a
 * bad gesture fails immediately instead of at the next analysis. The
 * model never computes plans; reports come from the service verbatim.
 */

import {
  DESIGNATION_KEY,
  DocumentError,
  FORMAT_VERSION,
  LAYOUT_KEY,
  documentToJson,
  encodeDesignations,
  encodeLayout,
  parseDocument,
  readDesignations,
  readLayout,
} from "./format.js";
import type {
  Designations,
  EdgeKind,
  GraphDocument,
  GraphEdge,
  GraphNode,
  Layout,
  NodeKind,
  Point,
  WatchMark,
} from "./format.js";
import type { AnalysisRequestBody, AssetCategory, ReportDocument } from "./api.js";

export interface Selection {
  kind: "node" | "edge";
  id: string;
}

export interface AnalysisBounds {
  k: number;
  maxCost: number;
  maxSteps: number;
  triggerDepth: number;
}

export const DEFAULT_BOUNDS: AnalysisBounds = { k: 3, maxCost: 25, maxSteps: 12, triggerDepth: 4 };

export interface WorkbenchModel {
  nodes: GraphNode[];
  edges: GraphEdge[];
  watches: WatchMark[];
  /** Non-reserved metadata from a loaded file, preserved on export. */
  metadata: Record<string, string>;
  layout: Layout;
  selection: Selection | null;
  attacker: string | null;
  target: string | null;
  targetAsset: string | null;
  /** Asset catalog from the service; empty until fetched. */
  catalog: AssetCategory[];
  bounds: AnalysisBounds;
  report: ReportDocument | null;
  /** Rank of the plan whose action numbering overlays the canvas, if any. */
  highlightedPlan: number | null;
}

export interface NodeResult {
  model: WorkbenchModel;
  node: GraphNode;
}

export interface EdgeResult {
  model: WorkbenchModel;
  edge?: GraphEdge;
  error?: string;
}

export interface OpResult {
  model: WorkbenchModel;
  error?: string;
  warning?: string;
}

export function createModel(): WorkbenchModel {
  return {
    nodes: [],
    edges: [],
    watches: [],
    metadata: {},
    layout: {},
    selection: null,
    attacker: null,
    target: null,
    targetAsset: null,
    catalog: [],
    bounds: { ...DEFAULT_BOUNDS },
    report: null,
    highlightedPlan: null,
  };
}

export function setCatalog(model: WorkbenchModel, catalog: AssetCategory[]): WorkbenchModel {
  return { ...model, catalog: [...catalog].sort((a, b) => a.severity_rank - b.severity_rank) };
}

export function setBounds(model: WorkbenchModel, bounds: Partial<AnalysisBounds>): WorkbenchModel {
  return { ...model, bounds: { ...model.bounds, ...bounds } };
}

export function select(model: WorkbenchModel, selection: Selection | null): WorkbenchModel {
  return { ...model, selection };
}

export function nodeById(model: WorkbenchModel, id: string): GraphNode | undefined {
  return model.nodes.find((n) => n.id === id);
}

export function edgeById(model: WorkbenchModel, id: string): GraphEdge | undefined {
  return model.edges.find((e) => e.id === id);
}

export function hasWatch(model: WorkbenchModel, actor: string, datasource: string): boolean {
  return model.watches.some((w) => w.actor === actor && w.datasource === datasource);
}

function nextId(model: WorkbenchModel, prefix: string): string {
  let highest = 0;
  const pattern = new RegExp(`^${prefix}-(\\d+)$`);
  for (const id of [...model.nodes.map((n) => n.id), ...model.edges.map((e) => e.id)]) {
    const match = pattern.exec(id);
    if (match) highest = Math.max(highest, Number(match[1]));
  }
  return `${prefix}-${highest + 1}`;
}

/** Create a node at a canvas position; ids are generated, labels default to the kind. */
export function placeNode(model: WorkbenchModel, kind: NodeKind, at: Point, label?: string): NodeResult {
  const id = nextId(model, kind);
  const node: GraphNode = {
    id,
    kind,
    label: label ?? `${kind === "actor" ? "Actor" : "Datasource"} ${id.split("-")[1]}`,
    assets: [],
    attacker_capable: false,
  };
  return {
    model: {
      ...model,
      nodes: [...model.nodes, node],
      layout: { ...model.layout, [id]: { x: at.x, y: at.y } },
    },
    node,
  };
}

/**
 * Why a proposed edge would be rejected, or null if it is fine. Mirrors
 * the service's endpoint-kind rules so the canvas can refuse the gesture
 * inline: read/write go actor -> datasource, communicate/respond join
 * two distinct actors.
 */
export function connectError(model: WorkbenchModel, from: string, to: string, kind: EdgeKind): string | null {
  const src = nodeById(model, from);
  const dst = nodeById(model, to);
  if (!src) return `unknown node ${JSON.stringify(from)}`;
  if (!dst) return `unknown node ${JSON.stringify(to)}`;
  if (kind === "read" || kind === "write") {
    if (src.kind !== "actor" || dst.kind !== "datasource") {
      return `${kind} edges go from an actor to a datasource`;
    }
    return null;
  }
  if (src.kind !== "actor" || dst.kind !== "actor") {
    return `${kind} edges join two actors`;
  }
  if (from === to) {
    return `an actor cannot ${kind === "communicate" ? "communicate with" : "respond to"} itself`;
  }
  return null;
}

/** Draw an edge between two nodes. Parallel edges are allowed. */
export function connect(model: WorkbenchModel, from: string, to: string, kind: EdgeKind, cost = 1): EdgeResult {
  const error = connectError(model, from, to, kind);
  if (error) return { model, error };
  if (!Number.isInteger(cost) || cost < 1) return { model, error: "cost must be a positive integer" };
  const edge: GraphEdge = { id: nextId(model, "edge"), from, to, kind, cost };
  return { model: { ...model, edges: [...model.edges, edge] }, edge };
}

/**
 * Flip the watch mark on (actor, datasource). Turning one on requires a
 * read edge to back it, matching the service's WATCH_WITHOUT_READ rule.
 */
export function toggleWatch(model: WorkbenchModel, actor: string, datasource: string): OpResult {
  if (hasWatch(model, actor, datasource)) {
    return {
      model: {
        ...model,
        watches: model.watches.filter((w) => !(w.actor === actor && w.datasource === datasource)),
      },
    };
  }
  const backing = model.edges.some((e) => e.kind === "read" && e.from === actor && e.to === datasource);
  if (!backing) {
    return { model, error: `a watch needs a read edge from ${actor} to ${datasource}` };
  }
  return { model: { ...model, watches: [...model.watches, { actor, datasource }] } };
}

function withNode(model: WorkbenchModel, id: string, update: (node: GraphNode) => GraphNode): WorkbenchModel {
  return { ...model, nodes: model.nodes.map((n) => (n.id === id ? update(n) : n)) };
}

/**
 * Mark an actor as the attacker. The chosen node gets attacker_capable
 * set (the service requires it); re-designation moves the badge and the
 * flag, leaving capability flags on non-designated nodes untouched.
 */
export function designateAttacker(model: WorkbenchModel, id: string): OpResult {
  const node = nodeById(model, id);
  if (!node) return { model, error: `unknown node ${JSON.stringify(id)}` };
  if (node.kind !== "actor") return { model, error: "only an actor can be the attacker" };
  let next = model;
  if (model.attacker && model.attacker !== id) {
    next = withNode(next, model.attacker, (n) => ({ ...n, attacker_capable: false }));
  }
  next = withNode(next, id, (n) => ({ ...n, attacker_capable: true }));
  return { model: { ...next, attacker: id } };
}

/**
 * Mark an actor as the target, optionally naming the protected asset.
 * Naming one attaches it to the node so the analysis request can cite
 * it; omitting it still designates but warns with the catalog choices.
 */
export function designateTarget(model: WorkbenchModel, id: string, asset?: string): OpResult {
  const node = nodeById(model, id);
  if (!node) return { model, error: `unknown node ${JSON.stringify(id)}` };
  if (node.kind !== "actor") return { model, error: "only an actor can be the target" };
  if (asset !== undefined && model.catalog.length && !model.catalog.some((c) => c.id === asset)) {
    return { model, error: `unknown asset category ${JSON.stringify(asset)}` };
  }
  let next = model;
  if (asset !== undefined && !node.assets.includes(asset)) {
    next = withNode(next, id, (n) => ({ ...n, assets: [...n.assets, asset].sort() }));
  }
  const result: OpResult = {
    model: { ...next, target: id, targetAsset: asset ?? null },
  };
  if (asset === undefined) {
    const choices = model.catalog.map((c) => c.name).join(", ");
    result.warning = choices
      ? `no protected asset chosen; pick one of: ${choices}`
      : "no protected asset chosen";
  }
  return result;
}

/** Move a node on the canvas. */
export function moveNode(model: WorkbenchModel, id: string, at: Point): WorkbenchModel {
  if (!nodeById(model, id)) return model;
  return { ...model, layout: { ...model.layout, [id]: { x: at.x, y: at.y } } };
}

/** Remove a node and everything that referenced it. */
export function removeNode(model: WorkbenchModel, id: string): WorkbenchModel {
  const layout = { ...model.layout };
  delete layout[id];
  return {
    ...model,
    nodes: model.nodes.filter((n) => n.id !== id),
    edges: model.edges.filter((e) => e.from !== id && e.to !== id),
    watches: model.watches.filter((w) => w.actor !== id && w.datasource !== id),
    layout,
    selection: model.selection?.kind === "node" && model.selection.id === id ? null : model.selection,
    attacker: model.attacker === id ? null : model.attacker,
    target: model.target === id ? null : model.target,
    targetAsset: model.target === id ? null : model.targetAsset,
  };
}

/** Remove an edge; watches that lose their last backing read go with it. */
export function removeEdge(model: WorkbenchModel, id: string): WorkbenchModel {
  const edge = edgeById(model, id);
  if (!edge) return model;
  const edges = model.edges.filter((e) => e.id !== id);
  const stillRead = (actor: string, datasource: string) =>
    edges.some((e) => e.kind === "read" && e.from === actor && e.to === datasource);
  return {
    ...model,
    edges,
    watches: model.watches.filter((w) => stillRead(w.actor, w.datasource)),
    selection: model.selection?.kind === "edge" && model.selection.id === id ? null : model.selection,
  };
}

/** Store a fresh analysis report; the best plan's overlay comes on by default. */
export function setReport(model: WorkbenchModel, report: ReportDocument | null): WorkbenchModel {
  return {
    ...model,
    report,
    highlightedPlan: report && report.plans.length ? report.plans[0].rank : null,
  };
}

/** Flip one plan's canvas overlay; at most one plan is overlaid at a time. */
export function togglePlanHighlight(model: WorkbenchModel, rank: number): WorkbenchModel {
  return { ...model, highlightedPlan: model.highlightedPlan === rank ? null : rank };
}

function designations(model: WorkbenchModel): Designations {
  return { attacker: model.attacker, target: model.target, targetAsset: model.targetAsset };
}

/** The graph under edit as a wire document, canvas state under reserved metadata keys. */
export function exportDocument(model: WorkbenchModel): GraphDocument {
  const metadata: Record<string, string> = { ...model.metadata };
  const layout: Layout = {};
  for (const node of model.nodes) {
    if (model.layout[node.id]) layout[node.id] = model.layout[node.id];
  }
  metadata[LAYOUT_KEY] = encodeLayout(layout);
  metadata[DESIGNATION_KEY] = encodeDesignations(designations(model));
  return {
    version: FORMAT_VERSION,
    metadata,
    nodes: model.nodes.map((n) => ({ ...n, assets: [...n.assets] })),
    edges: model.edges.map((e) => ({ ...e })),
    watches: model.watches.map((w) => ({ ...w })),
  };
}

export function exportJson(model: WorkbenchModel): string {
  return documentToJson(exportDocument(model));
}

/** Fallback positions for nodes a loaded file does not place: a simple grid. */
function gridLayout(nodes: GraphNode[], have: Layout): Layout {
  const layout: Layout = { ...have };
  let slot = 0;
  for (const node of nodes) {
    if (!layout[node.id]) {
      layout[node.id] = { x: 120 + (slot % 4) * 180, y: 100 + Math.floor(slot / 4) * 140 };
      slot += 1;
    }
  }
  return layout;
}

/**
 * Replace the model with a loaded document. Catalog and bounds survive;
 * layout and designations are restored from the reserved metadata keys
 * when present and still consistent with the graph.
 */
export function loadDocument(model: WorkbenchModel, text: string): OpResult {
  let doc: GraphDocument;
  try {
    doc = parseDocument(text);
  } catch (err) {
    if (err instanceof DocumentError) return { model, error: err.message };
    throw err;
  }
  const saved = readDesignations(doc.metadata);
  const metadata = { ...doc.metadata };
  delete metadata[LAYOUT_KEY];
  delete metadata[DESIGNATION_KEY];

  const next: WorkbenchModel = {
    ...createModel(),
    catalog: model.catalog,
    bounds: model.bounds,
    nodes: doc.nodes,
    edges: doc.edges,
    watches: doc.watches,
    metadata,
    layout: gridLayout(doc.nodes, readLayout(doc.metadata)),
  };
  const actorExists = (id: string | null): id is string =>
    id !== null && doc.nodes.some((n) => n.id === id && n.kind === "actor");
  if (actorExists(saved.attacker) && doc.nodes.some((n) => n.id === saved.attacker && n.attacker_capable)) {
    next.attacker = saved.attacker;
  }
  if (actorExists(saved.target)) {
    next.target = saved.target;
    const target = doc.nodes.find((n) => n.id === saved.target);
    if (saved.targetAsset !== null && target && target.assets.includes(saved.targetAsset)) {
      next.targetAsset = saved.targetAsset;
    }
  }
  return { model: next };
}

export interface AnalysisBodyResult {
  body?: { graph: GraphDocument; request: AnalysisRequestBody };
  error?: string;
}

/** Assemble the analyze payload from the current designations and bounds. */
export function buildAnalysisBody(model: WorkbenchModel): AnalysisBodyResult {
  if (!model.attacker) return { error: "designate an attacker first" };
  if (!model.target) return { error: "designate a target first" };
  return {
    body: {
      graph: exportDocument(model),
      request: {
        attacker: model.attacker,
        target: model.target,
        target_asset: model.targetAsset,
        k: model.bounds.k,
        max_cost: model.bounds.maxCost,
        max_steps: model.bounds.maxSteps,
        trigger_depth: model.bounds.triggerDepth,
      },
    },
  };
}

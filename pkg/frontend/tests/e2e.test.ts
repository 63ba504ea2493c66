/**
 * End-to-end: drive the workbench model against a real analysis service
 * and the real CLI. The service is spawned once for the file; every
 * document the workbench exports must survive `validate` unchanged.
 */

import { execFile, spawn } from "node:child_process";
import type { ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { AnalysisClient } from "../src/api.js";
import type { ReportDocument } from "../src/api.js";
import { planOverlay } from "../src/overlay.js";
import {
  buildAnalysisBody,
  connect,
  createModel,
  designateAttacker,
  designateTarget,
  exportJson,
  loadDocument,
  placeNode,
  setCatalog,
  setReport,
  toggleWatch,
} from "../src/state.js";
import type { WorkbenchModel } from "../src/state.js";

const run = promisify(execFile);

const PORT = 8931;
const BASE_URL = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = fileURLToPath(new URL("../..", import.meta.url));
const CALENDAR_TRIGGER_FILE = join(REPO_ROOT, "tests", "fixtures", "fig6a.json");

let service: ChildProcess;
let client: AnalysisClient;
const exported: string[] = [];
const scratch = mkdtempSync(join(tmpdir(), "workbench-"));

function saveExport(name: string, text: string): void {
  const file = join(scratch, name);
  writeFileSync(file, text);
  exported.push(file);
}

async function waitForService(): Promise<void> {
  const deadline = Date.now() + 20_000;
  for (;;) {
    try {
      const response = await fetch(`${BASE_URL}/api/v1/catalog`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("analysis service did not come up");
    await new Promise((r) => setTimeout(r, 200));
  }
}

beforeAll(async () => {
  service = spawn("python3", ["-m", "attackpath.cli", "serve", "--port", String(PORT)], {
    cwd: REPO_ROOT,
    stdio: "ignore",
  });
  client = new AnalysisClient(BASE_URL);
  await waitForService();
});

afterAll(async () => {
  if (!service) return;
  const gone = new Promise((resolve) => service.once("exit", resolve));
  service.kill("SIGTERM");
  await gone;
});

/** Build the watched-memory scenario the way a user would: 8 gestures. */
function buildWatchedMemory(catalogged: WorkbenchModel): WorkbenchModel {
  const a = placeNode(catalogged, "actor", { x: 80, y: 120 }, "Attacker");
  const b = placeNode(a.model, "actor", { x: 320, y: 120 }, "Car agent");
  const d = placeNode(b.model, "datasource", { x: 320, y: 300 }, "Long-term memory");
  let model = d.model;
  for (const [from, to, kind] of [
    [a.node.id, b.node.id, "communicate"],
    [b.node.id, a.node.id, "respond"],
    [b.node.id, d.node.id, "read"],
    [b.node.id, d.node.id, "write"],
  ] as const) {
    const result = connect(model, from, to, kind);
    expect(result.error).toBeUndefined();
    model = result.model;
  }
  const watched = toggleWatch(model, b.node.id, d.node.id);
  expect(watched.error).toBeUndefined();
  return watched.model;
}

async function analyze(model: WorkbenchModel): Promise<ReportDocument> {
  const prepared = buildAnalysisBody(model);
  expect(prepared.error).toBeUndefined();
  const { graph, request } = prepared.body!;
  return client.analyze(graph, request);
}

describe("workbench loop against the live service", () => {
  it("finds the cost-3 plan, numbers the canvas 1..3, and the watch what-if flips to cost 4", async () => {
    let model = setCatalog(createModel(), await client.catalog());
    model = buildWatchedMemory(model);
    model = designateAttacker(model, "actor-1").model;
    const designated = designateTarget(model, "actor-2", "privacy-and-personal-data");
    expect(designated.error).toBeUndefined();
    model = designated.model;

    const report = await analyze(model);
    expect(report.schema).toBe("attackpath.report/v1");
    expect(report.graph_digest).toMatch(/^sha256:[0-9a-f]{64}$/);
    expect(report.plans.length).toBeGreaterThan(0);
    expect(report.plans[0].total_cost).toBe(3);

    model = setReport(model, report);
    expect(model.highlightedPlan).toBe(1);
    const badges = planOverlay(report.plans[0], model.edges, model.layout);
    expect(badges.map((b) => b.seq)).toEqual([1, 2, 3]);
    for (const badge of badges) {
      expect(Number.isFinite(badge.at.x)).toBe(true);
      expect(Number.isFinite(badge.at.y)).toBe(true);
    }
    saveExport("watched-memory.json", exportJson(model));

    // what-if: flip the watch off and re-run
    const toggled = toggleWatch(model, "actor-2", "datasource-1");
    expect(toggled.error).toBeUndefined();
    expect(toggled.model.watches).toHaveLength(0);
    const unwatched = await analyze(toggled.model);
    expect(unwatched.plans[0].total_cost).toBe(4);
    saveExport("unwatched-memory.json", exportJson(toggled.model));
  });

  it("reports an empty plan list for an unreachable target", async () => {
    let model = createModel();
    const a = placeNode(model, "actor", { x: 0, y: 0 });
    const b = placeNode(a.model, "actor", { x: 200, y: 0 });
    model = designateAttacker(b.model, a.node.id).model;
    model = designateTarget(model, b.node.id).model;
    const report = await analyze(model);
    expect(report.plan_count).toBe(0);
    expect(report.plans).toEqual([]);
  });

  it("warns with the seven catalog categories when no asset is chosen", async () => {
    const catalog = await client.catalog();
    expect(catalog).toHaveLength(7);
    let model = setCatalog(createModel(), catalog);
    const a = placeNode(model, "actor", { x: 0, y: 0 });
    model = a.model;
    const result = designateTarget(model, a.node.id);
    for (const category of catalog) {
      expect(result.warning).toContain(category.name);
    }
  });

  it("loads the calendar-trigger fixture and surfaces its watch for the glyph", async () => {
    const loaded = loadDocument(createModel(), readFileSync(CALENDAR_TRIGGER_FILE, "utf8"));
    expect(loaded.error).toBeUndefined();
    expect(loaded.model.watches).toEqual([{ actor: "car_agent", datasource: "calendar" }]);
    expect(Object.keys(loaded.model.layout)).toHaveLength(3);
    saveExport("calendar-trigger.json", exportJson(loaded.model));
  });
});

describe("export/parse contract", () => {
  it("every exported file passes CLI validate with exit 0", async () => {
    expect(exported.length).toBeGreaterThanOrEqual(3);
    for (const file of exported) {
      await expect(
        run("python3", ["-m", "attackpath.cli", "validate", "--graph", file], { cwd: REPO_ROOT }),
      ).resolves.toBeDefined();
    }
  });
});

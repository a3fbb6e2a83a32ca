// End-to-end round trip against the real scoring service and CLI:
// a completed UI session exports a questionnaire the CLI accepts, the
// derived tables match a hand-written file with the same judgments byte
// for byte, and the CR badge value equals the CLI's CR per context.
//
// Skipped when the Python package is not installed.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync, existsSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { buildContexts } from "../src/contexts";
import { ElicitationSession } from "../src/session";
import { TAXONOMY } from "./fixtures";

const PYTHON = process.env.GRIDOBS_PYTHON ?? "python3";

function pythonAvailable(): boolean {
  const probe = spawnSync(PYTHON, ["-c", "import gridobs"], { timeout: 20000 });
  return probe.status === 0;
}

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address && typeof address === "object") {
        const port = address.port;
        srv.close(() => resolve(port));
      } else {
        srv.close(() => reject(new Error("no port")));
      }
    });
  });
}

async function waitForService(client: ApiClient): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      await client.taxonomy();
      return;
    } catch {
      await new Promise((r) => setTimeout(r, 100));
    }
  }
  throw new Error("service did not come up");
}

// Deterministic mixed judgments: consistent-ish values with a few clashes.
const VALUES = [1, 2, 3, 1 / 2, 4, 1 / 3, 5, 1 / 4, 2, 3];

function fillSession(session: ElicitationSession): void {
  let k = 0;
  for (const ctx of session.contexts) {
    for (let row = 0; row < ctx.items.length; row++) {
      for (let col = row + 1; col < ctx.items.length; col++) {
        session.enterJudgment(ctx.key, row, col, VALUES[k % VALUES.length]!);
        k++;
      }
    }
  }
}

describe.skipIf(!pythonAvailable())("service round trip", () => {
  let child: ChildProcess;
  let client: ApiClient;
  let workDir: string;
  let storeDir: string;

  beforeAll(async () => {
    workDir = mkdtempSync(join(tmpdir(), "gridobs-ui-"));
    storeDir = join(workDir, "store");
    const port = await freePort();
    child = spawn(PYTHON, [
      "-m", "gridobs.cli", "serve", "--port", String(port), "--store", storeDir,
    ], { stdio: "ignore" });
    client = new ApiClient(`http://127.0.0.1:${port}`);
    await waitForService(client);
  }, 30000);

  afterAll(() => {
    child?.kill();
    rmSync(workDir, { recursive: true, force: true });
  });

  it("serves the taxonomy the UI fixture mirrors", async () => {
    const live = await client.taxonomy();
    expect(live).toEqual(TAXONOMY);
  });

  it("CR badge equals the CLI's consistency ratio to 2 decimals", { timeout: 30000 }, async () => {
    const session = new ElicitationSession("expert-ui", buildContexts(TAXONOMY));
    fillSession(session);
    const payload = session.toQuestionnaire();

    // badge values: what the UI shows, straight from the service
    const badges = new Map<string, number>();
    for (const ctx of session.contexts) {
      const evaluation = await client.evaluateMatrix(ctx.items, session.judgments(ctx.key));
      session.applyEvaluation(ctx.key, evaluation);
      badges.set(ctx.key, evaluation.cr);
    }

    // CLI view of the same matrices
    const uiPath = join(workDir, "ui-export.json");
    writeFileSync(uiPath, JSON.stringify(payload));
    const run = spawnSync(PYTHON, [
      "-m", "gridobs.cli", "weights-derive", uiPath, "--format", "json",
    ], { encoding: "utf-8", timeout: 60000 });
    expect(run.status).toBe(0);
    const report = JSON.parse(run.stdout);
    for (const entry of report.consistency) {
      const badge = badges.get(entry.context);
      expect(badge, entry.context).toBeDefined();
      expect(badge!.toFixed(2)).toBe(entry.consistency_ratio.toFixed(2));
    }
  });

  it("UI export and a hand-written equivalent derive identical tables", { timeout: 30000 }, async () => {
    const session = new ElicitationSession("expert-ui", buildContexts(TAXONOMY));
    fillSession(session);
    const payload = session.toQuestionnaire();

    const uiPath = join(workDir, "export-ui.json");
    writeFileSync(uiPath, JSON.stringify(payload));

    // same judgments, different authoring style: reordered keys, indentation
    const handWritten = {
      matrices: payload.matrices.map((m) => ({
        judgments: m.judgments.map((j) => ({ value: j.value, col: j.col, row: j.row })),
        items: m.items,
        context: m.context,
      })),
      expert_id: payload.expert_id,
    };
    const handPath = join(workDir, "export-hand.json");
    writeFileSync(handPath, JSON.stringify(handWritten, null, 4));

    const uiTables = join(workDir, "tables-ui.json");
    const handTables = join(workDir, "tables-hand.json");
    const runUi = spawnSync(PYTHON, [
      "-m", "gridobs.cli", "weights-derive", uiPath, "-o", uiTables, "--format", "json",
    ], { encoding: "utf-8", timeout: 60000 });
    expect(runUi.status).toBe(0);
    const runHand = spawnSync(PYTHON, [
      "-m", "gridobs.cli", "weights-derive", handPath, "-o", handTables, "--format", "json",
    ], { encoding: "utf-8", timeout: 60000 });
    expect(runHand.status).toBe(0);
    expect(readFileSync(uiTables, "utf-8")).toBe(readFileSync(handTables, "utf-8"));
  });

  it("submits the questionnaire and gets a stable id back", { timeout: 30000 }, async () => {
    const session = new ElicitationSession("expert-ui", buildContexts(TAXONOMY));
    fillSession(session);
    const accepted = await client.submitQuestionnaire(session.toQuestionnaire());
    expect(accepted.id).toMatch(/^[0-9a-f]{12}$/);
    expect(accepted.contexts).toBe(11);
    expect(existsSync(join(storeDir, `${accepted.id}.json`))).toBe(true);
    const again = await client.submitQuestionnaire(session.toQuestionnaire());
    expect(again.id).toBe(accepted.id);
  });

  it("surfaces field diagnostics on a bad matrix", async () => {
    await expect(
      client.evaluateMatrix(["a", "b"], [{ row: 0, col: 1, value: 0 }]),
    ).rejects.toMatchObject({ status: 400 });
  });
});

// @vitest-environment jsdom
//
// End-to-end: boot the real Python service, play a complete game as
// the landlord against two rule-based agents by clicking card glyphs
// (only ever assembling server-listed legal moves), reach the terminal
// screen, download the record, and re-validate it through the replay
// command.

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { GameApi } from "../src/api.js";
import { App } from "../src/app.js";

const PORT = 18731;
const BASE = `http://127.0.0.1:${PORT}`;
const PYTHON = process.env.PYTHON ?? "python3";

let server: ChildProcess;
let dataDir: string;

async function waitForHealth(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/api/health`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await sleep(250);
  }
  throw new Error("service did not come up");
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "ddz-e2e-"));
  server = spawn(PYTHON, ["-m", "doudizhu.cli", "serve", "--port", String(PORT),
                          "--data-dir", dataDir],
                 { cwd: join(__dirname, "..", ".."), stdio: "ignore" });
  await waitForHealth();
}, 60_000);

afterAll(() => {
  server?.kill();
});

describe("full game in the browser client", () => {
  it("plays to a terminal screen and the downloaded record re-validates", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const app = new App(document.getElementById("app")!, {
      api: new GameApi(BASE),
      pollMs: 50,
    });

    // lobby: landlord vs two rule-based agents, seeded deal
    (document.getElementById("seed-input") as HTMLInputElement).value = "424242";
    for (const select of document.querySelectorAll<HTMLSelectElement>(".agent-kind")) {
      select.value = "rhcp";
    }
    (document.getElementById("start") as HTMLButtonElement).click();
    await app.idle();
    expect(app.model).toBeTruthy();
    expect(app.model!.hand().length).toBe(20);

    let guard = 0;
    while (!app.model!.finished()) {
      expect(guard++).toBeLessThan(300);
      if (!app.model!.view.your_turn) {
        await sleep(60); // the poll loop is running at 50ms
        continue;
      }
      const legal = app.model!.view.legal_moves;
      expect(legal.length).toBeGreaterThan(0);
      const move = legal[legal.length - 1]; // biggest listed move
      if (move === "pass" && legal.length === 1) {
        (document.getElementById("pass") as HTMLButtonElement).click();
        await app.idle();
        continue;
      }
      const choice = move === "pass" ? legal[0] : move;
      // click the glyphs that assemble the chosen legal move
      for (const label of choice.split(",")) {
        const card = [...document.querySelectorAll<HTMLButtonElement>(".card")]
          .find((c) => c.textContent === label && !c.classList.contains("selected"));
        expect(card, `card ${label} clickable`).toBeTruthy();
        card!.click();
      }
      const submit = document.getElementById("submit") as HTMLButtonElement;
      expect(submit.disabled).toBe(false);
      submit.click();
      await app.idle();
    }
    app.stopPolling();

    // terminal screen with the winner and an enabled download
    expect(document.getElementById("terminal")).toBeTruthy();
    expect(document.getElementById("status")!.textContent).toContain("wins");
    const download = document.getElementById("download") as HTMLButtonElement;
    expect(download.disabled).toBe(false);
    const recordText = app.recordText();
    expect(recordText).toContain('"moves"');

    // the downloaded record replays cleanly through the CLI validator
    const recordPath = join(dataDir, "downloaded.json");
    writeFileSync(recordPath, recordText + "\n");
    const replay = spawnSync(PYTHON, ["-m", "doudizhu.cli", "replay", recordPath],
                             { cwd: join(__dirname, "..", ".."), encoding: "utf-8" });
    expect(replay.status, replay.stderr).toBe(0);
    expect(replay.stdout).toContain("validated 1 record");
  }, 120_000);
});

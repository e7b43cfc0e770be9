// Single-page table client. Plain DOM components, no framework: a lobby
// (seat + opponent kinds), the table (hand as clickable text glyphs,
// incumbent, counts, history in record notation), and a terminal panel
// with a record download. The server stays authoritative: submit only
// enables when the current selection string-matches a listed legal
// move, and every rejection just re-renders from the server view.

import { GameApi, GameRecordJson, SeatName, AgentKind, ServiceError } from "./api.js";
import { SEAT_LABELS, TableModel, nextSeat } from "./model.js";

export interface AppOptions {
  api?: GameApi;
  pollMs?: number;
  autopoll?: boolean;
}

const AGENT_KINDS: AgentKind[] = ["rhcp", "random", "cql"];

export class App {
  readonly api: GameApi;
  readonly root: HTMLElement;
  readonly pollMs: number;
  private readonly autopoll: boolean;

  model: TableModel | null = null;
  sessionId = "";
  seat: SeatName = "landlord";
  latestRecord: GameRecordJson | null = null;
  errorText = "";
  disconnected = false;
  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private busy: Promise<void> = Promise.resolve();

  constructor(root: HTMLElement, options: AppOptions = {}) {
    this.root = root;
    this.api = options.api ?? new GameApi("");
    this.pollMs = options.pollMs ?? 1000;
    this.autopoll = options.autopoll ?? true;
    this.renderLobby();
  }

  /** Resolves after all in-flight mutations have rendered. */
  idle(): Promise<void> {
    return this.busy;
  }

  private enqueue(work: () => Promise<void>): Promise<void> {
    this.busy = this.busy.then(work, work);
    return this.busy;
  }

  // -- lobby ----------------------------------------------------------------

  private renderLobby(): void {
    this.stopPolling();
    this.root.innerHTML = "";
    const panel = el("div", "lobby");
    panel.appendChild(el("h1", "", "Dou Di Zhu"));

    const seatField = el("label", "field", "Your seat ");
    const seatSelect = document.createElement("select");
    seatSelect.id = "seat-select";
    for (const seat of Object.keys(SEAT_LABELS) as SeatName[]) {
      const option = document.createElement("option");
      option.value = seat;
      option.textContent = SEAT_LABELS[seat];
      seatSelect.appendChild(option);
    }
    seatField.appendChild(seatSelect);
    panel.appendChild(seatField);

    const kindSelects: Partial<Record<SeatName, HTMLSelectElement>> = {};
    const opponents = el("div", "opponents");
    const rebuildOpponents = () => {
      opponents.innerHTML = "";
      const human = seatSelect.value as SeatName;
      for (let s = nextSeat(human); s !== human; s = nextSeat(s)) {
        const field = el("label", "field", `${SEAT_LABELS[s]} agent `);
        const select = document.createElement("select");
        select.className = "agent-kind";
        select.dataset.seat = s;
        for (const kind of AGENT_KINDS) {
          const option = document.createElement("option");
          option.value = kind;
          option.textContent = kind;
          select.appendChild(option);
        }
        field.appendChild(select);
        opponents.appendChild(field);
        kindSelects[s] = select;
      }
    };
    rebuildOpponents();
    seatSelect.addEventListener("change", rebuildOpponents);
    panel.appendChild(opponents);

    const seedField = el("label", "field", "Seed (optional) ");
    const seedInput = document.createElement("input");
    seedInput.id = "seed-input";
    seedInput.type = "text";
    seedField.appendChild(seedInput);
    panel.appendChild(seedField);

    const error = el("div", "error");
    error.id = "lobby-error";
    panel.appendChild(error);

    const start = document.createElement("button");
    start.id = "start";
    start.textContent = "Deal";
    start.addEventListener("click", () => {
      const human = seatSelect.value as SeatName;
      const agents: Partial<Record<SeatName, AgentKind>> = {};
      for (const select of opponents.querySelectorAll<HTMLSelectElement>(".agent-kind")) {
        agents[select.dataset.seat as SeatName] = select.value as AgentKind;
      }
      const seedText = seedInput.value.trim();
      const seed = seedText === "" ? undefined : Number(seedText);
      void this.start(human, agents, Number.isFinite(seed as number) ? seed : undefined);
    });
    panel.appendChild(start);
    this.root.appendChild(panel);
  }

  start(seat: SeatName, agents: Partial<Record<SeatName, AgentKind>>, seed?: number): Promise<void> {
    return this.enqueue(async () => {
      try {
        const created = await this.api.createSession(seat, agents, seed);
        this.seat = seat;
        this.sessionId = created.session_id;
        this.model = new TableModel(created.view);
        this.latestRecord = null;
        this.errorText = "";
        this.renderTable();
        await this.afterViewChange();
      } catch (err) {
        const box = this.root.querySelector("#lobby-error");
        if (box) box.textContent = err instanceof ServiceError ? `${err.code}: ${err.message}` : String(err);
      }
    });
  }

  // -- table ----------------------------------------------------------------

  private renderTable(): void {
    const model = this.model;
    if (!model) return;
    const view = model.view;
    this.root.innerHTML = "";
    const table = el("div", "table");

    if (this.disconnected) {
      const banner = el("div", "reconnect", "connection lost, retrying...");
      banner.id = "reconnect";
      table.appendChild(banner);
    }

    const seats = el("div", "seats");
    for (const seat of Object.keys(SEAT_LABELS) as SeatName[]) {
      const tag = seat === this.seat ? " (you)" : "";
      const acting = view.winner === null && view.to_act === seat ? " ◀" : "";
      seats.appendChild(el("div", "seat",
        `${SEAT_LABELS[seat]}${tag}: ${view.hand_sizes[seat]} cards${acting}`));
    }
    table.appendChild(seats);

    const incumbent = el("div", "incumbent");
    incumbent.id = "incumbent";
    incumbent.textContent = view.incumbent
      ? `to beat: ${view.incumbent.cards} (${SEAT_LABELS[view.incumbent.seat]})`
      : "you lead: play anything";
    table.appendChild(incumbent);

    const status = el("div", "status");
    status.id = "status";
    if (view.winner !== null) {
      status.textContent = `game over: ${SEAT_LABELS[view.winner]} wins`;
    } else {
      status.textContent = view.your_turn ? "your turn" : `waiting for ${SEAT_LABELS[view.to_act]}`;
    }
    table.appendChild(status);

    const hand = el("div", "hand");
    hand.id = "hand";
    model.hand().forEach((label, index) => {
      const card = el("button", "card", label);
      card.dataset.index = String(index);
      if (model.selected.has(index)) card.classList.add("selected");
      card.addEventListener("click", () => {
        model.toggle(index);
        this.renderTable();
      });
      hand.appendChild(card);
    });
    table.appendChild(hand);

    const controls = el("div", "controls");
    const submit = document.createElement("button");
    submit.id = "submit";
    submit.textContent = "Play selection";
    submit.disabled = !(view.your_turn && model.selectionIsLegal());
    submit.addEventListener("click", () => void this.submitSelection());
    controls.appendChild(submit);

    const pass = document.createElement("button");
    pass.id = "pass";
    pass.textContent = "Pass";
    pass.disabled = !model.canPass();
    pass.addEventListener("click", () => void this.pass());
    controls.appendChild(pass);
    table.appendChild(controls);

    const error = el("div", "error", this.errorText);
    error.id = "move-error";
    table.appendChild(error);

    if (view.winner !== null) {
      const done = el("div", "terminal");
      done.id = "terminal";
      done.appendChild(el("div", "winner", `${SEAT_LABELS[view.winner]} wins`));
      const download = document.createElement("button");
      download.id = "download";
      download.textContent = "Download record";
      download.disabled = this.latestRecord === null;
      download.addEventListener("click", () => this.downloadRecord());
      done.appendChild(download);
      const again = document.createElement("button");
      again.id = "again";
      again.textContent = "New game";
      again.addEventListener("click", () => this.renderLobby());
      done.appendChild(again);
      table.appendChild(done);
    }

    const history = el("div", "history");
    history.id = "history";
    history.appendChild(el("h2", "", "History"));
    for (const item of view.history) {
      history.appendChild(el("div", "entry", `${SEAT_LABELS[item.seat]}: ${item.move === "pass" ? "None" : item.move}`));
    }
    table.appendChild(history);

    this.root.appendChild(table);
  }

  submitSelection(): Promise<void> {
    return this.enqueue(() => this.postMove(this.model?.selectionText() ?? ""));
  }

  pass(): Promise<void> {
    return this.enqueue(() => this.postMove("pass"));
  }

  private async postMove(cards: string): Promise<void> {
    const model = this.model;
    if (!model || cards === "") return;
    try {
      const resp = await this.api.postMove(this.sessionId, this.seat, cards, model.view.version);
      this.errorText = "";
      this.disconnected = false;
      model.update(resp.view);
      this.renderTable();
      await this.afterViewChange();
    } catch (err) {
      if (err instanceof ServiceError && err.code === "stale-version") {
        await this.refresh(); // silent catch-up, keep local state intact
      } else if (err instanceof ServiceError) {
        this.errorText = `${err.code}: ${err.message}`;
        this.renderTable();
      } else {
        this.disconnected = true;
        this.renderTable();
      }
    }
  }

  async refresh(): Promise<void> {
    if (!this.sessionId || !this.model) return;
    try {
      const resp = await this.api.view(this.sessionId, this.seat);
      this.disconnected = false;
      this.model.update(resp.view);
      this.renderTable();
      await this.afterViewChange();
    } catch {
      this.disconnected = true;
      this.renderTable();
    }
  }

  /** One polling step: fetch the version counter, refresh on change. */
  async pollOnce(): Promise<void> {
    const model = this.model;
    if (!model || model.finished() || model.view.your_turn) return;
    try {
      const info = await this.api.version(this.sessionId);
      const reconnected = this.disconnected;
      this.disconnected = false;
      if (info.version !== model.view.version) {
        await this.refresh();
      } else if (reconnected) {
        this.renderTable();
      }
    } catch {
      this.disconnected = true;
      this.renderTable();
    }
  }

  private async afterViewChange(): Promise<void> {
    const model = this.model;
    if (!model) return;
    if (model.finished()) {
      this.stopPolling();
      await this.fetchLatestRecord();
      this.renderTable();
    } else if (!model.view.your_turn) {
      this.startPolling();
    } else {
      this.stopPolling();
    }
  }

  private async fetchLatestRecord(): Promise<void> {
    try {
      const list = await this.api.records();
      if (list.records.length > 0) {
        const last = list.records[list.records.length - 1];
        this.latestRecord = await this.api.record(last.id);
      }
    } catch {
      this.latestRecord = null;
    }
  }

  recordText(): string {
    return this.latestRecord ? JSON.stringify(this.latestRecord) : "";
  }

  downloadRecord(): void {
    const text = this.recordText();
    if (!text) return;
    if (typeof URL !== "undefined" && typeof URL.createObjectURL === "function") {
      const url = URL.createObjectURL(new Blob([text], { type: "application/json" }));
      const link = document.createElement("a");
      link.href = url;
      link.download = `doudizhu-${this.sessionId}.json`;
      link.click();
      URL.revokeObjectURL(url);
    }
  }

  private startPolling(): void {
    if (!this.autopoll || this.pollTimer !== null) return;
    this.pollTimer = setInterval(() => void this.pollOnce(), this.pollMs);
  }

  stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }
}

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function createApp(root: HTMLElement, options: AppOptions = {}): App {
  return new App(root, options);
}

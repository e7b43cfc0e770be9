import { describe, expect, it } from "vitest";

import type { SeatView } from "../src/api.js";
import { TableModel, canonical, rankValue, splitCards } from "../src/model.js";

function view(partial: Partial<SeatView> = {}): SeatView {
  return {
    session_id: "s",
    seat: "landlord",
    version: 0,
    hand: "3,7,7,T,K,2,*",
    hand_sizes: { landlord: 7, peasant_down: 17, peasant_up: 17 },
    incumbent: null,
    history: [],
    to_act: "landlord",
    winner: null,
    your_turn: true,
    legal_moves: ["3", "7", "7,7", "T", "K", "2", "*"],
    ...partial,
  };
}

describe("card helpers", () => {
  it("orders ranks by game value", () => {
    expect(rankValue("3")).toBeLessThan(rankValue("T"));
    expect(rankValue("2")).toBeGreaterThan(rankValue("A"));
    expect(rankValue("$")).toBeGreaterThan(rankValue("*"));
  });

  it("canonicalizes selections into record notation", () => {
    expect(canonical(["K", "3", "7"])).toBe("3,7,K");
    expect(splitCards("")).toEqual([]);
  });
});

describe("TableModel selection", () => {
  it("toggles cards and tracks the selection text", () => {
    const m = new TableModel(view());
    m.toggle(1); // first 7
    m.toggle(2); // second 7
    expect(m.selectionText()).toBe("7,7");
    expect(m.selectionIsLegal()).toBe(true);
    m.toggle(2);
    expect(m.selectionText()).toBe("7");
  });

  it("never marks a non-listed selection submittable", () => {
    const m = new TableModel(view());
    m.toggle(0); // 3
    m.toggle(1); // 7 -> "3,7" is not a move
    expect(m.selectionIsLegal()).toBe(false);
  });

  it("ignores clicks when it is not your turn", () => {
    const m = new TableModel(view({ your_turn: false, legal_moves: [] }));
    m.toggle(0);
    expect(m.selectionText()).toBe("");
  });

  it("pass is offered only when the server lists it", () => {
    expect(new TableModel(view()).canPass()).toBe(false);
    const responding = view({ legal_moves: ["pass", "7,7"] });
    expect(new TableModel(responding).canPass()).toBe(true);
  });

  it("selectMove picks exact copies of a listed move", () => {
    const m = new TableModel(view());
    expect(m.selectMove("7,7")).toBe(true);
    expect(m.selectionText()).toBe("7,7");
    expect(m.selectMove("9,9")).toBe(false);
    expect(m.selectMove("pass")).toBe(false);
  });

  it("updates clear stale selections", () => {
    const m = new TableModel(view());
    m.toggle(0);
    m.update(view({ version: 1, hand: "7,7" }));
    expect(m.selectionText()).toBe("");
    expect(m.view.version).toBe(1);
  });
});

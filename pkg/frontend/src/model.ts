// Pure table-view logic: card sorting, click selection, and matching the
// current selection against the server's legal-move list. No legality is
// computed here beyond string comparison with what the server sent.

import type { SeatView, SeatName } from "./api.js";

export const RANK_ORDER = "3456789TJQKA2*$";

export function rankValue(label: string): number {
  const i = RANK_ORDER.indexOf(label);
  return i === -1 ? 99 : i;
}

export function splitCards(cards: string): string[] {
  return cards.length === 0 ? [] : cards.split(",");
}

export function canonical(labels: string[]): string {
  return [...labels].sort((a, b) => rankValue(a) - rankValue(b)).join(",");
}

export const SEAT_LABELS: Record<SeatName, string> = {
  landlord: "Landlord",
  peasant_down: "Peasant Down",
  peasant_up: "Peasant Up",
};

export function nextSeat(seat: SeatName): SeatName {
  return seat === "landlord" ? "peasant_down" : seat === "peasant_down" ? "peasant_up" : "landlord";
}

export class TableModel {
  view: SeatView;
  selected: Set<number> = new Set();

  constructor(view: SeatView) {
    this.view = view;
  }

  /** Own hand as sorted labels; indices here are selection keys. */
  hand(): string[] {
    return splitCards(this.view.hand).sort((a, b) => rankValue(a) - rankValue(b));
  }

  update(view: SeatView): void {
    this.view = view;
    this.selected.clear();
  }

  toggle(index: number): void {
    if (!this.view.your_turn) return;
    if (this.selected.has(index)) {
      this.selected.delete(index);
    } else if (index >= 0 && index < this.hand().length) {
      this.selected.add(index);
    }
  }

  selectionText(): string {
    const hand = this.hand();
    return canonical([...this.selected].map((i) => hand[i]));
  }

  /** The selection is submittable iff it equals a server-listed move. */
  selectionIsLegal(): boolean {
    const text = this.selectionText();
    return text.length > 0 && this.view.legal_moves.includes(text);
  }

  canPass(): boolean {
    return this.view.your_turn && this.view.legal_moves.includes("pass");
  }

  finished(): boolean {
    return this.view.winner !== null;
  }

  /** Convenience for scripted play: select exactly one legal move. */
  selectMove(move: string): boolean {
    if (!this.view.legal_moves.includes(move) || move === "pass") return false;
    this.selected.clear();
    const hand = this.hand();
    const remaining = splitCards(move);
    for (const label of remaining) {
      const index = hand.findIndex((h, i) => h === label && !this.selected.has(i));
      if (index === -1) return false;
      this.selected.add(index);
    }
    return this.selectionIsLegal();
  }
}

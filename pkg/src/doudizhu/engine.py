"""Referee: dealing, turn order, round logic, termination, records.

Three seats play counterclockwise: the landlord leads the game, the
peasant down plays right after, the peasant up right before. A round of
play continues until two consecutive passes, at which point the seat
whose group went unanswered leads a fresh round. First empty hand wins;
peasants win and lose as a team.

State transitions are pure: ``apply_move`` returns a new state and
never mutates its input, so games can run concurrently without sharing.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
import random

from .cards import CardGroup, CardMultiset, FULL_DECK, Category, format_cards, parse_cards
from .movegen import PASS, Move, is_legal, is_pass, legal_moves


class Seat(enum.Enum):
    LANDLORD = "landlord"
    PEASANT_DOWN = "peasant_down"
    PEASANT_UP = "peasant_up"

    @property
    def next(self) -> "Seat":
        return _NEXT[self]

    @property
    def prev(self) -> "Seat":
        return _PREV[self]


_NEXT = {
    Seat.LANDLORD: Seat.PEASANT_DOWN,
    Seat.PEASANT_DOWN: Seat.PEASANT_UP,
    Seat.PEASANT_UP: Seat.LANDLORD,
}
_PREV = {v: k for k, v in _NEXT.items()}

SEATS = (Seat.LANDLORD, Seat.PEASANT_DOWN, Seat.PEASANT_UP)


class IllegalMove(ValueError):
    def __init__(self, message: str, reason: str = "cannot-beat"):
        super().__init__(message)
        self.reason = reason


class GameOver(RuntimeError):
    pass


class NotTerminal(RuntimeError):
    pass


class MalformedRecord(ValueError):
    pass


class IllegalMoveAtRound(MalformedRecord):
    def __init__(self, round_no: int, message: str):
        super().__init__(f"round {round_no}: {message}")
        self.round_no = round_no


@dataclass(frozen=True)
class GameState:
    hands: dict[Seat, CardMultiset]
    history: tuple[tuple[Seat, Move], ...]
    incumbent: tuple[Seat, CardGroup] | None
    pass_streak: int
    to_act: Seat
    winner: Seat | None = None

    def hand_sizes(self) -> dict[Seat, int]:
        return {s: h.size() for s, h in self.hands.items()}

    def is_terminal(self) -> bool:
        return self.winner is not None


@dataclass(frozen=True)
class Observation:
    """One seat's imperfect view: never contains another hand's cards."""

    seat: Seat
    own_hand: CardMultiset
    hand_sizes: dict[Seat, int]
    incumbent: tuple[Seat, CardGroup] | None
    last_two_moves: tuple[Move | None, Move | None]  # (previous seat, next seat)
    full_history: tuple[tuple[Seat, Move], ...]
    to_act: Seat
    winner: Seat | None = None

    def legal_moves(self) -> list[Move]:
        inc = self.incumbent[1] if self.incumbent else None
        return legal_moves(self.own_hand, inc)


def deal(rng: random.Random | int | None = None) -> GameState:
    """Shuffle and deal: 17 cards per seat plus the three extras to the
    landlord, who leads (there is no bidding phase)."""
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    deck = FULL_DECK.values()
    rng.shuffle(deck)
    hands = {
        Seat.LANDLORD: CardMultiset.from_values(deck[:17] + deck[51:]),
        Seat.PEASANT_DOWN: CardMultiset.from_values(deck[17:34]),
        Seat.PEASANT_UP: CardMultiset.from_values(deck[34:51]),
    }
    return GameState(hands, (), None, 0, Seat.LANDLORD)


def apply_move(state: GameState, move: Move) -> GameState:
    """Advance the game by one move of the seat to act.

    Raises IllegalMove when the move is not playable (passing on a
    lead, not fitting the hand, or failing to beat the incumbent) and
    GameOver when the game already ended.
    """
    if state.winner is not None:
        raise GameOver("game already has a winner")
    seat = state.to_act
    hand = state.hands[seat]
    incumbent_group = state.incumbent[1] if state.incumbent else None

    if is_pass(move):
        if incumbent_group is None:
            raise IllegalMove("the leader cannot pass", "cannot-beat")
        history = state.history + ((seat, PASS),)
        streak = state.pass_streak + 1
        nxt = seat.next
        if streak >= 2:
            # both opponents passed: the incumbent seat leads anew
            return replace(state, history=history, incumbent=None, pass_streak=0, to_act=nxt)
        return replace(state, history=history, pass_streak=streak, to_act=nxt)

    if not hand.contains(move.cards):
        raise IllegalMove(f"hand does not contain {move}", "bad-cards")
    if not is_legal(hand, incumbent_group, move):
        raise IllegalMove(f"{move} does not beat the incumbent", "cannot-beat")

    hands = dict(state.hands)
    hands[seat] = hand.remove(move.cards)
    winner = seat if hands[seat].is_empty() else None
    return GameState(
        hands=hands,
        history=state.history + ((seat, move),),
        incumbent=(seat, move),
        pass_streak=0,
        to_act=seat.next,
        winner=winner,
    )


def rewards(state: GameState) -> dict[Seat, int]:
    """Terminal rewards: +1 winners, -1 losers; peasants share fate."""
    if state.winner is None:
        raise NotTerminal("game not finished")
    if state.winner is Seat.LANDLORD:
        return {Seat.LANDLORD: 1, Seat.PEASANT_DOWN: -1, Seat.PEASANT_UP: -1}
    return {Seat.LANDLORD: -1, Seat.PEASANT_DOWN: 1, Seat.PEASANT_UP: 1}


def observe(state: GameState, seat: Seat) -> Observation:
    last: dict[Seat, Move | None] = {s: None for s in SEATS}
    for s, m in reversed(state.history):
        if last[s] is None:
            last[s] = m
        if all(v is not None for v in last.values()):
            break
    return Observation(
        seat=seat,
        own_hand=state.hands[seat],
        hand_sizes=state.hand_sizes(),
        incumbent=state.incumbent,
        last_two_moves=(last[seat.prev], last[seat.next]),
        full_history=state.history,
        to_act=state.to_act,
        winner=state.winner,
    )


# ---------------------------------------------------------------------------
# Game records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RecordEntry:
    round_no: int
    seat: Seat
    hand_before: CardMultiset
    move: Move


@dataclass(frozen=True)
class GameRecord:
    """A replayable transcript: initial hands plus every (seat, move)
    with the hand held before the move, grouped in table order (one
    row per seat per trip around the table, 'None' for a pass)."""

    initial_hands: dict[Seat, CardMultiset]
    entries: tuple[RecordEntry, ...]
    winner: Seat | None


def export_record(state: GameState, initial_hands: dict[Seat, CardMultiset] | None = None) -> GameRecord:
    """Rebuild the transcript of `state` from its history."""
    if initial_hands is None:
        initial_hands = _initial_hands_from(state)
    hands = dict(initial_hands)
    entries = []
    for i, (seat, move) in enumerate(state.history):
        entries.append(RecordEntry(i // 3 + 1, seat, hands[seat], move))
        if not is_pass(move):
            hands[seat] = hands[seat].remove(move.cards)
    return GameRecord(initial_hands, tuple(entries), state.winner)


def _initial_hands_from(state: GameState) -> dict[Seat, CardMultiset]:
    hands = dict(state.hands)
    for seat, move in state.history:
        if not is_pass(move):
            hands[seat] = hands[seat].add(move.cards)
    return hands


def import_record(record: GameRecord) -> GameState:
    """Replay a record through the engine, validating every move.

    Raises IllegalMoveAtRound on the first entry that is out of turn,
    inconsistent with the recorded hand, or not a legal move.
    """
    sizes = {s: h.size() for s, h in record.initial_hands.items()}
    if sizes[Seat.LANDLORD] != 20 or sizes[Seat.PEASANT_DOWN] != 17 or sizes[Seat.PEASANT_UP] != 17:
        raise MalformedRecord(f"bad initial hand sizes {sizes}")
    total = CardMultiset()
    for h in record.initial_hands.values():
        total = total.add(h)
    if total != FULL_DECK:
        raise MalformedRecord("initial hands do not form the full deck")

    state = GameState(dict(record.initial_hands), (), None, 0, Seat.LANDLORD)
    for entry in record.entries:
        if state.winner is not None:
            raise IllegalMoveAtRound(entry.round_no, "moves after the game ended")
        if entry.seat is not state.to_act:
            raise IllegalMoveAtRound(entry.round_no, f"{entry.seat.value} played out of turn")
        if state.hands[entry.seat] != entry.hand_before:
            raise IllegalMoveAtRound(entry.round_no, f"recorded hand mismatch for {entry.seat.value}")
        try:
            state = apply_move(state, entry.move)
        except IllegalMove as e:
            raise IllegalMoveAtRound(entry.round_no, str(e)) from e
    if record.winner is not None and state.winner is not record.winner:
        raise MalformedRecord(f"recorded winner {record.winner} but replay gives {state.winner}")
    return state


_SEAT_LABELS = {
    Seat.LANDLORD: "Landlord",
    Seat.PEASANT_DOWN: "Peasant Down",
    Seat.PEASANT_UP: "Peasant Up",
}
_LABEL_SEATS = {v: k for k, v in _SEAT_LABELS.items()}


def record_to_text(record: GameRecord) -> str:
    """Table notation: `round|seat|hand|move` per entry, move `None`
    for a pass, cards comma-separated with T/*/$ symbols."""
    lines = []
    for e in record.entries:
        move = "None" if is_pass(e.move) else format_cards(e.move.cards)
        lines.append(f"{e.round_no}|{_SEAT_LABELS[e.seat]}|{format_cards(e.hand_before)}|{move}")
    return "\n".join(lines) + "\n"


def record_from_text(text: str) -> GameRecord:
    """Parse the table notation back into a record. Initial hands are
    the first recorded hand of each seat; winner the seat that empties."""
    from .cards import classify

    entries = []
    initial: dict[Seat, CardMultiset] = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        raw = raw.strip()
        if not raw or raw.startswith("#"):
            continue
        parts = raw.split("|")
        if len(parts) != 4:
            raise MalformedRecord(f"line {ln}: expected 4 '|'-separated fields")
        round_s, seat_s, hand_s, move_s = (p.strip() for p in parts)
        seat = _LABEL_SEATS.get(seat_s)
        if seat is None:
            raise MalformedRecord(f"line {ln}: unknown seat {seat_s!r}")
        hand = parse_cards(hand_s)
        if move_s == "None":
            move = PASS
        else:
            move = classify(parse_cards(move_s))
            if move is None or move.category is Category.NONE:
                raise MalformedRecord(f"line {ln}: {move_s!r} is not a legal group")
        if seat not in initial:
            initial[seat] = hand
        try:
            entries.append(RecordEntry(int(round_s), seat, hand, move))
        except ValueError as e:
            raise MalformedRecord(f"line {ln}: bad round number") from e
    if len(initial) != 3:
        raise MalformedRecord("record must mention all three seats")
    winner = None
    held = {s: initial[s].size() for s in SEATS}
    for e in entries:
        if not is_pass(e.move):
            held[e.seat] -= e.move.size()
            if held[e.seat] == 0:
                winner = e.seat
    return GameRecord(initial, tuple(entries), winner)


def record_to_json(record: GameRecord) -> str:
    """One-line JSON form used for persistence logs."""
    return json.dumps({
        "initial": {s.value: format_cards(h) for s, h in record.initial_hands.items()},
        "moves": [
            {"seat": e.seat.value, "move": "pass" if is_pass(e.move) else format_cards(e.move.cards)}
            for e in record.entries
        ],
        "winner": record.winner.value if record.winner else None,
    })


def record_from_json(line: str) -> GameRecord:
    from .cards import classify

    try:
        obj = json.loads(line)
        initial = {Seat(k): parse_cards(v) for k, v in obj["initial"].items()}
        moves = obj["moves"]
    except (KeyError, ValueError, TypeError) as e:
        raise MalformedRecord(f"bad record json: {e}") from e
    hands = dict(initial)
    entries = []
    winner = None
    for i, m in enumerate(moves):
        seat = Seat(m["seat"])
        move = PASS if m["move"] == "pass" else classify(parse_cards(m["move"]))
        if move is None:
            raise MalformedRecord(f"move {i}: {m['move']!r} is not a legal group")
        entries.append(RecordEntry(i // 3 + 1, seat, hands[seat], move))
        if not is_pass(move):
            hands[seat] = hands[seat].remove(move.cards)
            if hands[seat].is_empty():
                winner = seat
    return GameRecord(initial, tuple(entries), winner)

// Typed bindings for the game service, mirrored by hand from docs/api.md.
// The server is the only legality authority; these types just describe
// its payloads.

export type SeatName = "landlord" | "peasant_down" | "peasant_up";
export type AgentKind = "random" | "rhcp" | "cql";

export interface SeatView {
  session_id: string;
  seat: SeatName;
  version: number;
  hand: string;
  hand_sizes: Record<SeatName, number>;
  incumbent: { seat: SeatName; cards: string } | null;
  history: { seat: SeatName; move: string }[];
  to_act: SeatName;
  winner: SeatName | null;
  your_turn: boolean;
  legal_moves: string[];
}

export interface VersionInfo {
  version: number;
  to_act: SeatName;
  finished: boolean;
}

export interface RecordSummary {
  id: number;
  winner: SeatName | null;
  moves: number;
}

export interface GameRecordJson {
  initial: Record<SeatName, string>;
  moves: { seat: SeatName; move: string }[];
  winner: SeatName | null;
}

export interface ApiError {
  code: string;
  message: string;
}

export class ServiceError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(status: number, err: ApiError) {
    super(err.message);
    this.code = err.code;
    this.status = status;
  }
}

async function request<T>(base: string, method: string, path: string, body?: unknown): Promise<T> {
  const resp = await fetch(base + path, {
    method,
    headers: body === undefined ? undefined : { "content-type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const payload = await resp.json();
  if (!resp.ok) {
    const err = (payload?.error ?? { code: "unknown", message: resp.statusText }) as ApiError;
    throw new ServiceError(resp.status, err);
  }
  return payload as T;
}

export class GameApi {
  constructor(private readonly base: string = "") {}

  health(): Promise<{ status: string }> {
    return request(this.base, "GET", "/api/health");
  }

  createSession(humanSeat: SeatName, agents: Partial<Record<SeatName, AgentKind>>, seed?: number):
      Promise<{ session_id: string; view: SeatView }> {
    return request(this.base, "POST", "/api/sessions", {
      human_seat: humanSeat,
      agents,
      ...(seed === undefined ? {} : { seed }),
    });
  }

  view(sessionId: string, seat: SeatName): Promise<{ view: SeatView }> {
    return request(this.base, "GET", `/api/sessions/${sessionId}/view?seat=${seat}`);
  }

  version(sessionId: string): Promise<VersionInfo> {
    return request(this.base, "GET", `/api/sessions/${sessionId}/version`);
  }

  postMove(sessionId: string, seat: SeatName, cards: string, version: number):
      Promise<{ view: SeatView }> {
    return request(this.base, "POST", `/api/sessions/${sessionId}/moves`, {
      seat,
      cards,
      version,
    });
  }

  records(): Promise<{ records: RecordSummary[] }> {
    return request(this.base, "GET", "/api/records");
  }

  record(id: number): Promise<GameRecordJson> {
    return request(this.base, "GET", `/api/records/${id}`);
  }
}

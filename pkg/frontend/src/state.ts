import type { GraphFrame, WorldGrid } from "./protocol.js";

export type Status = "idle" | "connecting" | "connected" | "error" | "closed";

export type Overlay = "proximity" | "trajectory" | "both";

function deepFreeze<T>(value: T): T {
  if (value && typeof value === "object") {
    for (const key of Object.keys(value as object)) {
      deepFreeze((value as Record<string, unknown>)[key]);
    }
    Object.freeze(value);
  }
  return value;
}

// The view is a pure consumer of server snapshots: frames are frozen on
// arrival and anything older than what is already on screen is dropped
// (stale frames can show up around a reconnect).
export class ViewState {
  map: WorldGrid | null = null;
  snapshot: GraphFrame | null = null;
  avatar = { x: 0, y: 0 };
  overlay: Overlay = "both";
  params: Record<string, number | string | boolean> = {};
  status: Status = "idle";
  statusDetail = "";
  session = "";

  /** Accepts the frame unless its tick is older than the current one. */
  acceptSnapshot(frame: GraphFrame): boolean {
    if (this.snapshot !== null && frame.tick < this.snapshot.tick) {
      return false;
    }
    this.snapshot = deepFreeze(frame);
    return true;
  }

  setStatus(status: Status, detail = ""): void {
    this.status = status;
    this.statusDetail = detail;
  }

  /** Fresh session: drop everything the old session showed. */
  reset(): void {
    this.map = null;
    this.snapshot = null;
    this.session = "";
  }
}

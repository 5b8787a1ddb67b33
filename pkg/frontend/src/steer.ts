import type { ViewState } from "./state.js";

/** Avatar speed while a key is held, world units per second. */
export const STEER_SPEED_WU = 440;

/** Outbound input frames are spaced at least this far apart. */
export const SEND_INTERVAL_MS = 100;

const KEY_DIRS: Record<string, [number, number]> = {
  ArrowLeft: [-1, 0],
  ArrowRight: [1, 0],
  ArrowUp: [0, 1],
  ArrowDown: [0, -1],
  a: [-1, 0],
  d: [1, 0],
  w: [0, 1],
  s: [0, -1],
};

export class Steering {
  private held = new Set<string>();

  keyDown(key: string): boolean {
    if (!(key in KEY_DIRS)) return false;
    this.held.add(key);
    return true;
  }

  keyUp(key: string): void {
    this.held.delete(key);
  }

  clear(): void {
    this.held.clear();
  }

  /** Unit direction from all held keys; {0,0} when idle. */
  direction(): { dx: number; dy: number } {
    let dx = 0;
    let dy = 0;
    for (const key of this.held) {
      dx += KEY_DIRS[key][0];
      dy += KEY_DIRS[key][1];
    }
    const norm = Math.hypot(dx, dy);
    if (norm === 0) return { dx: 0, dy: 0 };
    return { dx: dx / norm, dy: dy / norm };
  }

  /**
   * Advances the avatar at fixed speed. Walls do not stop it (the
   * renderer flags wall overlap instead), only the map bounds clamp.
   */
  move(view: ViewState, dtMs: number): boolean {
    const { dx, dy } = this.direction();
    if (dx === 0 && dy === 0) return false;
    const step = (STEER_SPEED_WU * dtMs) / 1000;
    view.avatar.x += dx * step;
    view.avatar.y += dy * step;
    if (view.map) {
      view.avatar.x = Math.min(view.map.widthWu, Math.max(0, view.avatar.x));
      view.avatar.y = Math.min(view.map.heightWu, Math.max(0, view.avatar.y));
    }
    return true;
  }
}

/**
 * Gate keeping the outbound rate at 10 Hz no matter how often the event
 * loop asks. Positions are only worth sending while steering happens.
 */
export class InputSampler {
  private lastSentMs = -Infinity;

  shouldSend(nowMs: number, moving: boolean): boolean {
    if (!moving) return false;
    if (nowMs - this.lastSentMs < SEND_INTERVAL_MS) return false;
    this.lastSentMs = nowMs;
    return true;
  }
}

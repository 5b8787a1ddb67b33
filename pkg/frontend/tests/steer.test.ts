import { describe, expect, it } from "vitest";
import { parseMapText } from "../src/protocol.js";
import { ViewState } from "../src/state.js";
import { InputSampler, STEER_SPEED_WU, Steering } from "../src/steer.js";

const MAP_TEXT = [
  "navmap 1",
  "name testbox",
  "cellsize 100.0",
  "####",
  "#.W#",
  "#..#",
  "####",
].join("\n");

function makeView(): ViewState {
  const view = new ViewState();
  view.map = parseMapText(MAP_TEXT);
  view.avatar = { x: 200, y: 200 };
  return view;
}

describe("Steering", () => {
  it("moves at fixed speed while a key is held", () => {
    const view = makeView();
    const steering = new Steering();
    steering.keyDown("ArrowRight");
    steering.move(view, 100);
    expect(view.avatar.x).toBeCloseTo(200 + STEER_SPEED_WU * 0.1);
    expect(view.avatar.y).toBe(200);
    steering.keyUp("ArrowRight");
    expect(steering.move(view, 100)).toBe(false);
  });

  it("normalizes diagonals so speed stays fixed", () => {
    const view = makeView();
    const steering = new Steering();
    steering.keyDown("w");
    steering.keyDown("d");
    steering.move(view, 100);
    const dist = Math.hypot(view.avatar.x - 200, view.avatar.y - 200);
    expect(dist).toBeCloseTo(STEER_SPEED_WU * 0.1, 6);
  });

  it("clamps to the map bounds but not to walls", () => {
    const view = makeView();
    const steering = new Steering();
    steering.keyDown("ArrowLeft");
    for (let i = 0; i < 50; i++) steering.move(view, 100);
    // crossed the wall cells and stopped at the map edge
    expect(view.avatar.x).toBe(0);
  });

  it("ignores non-steering keys", () => {
    const steering = new Steering();
    expect(steering.keyDown("x")).toBe(false);
    expect(steering.keyDown("ArrowUp")).toBe(true);
  });
});

describe("InputSampler", () => {
  it("holding right for one second yields ten frames, x increasing", () => {
    // no map on purpose: nothing clamps, x can rise the whole second
    const view = new ViewState();
    view.avatar = { x: 100, y: 200 };
    const steering = new Steering();
    const sampler = new InputSampler();
    steering.keyDown("ArrowRight");
    const sent: number[] = [];
    // event loop at 200 Hz for one second
    for (let i = 0; i < 200; i++) {
      const now = i * 5;
      const moving = steering.move(view, 5);
      if (sampler.shouldSend(now, moving)) sent.push(view.avatar.x);
    }
    expect(sent).toHaveLength(10);
    for (let i = 1; i < sent.length; i++) {
      expect(sent[i]).toBeGreaterThan(sent[i - 1]);
    }
  });

  it("sends nothing while idle", () => {
    const sampler = new InputSampler();
    for (let now = 0; now < 2000; now += 5) {
      expect(sampler.shouldSend(now, false)).toBe(false);
    }
  });

  it("caps the rate no matter how fast events arrive", () => {
    const sampler = new InputSampler();
    let sent = 0;
    for (let i = 0; i < 5000; i++) {
      if (sampler.shouldSend(i, true)) sent++;
    }
    expect(sent).toBe(50);
  });
});

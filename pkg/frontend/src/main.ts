import { LiveClient } from "./client.js";
import { parseMapText } from "./protocol.js";
import { buildScene, drawScene } from "./render.js";
import { ViewState, type Overlay } from "./state.js";
import { InputSampler, Steering } from "./steer.js";

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const urlInput = document.getElementById("url") as HTMLInputElement;
const mapSelect = document.getElementById("map") as HTMLSelectElement;
const overlaySelect = document.getElementById("overlay") as HTMLSelectElement;
const connectBtn = document.getElementById("connect") as HTMLButtonElement;
const applyBtn = document.getElementById("apply") as HTMLButtonElement;
const tickEl = document.getElementById("tick")!;

const view = new ViewState();
const steering = new Steering();
const sampler = new InputSampler();

const client = new LiveClient({
  onFrame: (frame) => {
    switch (frame.type) {
      case "open":
        view.session = frame.session;
        view.params = { ...frame.params };
        view.map = parseMapText(frame.map);
        view.avatar = { x: view.map.widthWu / 2, y: view.map.heightWu / 2 };
        fillParamPanel();
        break;
      case "graph":
        view.acceptSnapshot(frame);
        break;
      case "params":
        view.params = { ...frame };
        delete (view.params as Record<string, unknown>).type;
        fillParamPanel();
        break;
      case "error":
        view.setStatus("error", frame.message);
        break;
    }
  },
  onStatus: (status, detail) => {
    if (status === "closed") {
      view.reset();
      view.setStatus("closed", detail);
    } else if (status === "error") {
      view.setStatus("error", detail);
    } else {
      view.setStatus(status, detail);
    }
  },
});

const PARAM_FIELDS = [
  "winner_attraction",
  "neighbor_attraction",
  "error_decay",
  "max_error",
  "max_age",
];

function fillParamPanel(): void {
  for (const field of PARAM_FIELDS) {
    const input = document.getElementById(field) as HTMLInputElement | null;
    if (input && view.params[field] !== undefined) {
      input.value = String(view.params[field]);
    }
  }
}

function readParamPanel(): Record<string, number> {
  const fields: Record<string, number> = {};
  for (const field of PARAM_FIELDS) {
    const input = document.getElementById(field) as HTMLInputElement | null;
    if (input && input.value !== "") {
      const value = Number(input.value);
      if (Number.isFinite(value)) fields[field] = value;
    }
  }
  return fields;
}

connectBtn.addEventListener("click", () => {
  view.reset();
  client.connect(urlInput.value, { map: mapSelect.value });
});

applyBtn.addEventListener("click", () => {
  client.sendParams(readParamPanel());
});

overlaySelect.addEventListener("change", () => {
  view.overlay = overlaySelect.value as Overlay;
});

window.addEventListener("keydown", (ev) => {
  if (document.activeElement instanceof HTMLInputElement) return;
  if (steering.keyDown(ev.key)) ev.preventDefault();
});
window.addEventListener("keyup", (ev) => steering.keyUp(ev.key));
window.addEventListener("blur", () => steering.clear());

let lastFrameMs = performance.now();

function loop(nowMs: number): void {
  const dtMs = Math.min(100, nowMs - lastFrameMs);
  lastFrameMs = nowMs;

  const moving = steering.move(view, dtMs);
  if (sampler.shouldSend(nowMs, moving) && view.map) {
    client.sendInput(0, view.avatar.x, view.avatar.y);
  }

  drawScene(ctx, buildScene(view, canvas.width, canvas.height));

  const snap = view.snapshot;
  statusEl.textContent = view.statusDetail
    ? `${view.status}: ${view.statusDetail}`
    : view.status;
  statusEl.className = view.status;
  tickEl.textContent = snap
    ? `tick ${snap.tick}, ${snap.node_count} nodes, ${snap.edges.length} edges` +
      (snap.dropped ? `, ${snap.dropped} dropped` : "")
    : "no snapshot yet";

  requestAnimationFrame(loop);
}

requestAnimationFrame(loop);

import { describe, expect, it, vi } from "vitest";
import { LiveClient, type SocketLike } from "../src/client.js";
import type { ServerFrame } from "../src/protocol.js";

class FakeSocket implements SocketLike {
  readyState = 0;
  sent: string[] = [];
  closed = false;
  onopen: ((ev: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev: unknown) => void) | null = null;
  onerror: ((ev: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
    this.readyState = 3;
  }

  serverOpens(): void {
    this.readyState = 1;
    this.onopen?.({});
  }

  serverSends(frame: unknown): void {
    this.onmessage?.({ data: JSON.stringify(frame) });
  }

  serverCloses(): void {
    this.readyState = 3;
    this.onclose?.({});
  }
}

function harness() {
  const sockets: FakeSocket[] = [];
  const frames: ServerFrame[] = [];
  const statuses: string[] = [];
  const client = new LiveClient(
    {
      onFrame: (f) => frames.push(f),
      onStatus: (s) => statuses.push(s),
    },
    () => {
      const socket = new FakeSocket();
      sockets.push(socket);
      return socket;
    },
  );
  return { client, sockets, frames, statuses };
}

describe("LiveClient", () => {
  it("sends the open frame once the socket is up", () => {
    const { client, sockets, statuses } = harness();
    client.connect("ws://example/ws", { map: "open_room", params: { max_age: 30 } });
    expect(statuses).toEqual(["connecting"]);
    expect(sockets[0].sent).toHaveLength(0);
    sockets[0].serverOpens();
    expect(statuses).toEqual(["connecting", "connected"]);
    const open = JSON.parse(sockets[0].sent[0]);
    expect(open).toEqual({ type: "open", map: "open_room", params: { max_age: 30 } });
  });

  it("dispatches parsed frames and ignores garbage", () => {
    const { client, sockets, frames } = harness();
    const warn = vi.spyOn(console, "error").mockImplementation(() => {});
    client.connect("ws://example/ws", { map: "open_room" });
    sockets[0].serverOpens();
    sockets[0].serverSends({ type: "error", message: "bad input" });
    sockets[0].onmessage?.({ data: "{nope" });
    sockets[0].serverSends({
      type: "graph", tick: 1, node_count: 0, nodes: [], edges: [], dropped: 0, delta: true,
    });
    expect(frames.map((f) => f.type)).toEqual(["error", "graph"]);
    warn.mockRestore();
  });

  it("only sends input while connected", () => {
    const { client, sockets } = harness();
    expect(client.sendInput(0, 1, 2)).toBe(false);
    client.connect("ws://example/ws", { map: "open_room" });
    expect(client.sendInput(0, 1, 2)).toBe(false);
    sockets[0].serverOpens();
    expect(client.sendInput(0, 1, 2)).toBe(true);
    expect(JSON.parse(sockets[0].sent[1])).toEqual({ type: "input", demonstrator: 0, x: 1, y: 2 });
    expect(client.sendParams({ max_age: 40 })).toBe(true);
  });

  it("reports a close and reconnects with a brand-new socket and session", () => {
    const { client, sockets, statuses } = harness();
    client.connect("ws://example/ws", { map: "open_room" });
    sockets[0].serverOpens();
    sockets[0].serverCloses();
    expect(statuses.at(-1)).toBe("closed");
    expect(client.connected).toBe(false);

    client.connect("ws://example/ws", { map: "open_room" });
    sockets[1].serverOpens();
    expect(sockets).toHaveLength(2);
    // a fresh open frame means the server mints a fresh session
    expect(JSON.parse(sockets[1].sent[0]).type).toBe("open");
    expect(client.connected).toBe(true);
  });

  it("closing the client does not report the old socket's close", () => {
    const { client, sockets, statuses } = harness();
    client.connect("ws://example/ws", { map: "open_room" });
    sockets[0].serverOpens();
    client.close();
    expect(sockets[0].closed).toBe(true);
    expect(statuses.at(-1)).toBe("connected");
    // replacing the connection mid-flight drops the stale socket quietly
    client.connect("ws://example/ws", { map: "corridors" });
    expect(sockets).toHaveLength(2);
  });
});

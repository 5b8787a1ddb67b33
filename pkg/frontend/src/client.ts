import { parseFrame, type ServerFrame } from "./protocol.js";

// Thin wrapper over a browser WebSocket. Each connect() opens a brand-new
// socket and session; after a server restart the caller just connects
// again. The socket constructor is injectable so tests can run without a
// network.

export interface SocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  onopen: ((ev: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev: unknown) => void) | null;
  onerror: ((ev: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface OpenOptions {
  map: string;
  params?: Record<string, number | string>;
  interval?: number;
}

export interface ClientEvents {
  onFrame: (frame: ServerFrame) => void;
  onStatus: (status: "connecting" | "connected" | "closed" | "error", detail: string) => void;
}

const SOCKET_OPEN = 1;

export class LiveClient {
  private socket: SocketLike | null = null;
  private events: ClientEvents;
  private factory: SocketFactory;

  constructor(events: ClientEvents, factory?: SocketFactory) {
    this.events = events;
    this.factory = factory ?? ((url) => new WebSocket(url) as unknown as SocketLike);
  }

  connect(url: string, options: OpenOptions): void {
    this.close();
    this.events.onStatus("connecting", url);
    let socket: SocketLike;
    try {
      socket = this.factory(url);
    } catch (err) {
      this.events.onStatus("error", `cannot open socket: ${String(err)}`);
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      socket.send(JSON.stringify({ type: "open", ...options }));
      this.events.onStatus("connected", "");
    };
    socket.onmessage = (ev) => {
      let frame: ServerFrame;
      try {
        frame = parseFrame(String(ev.data));
      } catch (err) {
        console.error("bad frame from server", err);
        return;
      }
      this.events.onFrame(frame);
    };
    socket.onclose = () => {
      if (this.socket === socket) {
        this.socket = null;
        this.events.onStatus("closed", "connection closed");
      }
    };
    socket.onerror = () => {
      this.events.onStatus("error", "socket error");
    };
  }

  get connected(): boolean {
    return this.socket !== null && this.socket.readyState === SOCKET_OPEN;
  }

  sendInput(demonstrator: number, x: number, y: number): boolean {
    if (!this.connected || !this.socket) return false;
    this.socket.send(JSON.stringify({ type: "input", demonstrator, x, y }));
    return true;
  }

  sendParams(fields: Record<string, number | string>): boolean {
    if (!this.connected || !this.socket) return false;
    this.socket.send(JSON.stringify({ type: "params", ...fields }));
    return true;
  }

  close(): void {
    if (this.socket) {
      const socket = this.socket;
      this.socket = null;
      socket.onclose = null;
      socket.close();
    }
  }
}

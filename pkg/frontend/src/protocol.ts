// Wire types for the live service. The server speaks JSON text frames,
// every frame carries a "type" field.

export type EdgeKind = "proximity" | "trajectory";

/** id, x, y, error */
export type WireNode = [number, number, number, number];
/** a, b, kind, age */
export type WireEdge = [number, number, EdgeKind, number];

export interface GraphFrame {
  type: "graph";
  tick: number;
  node_count: number;
  nodes: WireNode[];
  edges: WireEdge[];
  dropped: number;
  delta: boolean;
}

export interface OpenAck {
  type: "open";
  session: string;
  map: string;
  params: Record<string, number | string | boolean>;
}

export interface ParamsAck {
  type: "params";
  [field: string]: number | string | boolean;
}

export interface ErrorFrame {
  type: "error";
  message: string;
}

export type ServerFrame = GraphFrame | OpenAck | ParamsAck | ErrorFrame;

export function parseFrame(raw: string): ServerFrame {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    throw new Error("frame is not valid JSON");
  }
  if (typeof data !== "object" || data === null || Array.isArray(data)) {
    throw new Error("frame is not an object");
  }
  const frame = data as Record<string, unknown>;
  switch (frame.type) {
    case "graph":
      if (typeof frame.tick !== "number" || !Array.isArray(frame.nodes) || !Array.isArray(frame.edges)) {
        throw new Error("malformed graph frame");
      }
      return frame as unknown as GraphFrame;
    case "open":
      if (typeof frame.session !== "string" || typeof frame.map !== "string") {
        throw new Error("malformed open ack");
      }
      return frame as unknown as OpenAck;
    case "params":
      return frame as unknown as ParamsAck;
    case "error":
      if (typeof frame.message !== "string") {
        throw new Error("malformed error frame");
      }
      return frame as unknown as ErrorFrame;
    default:
      throw new Error(`unknown frame type ${String(frame.type)}`);
  }
}

// --- map fixture ---------------------------------------------------------
// Delivered inside the open ack as a text grid: a header line, name and
// cellsize lines, an optional markerheight line, then one row per line
// ('#' blocked, '.' walkable, 'W' waypoint). The first grid line is the
// row at the lowest world y.

export interface Waypoint {
  x: number;
  y: number;
}

export interface WorldGrid {
  name: string;
  cellSize: number;
  rows: string[];
  cols: number;
  widthWu: number;
  heightWu: number;
  waypoints: Waypoint[];
}

export function parseMapText(text: string): WorldGrid {
  const lines = text.split("\n").filter((line, i) => line.length > 0 || i === 0);
  if (lines[0] !== "navmap 1") {
    throw new Error("unrecognized map header");
  }
  if (lines.length < 4 || !lines[1].startsWith("name ") || !lines[2].startsWith("cellsize ")) {
    throw new Error("map needs name, cellsize, and grid rows");
  }
  const name = lines[1].slice("name ".length);
  const cellSize = Number(lines[2].slice("cellsize ".length));
  if (!(cellSize > 0) || !Number.isFinite(cellSize)) {
    throw new Error(`bad cellsize ${lines[2]}`);
  }
  let firstRow = 3;
  if (lines[3] !== undefined && lines[3].startsWith("markerheight ")) {
    firstRow = 4;
  }
  const rows = lines.slice(firstRow);
  if (rows.length === 0) {
    throw new Error("map has no grid rows");
  }
  const cols = rows[0].length;
  const waypoints: Waypoint[] = [];
  rows.forEach((row, r) => {
    if (row.length !== cols) {
      throw new Error(`grid row ${r} has length ${row.length}, expected ${cols}`);
    }
    for (let c = 0; c < cols; c++) {
      const ch = row[c];
      if (ch !== "#" && ch !== "." && ch !== "W") {
        throw new Error(`unknown map character '${ch}'`);
      }
      if (ch === "W") {
        waypoints.push({ x: (c + 0.5) * cellSize, y: (r + 0.5) * cellSize });
      }
    }
  });
  return {
    name,
    cellSize,
    rows,
    cols,
    widthWu: cols * cellSize,
    heightWu: rows.length * cellSize,
    waypoints,
  };
}

export function isBlocked(grid: WorldGrid, x: number, y: number): boolean {
  const c = Math.floor(x / grid.cellSize);
  const r = Math.floor(y / grid.cellSize);
  if (r < 0 || r >= grid.rows.length || c < 0 || c >= grid.cols) return true;
  return grid.rows[r][c] === "#";
}

/**
 * Wire protocol mirror of the server: message shapes, parsing, validation.
 * All rendered state originates from server frames; the client never
 * simulates physics.
 */

export const SCHEMA_VERSION = 1;

export interface UavPose {
  id: number;
  x: number;
  y: number;
  heading: number;
  alive: boolean;
}

export interface GoalView {
  owner: number;
  x: number;
  y: number;
}

export interface ObstacleView {
  cx: number;
  cy: number;
  rot: number;
  hl: number;
  hw: number;
}

/** [hit, distance, tag, nx, ny, collider] */
export type RayTuple = [number, number, number, number, number, number];

export const TAG_NAMES = ["Obstacle", "Goal", "OwnGoal", "UAV", "Wall"] as const;

export interface StateFrame {
  type: "state";
  tick: number;
  uavs: UavPose[];
  goals: GoalView[];
  obstacles: ObstacleView[];
  rays: Record<string, RayTuple[]>;
  last_reward: Record<string, number>;
  done: boolean;
  recording: boolean;
  arena: [number, number, number, number];
}

export interface HelloMsg {
  type: "hello";
  schema_version: number;
  mode: string;
  role: string;
}

export interface ErrorMsg {
  type: "error";
  message: string;
}

export interface SavedMsg {
  type: "saved";
  path: string;
  episodes: number;
  records: number;
}

export type ServerMsg = StateFrame | HelloMsg | ErrorMsg | SavedMsg;

export class ProtocolError extends Error {}

export function parseServerMessage(text: string): ServerMsg {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new ProtocolError(`not valid JSON: ${text.slice(0, 80)}`);
  }
  if (typeof raw !== "object" || raw === null || !("type" in raw)) {
    throw new ProtocolError("message must be an object with a type field");
  }
  const msg = raw as { type: string } & Record<string, unknown>;
  switch (msg.type) {
    case "hello":
      if (typeof msg.schema_version !== "number") {
        throw new ProtocolError("hello without schema_version");
      }
      return msg as unknown as HelloMsg;
    case "state": {
      if (typeof msg.tick !== "number" || !Array.isArray(msg.uavs)) {
        throw new ProtocolError("malformed state frame");
      }
      return msg as unknown as StateFrame;
    }
    case "error":
      if (typeof msg.message !== "string") {
        throw new ProtocolError("error frame without message");
      }
      return msg as unknown as ErrorMsg;
    case "saved":
      return msg as unknown as SavedMsg;
    default:
      throw new ProtocolError(`unknown message type ${msg.type}`);
  }
}

export type ActionId = 0 | 1 | 2;

export function helloMessage(): string {
  return JSON.stringify({
    type: "hello",
    schema_version: SCHEMA_VERSION,
    mode: "client",
    role: "client",
  });
}

export function actionMessage(agentId: number, action: ActionId): string {
  return JSON.stringify({ type: "action", agent_id: agentId, action });
}

export type ControlCmd =
  | "reset"
  | "record_start"
  | "record_stop"
  | "save"
  | "play"
  | "pause"
  | "step_fwd";

export function controlMessage(cmd: ControlCmd, path?: string): string {
  const msg: Record<string, unknown> = { type: "control", cmd };
  if (path !== undefined) msg.path = path;
  return JSON.stringify(msg);
}

/** Version handshake check; returns an incompatibility notice or null. */
export function versionNotice(hello: HelloMsg): string | null {
  if (hello.schema_version !== SCHEMA_VERSION) {
    return (
      `protocol schema mismatch: server speaks v${hello.schema_version}, ` +
      `this client speaks v${SCHEMA_VERSION}`
    );
  }
  return null;
}

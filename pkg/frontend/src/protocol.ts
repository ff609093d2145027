/**
 * Wire codec for the session service: 4-byte big-endian length prefix
 * followed by UTF-8 JSON. See docs/protocol.md in the repo root.
 */

export interface SnapshotMessage {
  type: "snapshot";
  vessel: string;
  profile: [number, number][];
  height: number;
  motor_count: number;
  motors: [number, number, number][];
  anchors: [number, number, number][];
  strength: number;
  pulse_duration_ms: number;
  fill_height: number;
  timestep: number;
  preset: PresetSpec | null;
}

export interface PulseMessage {
  type: "pulse";
  t_start: number;
  motor: number;
  duration_ms: number;
  strength: number;
  cause: "proximity" | "vertical";
}

export interface CogMessage {
  type: "cog";
  t: number;
  cog: [number, number, number];
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export type ServerMessage = SnapshotMessage | PulseMessage | CogMessage | ErrorMessage;

export interface PoseMessage {
  type: "pose";
  t: number;
  position: [number, number, number];
  orientation?: [number, number, number, number];
}

export interface PresetSpec {
  kind: "sway" | "shake" | "swirl";
  amplitude: number;
  frequency: number;
  duration: number;
}

export interface ConfigMessage {
  type: "config";
  motor_count?: number;
  strength?: number;
  preset?: PresetSpec | null;
}

export type ClientMessage = PoseMessage | ConfigMessage;

const HEADER_LEN = 4;

export function encodeMessage(msg: ClientMessage | ServerMessage): Buffer {
  const payload = Buffer.from(JSON.stringify(msg), "utf-8");
  const out = Buffer.alloc(HEADER_LEN + payload.length);
  out.writeUInt32BE(payload.length, 0);
  payload.copy(out, HEADER_LEN);
  return out;
}

/** Incremental decoder tolerant of arbitrary TCP chunk boundaries. */
export class MessageDecoder {
  private buffer: Buffer = Buffer.alloc(0);

  push(chunk: Buffer): ServerMessage[] {
    this.buffer = this.buffer.length === 0 ? chunk : Buffer.concat([this.buffer, chunk]);
    const out: ServerMessage[] = [];
    for (;;) {
      if (this.buffer.length < HEADER_LEN) break;
      const length = this.buffer.readUInt32BE(0);
      if (this.buffer.length < HEADER_LEN + length) break;
      const payload = this.buffer.subarray(HEADER_LEN, HEADER_LEN + length);
      this.buffer = this.buffer.subarray(HEADER_LEN + length);
      out.push(JSON.parse(payload.toString("utf-8")) as ServerMessage);
    }
    return out;
  }

  /** Bytes still waiting for the rest of a frame. */
  get pending(): number {
    return this.buffer.length;
  }
}

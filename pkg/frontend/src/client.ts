/** TCP client for the session service, with preset-driven pose streaming. */

import * as net from "node:net";

import {
  ClientMessage,
  ConfigMessage,
  MessageDecoder,
  PresetSpec,
  ServerMessage,
  encodeMessage,
} from "./protocol.js";
import { presetPosition } from "./presets.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface ClientEvents {
  message: (msg: ServerMessage) => void;
  status: (status: ConnectionStatus) => void;
}

export class SessionClient {
  private socket: net.Socket | null = null;
  private decoder = new MessageDecoder();
  private handlers: Partial<ClientEvents> = {};
  private streamTimer: NodeJS.Timeout | null = null;
  private simT = 0;
  private timestep: number;

  constructor(timestep = 1 / 90) {
    this.timestep = timestep;
  }

  on<K extends keyof ClientEvents>(event: K, handler: ClientEvents[K]): void {
    this.handlers[event] = handler;
  }

  connect(host: string, port: number): Promise<void> {
    this.handlers.status?.("connecting");
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port }, () => {
        this.socket = socket;
        this.handlers.status?.("connected");
        resolve();
      });
      socket.on("data", (chunk) => {
        for (const msg of this.decoder.push(chunk)) {
          if (msg.type === "snapshot") this.timestep = msg.timestep;
          this.handlers.message?.(msg);
        }
      });
      socket.on("error", (err) => {
        if (this.socket === null) reject(err);
      });
      socket.on("close", () => {
        this.stopStreaming();
        this.socket = null;
        this.handlers.status?.("disconnected");
      });
    });
  }

  send(msg: ClientMessage): void {
    this.socket?.write(encodeMessage(msg));
  }

  sendPose(position: [number, number, number]): void {
    this.simT += this.timestep;
    this.send({ type: "pose", t: this.simT, position });
  }

  patchConfig(patch: Omit<ConfigMessage, "type">): void {
    this.send({ type: "config", ...patch });
  }

  /** Stream a preset locally: one pose per timestep, paced by wall clock. */
  startPreset(spec: PresetSpec): void {
    this.stopStreaming();
    const t0 = this.simT;
    this.streamTimer = setInterval(() => {
      const local = this.simT + this.timestep - t0;
      if (local > spec.duration) {
        this.stopStreaming();
        return;
      }
      this.simT += this.timestep;
      this.send({
        type: "pose",
        t: this.simT,
        position: presetPosition(spec, local),
      });
    }, this.timestep * 1000);
  }

  stopStreaming(): void {
    if (this.streamTimer !== null) {
      clearInterval(this.streamTimer);
      this.streamTimer = null;
    }
  }

  close(): void {
    this.stopStreaming();
    this.socket?.end();
  }
}

/**
 * View model for one live session. Markers derive solely from server
 * messages; the view never originates pulse logic of its own.
 */

import type { CogMessage, PulseMessage, ServerMessage, SnapshotMessage } from "./protocol.js";

export interface Marker {
  motor: number;
  cause: "proximity" | "vertical";
  strength: number;
  activatedAt: number; // simulation seconds
  expiresAt: number; // simulation seconds
}

export class SessionView {
  snapshot: SnapshotMessage | null = null;
  cog: [number, number, number] | null = null;
  cogT = 0;
  lastError: string | null = null;
  /** Simulation-time clock, advanced by frame() and by inbound messages. */
  clock = 0;
  private markers = new Map<number, Marker>();
  private activationCount = 0;

  apply(msg: ServerMessage): void {
    switch (msg.type) {
      case "snapshot":
        this.applySnapshot(msg);
        break;
      case "pulse":
        this.applyPulse(msg);
        break;
      case "cog":
        this.applyCog(msg);
        break;
      case "error":
        this.lastError = msg.message;
        break;
    }
  }

  private applySnapshot(msg: SnapshotMessage): void {
    this.snapshot = msg;
    // a layout change invalidates motor indices; drop stale markers
    for (const motor of [...this.markers.keys()]) {
      if (motor >= msg.motor_count) this.markers.delete(motor);
    }
  }

  private applyPulse(msg: PulseMessage): void {
    this.clock = Math.max(this.clock, msg.t_start);
    this.markers.set(msg.motor, {
      motor: msg.motor,
      cause: msg.cause,
      strength: msg.strength,
      activatedAt: msg.t_start,
      expiresAt: msg.t_start + msg.duration_ms / 1000,
    });
    this.activationCount += 1;
  }

  private applyCog(msg: CogMessage): void {
    this.cog = msg.cog;
    this.cogT = msg.t;
    this.clock = Math.max(this.clock, msg.t);
  }

  /** Advance the render clock one frame; expired markers are cleared here. */
  frame(now: number): void {
    this.clock = Math.max(this.clock, now);
    for (const [motor, marker] of this.markers) {
      if (marker.expiresAt <= this.clock) this.markers.delete(motor);
    }
  }

  activeMarkers(): Marker[] {
    return [...this.markers.values()].sort((a, b) => a.motor - b.motor);
  }

  isActive(motor: number): boolean {
    return this.markers.has(motor);
  }

  get totalActivations(): number {
    return this.activationCount;
  }

  get motorCount(): number {
    return this.snapshot?.motor_count ?? 0;
  }
}

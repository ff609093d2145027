/** Client-side pose generators mirroring the server's motion presets. */

import type { PoseMessage, PresetSpec } from "./protocol.js";

export function presetPosition(
  spec: PresetSpec,
  t: number
): [number, number, number] {
  const ph = 2 * Math.PI * spec.frequency * t;
  switch (spec.kind) {
    case "sway":
      return [spec.amplitude * Math.sin(ph), 0, 0];
    case "shake":
      return [0, 0, spec.amplitude * Math.sin(ph)];
    case "swirl":
      return [spec.amplitude * Math.cos(ph), spec.amplitude * Math.sin(ph), 0];
  }
}

export function presetPoses(
  spec: PresetSpec,
  timestep: number,
  t0 = 0
): PoseMessage[] {
  const n = Math.round(spec.duration / timestep);
  const poses: PoseMessage[] = [];
  for (let k = 0; k <= n; k++) {
    const t = k * timestep;
    poses.push({ type: "pose", t: t0 + t, position: presetPosition(spec, t) });
  }
  return poses;
}

/** Map a pointer drag (pixels) to lateral vessel translation (meters). */
export function dragToPosition(
  dxPx: number,
  dyPx: number,
  gainMetersPerPx = 0.001
): [number, number, number] {
  return [dxPx * gainMetersPerPx, -dyPx * gainMetersPerPx, 0];
}

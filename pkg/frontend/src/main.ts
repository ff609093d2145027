/**
 * Terminal steering client: connect to a running session service, start a
 * motion preset, and watch the actuator ring light up.
 *
 *   node dist/main.js [host] [port] [sway|shake|swirl] [amplitude] [frequency]
 */

import { SessionClient } from "./client.js";
import { ringText } from "./render.js";
import { SessionView } from "./session-view.js";

const host = process.argv[2] ?? "127.0.0.1";
const port = Number(process.argv[3] ?? 7421);
const kind = (process.argv[4] ?? "sway") as "sway" | "shake" | "swirl";
const amplitude = Number(process.argv[5] ?? 0.1);
const frequency = Number(process.argv[6] ?? 2.0);

const view = new SessionView();
const client = new SessionClient();

client.on("status", (s) => console.error(`[${s}]`));
client.on("message", (msg) => {
  view.apply(msg);
  if (msg.type === "snapshot") {
    console.error(
      `vessel=${msg.vessel} motors=${msg.motor_count} strength=${msg.strength}`
    );
  } else if (msg.type === "pulse") {
    console.log(
      `${msg.t_start.toFixed(3)}s  ${ringText(view)}  motor ${msg.motor} (${msg.cause})`
    );
  } else if (msg.type === "error") {
    console.error(`server error: ${msg.message}`);
  }
});

const frameMs = 1000 / 60;
setInterval(() => view.frame(view.clock + frameMs / 1000), frameMs);

client
  .connect(host, port)
  .then(() => {
    console.error(`streaming ${kind} A=${amplitude}m f=${frequency}Hz for 10s`);
    client.startPreset({ kind, amplitude, frequency, duration: 10 });
    setTimeout(() => {
      client.close();
      process.exit(0);
    }, 12000);
  })
  .catch((err) => {
    console.error(`connect failed: ${err.message}`);
    process.exit(1);
  });

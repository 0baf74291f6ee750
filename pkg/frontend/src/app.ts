/**
 * Browser entry point: connects to the serve endpoint, renders frames,
 * wires keyboard piloting, recording controls, replay scrubbing, and the
 * metrics chart panel.
 */

import { drawChart, parseMetricsCsv, seriesFrom } from "./charts.js";
import { PilotControls } from "./input.js";
import { renderArena } from "./renderer.js";
import { ReplayController } from "./replay.js";
import { Session, WireSocket } from "./session.js";

function browserSocket(url: string): WireSocket {
  const ws = new WebSocket(url);
  let onMsg: (t: string) => void = () => undefined;
  let onClose: () => void = () => undefined;
  ws.onmessage = (e) => onMsg(String(e.data));
  ws.onclose = () => onClose();
  return {
    send: (t) => {
      if (ws.readyState === WebSocket.OPEN) ws.send(t);
      else ws.addEventListener("open", () => ws.send(t), { once: true });
    },
    close: () => ws.close(),
    onMessage: (fn) => (onMsg = fn),
    onClose: (fn) => (onClose = fn),
  };
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function main(): void {
  const canvas = el<HTMLCanvasElement>("arena");
  const chartCanvas = el<HTMLCanvasElement>("chart");
  const status = el<HTMLDivElement>("status");
  const banner = el<HTMLDivElement>("banner");
  const rayToggle = el<HTMLInputElement>("show-rays");

  const url = `ws://${location.host}/ws`;
  const session = new Session(browserSocket(url));
  const replay = new ReplayController((t) => session.send(t));
  const controls = new PilotControls({
    send: (t) => session.send(t),
    enabled: () => session.view.pilotingEnabled,
    onIgnored: () => {
      banner.textContent = "input ignored (not piloting)";
      banner.className = "banner flash";
      setTimeout(() => (banner.className = "banner"), 300);
    },
  });
  controls.attach(window);

  const redraw = () => {
    const v = session.view;
    if (v.frame) {
      renderArena(canvas.getContext("2d")!, v.frame, canvas.width,
        canvas.height, { showRays: rayToggle.checked });
    }
    const c = v.counters();
    status.textContent =
      `${v.connection} | mode ${v.mode || "?"} | episode ${c.episode} ` +
      `| step ${c.step} | reward ${c.accumulatedReward.toFixed(1)} ` +
      `| recording ${v.recording ? "ON" : "off"}` +
      (v.lastSaved ? ` | saved ${v.lastSaved.episodes} eps -> ${v.lastSaved.path}` : "");
    if (v.notice) {
      banner.textContent = v.notice;
      banner.className = "banner error";
    } else if (v.lastError) {
      banner.textContent = v.lastError;
      banner.className = "banner error";
    }
  };

  session.onMessage((msg) => {
    if (msg.type === "state") replay.observe(msg);
    redraw();
  });

  const bind = (id: string, fn: () => void) =>
    el<HTMLButtonElement>(id).addEventListener("click", fn);
  bind("btn-reset", () => session.control("reset"));
  bind("btn-record", () => session.control("record_start"));
  bind("btn-stop", () => session.control("record_stop"));
  bind("btn-save", () => session.control("save"));
  bind("btn-play", () => replay.play());
  bind("btn-pause", () => replay.pause());
  bind("btn-step", () => replay.stepForward());

  el<HTMLInputElement>("metrics-file").addEventListener("change", (e) => {
    const input = e.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    file.text().then((text) => {
      try {
        const { rows, skipped } = parseMetricsCsv(text);
        drawChart(chartCanvas.getContext("2d")!, [
          seriesFrom(rows, "mean_reward", "mean reward", "#2563eb"),
          seriesFrom(rows, "mean_episode_length", "episode length", "#dc2626"),
          seriesFrom(rows, "gail_disc_loss", "disc loss", "#16a34a"),
        ], chartCanvas.width, chartCanvas.height);
        el<HTMLSpanElement>("skipped").textContent =
          skipped > 0 ? `${skipped} malformed rows skipped` : "";
      } catch (err) {
        banner.textContent = String(err);
        banner.className = "banner error";
      }
    });
  });

  redraw();
}

window.addEventListener("DOMContentLoaded", main);

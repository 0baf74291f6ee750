import assert from "node:assert/strict";
import { test } from "node:test";

import { StateFrame } from "../src/protocol.js";
import { SessionView } from "../src/state.js";
import { keyToAction } from "../src/input.js";
import { ReplayController } from "../src/replay.js";

function frame(tick: number, extra: Partial<StateFrame> = {}): StateFrame {
  return {
    type: "state",
    tick,
    uavs: [{ id: 0, x: 0, y: 0, heading: 0, alive: true }],
    goals: [{ owner: 0, x: 5, y: 5 }],
    obstacles: [],
    rays: {},
    last_reward: {},
    done: false,
    recording: false,
    arena: [-15, 15, -15, 15],
    ...extra,
  };
}

function liveView(mode = "pilot"): SessionView {
  const v = new SessionView();
  v.apply({ type: "hello", schema_version: 1, mode, role: "server" });
  return v;
}

test("hello with matching schema goes live", () => {
  const v = liveView();
  assert.equal(v.connection, "live");
  assert.equal(v.mode, "pilot");
});

test("schema mismatch blocks the session with a notice", () => {
  const v = new SessionView();
  v.apply({ type: "hello", schema_version: 42, mode: "pilot", role: "server" });
  assert.equal(v.connection, "incompatible");
  assert.ok(v.notice);
  assert.equal(v.apply(frame(0)), false); // no partial session
  assert.equal(v.frame, null);
});

test("stale frames (lower tick) are discarded", () => {
  const v = liveView();
  v.apply(frame(5));
  assert.equal(v.apply(frame(3)), false);
  assert.equal(v.frame!.tick, 5);
  assert.equal(v.framesDiscarded, 1);
});

test("equal-tick frames are control acknowledgments, not stale", () => {
  const v = liveView();
  v.apply(frame(5));
  assert.equal(v.apply(frame(5, { recording: true })), true);
  assert.equal(v.recording, true);
});

test("tick reset starts a new episode and clears the reward sum", () => {
  const v = liveView();
  v.apply(frame(1, { last_reward: { "0": -1 } }));
  v.apply(frame(2, { last_reward: { "0": -1 } }));
  assert.equal(v.accumulatedReward, -2);
  v.apply(frame(0));
  assert.equal(v.episode, 1);
  assert.equal(v.accumulatedReward, 0);
});

test("piloting is enabled only for a live pilot session with an open episode", () => {
  const v = liveView();
  assert.equal(v.pilotingEnabled, false); // no frame yet
  v.apply(frame(0));
  assert.equal(v.pilotingEnabled, true);
  v.apply(frame(1, { done: true }));
  assert.equal(v.pilotingEnabled, false);
  const watcher = liveView("watch");
  watcher.apply(frame(0));
  assert.equal(watcher.pilotingEnabled, false);
});

test("recording indicator mirrors the server flag", () => {
  const v = liveView();
  v.apply(frame(0, { recording: true }));
  assert.equal(v.recording, true);
});

test("arrow keys map 1:1 to actions", () => {
  assert.equal(keyToAction("ArrowUp"), 0);
  assert.equal(keyToAction("ArrowLeft"), 1);
  assert.equal(keyToAction("ArrowRight"), 2);
  assert.equal(keyToAction("a"), null);
});

test("replay controller tracks contiguous tick coverage", () => {
  const sent: string[] = [];
  const rc = new ReplayController((t) => sent.push(t));
  for (let t = 0; t <= 4; t++) rc.observe(frame(t));
  assert.ok(rc.coveredContiguously(4));
  const rc2 = new ReplayController(() => undefined);
  rc2.observe(frame(0));
  rc2.observe(frame(2));
  assert.equal(rc2.coveredContiguously(2), false);
  rc.stepForward();
  rc.play();
  rc.pause();
  assert.deepEqual(sent.map((s) => JSON.parse(s).cmd),
    ["step_fwd", "play", "pause"]);
});

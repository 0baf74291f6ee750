import assert from "node:assert/strict";
import { test } from "node:test";

import { chartScale, parseMetricsCsv, seriesFrom } from "../src/charts.js";
import { makeTransform, uavTriangle } from "../src/renderer.js";

const HEADER = "step,mean_reward,mean_episode_length,success_rate," +
  "ppo_policy_loss,value_loss,entropy,bc_loss,gail_disc_loss," +
  "gail_reward_mean,lr";

test("metrics csv parses every well-formed row", () => {
  const text = `${HEADER}\n` +
    "2048,-5171,171,0,0,0,0,0.3,0,0,0.00029\n" +
    "4096,-5000,160,0.1,0.01,100,1.05,0,1.38,-0.7,0.00027\n";
  const { rows, skipped } = parseMetricsCsv(text);
  assert.equal(rows.length, 2);
  assert.equal(skipped, 0);
  assert.equal(rows[1].step, 4096);
  assert.equal(rows[1].gail_disc_loss, 1.38);
});

test("malformed rows are skipped with a count, not fatal", () => {
  const text = `${HEADER}\n` +
    "2048,-5171,171,0,0,0,0,0.3,0,0,0.00029\n" +
    "4096,-50\n" +            // truncated (crash mid-write)
    "oops,not,numbers,a,b,c,d,e,f,g,h\n";
  const { rows, skipped } = parseMetricsCsv(text);
  assert.equal(rows.length, 1);
  assert.equal(skipped, 2);
});

test("missing header is an error", () => {
  assert.throws(() => parseMetricsCsv("1,2,3\n"));
});

test("series extraction keeps (step, value) pairs", () => {
  const { rows } = parseMetricsCsv(
    `${HEADER}\n100,-5,10,0,0,0,0,0,0,0,1\n200,-4,11,0,0,0,0,0,0,0,1\n`);
  const s = seriesFrom(rows, "mean_reward", "r", "#000");
  assert.deepEqual(s.points, [[100, -5], [200, -4]]);
});

test("N rows produce N chart points per series", () => {
  const lines = [HEADER];
  for (let i = 1; i <= 17; i++) {
    lines.push(`${i * 100},${-i},${i},0,0,0,0,0,0,0,1`);
  }
  const { rows } = parseMetricsCsv(lines.join("\n") + "\n");
  assert.equal(seriesFrom(rows, "mean_reward", "r", "#000").points.length, 17);
});

test("chart scale maps data extremes into the padded box", () => {
  const s = chartScale([[0, -10], [100, 10]], 500, 300, 20);
  assert.equal(s.x(0), 20);
  assert.equal(s.x(100), 480);
  assert.equal(s.y(10), 20);
  assert.equal(s.y(-10), 280);
});

test("arena transform fits and flips y", () => {
  const t = makeTransform([-15, 15, -15, 15], 640, 640);
  assert.equal(t.toX(0), 320);
  assert.equal(t.toY(0), 320);
  assert.ok(t.toY(10) < 320); // +y is up on screen
  assert.ok(t.toX(-15) >= 0 && t.toX(15) <= 640);
});

test("uav triangle apex points along the heading", () => {
  const t = makeTransform([-15, 15, -15, 15], 640, 640);
  const east = uavTriangle({ id: 0, x: 0, y: 0, heading: 0, alive: true }, t);
  assert.ok(east[0][0] > 320); // apex to the right of center
  assert.ok(Math.abs(east[0][1] - 320) < 1e-9);
  const north = uavTriangle({ id: 0, x: 0, y: 0, heading: 90, alive: true }, t);
  assert.ok(north[0][1] < 320); // apex above center (canvas y down)
});

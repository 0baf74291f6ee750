/**
 * Training metrics parsing and line charts (mean reward, episode length,
 * discriminator loss versus step).  Malformed rows are skipped and counted,
 * never fatal.
 */

export interface MetricsRow {
  step: number;
  mean_reward: number;
  mean_episode_length: number;
  success_rate: number;
  ppo_policy_loss: number;
  value_loss: number;
  entropy: number;
  bc_loss: number;
  gail_disc_loss: number;
  gail_reward_mean: number;
  lr: number;
}

export const METRICS_FIELDS: (keyof MetricsRow)[] = [
  "step", "mean_reward", "mean_episode_length", "success_rate",
  "ppo_policy_loss", "value_loss", "entropy", "bc_loss", "gail_disc_loss",
  "gail_reward_mean", "lr",
];

export interface ParsedMetrics {
  rows: MetricsRow[];
  skipped: number;
}

export function parseMetricsCsv(text: string): ParsedMetrics {
  const lines = text.split("\n");
  if (lines.length === 0 || lines[0].split(",").join(",") !== METRICS_FIELDS.join(",")) {
    throw new Error("missing metrics header row");
  }
  const rows: MetricsRow[] = [];
  let skipped = 0;
  for (const line of lines.slice(1)) {
    if (line.trim() === "") continue;
    const parts = line.split(",");
    if (parts.length !== METRICS_FIELDS.length) {
      skipped += 1;
      continue;
    }
    const values = parts.map(Number);
    if (values.some((v) => Number.isNaN(v))) {
      skipped += 1;
      continue;
    }
    const row = {} as MetricsRow;
    METRICS_FIELDS.forEach((f, i) => {
      (row as unknown as Record<string, number>)[f] = values[i];
    });
    rows.push(row);
  }
  return { rows, skipped };
}

export interface Series {
  label: string;
  points: Array<[number, number]>; // (step, value)
  color: string;
}

export function seriesFrom(
  rows: MetricsRow[],
  field: keyof MetricsRow,
  label: string,
  color: string,
): Series {
  return { label, color, points: rows.map((r) => [r.step, r[field]]) };
}

export interface ChartScale {
  x(v: number): number;
  y(v: number): number;
}

/** Linear scales fitting [min,max] of the data into the plot box. */
export function chartScale(
  points: Array<[number, number]>,
  width: number,
  height: number,
  pad = 28,
): ChartScale {
  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const [x, y] of points) {
    xMin = Math.min(xMin, x);
    xMax = Math.max(xMax, x);
    yMin = Math.min(yMin, y);
    yMax = Math.max(yMax, y);
  }
  if (!Number.isFinite(xMin)) {
    xMin = 0; xMax = 1; yMin = 0; yMax = 1;
  }
  if (xMax === xMin) xMax = xMin + 1;
  if (yMax === yMin) yMax = yMin + 1;
  return {
    x: (v) => pad + ((v - xMin) / (xMax - xMin)) * (width - 2 * pad),
    y: (v) => height - pad - ((v - yMin) / (yMax - yMin)) * (height - 2 * pad),
  };
}

export function drawChart(
  ctx: CanvasRenderingContext2D,
  series: Series[],
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  const all = series.flatMap((s) => s.points);
  if (all.length === 0) {
    ctx.fillStyle = "#64748b";
    ctx.font = "13px sans-serif";
    ctx.fillText("no metrics loaded", width / 2 - 50, height / 2);
    return;
  }
  const scale = chartScale(all, width, height);
  ctx.strokeStyle = "#cbd5e1";
  ctx.strokeRect(0.5, 0.5, width - 1, height - 1);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    s.points.forEach(([x, y], i) => {
      if (i === 0) ctx.moveTo(scale.x(x), scale.y(y));
      else ctx.lineTo(scale.x(x), scale.y(y));
    });
    ctx.stroke();
  }
  // legend
  ctx.font = "12px sans-serif";
  series.forEach((s, i) => {
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, 36, 16 + 14 * i);
  });
}

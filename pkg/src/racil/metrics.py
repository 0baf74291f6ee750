"""Append-only training metrics log (comma-separated text, header row).

Rows are flushed per write so a crash loses at most the in-flight line;
the reader tolerates a partial final line.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

METRICS_FIELDS = (
    "step", "mean_reward", "mean_episode_length", "success_rate",
    "ppo_policy_loss", "value_loss", "entropy", "bc_loss",
    "gail_disc_loss", "gail_reward_mean", "lr",
)


@dataclass(frozen=True)
class MetricsRow:
    step: int
    mean_reward: float
    mean_episode_length: float
    success_rate: float
    ppo_policy_loss: float
    value_loss: float
    entropy: float
    bc_loss: float
    gail_disc_loss: float
    gail_reward_mean: float
    lr: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v != v or v in (float("inf"), float("-inf")):
                raise ValueError(f"non-finite metrics field {f.name}={v}")


def format_row(row: MetricsRow) -> str:
    parts = [str(row.step)]
    parts += [format(getattr(row, name), ".9g") for name in METRICS_FIELDS[1:]]
    return ",".join(parts)


class MetricsWriter:
    def __init__(self, path):
        self.path = path
        self._last_step = -1
        self._fh = open(path, "w", encoding="utf-8", newline="\n")
        self._fh.write(",".join(METRICS_FIELDS) + "\n")
        self._fh.flush()

    def write(self, row: MetricsRow):
        if row.step <= self._last_step:
            raise ValueError(
                f"metrics step must increase ({row.step} after {self._last_step})")
        self._last_step = row.step
        self._fh.write(format_row(row) + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()


def read_metrics(path):
    """Parse a metrics log; a truncated final line is dropped, not an error."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if not lines or lines[0].split(",") != list(METRICS_FIELDS):
        raise ValueError(f"{path}: missing metrics header")
    for line in lines[1:]:
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != len(METRICS_FIELDS):
            continue  # partial trailing line (crash mid-write)
        try:
            rows.append(MetricsRow(step=int(parts[0]),
                                   **{name: float(v) for name, v in
                                      zip(METRICS_FIELDS[1:], parts[1:])}))
        except ValueError:
            continue
    return rows

"""Sequence-length scaling benchmark: SSM backbone vs dense attention.

Both paths run forward-only in 32-bit mode on random inputs through the
engine, so the allocation meter's high-water mark is comparable. The
attention baseline materializes the full L x L score matrix
(softmax(Q K^T / sqrt(d)) V); it exists purely as a quadratic-cost foil.
Reported slopes are least-squares fits of log(time) and log(memory)
against log(L).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from ..engine import Tensor, engine_mode, meter, no_grad, ops
from ..errors import InsufficientPoints, SpecInvalid
from ..model import ModelConfig, backbone, init_params


@dataclass
class BenchRow:
    length: int
    model: str  # "backbone" | "attention"
    time_ms: float
    mem_bytes: int


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    slopes: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "rows": [vars(r) for r in self.rows],
                "slopes": self.slopes,
            },
            indent=2,
            sort_keys=True,
        )

    def write_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["length", "model", "time_ms", "mem_bytes"])
            for row in self.rows:
                writer.writerow([row.length, row.model, f"{row.time_ms:.4f}", row.mem_bytes])


def attention_forward(x: Tensor, wq: Tensor, wk: Tensor, wv: Tensor) -> Tensor:
    """Single dense attention layer with the full score matrix in memory."""
    q = ops.matmul(x, wq)
    k = ops.matmul(x, wk)
    v = ops.matmul(x, wv)
    scores = ops.scale(ops.matmul(q, ops.transpose(k)), 1.0 / np.sqrt(x.data.shape[1]))
    return ops.matmul(ops.softmax_axis(scores, axis=1), v)


def fit_loglog_slope(lengths, values) -> float:
    xs = np.log(np.asarray(lengths, dtype=np.float64))
    ys = np.log(np.maximum(np.asarray(values, dtype=np.float64), 1e-12))
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def _measure(run, repeats: int) -> tuple[float, int]:
    """Median wall time over repeated passes after warmup, plus peak allocation."""
    run()  # warmup
    baseline = meter.live_bytes
    meter.reset_peak()
    run()
    mem = meter.peak_bytes - baseline
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        run()
        times.append((time.perf_counter() - start) * 1000.0)
    return float(np.median(times)), int(max(mem, 0))


def scaling_bench(
    lengths,
    model_config: ModelConfig | None = None,
    seed: int = 0,
    repeats: int = 5,
) -> BenchReport:
    """Forward-only timings and allocation peaks across sequence lengths."""
    lengths = [int(x) for x in lengths]
    if len(lengths) < 3:
        raise InsufficientPoints(f"need >= 3 lengths, got {len(lengths)}")
    if any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise SpecInvalid(f"lengths must be strictly increasing: {lengths}")
    config = model_config or ModelConfig()
    config.validate()
    if repeats < 1:
        raise SpecInvalid("repeats must be >= 1")

    report = BenchReport()
    with engine_mode("fast"):
        params = init_params(config, seed)
        rng = np.random.default_rng(seed)
        proj = [
            Tensor(rng.standard_normal((config.dim, config.dim)) / np.sqrt(config.dim))
            for _ in range(3)
        ]
        backbone_times, backbone_mems = [], []
        attention_times, attention_mems = [], []
        for length in lengths:
            x_data = rng.standard_normal((length, config.dim)).astype(np.float32)

            def run_backbone():
                with no_grad():
                    backbone(Tensor(x_data), params, config)

            def run_attention():
                with no_grad():
                    attention_forward(Tensor(x_data), *proj)

            t_ms, mem = _measure(run_backbone, repeats)
            report.rows.append(BenchRow(length=length, model="backbone", time_ms=t_ms, mem_bytes=mem))
            backbone_times.append(t_ms)
            backbone_mems.append(mem)

            t_ms, mem = _measure(run_attention, repeats)
            report.rows.append(BenchRow(length=length, model="attention", time_ms=t_ms, mem_bytes=mem))
            attention_times.append(t_ms)
            attention_mems.append(mem)

    report.slopes = {
        "backbone_time": fit_loglog_slope(lengths, backbone_times),
        "backbone_mem": fit_loglog_slope(lengths, backbone_mems),
        "attention_time": fit_loglog_slope(lengths, attention_times),
        "attention_mem": fit_loglog_slope(lengths, attention_mems),
    }
    return report

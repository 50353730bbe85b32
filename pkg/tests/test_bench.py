"""Scaling benchmark: allocation accounting, slope fits, quadratic foil."""

import numpy as np
import pytest

from genspan.engine import Tensor, engine_mode, meter, no_grad
from genspan.errors import InsufficientPoints, SpecInvalid
from genspan.evalbench import attention_forward, fit_loglog_slope, scaling_bench
from genspan.model import ModelConfig


def test_attention_scores_allocate_at_least_l_squared():
    # L=1024, d=32 in 32-bit: the score matrix alone is >= 4 MiB.
    length, dim = 1024, 32
    with engine_mode("fast"):
        rng = np.random.default_rng(0)
        x = Tensor(rng.standard_normal((length, dim)).astype(np.float32))
        proj = [Tensor(rng.standard_normal((dim, dim)).astype(np.float32)) for _ in range(3)]
        baseline = meter.live_bytes
        meter.reset_peak()
        with no_grad():
            attention_forward(x, *proj)
        peak = meter.peak_bytes - baseline
    assert peak >= length * length * 4


def test_slope_fit_recovers_known_exponent():
    lengths = [256, 512, 1024, 2048]
    quadratic = [7.5 * (n / 256) ** 2 for n in lengths]
    linear = [0.3 * n for n in lengths]
    assert abs(fit_loglog_slope(lengths, quadratic) - 2.0) < 1e-9
    assert abs(fit_loglog_slope(lengths, linear) - 1.0) < 1e-9


def test_insufficient_points_rejected():
    with pytest.raises(InsufficientPoints):
        scaling_bench([256, 512])
    with pytest.raises(SpecInvalid):
        scaling_bench([256, 512, 512])


@pytest.mark.slow
def test_small_bench_produces_sane_report(tmp_path):
    config = ModelConfig(dim=16, state_size=8, num_layers=2)
    report = scaling_bench([64, 128, 256, 512], model_config=config, seed=1)
    assert len(report.rows) == 8
    assert {"backbone_time", "backbone_mem", "attention_time", "attention_mem"} == set(report.slopes)
    # memory slopes separate cleanly even at small lengths
    assert report.slopes["backbone_mem"] <= 1.3
    assert report.slopes["attention_mem"] >= 1.7
    csv_path = tmp_path / "bench.csv"
    report.write_csv(csv_path)
    header = csv_path.read_text().splitlines()[0]
    assert header == "length,model,time_ms,mem_bytes"
    assert "slopes" in report.to_json()

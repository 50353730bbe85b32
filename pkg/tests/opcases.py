"""Differentiable-op case table shared by gradient tests and acceptance.

Each case maps a name to a builder(rng) returning (forward, arrays):
forward takes Tensors built from arrays (in order) and returns a Tensor.
Inputs are sized small and sampled away from subgradient kinks.
"""

import numpy as np

from genspan.engine import ops


def _away_from_zero(rng, shape, gap=0.15):
    x = rng.standard_normal(shape)
    return x + np.sign(x) * gap


def build_cases(rng):
    a34 = rng.standard_normal((3, 4))
    b34 = rng.standard_normal((3, 4))
    v4 = rng.standard_normal(4)
    scalar = rng.standard_normal((1,))
    pos34 = np.abs(rng.standard_normal((3, 4))) + 0.5
    m43 = rng.standard_normal((4, 3))
    idx = np.array([0, 2])
    kernel = rng.standard_normal((3, 4))
    decay = rng.uniform(0.2, 0.9, 5)
    u65 = rng.standard_normal((6, 5))
    ln_scale = rng.standard_normal(4) + 1.5
    ln_shift = rng.standard_normal(4)
    cols = [rng.standard_normal(5) for _ in range(3)]

    return {
        "add": (lambda a, b: ops.add(a, b), [a34, b34]),
        "add_scalar": (lambda a, c: ops.add(a, c), [a34, scalar]),
        "sub": (lambda a, b: ops.sub(a, b), [a34, b34]),
        "mul": (lambda a, b: ops.mul(a, b), [a34, b34]),
        "mul_scalar": (lambda a, c: ops.mul(a, c), [a34, scalar]),
        "div": (lambda a, b: ops.div(a, b), [a34, pos34]),
        "scale": (lambda a: ops.scale(a, 1.7), [a34]),
        "neg": (lambda a: ops.neg(a), [a34]),
        "sigmoid": (lambda a: ops.sigmoid(a), [a34]),
        "tanh": (lambda a: ops.tanh(a), [a34]),
        "silu": (lambda a: ops.silu(a), [a34]),
        "relu": (lambda a: ops.relu(a), [_away_from_zero(rng, (3, 4))]),
        "softplus": (lambda a: ops.softplus(a), [a34]),
        "exp": (lambda a: ops.exp(a), [a34]),
        "log": (lambda a: ops.log(a), [pos34]),
        "sqrt": (lambda a: ops.sqrt(a), [pos34]),
        "square": (lambda a: ops.square(a), [a34]),
        "clamp": (lambda a: ops.clamp(a, -10.0, 10.0), [a34]),
        "matmul": (lambda a, b: ops.matmul(a, b), [a34, m43]),
        "matvec": (lambda a, v: ops.matvec(a, v), [a34, v4]),
        "transpose": (lambda a: ops.transpose(a), [a34]),
        "expand_rows": (lambda v: ops.expand_rows(v, 5), [v4]),
        "sum": (lambda a: ops.total_sum(a), [a34]),
        "mean": (lambda a: ops.mean(a), [a34]),
        "sum_axis": (lambda a: ops.sum_axis(a, 1), [a34]),
        "mean_axis": (lambda a: ops.mean_axis(a, 0), [a34]),
        "max_axis": (lambda a: ops.max_axis(a, 1), [a34]),
        "softmax_axis": (lambda a: ops.softmax_axis(a, 1), [a34]),
        "logsumexp_axis": (lambda a: ops.logsumexp_axis(a, 1), [a34]),
        "l2norm_rows": (lambda a: ops.l2norm_rows(a), [a34 + 0.5]),
        "normalize_rows": (lambda a: ops.normalize_rows(a), [a34 + 0.5]),
        "row_sum_normalize": (lambda a: ops.row_sum_normalize(a), [np.abs(rng.standard_normal((4, 4))) + 0.2]),
        "motion_saliency": (lambda a: ops.motion_saliency(a), [rng.standard_normal((6, 4))]),
        "concat_rows": (lambda a, b: ops.concat_rows(a, b), [a34, b34]),
        "slice_rows": (lambda a: ops.slice_rows(a, 1, 3), [a34]),
        "reverse_rows": (lambda a: ops.reverse_rows(a), [a34]),
        "flatten": (lambda a: ops.flatten(a), [a34]),
        "stack_cols": (lambda *cs: ops.stack_cols(list(cs)), cols),
        "gather_rows": (lambda a: ops.gather_rows(a, idx), [a34]),
        "scatter_rows": (lambda a: ops.scatter_rows(a, idx, 5), [rng.standard_normal((2, 4))]),
        "scale_rows": (lambda a, g: ops.scale_rows(a, g), [a34, rng.standard_normal(3)]),
        "conv1d_depthwise": (lambda a, k: ops.conv1d_depthwise(a, k), [rng.standard_normal((6, 4)), kernel]),
        "diag_scan": (lambda d, u: ops.diag_scan(d, u), [decay, u65]),
        "layernorm_rows": (lambda a, w, b: ops.layernorm_rows(a, w, b), [a34, ln_scale, ln_shift]),
        "as_row": (lambda v: ops.as_row(v), [v4]),
        "cosine_rows": (lambda a, v: ops.cosine_rows(a, v), [a34 + 0.5, v4 + 0.5]),
        "cosine_matrix": (lambda a, b: ops.cosine_matrix(a, b), [a34 + 0.5, rng.standard_normal((5, 4)) + 0.5]),
    }

"""Gradient checks: every differentiable op against central finite differences."""

import numpy as np
import pytest

from genspan.engine import Tensor, backward, ops

from gradcheck import finite_difference, relative_error
from opcases import build_cases

OP_NAMES = sorted(build_cases(np.random.default_rng(0)).keys())


def _scalarize(forward, arrays, weights):
    """Scalar loss sum(forward(inputs) * weights) for FD probing."""
    def fn(arrs):
        out = forward(*[Tensor(a) for a in arrs])
        return float((out.data * weights).sum())
    return fn


def _analytic_grads(forward, arrays, weights):
    tensors = [Tensor(a) for a in arrays]
    out = forward(*tensors)
    loss = ops.total_sum(ops.mul(out, Tensor(weights)))
    backward(loss)
    return [t.grad_or_zeros() for t in tensors]


@pytest.mark.parametrize("name", OP_NAMES)
def test_op_gradient_matches_finite_differences(name):
    # 64-bit mode, random inputs, 50 seeds, relative error < 1e-4
    for seed in range(50):
        rng = np.random.default_rng(seed)
        forward, arrays = build_cases(rng)[name]
        probe = forward(*[Tensor(a) for a in arrays])
        weights = np.random.default_rng(seed + 1000).standard_normal(probe.data.shape)
        numeric = finite_difference(_scalarize(forward, arrays, weights), arrays)
        analytic = _analytic_grads(forward, arrays, weights)
        for a, n in zip(analytic, numeric):
            assert relative_error(a, n) < 1e-4, f"{name} seed {seed}"


def test_forward_backward_deterministic():
    rng = np.random.default_rng(3)
    x_data = rng.standard_normal((5, 4))
    w_data = rng.standard_normal((4, 4))

    def run():
        x = Tensor(x_data)
        w = Tensor(w_data)
        y = ops.total_sum(ops.silu(ops.matmul(x, w)))
        backward(y)
        return y.data.copy(), x.grad.copy(), w.grad.copy()

    first = run()
    second = run()
    for a, b in zip(first, second):
        assert np.array_equal(a, b)


def test_scatter_gather_roundtrip(rng):
    x = Tensor(rng.standard_normal((6, 3)))
    idx = [1, 3, 4]
    restored = ops.scatter_rows(ops.gather_rows(x, idx), idx, 6)
    assert np.array_equal(restored.data[idx], x.data[idx])
    others = [i for i in range(6) if i not in idx]
    assert np.all(restored.data[others] == 0.0)


def test_untouched_leaf_gets_zero_gradient(rng):
    x = Tensor(rng.standard_normal(4))
    unused = Tensor(rng.standard_normal(4))
    backward(ops.total_sum(x))
    assert np.array_equal(x.grad, np.ones(4))
    assert unused.grad is None
    assert np.array_equal(unused.grad_or_zeros(), np.zeros(4))

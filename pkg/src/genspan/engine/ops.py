"""Differentiable operations over Tensor values.

Shape rules are strict: elementwise ops accept identical shapes or a
scalar (size-1) second operand; anything broader needs an explicit op
such as expand_rows. All index arguments are 0-based here; 1-based clip
indices are converted at the model boundary.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimMismatch, IndexOutOfRange
from .tensor import Tensor, accumulate


def as_tensor(value) -> Tensor:
    """Wrap floats/arrays as constant tensors; pass Tensor through."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def constant(value) -> Tensor:
    return Tensor(value)


def _is_scalar(t: Tensor) -> bool:
    return t.data.size == 1


def _fit(g: np.ndarray, t: Tensor) -> np.ndarray:
    """Collapse a broadcast gradient back onto a scalar operand's shape."""
    if g.shape == t.data.shape:
        return g
    return np.asarray(g.sum()).reshape(t.data.shape)


def _binary_shapes(a: Tensor, b: Tensor, op: str) -> None:
    if a.data.shape != b.data.shape and not (_is_scalar(a) or _is_scalar(b)):
        raise DimMismatch(f"{op}: shapes {a.data.shape} and {b.data.shape}")


# --- elementwise arithmetic --------------------------------------------------

def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _binary_shapes(a, b, "add")
    def bwd(out: Tensor) -> None:
        accumulate(a, _fit(out.grad, a))
        accumulate(b, _fit(out.grad, b))
    return Tensor(a.data + b.data, (a, b), bwd)


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _binary_shapes(a, b, "sub")
    def bwd(out: Tensor) -> None:
        accumulate(a, _fit(out.grad, a))
        accumulate(b, _fit(-out.grad, b))
    return Tensor(a.data - b.data, (a, b), bwd)


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _binary_shapes(a, b, "mul")
    def bwd(out: Tensor) -> None:
        accumulate(a, _fit(out.grad * b.data, a))
        accumulate(b, _fit(out.grad * a.data, b))
    return Tensor(a.data * b.data, (a, b), bwd)


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _binary_shapes(a, b, "div")
    def bwd(out: Tensor) -> None:
        accumulate(a, _fit(out.grad / b.data, a))
        accumulate(b, _fit(-out.grad * a.data / (b.data * b.data), b))
    return Tensor(a.data / b.data, (a, b), bwd)


def scale(a: Tensor, c: float) -> Tensor:
    c = float(c)
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad * c)
    return Tensor(a.data * c, (a,), bwd)


def neg(a: Tensor) -> Tensor:
    return scale(a, -1.0)


# --- elementwise nonlinearities ----------------------------------------------

def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(a: Tensor) -> Tensor:
    y = _sigmoid(a.data)
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad * y * (1.0 - y))
    return Tensor(y, (a,), bwd)


def tanh(a: Tensor) -> Tensor:
    y = np.tanh(a.data)
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad * (1.0 - y * y))
    return Tensor(y, (a,), bwd)


def silu(a: Tensor) -> Tensor:
    s = _sigmoid(a.data)
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad * (s + a.data * s * (1.0 - s)))
    return Tensor(a.data * s, (a,), bwd)


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad * mask)
    return Tensor(np.where(mask, a.data, 0.0), (a,), bwd)


def softplus(a: Tensor) -> Tensor:
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad * _sigmoid(a.data))
    return Tensor(np.logaddexp(0.0, a.data), (a,), bwd)


def exp(a: Tensor) -> Tensor:
    y = np.exp(a.data)
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad * y)
    return Tensor(y, (a,), bwd)


def log(a: Tensor) -> Tensor:
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.log(a.data)
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad / a.data)
    return Tensor(y, (a,), bwd)


def sqrt(a: Tensor) -> Tensor:
    y = np.sqrt(a.data)
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad * 0.5 / y)
    return Tensor(y, (a,), bwd)


def square(a: Tensor) -> Tensor:
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad * 2.0 * a.data)
    return Tensor(a.data * a.data, (a,), bwd)


def clamp(a: Tensor, lo: float, hi: float) -> Tensor:
    mask = (a.data >= lo) & (a.data <= hi)
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad * mask)
    return Tensor(np.clip(a.data, lo, hi), (a,), bwd)


# --- linear algebra ------------------------------------------------------------

def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2:
        raise DimMismatch(f"matmul: needs 2-D operands, got {a.data.ndim}-D and {b.data.ndim}-D")
    if a.data.shape[1] != b.data.shape[0]:
        raise DimMismatch(f"matmul: {a.data.shape} @ {b.data.shape}")
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad @ b.data.T)
        accumulate(b, a.data.T @ out.grad)
    return Tensor(a.data @ b.data, (a, b), bwd)


def matvec(a: Tensor, v: Tensor) -> Tensor:
    if a.data.ndim != 2 or v.data.ndim != 1 or a.data.shape[1] != v.data.shape[0]:
        raise DimMismatch(f"matvec: {a.data.shape} @ {v.data.shape}")
    def bwd(out: Tensor) -> None:
        accumulate(a, np.outer(out.grad, v.data))
        accumulate(v, a.data.T @ out.grad)
    return Tensor(a.data @ v.data, (a, v), bwd)


def transpose(a: Tensor) -> Tensor:
    if a.data.ndim != 2:
        raise DimMismatch(f"transpose: needs 2-D, got {a.data.ndim}-D")
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad.T.copy())
    return Tensor(a.data.T.copy(), (a,), bwd)


def expand_rows(v: Tensor, rows: int) -> Tensor:
    if v.data.ndim != 1:
        raise DimMismatch(f"expand_rows: needs 1-D, got shape {v.data.shape}")
    def bwd(out: Tensor) -> None:
        accumulate(v, out.grad.sum(axis=0))
    return Tensor(np.tile(v.data, (rows, 1)), (v,), bwd)


# --- reductions ---------------------------------------------------------------

def total_sum(a: Tensor) -> Tensor:
    def bwd(out: Tensor) -> None:
        accumulate(a, np.full_like(a.data, float(out.grad)))
    return Tensor(a.data.sum(), (a,), bwd)


def mean(a: Tensor) -> Tensor:
    n = a.data.size
    def bwd(out: Tensor) -> None:
        accumulate(a, np.full_like(a.data, float(out.grad) / n))
    return Tensor(a.data.mean(), (a,), bwd)


def sum_axis(a: Tensor, axis: int) -> Tensor:
    def bwd(out: Tensor) -> None:
        accumulate(a, np.broadcast_to(np.expand_dims(out.grad, axis), a.data.shape).copy())
    return Tensor(a.data.sum(axis=axis), (a,), bwd)


def mean_axis(a: Tensor, axis: int) -> Tensor:
    n = a.data.shape[axis]
    def bwd(out: Tensor) -> None:
        g = np.broadcast_to(np.expand_dims(out.grad / n, axis), a.data.shape).copy()
        accumulate(a, g)
    return Tensor(a.data.mean(axis=axis), (a,), bwd)


def max_axis(a: Tensor, axis: int) -> Tensor:
    idx = np.argmax(a.data, axis=axis)  # first max wins ties
    def bwd(out: Tensor) -> None:
        g = np.zeros_like(a.data)
        np.put_along_axis(
            g, np.expand_dims(idx, axis), np.expand_dims(out.grad, axis), axis=axis
        )
        accumulate(a, g)
    return Tensor(a.data.max(axis=axis), (a,), bwd)


def softmax_axis(a: Tensor, axis: int) -> Tensor:
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)
    def bwd(out: Tensor) -> None:
        dot = (out.grad * y).sum(axis=axis, keepdims=True)
        accumulate(a, y * (out.grad - dot))
    return Tensor(y, (a,), bwd)


def logsumexp_axis(a: Tensor, axis: int) -> Tensor:
    m = a.data.max(axis=axis, keepdims=True)
    e = np.exp(a.data - m)
    s = e.sum(axis=axis, keepdims=True)
    def bwd(out: Tensor) -> None:
        accumulate(a, np.expand_dims(out.grad, axis) * (e / s))
    return Tensor(np.squeeze(m + np.log(s), axis=axis), (a,), bwd)


# --- row geometry ---------------------------------------------------------------

def l2norm_rows(a: Tensor) -> Tensor:
    if a.data.ndim != 2:
        raise DimMismatch(f"l2norm_rows: needs 2-D, got shape {a.data.shape}")
    n = np.sqrt((a.data * a.data).sum(axis=1))
    def bwd(out: Tensor) -> None:
        safe = np.where(n > 0, n, 1.0)
        accumulate(a, (out.grad / safe)[:, None] * a.data * (n > 0)[:, None])
    return Tensor(n, (a,), bwd)


def normalize_rows(a: Tensor) -> Tensor:
    """Unit-normalize each row; all-zero rows stay zero."""
    if a.data.ndim != 2:
        raise DimMismatch(f"normalize_rows: needs 2-D, got shape {a.data.shape}")
    n = np.sqrt((a.data * a.data).sum(axis=1, keepdims=True))
    safe = np.where(n > 0, n, 1.0)
    y = a.data / safe
    def bwd(out: Tensor) -> None:
        dot = (out.grad * y).sum(axis=1, keepdims=True)
        accumulate(a, (out.grad - y * dot) / safe * (n > 0))
    return Tensor(y, (a,), bwd)


def row_sum_normalize(a: Tensor) -> Tensor:
    """Scale each row of a square matrix to sum to 1.

    Rows summing to 0 fall back to a unit self-loop (identity row) and
    pass no gradient.
    """
    if a.data.ndim != 2 or a.data.shape[0] != a.data.shape[1]:
        raise DimMismatch(f"row_sum_normalize: needs a square matrix, got {a.data.shape}")
    sums = a.data.sum(axis=1, keepdims=True)
    live = sums[:, 0] != 0
    safe = np.where(live[:, None], sums, 1.0)
    y = a.data / safe
    if not live.all():
        y = y.copy()
        dead = np.flatnonzero(~live)
        y[dead] = 0.0
        y[dead, dead] = 1.0
    def bwd(out: Tensor) -> None:
        weighted = (out.grad * a.data).sum(axis=1, keepdims=True)
        g = (out.grad - weighted / safe) / safe
        accumulate(a, g * live[:, None])
    return Tensor(y, (a,), bwd)


def motion_saliency(a: Tensor, eps: float = 1e-8) -> Tensor:
    """Per-row step-to-step motion magnitude, normalized by the peak step.

    Row 0 is defined as 0. Output is ||a_t - a_{t-1}|| / (max_t' ||...|| + eps).
    """
    if a.data.ndim != 2:
        raise DimMismatch(f"motion_saliency: needs 2-D, got shape {a.data.shape}")
    rows = a.data.shape[0]
    diffs = a.data[1:] - a.data[:-1] if rows > 1 else np.zeros((0, a.data.shape[1]), a.data.dtype)
    n = np.zeros(rows, dtype=a.data.dtype)
    if rows > 1:
        n[1:] = np.sqrt((diffs * diffs).sum(axis=1))
    peak_idx = int(np.argmax(n))
    peak = n[peak_idx]
    denom = peak + eps
    y = n / denom
    def bwd(out: Tensor) -> None:
        gn = out.grad / denom
        gn[peak_idx] -= (out.grad * n).sum() / (denom * denom)
        g = np.zeros_like(a.data)
        if rows > 1:
            safe = np.where(n[1:] > 0, n[1:], 1.0)
            unit = diffs / safe[:, None] * (n[1:] > 0)[:, None]
            contrib = gn[1:, None] * unit
            g[1:] += contrib
            g[:-1] -= contrib
        accumulate(a, g)
    return Tensor(y, (a,), bwd)


# --- structure ops ----------------------------------------------------------------

def concat_rows(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != b.data.shape[1]:
        raise DimMismatch(f"concat_rows: {a.data.shape} vs {b.data.shape}")
    na = a.data.shape[0]
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad[:na])
        accumulate(b, out.grad[na:])
    return Tensor(np.concatenate([a.data, b.data], axis=0), (a, b), bwd)


def slice_rows(a: Tensor, start: int, stop: int) -> Tensor:
    rows = a.data.shape[0]
    if not (0 <= start <= stop <= rows):
        raise IndexOutOfRange(f"slice_rows: [{start}:{stop}] of {rows} rows")
    def bwd(out: Tensor) -> None:
        g = np.zeros_like(a.data)
        g[start:stop] = out.grad
        accumulate(a, g)
    return Tensor(a.data[start:stop].copy(), (a,), bwd)


def reverse_rows(a: Tensor) -> Tensor:
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad[::-1].copy())
    return Tensor(a.data[::-1].copy(), (a,), bwd)


def flatten(a: Tensor) -> Tensor:
    shape = a.data.shape
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad.reshape(shape))
    return Tensor(a.data.reshape(-1).copy(), (a,), bwd)


def stack_cols(columns: list[Tensor]) -> Tensor:
    if not columns:
        raise DimMismatch("stack_cols: no columns")
    rows = columns[0].data.shape[0]
    for c in columns:
        if c.data.ndim != 1 or c.data.shape[0] != rows:
            raise DimMismatch(f"stack_cols: column shape {c.data.shape}, expected ({rows},)")
    def bwd(out: Tensor) -> None:
        for i, c in enumerate(columns):
            accumulate(c, out.grad[:, i].copy())
    return Tensor(np.stack([c.data for c in columns], axis=1), tuple(columns), bwd)


def gather_rows(a: Tensor, indices) -> Tensor:
    idx = np.asarray(indices, dtype=np.int64)
    rows = a.data.shape[0]
    if idx.ndim != 1:
        raise IndexOutOfRange(f"gather_rows: index array must be 1-D, got {idx.shape}")
    if idx.size and (idx.min() < 0 or idx.max() >= rows):
        raise IndexOutOfRange(f"gather_rows: indices outside [0, {rows})")
    def bwd(out: Tensor) -> None:
        g = np.zeros_like(a.data)
        np.add.at(g, idx, out.grad)
        accumulate(a, g)
    return Tensor(a.data[idx].copy(), (a,), bwd)


def scatter_rows(values: Tensor, indices, num_rows: int) -> Tensor:
    """Place rows at the given positions of a zero base of num_rows rows."""
    idx = np.asarray(indices, dtype=np.int64)
    if idx.ndim != 1 or idx.shape[0] != values.data.shape[0]:
        raise IndexOutOfRange(f"scatter_rows: {idx.shape} indices for {values.data.shape[0]} rows")
    if idx.size and (idx.min() < 0 or idx.max() >= num_rows):
        raise IndexOutOfRange(f"scatter_rows: indices outside [0, {num_rows})")
    if len(np.unique(idx)) != idx.size:
        raise IndexOutOfRange("scatter_rows: duplicate indices")
    base_shape = (num_rows,) + values.data.shape[1:]
    out_data = np.zeros(base_shape, dtype=values.data.dtype)
    out_data[idx] = values.data
    def bwd(out: Tensor) -> None:
        accumulate(values, out.grad[idx].copy())
    return Tensor(out_data, (values,), bwd)


def scale_rows(a: Tensor, gates: Tensor) -> Tensor:
    """Multiply each row of a (L, d) matrix by the matching gate scalar."""
    if a.data.ndim != 2 or gates.data.ndim != 1 or gates.data.shape[0] != a.data.shape[0]:
        raise DimMismatch(f"scale_rows: {a.data.shape} with gates {gates.data.shape}")
    def bwd(out: Tensor) -> None:
        accumulate(a, out.grad * gates.data[:, None])
        accumulate(gates, (out.grad * a.data).sum(axis=1))
    return Tensor(a.data * gates.data[:, None], (a, gates), bwd)


# --- sequence ops ------------------------------------------------------------------

def conv1d_depthwise(a: Tensor, kernel: Tensor) -> Tensor:
    """Per-channel 1-D convolution over rows with symmetric zero padding.

    a is (L, d); kernel is (K, d) with odd K. Output keeps shape (L, d).
    """
    if a.data.ndim != 2 or kernel.data.ndim != 2:
        raise DimMismatch("conv1d_depthwise: needs 2-D input and kernel")
    if kernel.data.shape[1] != a.data.shape[1]:
        raise DimMismatch(
            f"conv1d_depthwise: {a.data.shape[1]} channels vs kernel {kernel.data.shape[1]}"
        )
    k = kernel.data.shape[0]
    if k % 2 != 1:
        raise DimMismatch(f"conv1d_depthwise: kernel size {k} must be odd")
    rows = a.data.shape[0]
    pad = k // 2
    padded = np.zeros((rows + 2 * pad, a.data.shape[1]), dtype=a.data.dtype)
    padded[pad:pad + rows] = a.data
    out_data = np.zeros_like(a.data)
    for j in range(k):
        out_data += kernel.data[j] * padded[j:j + rows]
    def bwd(out: Tensor) -> None:
        gpad = np.zeros_like(padded)
        gk = np.zeros_like(kernel.data)
        for j in range(k):
            gpad[j:j + rows] += kernel.data[j] * out.grad
            gk[j] = (out.grad * padded[j:j + rows]).sum(axis=0)
        accumulate(a, gpad[pad:pad + rows].copy())
        accumulate(kernel, gk)
    return Tensor(out_data, (a, kernel), bwd)


def diag_scan(decay: Tensor, inputs: Tensor) -> Tensor:
    """Linear recurrence h_t = decay * h_{t-1} + inputs_t with h_0 = 0.

    decay is (N,), inputs is (L, N); returns the stacked states (L, N).
    """
    if decay.data.ndim != 1 or inputs.data.ndim != 2 or inputs.data.shape[1] != decay.data.shape[0]:
        raise DimMismatch(f"diag_scan: decay {decay.data.shape} with inputs {inputs.data.shape}")
    rows = inputs.data.shape[0]
    h = np.zeros(decay.data.shape[0], dtype=inputs.data.dtype)
    states = np.empty_like(inputs.data)
    a = decay.data
    u = inputs.data
    for t in range(rows):
        h = a * h + u[t]
        states[t] = h
    def bwd(out: Tensor) -> None:
        g_u = np.empty_like(inputs.data)
        g_a = np.zeros_like(decay.data)
        running = np.zeros_like(decay.data)
        for t in range(rows - 1, -1, -1):
            running = out.grad[t] + a * running
            g_u[t] = running
            prev = states[t - 1] if t > 0 else np.zeros_like(decay.data)
            g_a += running * prev
        accumulate(inputs, g_u)
        accumulate(decay, g_a)
    return Tensor(states, (decay, inputs), bwd)


def layernorm_rows(a: Tensor, weight: Tensor, bias: Tensor, eps: float = 1e-5) -> Tensor:
    """Per-row layer normalization with learned scale/shift over columns."""
    if a.data.ndim != 2:
        raise DimMismatch(f"layernorm_rows: needs 2-D, got shape {a.data.shape}")
    d = a.data.shape[1]
    if weight.data.shape != (d,) or bias.data.shape != (d,):
        raise DimMismatch(f"layernorm_rows: scale/shift must be ({d},)")
    mu = a.data.mean(axis=1, keepdims=True)
    var = ((a.data - mu) ** 2).mean(axis=1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (a.data - mu) * inv
    def bwd(out: Tensor) -> None:
        dxhat = out.grad * weight.data
        term = dxhat - dxhat.mean(axis=1, keepdims=True) - xhat * (dxhat * xhat).mean(axis=1, keepdims=True)
        accumulate(a, term * inv)
        accumulate(weight, (out.grad * xhat).sum(axis=0))
        accumulate(bias, out.grad.sum(axis=0))
    return Tensor(xhat * weight.data + bias.data, (a, weight, bias), bwd)


# --- derived conveniences ------------------------------------------------------------

def as_row(v: Tensor) -> Tensor:
    """View a (d,) vector as a (1, d) matrix."""
    if v.data.ndim != 1:
        raise DimMismatch(f"as_row: needs 1-D, got shape {v.data.shape}")
    def bwd(out: Tensor) -> None:
        accumulate(v, out.grad.reshape(-1).copy())
    return Tensor(v.data.reshape(1, -1).copy(), (v,), bwd)


def cosine_rows(a: Tensor, v: Tensor) -> Tensor:
    """Cosine of each row of a against a single vector; zero rows give 0."""
    return flatten(cosine_matrix(a, as_row(v)))


def cosine_matrix(a: Tensor, b: Tensor) -> Tensor:
    """Pairwise row cosines: (L, d) x (M, d) -> (L, M)."""
    return matmul(normalize_rows(a), transpose(normalize_rows(b)))


# Dispatch table for generic tooling (gradient checks, audits).
OPS = {
    "add": add,
    "sub": sub,
    "mul": mul,
    "div": div,
    "scale": scale,
    "neg": neg,
    "sigmoid": sigmoid,
    "tanh": tanh,
    "silu": silu,
    "relu": relu,
    "softplus": softplus,
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "square": square,
    "clamp": clamp,
    "matmul": matmul,
    "matvec": matvec,
    "transpose": transpose,
    "expand_rows": expand_rows,
    "sum": total_sum,
    "mean": mean,
    "sum_axis": sum_axis,
    "mean_axis": mean_axis,
    "max_axis": max_axis,
    "softmax_axis": softmax_axis,
    "logsumexp_axis": logsumexp_axis,
    "l2norm_rows": l2norm_rows,
    "normalize_rows": normalize_rows,
    "row_sum_normalize": row_sum_normalize,
    "motion_saliency": motion_saliency,
    "concat_rows": concat_rows,
    "slice_rows": slice_rows,
    "reverse_rows": reverse_rows,
    "flatten": flatten,
    "stack_cols": stack_cols,
    "gather_rows": gather_rows,
    "scatter_rows": scatter_rows,
    "scale_rows": scale_rows,
    "conv1d_depthwise": conv1d_depthwise,
    "diag_scan": diag_scan,
    "layernorm_rows": layernorm_rows,
    "as_row": as_row,
    "cosine_rows": cosine_rows,
    "cosine_matrix": cosine_matrix,
}


def apply_op(kind: str, *args, **kwargs) -> Tensor:
    """Apply an op by name; unknown kinds raise DimMismatch-family errors early."""
    if kind not in OPS:
        raise KeyError(f"unknown op kind {kind!r}")
    return OPS[kind](*args, **kwargs)


# Operator sugar on Tensor.
Tensor.__add__ = lambda self, other: add(self, other)
Tensor.__radd__ = lambda self, other: add(other, self)
Tensor.__sub__ = lambda self, other: sub(self, other)
Tensor.__rsub__ = lambda self, other: sub(other, self)
Tensor.__mul__ = lambda self, other: mul(self, other)
Tensor.__rmul__ = lambda self, other: mul(other, self)
Tensor.__truediv__ = lambda self, other: div(self, other)
Tensor.__neg__ = lambda self: neg(self)

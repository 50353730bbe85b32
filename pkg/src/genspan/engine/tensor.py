"""Dense tensor values with reverse-mode automatic differentiation.

Tensors wrap numpy arrays in one of two global numeric modes: "test"
(64-bit, the default, required for gradient checks) and "fast" (32-bit,
used for training and benchmarks). Every op output is checked for
NaN/Inf and registered with an allocation meter whose high-water mark
backs the scaling benchmark.

The graph is implicit: each op output keeps references to its parents and
a closure that pushes gradients to them. Creation order is a topological
order, so backward() visits nodes exactly once in reverse creation order,
which makes gradient accumulation deterministic.
"""

from __future__ import annotations

import itertools
import weakref
from contextlib import contextmanager
from typing import Callable, Iterator, Sequence

import numpy as np

from ..errors import NonFiniteValue, NonScalarLoss

_DTYPES = {"test": np.float64, "fast": np.float32}

_mode = "test"
_grad_enabled = True
_node_ids = itertools.count()


def set_mode(mode: str) -> None:
    """Select the global numeric mode: "test" (float64) or "fast" (float32)."""
    global _mode
    if mode not in _DTYPES:
        raise ValueError(f"unknown engine mode {mode!r}; expected 'test' or 'fast'")
    _mode = mode


def get_mode() -> str:
    return _mode


def active_dtype() -> type:
    return _DTYPES[_mode]


@contextmanager
def engine_mode(mode: str) -> Iterator[None]:
    """Temporarily switch the numeric mode."""
    previous = _mode
    set_mode(mode)
    try:
        yield
    finally:
        set_mode(previous)


def grad_enabled() -> bool:
    return _grad_enabled


@contextmanager
def no_grad() -> Iterator[None]:
    """Skip graph recording; intermediates are freed as soon as unreferenced."""
    global _grad_enabled
    previous = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = previous


class AllocationMeter:
    """Tracks live tensor bytes and their high-water mark."""

    def __init__(self) -> None:
        self.live_bytes = 0
        self.peak_bytes = 0

    def add(self, nbytes: int) -> None:
        self.live_bytes += nbytes
        if self.live_bytes > self.peak_bytes:
            self.peak_bytes = self.live_bytes

    def release(self, nbytes: int) -> None:
        self.live_bytes -= nbytes

    def reset_peak(self) -> None:
        self.peak_bytes = self.live_bytes


meter = AllocationMeter()


class Tensor:
    """Immutable n-dimensional value node.

    Op outputs must never be mutated; optimizers may rewrite the .data of
    leaf parameters in place between graph constructions.
    """

    __slots__ = ("data", "grad", "_parents", "_backward", "_nid", "__weakref__")

    def __init__(
        self,
        data,
        _parents: Sequence["Tensor"] = (),
        _backward: Callable[["Tensor"], None] | None = None,
    ) -> None:
        arr = np.asarray(data, dtype=active_dtype())
        if not np.isfinite(arr).all():
            raise NonFiniteValue(f"non-finite values in tensor of shape {arr.shape}")
        self.data = arr
        self.grad: np.ndarray | None = None
        if _grad_enabled:
            self._parents: tuple[Tensor, ...] = tuple(_parents)
            self._backward = _backward
        else:
            self._parents = ()
            self._backward = None
        self._nid = next(_node_ids)
        meter.add(arr.nbytes)
        weakref.finalize(self, meter.release, arr.nbytes)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def grad_or_zeros(self) -> np.ndarray:
        """Accumulated gradient, or zeros if this leaf was untouched."""
        if self.grad is None:
            return np.zeros_like(self.data)
        return self.grad

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype.name})"

    # Arithmetic operators are attached by genspan.engine.ops at import time.


def accumulate(t: Tensor, g: np.ndarray) -> None:
    """Add a gradient contribution to a node (fresh array on first touch)."""
    if t.grad is None:
        t.grad = g
    else:
        t.grad = t.grad + g


def backward(loss: Tensor) -> None:
    """Reverse-mode sweep from a scalar loss down to the leaves."""
    if loss.data.size != 1:
        raise NonScalarLoss(f"loss must be scalar, got shape {loss.data.shape}")
    reachable: dict[int, Tensor] = {}
    stack = [loss]
    while stack:
        node = stack.pop()
        if node._nid in reachable:
            continue
        reachable[node._nid] = node
        stack.extend(node._parents)
    loss.grad = np.ones_like(loss.data)
    for node in sorted(reachable.values(), key=lambda n: n._nid, reverse=True):
        if node._backward is not None and node.grad is not None:
            node._backward(node)


def zero_grads(tensors) -> None:
    """Clear accumulated gradients on reused leaves (dicts or iterables)."""
    values = tensors.values() if hasattr(tensors, "values") else tensors
    for t in values:
        t.grad = None

"""Minimal deterministic tensor math with reverse-mode gradients.

Just the pieces the evaluation networks need: dense layers, rectifier,
within-rank 1D convolution, average pooling, set-wise max pooling,
concatenation and residual dense blocks, plus Adam and a versioned
binary parameter store. Everything runs on float32 numpy arrays with
float64 accumulation inside reductions; forward passes are pure
functions of parameters and inputs, so repeated evaluation is bitwise
identical. Max pooling routes gradients to the first argmax on ties.
"""

from __future__ import annotations

import struct
from typing import Sequence

import numpy as np

Array = np.ndarray


def _uniform_init(rng: np.random.Generator, fan_in: int, shape, dtype=np.float32) -> Array:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class Dense:
    """y = x @ W + b for x of shape (..., in_dim)."""

    def __init__(self, name: str, in_dim: int, out_dim: int, bias: bool = True):
        self.name = name
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.bias = bias

    def init(self, rng: np.random.Generator, params: dict) -> None:
        params[self.name + ".W"] = _uniform_init(rng, self.in_dim, (self.in_dim, self.out_dim))
        if self.bias:
            params[self.name + ".b"] = np.zeros(self.out_dim, dtype=np.float32)

    def forward(self, params: dict, x: Array):
        y = x @ params[self.name + ".W"]
        if self.bias:
            y = y + params[self.name + ".b"]
        return y, x

    def backward(self, params: dict, cache, dy: Array, grads: dict):
        x = cache
        flat_x = x.reshape(-1, self.in_dim)
        flat_dy = dy.reshape(-1, self.out_dim)
        _accum(grads, self.name + ".W", flat_x.T @ flat_dy)
        if self.bias:
            _accum(grads, self.name + ".b", flat_dy.sum(axis=0, dtype=np.float64).astype(dy.dtype))
        return dy @ params[self.name + ".W"].T


class Relu:
    name = "relu"

    def init(self, rng, params):
        pass

    def forward(self, params, x: Array):
        mask = x > 0
        return x * mask, mask

    def backward(self, params, cache, dy: Array, grads):
        return dy * cache


class Conv1d:
    """1D convolution over the last axis of (..., length) inputs.

    Produces (..., positions, channels); used with stride 4 so every
    window sits inside one rank's four count slots.
    """

    def __init__(self, name: str, kernel: int, stride: int, channels: int, length: int):
        self.name = name
        self.kernel = kernel
        self.stride = stride
        self.channels = channels
        self.length = length
        self.positions = (length - kernel) // stride + 1

    def init(self, rng, params):
        params[self.name + ".W"] = _uniform_init(rng, self.kernel, (self.kernel, self.channels))
        params[self.name + ".b"] = np.zeros(self.channels, dtype=np.float32)

    def _windows(self, x: Array) -> Array:
        idx = np.arange(self.positions)[:, None] * self.stride + np.arange(self.kernel)[None, :]
        return x[..., idx]  # (..., positions, kernel)

    def forward(self, params, x: Array):
        win = self._windows(x)
        y = win @ params[self.name + ".W"] + params[self.name + ".b"]
        return y, win

    def backward(self, params, cache, dy: Array, grads):
        win = cache
        flat_win = win.reshape(-1, self.kernel)
        flat_dy = dy.reshape(-1, self.channels)
        _accum(grads, self.name + ".W", flat_win.T @ flat_dy)
        _accum(grads, self.name + ".b", flat_dy.sum(axis=0, dtype=np.float64).astype(dy.dtype))
        dwin = dy @ params[self.name + ".W"].T  # (..., positions, kernel)
        dx = np.zeros(dy.shape[:-2] + (self.length,), dtype=dy.dtype)
        for p in range(self.positions):
            start = p * self.stride
            dx[..., start:start + self.kernel] += dwin[..., p, :]
        return dx


class AvgPool:
    """Mean over one axis, accumulated in float64."""

    name = "avgpool"

    def __init__(self, axis: int = -2):
        self.axis = axis

    def init(self, rng, params):
        pass

    def forward(self, params, x: Array):
        y = x.mean(axis=self.axis, dtype=np.float64).astype(x.dtype)
        return y, (x.shape, x.dtype)

    def backward(self, params, cache, dy: Array, grads):
        shape, dtype = cache
        n = shape[self.axis]
        return (np.expand_dims(dy, self.axis) / np.asarray(n, dtype=dtype)) * np.ones(shape, dtype=dtype)


def set_max_pool(x: Array):
    """Element-wise max over axis 0 of (set_size, features); gradient
    flows to the first maximal element per feature."""
    idx = np.argmax(x, axis=0)  # first argmax on ties
    out = x[idx, np.arange(x.shape[1])]
    return out, (idx, x.shape, x.dtype)


def set_max_pool_backward(cache, dy: Array) -> Array:
    idx, shape, dtype = cache
    dx = np.zeros(shape, dtype=dtype)
    dx[idx, np.arange(shape[1])] = dy
    return dx


def concat(parts: Sequence[Array], axis: int = -1):
    sizes = [p.shape[axis] for p in parts]
    return np.concatenate(parts, axis=axis), (sizes, axis)


def concat_backward(cache, dy: Array) -> list[Array]:
    sizes, axis = cache
    return list(np.split(dy, np.cumsum(sizes)[:-1], axis=axis))


class ResidualBlock:
    """Dense block with a skip path: y = skip(x) + W2 relu(W1 x + b1) + b2.

    The skip is the identity when the widths match, otherwise a learned
    projection. With matching widths a zero-initialized second layer
    makes the block an exact identity map.
    """

    def __init__(self, name: str, in_dim: int, out_dim: int):
        self.name = name
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.fc1 = Dense(name + ".fc1", in_dim, out_dim)
        self.fc2 = Dense(name + ".fc2", out_dim, out_dim)
        self.proj = Dense(name + ".proj", in_dim, out_dim, bias=False) if in_dim != out_dim else None
        self.r1 = Relu()

    def init(self, rng, params):
        self.fc1.init(rng, params)
        self.fc2.init(rng, params)
        if self.proj:
            self.proj.init(rng, params)

    def forward(self, params, x: Array):
        h, c1 = self.fc1.forward(params, x)
        a, cr1 = self.r1.forward(params, h)
        z, c2 = self.fc2.forward(params, a)
        skip, cp = self.proj.forward(params, x) if self.proj else (x, None)
        return z + skip, (c1, cr1, c2, cp)

    def backward(self, params, cache, dy: Array, grads):
        c1, cr1, c2, cp = cache
        da = self.fc2.backward(params, c2, dy, grads)
        dh = self.r1.backward(params, cr1, da, grads)
        dx = self.fc1.backward(params, c1, dh, grads)
        if self.proj:
            dx = dx + self.proj.backward(params, cp, dy, grads)
        else:
            dx = dx + dy
        return dx


class Sequential:
    """An ordered layer stack with a shared named-parameter store."""

    def __init__(self, layers: list):
        self.layers = layers

    def init(self, rng: np.random.Generator, params: dict | None = None) -> dict:
        params = params if params is not None else {}
        for layer in self.layers:
            layer.init(rng, params)
        return params

    def forward(self, params: dict, x: Array):
        caches = []
        for layer in self.layers:
            x, c = layer.forward(params, x)
            caches.append(c)
        return x, caches

    def backward(self, params: dict, caches, dy: Array, grads: dict) -> Array:
        for layer, cache in zip(reversed(self.layers), reversed(caches)):
            dy = layer.backward(params, cache, dy, grads)
        return dy


def _accum(grads: dict, name: str, value: Array) -> None:
    if name in grads:
        grads[name] = grads[name] + value
    else:
        grads[name] = value


class Adam:
    """Adaptive moment estimation; deterministic given the same inputs."""

    def __init__(self, lr: float = 1e-4, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: dict[str, Array] = {}
        self.v: dict[str, Array] = {}

    def step(self, params: dict, grads: dict) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bias1 = 1.0 - b1 ** self.t
        bias2 = 1.0 - b2 ** self.t
        for name, g in grads.items():
            g = g.astype(np.float32)
            m = self.m.get(name)
            if m is None:
                m = np.zeros_like(params[name])
                v = np.zeros_like(params[name])
            else:
                v = self.v[name]
            m = b1 * m + (1 - b1) * g
            v = b2 * v + (1 - b2) * (g * g)
            self.m[name] = m
            self.v[name] = v
            params[name] = params[name] - self.lr * (m / bias1) / (np.sqrt(v / bias2) + self.eps)


# ---------------------------------------------------------------------------
# Versioned flat binary parameter files
# ---------------------------------------------------------------------------

_MAGIC = b"DDZW"
_FORMAT_VERSION = 1
_DTYPES = {0: np.float32, 1: np.float64, 2: np.int64}
_DTYPE_CODES = {np.dtype(v): k for k, v in _DTYPES.items()}


def save_params(path: str, params: dict[str, Array]) -> None:
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<II", _FORMAT_VERSION, len(params)))
        for name in sorted(params):
            arr = np.ascontiguousarray(params[name])
            encoded = name.encode()
            f.write(struct.pack("<H", len(encoded)))
            f.write(encoded)
            f.write(struct.pack("<BB", _DTYPE_CODES[arr.dtype], arr.ndim))
            f.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            f.write(arr.tobytes())


def load_params(path: str, expected_shapes: dict[str, tuple] | None = None) -> dict[str, Array]:
    params: dict[str, Array] = {}
    with open(path, "rb") as f:
        if f.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a parameter file")
        version, count = struct.unpack("<II", f.read(8))
        if version != _FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported format version {version}")
        for _ in range(count):
            (nlen,) = struct.unpack("<H", f.read(2))
            name = f.read(nlen).decode()
            code, ndim = struct.unpack("<BB", f.read(2))
            shape = struct.unpack(f"<{ndim}I", f.read(4 * ndim))
            dtype = np.dtype(_DTYPES[code])
            n = int(np.prod(shape)) if shape else 1
            params[name] = np.frombuffer(f.read(n * dtype.itemsize), dtype=dtype).reshape(shape).copy()
    if expected_shapes is not None:
        for name, shape in expected_shapes.items():
            if name not in params:
                raise ValueError(f"{path}: missing parameter {name}")
            if tuple(params[name].shape) != tuple(shape):
                raise ValueError(f"{path}: {name} has shape {params[name].shape}, expected {shape}")
    return params

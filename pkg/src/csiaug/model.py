"""Compact convolutional classifier, written directly in numpy (float64).

Architecture: three 3x3 convolution blocks (same padding, ReLU, 2x2 max
pooling) with 16/32/64 feature maps, global average pooling, and an affine
map to 3 class scores, trained with softmax cross-entropy.  It is the
pluggable stand-in for a heavyweight image backbone: spectrograms are small
single-channel images, and a model this size trains on a CPU in seconds.

Backpropagation is implemented by hand, so parameter gradients are analytic
and can be validated against finite differences.  All math runs in float64;
on one platform, repeated runs from the same stream are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import Stream

Params = dict


@dataclass(frozen=True)
class ClassifierConfig:
    """Input geometry and block widths, plus the backbone to instantiate.

    ``backbone`` names a factory registered with
    :func:`csiaug.harness.register_backbone`; "reference" is the numpy CNN
    below.  Any object exposing ``init_params`` / ``forward`` / ``predict``
    / ``loss`` / ``loss_and_grad`` with the same signatures can stand in.
    """

    height: int = 52
    width: int = 400
    channels: tuple[int, ...] = (16, 32, 64)
    n_classes: int = 3
    kernel: int = 3
    backbone: str = "reference"

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(int(c) for c in self.channels))
        if self.height < 8 or self.width < 8:
            raise ValueError(f"input {self.height}x{self.width} too small for 3 pooling stages")
        if self.kernel % 2 != 1:
            raise ValueError("kernel size must be odd")


# ---------------------------------------------------------------------------
# Layer primitives
# ---------------------------------------------------------------------------

def _conv_forward(x, w, b):
    """Same-padding stride-1 convolution via an unrolled patch matrix."""
    n, cin, hh, ww = x.shape
    cout, _, k, _ = w.shape
    p = k // 2
    xp = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p)))
    cols = np.empty((n, cin, k, k, hh, ww), dtype=x.dtype)
    for i in range(k):
        for j in range(k):
            cols[:, :, i, j] = xp[:, :, i:i + hh, j:j + ww]
    cols2 = cols.reshape(n, cin * k * k, hh * ww)
    out = np.matmul(w.reshape(cout, -1), cols2).reshape(n, cout, hh, ww)
    out += b[None, :, None, None]
    return out, (cols2, x.shape)


def _conv_backward(dout, w, cache):
    cols2, xshape = cache
    n, cin, hh, ww = xshape
    cout, _, k, _ = w.shape
    p = k // 2
    dflat = dout.reshape(n, cout, hh * ww)
    db = dflat.sum(axis=(0, 2))
    dw = np.matmul(dflat, cols2.transpose(0, 2, 1)).sum(axis=0).reshape(w.shape)
    dcols = np.matmul(w.reshape(cout, -1).T, dflat).reshape(n, cin, k, k, hh, ww)
    dxp = np.zeros((n, cin, hh + 2 * p, ww + 2 * p), dtype=dout.dtype)
    for i in range(k):
        for j in range(k):
            dxp[:, :, i:i + hh, j:j + ww] += dcols[:, :, i, j]
    return dxp[:, :, p:p + hh, p:p + ww], dw, db


def _maxpool_forward(x):
    """2x2 max pooling, stride 2, trailing odd row/column dropped."""
    n, c, hh, ww = x.shape
    h2, w2 = hh // 2, ww // 2
    xr = (x[:, :, :h2 * 2, :w2 * 2]
          .reshape(n, c, h2, 2, w2, 2)
          .transpose(0, 1, 2, 4, 3, 5)
          .reshape(n, c, h2, w2, 4))
    idx = xr.argmax(axis=-1)
    out = np.take_along_axis(xr, idx[..., None], axis=-1)[..., 0]
    return out, (idx, x.shape)


def _maxpool_backward(dout, cache):
    idx, xshape = cache
    n, c, hh, ww = xshape
    h2, w2 = hh // 2, ww // 2
    dxr = np.zeros((n, c, h2, w2, 4), dtype=dout.dtype)
    np.put_along_axis(dxr, idx[..., None], dout[..., None], axis=-1)
    dxc = (dxr.reshape(n, c, h2, w2, 2, 2)
           .transpose(0, 1, 2, 4, 3, 5)
           .reshape(n, c, h2 * 2, w2 * 2))
    dx = np.zeros(xshape, dtype=dout.dtype)
    dx[:, :, :h2 * 2, :w2 * 2] = dxc
    return dx


def softmax_cross_entropy(logits, y):
    """Mean cross-entropy loss and its gradient w.r.t. the logits."""
    zmax = logits.max(axis=1, keepdims=True)
    ez = np.exp(logits - zmax)
    sez = ez.sum(axis=1, keepdims=True)
    logp = (logits - zmax) - np.log(sez)
    n = logits.shape[0]
    loss = -logp[np.arange(n), y].mean()
    dlogits = ez / sez
    dlogits[np.arange(n), y] -= 1.0
    dlogits /= n
    return loss, dlogits


# ---------------------------------------------------------------------------
# Classifier
# ---------------------------------------------------------------------------

class ReferenceClassifier:
    """Functional-style model: parameters live in a plain dict of arrays."""

    def __init__(self, cfg: ClassifierConfig):
        self.cfg = cfg

    def init_params(self, stream: Stream) -> Params:
        """He-normal weights, zero biases, drawn from the given stream."""
        params: Params = {}
        cin = 1
        k = self.cfg.kernel
        for li, cout in enumerate(self.cfg.channels):
            fan_in = cin * k * k
            scale = np.sqrt(2.0 / fan_in)
            w = np.array(stream.normals(cout * fan_in), dtype=np.float64)
            params[f"conv{li}_w"] = scale * w.reshape(cout, cin, k, k)
            params[f"conv{li}_b"] = np.zeros(cout, dtype=np.float64)
            cin = cout
        feat = self.cfg.channels[-1]
        scale = np.sqrt(1.0 / feat)
        w = np.array(stream.normals(self.cfg.n_classes * feat), dtype=np.float64)
        params["fc_w"] = scale * w.reshape(self.cfg.n_classes, feat)
        params["fc_b"] = np.zeros(self.cfg.n_classes, dtype=np.float64)
        return params

    def _head(self, params, pooled):
        feat = pooled.mean(axis=(2, 3))
        return feat, feat @ params["fc_w"].T + params["fc_b"]

    def forward(self, params: Params, x: np.ndarray) -> np.ndarray:
        """Class scores for a batch ``x`` of shape (n, 1, height, width)."""
        out = x
        for li in range(len(self.cfg.channels)):
            z, _ = _conv_forward(out, params[f"conv{li}_w"], params[f"conv{li}_b"])
            out, _ = _maxpool_forward(np.maximum(z, 0.0))
        return self._head(params, out)[1]

    def predict(self, params: Params, x: np.ndarray) -> np.ndarray:
        return self.forward(params, x).argmax(axis=1)

    def loss(self, params: Params, x: np.ndarray, y: np.ndarray) -> float:
        loss, _ = softmax_cross_entropy(self.forward(params, x), y)
        return float(loss)

    def loss_and_grad(self, params: Params, x: np.ndarray, y: np.ndarray):
        """Mean cross-entropy and analytic gradients for every parameter."""
        n_blocks = len(self.cfg.channels)
        caches = []
        out = x
        for li in range(n_blocks):
            z, ccache = _conv_forward(out, params[f"conv{li}_w"], params[f"conv{li}_b"])
            a = np.maximum(z, 0.0)
            out, pcache = _maxpool_forward(a)
            caches.append((ccache, z, pcache))
        feat, logits = self._head(params, out)
        loss, dlogits = softmax_cross_entropy(logits, y)

        grads: Params = {
            "fc_w": dlogits.T @ feat,
            "fc_b": dlogits.sum(axis=0),
        }
        dfeat = dlogits @ params["fc_w"]
        hw = out.shape[2] * out.shape[3]
        dout = np.broadcast_to(dfeat[:, :, None, None] / hw, out.shape)
        for li in reversed(range(n_blocks)):
            ccache, z, pcache = caches[li]
            da = _maxpool_backward(dout, pcache)
            dz = da * (z > 0.0)
            dout, dw, db = _conv_backward(dz, params[f"conv{li}_w"], ccache)
            grads[f"conv{li}_w"] = dw
            grads[f"conv{li}_b"] = db
        return float(loss), grads


class Adam:
    """Adaptive moment estimation with bias correction."""

    def __init__(self, params: Params, lr: float = 1e-4,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, params: Params, grads: Params) -> None:
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for key, g in grads.items():
            self.m[key] = self.beta1 * self.m[key] + (1.0 - self.beta1) * g
            self.v[key] = self.beta2 * self.v[key] + (1.0 - self.beta2) * (g * g)
            mhat = self.m[key] / bc1
            vhat = self.v[key] / bc2
            params[key] = params[key] - self.lr * mhat / (np.sqrt(vhat) + self.eps)


def copy_params(params: Params) -> Params:
    return {k: v.copy() for k, v in params.items()}

import numpy as np
import pytest

from csiaug.spectro import Spectrogram


@pytest.fixture
def rand_spec():
    """Factory for random non-negative spectrograms with a seeded generator."""
    def make(w=8, h=5, seed=0, scale=1.0):
        rng = np.random.Generator(np.random.PCG64(seed))
        return Spectrogram(scale * rng.random((w, h)))
    return make


def finite_difference_grads(loss_fn, params, coords, step=1e-6):
    """Central finite differences of ``loss_fn(params)`` at chosen coordinates.

    ``coords`` is a list of (param name, flat index).  The parameters are
    perturbed in place and restored, so ``loss_fn`` must read them fresh on
    every call.
    """
    out = []
    for name, flat in coords:
        arr = params[name]
        orig = arr.flat[flat]
        arr.flat[flat] = orig + step
        up = loss_fn(params)
        arr.flat[flat] = orig - step
        down = loss_fn(params)
        arr.flat[flat] = orig
        out.append((up - down) / (2.0 * step))
    return out


def relative_error(a: float, b: float, floor: float = 1e-8) -> float:
    return abs(a - b) / max(abs(a), abs(b), floor)

from __future__ import annotations

from typing import TYPE_CHECKING, Hashable, Iterable, Sequence

import numpy as np

from .blockalg import Element, Functional

if TYPE_CHECKING:
    from .core import DqgSpec


def make_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    """Returns a generator; passes existing generators through untouched."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_matrix(rng: np.random.Generator, n: int, m: int | None = None) -> np.ndarray:
    """A complex Gaussian ``n x m`` matrix."""
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    x = random_matrix(rng, n)
    return (x + x.conj().T) / 2


def random_element(
    spec: "DqgSpec",
    rng: np.random.Generator,
    support: Iterable[Hashable] | None = None,
    blocks: int = 1,
    pool: Sequence[Hashable] | None = None,
) -> Element:
    """Draws a random element on ``support``, or on ``blocks`` labels drawn from ``pool``.

    Args:
        spec (:obj:`DqgSpec`): The spec whose block sizes are used.
        rng (:obj:`numpy.random.Generator`): Source of randomness.
        support (Iterable, optional): Exact support to fill. Overrides ``blocks``.
        blocks (int): How many distinct labels to draw when ``support`` is not given.
        pool (Sequence, optional): Labels to draw from. Defaults to the spec's window.
    """
    if support is None:
        pool = list(pool if pool is not None else spec.window)
        k = min(blocks, len(pool))
        picks = rng.choice(len(pool), size=k, replace=False)
        support = [pool[int(i)] for i in picks]
    return Element({label: random_matrix(rng, spec.dim(label)) for label in support})


def random_positive(spec: "DqgSpec", rng: np.random.Generator, **kwargs) -> Element:
    """``y* y`` for a random ``y``."""
    y = random_element(spec, rng, **kwargs)
    return Element({k: v.conj().T @ v for k, v in y.blocks.items()})


def random_functional(
    spec: "DqgSpec", rng: np.random.Generator, support: Iterable[Hashable] | None = None, blocks: int = 1
) -> Functional:
    elem = random_element(spec, rng, support=support, blocks=blocks)
    return Functional(dict(elem.blocks))


def psd_sqrt(matrix: np.ndarray, clamp: float = 1e-14) -> np.ndarray:
    """Square root of a Hermitian positive semidefinite matrix by eigendecomposition."""
    herm = (matrix + matrix.conj().T) / 2
    w, v = np.linalg.eigh(herm)
    w = np.clip(w, clamp, None)
    return (v * np.sqrt(w)) @ v.conj().T


def psd_power(matrix: np.ndarray, power: float, clamp: float = 1e-14) -> np.ndarray:
    herm = (matrix + matrix.conj().T) / 2
    w, v = np.linalg.eigh(herm)
    w = np.clip(w, clamp, None)
    return (v * w**power) @ v.conj().T


def label_key(label: Hashable) -> tuple:
    """Sort key that orders numeric-looking labels numerically and the rest lexically."""
    text = str(label)
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return (0, float(num) / float(den), text)
        return (0, float(text), text)
    except ValueError:
        return (1, 0.0, text)

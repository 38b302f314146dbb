"""Blockwise complex matrix algebra for finitely supported data.

Everything here works on direct sums of full matrix algebras.  An
:class:`Element` is a finite map ``label -> n x n`` matrix, a
:class:`TensorElement` carries several tensor legs per block, and a
:class:`Functional` is stored through density matrices so that
``f(x) = sum_a trace(F_a @ x_a)``.

Leg ordering is row-major throughout: a block with legs of dimensions
``(d_0, ..., d_k)`` is a square matrix of size ``d_0 * ... * d_k`` whose
row index is ``((i_0 * d_1) + i_1) * d_2 + ...``, i.e. the ordering of
``numpy.kron``.  Every reshape across legs goes through :func:`permute_legs`,
:func:`conjugate_leg`, :func:`multiply_legs`, :func:`map_leg` or
:func:`slice_leg`.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from types import MappingProxyType
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np
from numpy.typing import ArrayLike

from .exceptions import StructuralError

__all__ = (
    "PRUNE_TOL",
    "BlockIndex",
    "Element",
    "TensorElement",
    "Functional",
    "RepBlockMatrix",
    "elem_product",
    "elem_adjoint",
    "elem_opnorm",
    "slice_T",
    "id_tensor_f",
    "permute_legs",
    "conjugate_leg",
    "multiply_legs",
    "map_leg",
    "slice_leg",
    "embed_on_leg",
    "tensor_product",
    "pullback_density",
)

PRUNE_TOL = 1e-14

Label = Hashable


def _frozen(matrix: ArrayLike) -> np.ndarray:
    arr = np.array(matrix, dtype=complex)
    arr.setflags(write=False)
    return arr


def _square(matrix: np.ndarray, where: str) -> np.ndarray:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise StructuralError(f"{where}: expected a square matrix, got shape {matrix.shape}")
    return matrix


def _opnorm(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(np.linalg.norm(matrix, 2))


@dataclass(frozen=True)
class BlockIndex:
    """Represents one matrix block ``M_n`` of the direct sum."""

    label: Label
    """The block label, unique within a spec."""

    dim: int
    """The matrix size ``n``."""

    def __post_init__(self):
        if int(self.dim) < 1:
            raise StructuralError(f"block {self.label!r} has dimension {self.dim} < 1")


class Element:
    """A finitely supported element of the block algebra.

    Absent blocks are zero.  Blocks whose Frobenius norm drops below
    :data:`PRUNE_TOL` are pruned on construction.

    Args:
        blocks (Mapping, optional): ``label -> square matrix``.
    """

    __slots__ = ("blocks",)

    def __init__(self, blocks: Mapping[Label, ArrayLike] | None = None):
        data: dict[Label, np.ndarray] = {}
        for label, matrix in (blocks or {}).items():
            arr = _square(np.asarray(matrix, dtype=complex), f"block {label!r}")
            if np.linalg.norm(arr) >= PRUNE_TOL:
                data[label] = _frozen(arr)
        self.blocks = MappingProxyType(data)

    def __repr__(self) -> str:
        shapes = ", ".join(f"{k!r}: {v.shape[0]}" for k, v in self.blocks.items())
        return f"<Element {{{shapes}}}>"

    @property
    def support(self) -> frozenset:
        return frozenset(self.blocks)

    def get(self, label: Label, dim: int | None = None) -> np.ndarray | None:
        """Returns the block at ``label``; zeros of size ``dim`` if absent and ``dim`` given."""
        if label in self.blocks:
            return self.blocks[label]
        if dim is None:
            return None
        return np.zeros((dim, dim), dtype=complex)

    def is_zero(self) -> bool:
        return not self.blocks

    def _combine(self, other: "Element", sign: float) -> "Element":
        data = {k: np.array(v) for k, v in self.blocks.items()}
        for label, matrix in other.blocks.items():
            if label in data:
                if data[label].shape != matrix.shape:
                    raise StructuralError(
                        f"block {label!r}: shape {data[label].shape} vs {matrix.shape}"
                    )
                data[label] = data[label] + sign * matrix
            else:
                data[label] = sign * matrix
        return Element(data)

    def __add__(self, other: "Element") -> "Element":
        return self._combine(other, 1.0)

    def __sub__(self, other: "Element") -> "Element":
        return self._combine(other, -1.0)

    def __neg__(self) -> "Element":
        return Element({k: -v for k, v in self.blocks.items()})

    def __mul__(self, scalar: complex) -> "Element":
        return Element({k: scalar * v for k, v in self.blocks.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "Element") -> "Element":
        return elem_product(self, other)

    def distance(self, other: "Element") -> float:
        """Operator-norm distance ``||self - other||``."""
        return elem_opnorm(self - other)


def elem_product(a: Element, b: Element) -> Element:
    """Blockwise product in the direct sum; supports multiply only where they meet."""
    out = {}
    for label in a.support & b.support:
        x, y = a.blocks[label], b.blocks[label]
        if x.shape != y.shape:
            raise StructuralError(f"block {label!r}: shape {x.shape} vs {y.shape}")
        out[label] = x @ y
    return Element(out)


def elem_adjoint(a: Element) -> Element:
    return Element({k: v.conj().T for k, v in a.blocks.items()})


def elem_opnorm(a: Element) -> float:
    """Largest singular value over all blocks; zero for the zero element."""
    return max((_opnorm(v) for v in a.blocks.values()), default=0.0)


# leg routines


def permute_legs(matrix: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorders tensor legs of an operator; new leg ``i`` is old leg ``perm[i]``."""
    dims = tuple(int(d) for d in dims)
    k = len(dims)
    if sorted(perm) != list(range(k)):
        raise StructuralError(f"{perm!r} is not a permutation of {k} legs")
    t = np.asarray(matrix).reshape(dims + dims)
    axes = list(perm) + [k + p for p in perm]
    n = prod(dims)
    return t.transpose(axes).reshape(n, n)


def embed_on_leg(matrix: np.ndarray, dims: Sequence[int], leg: int) -> np.ndarray:
    """``1 (x) ... (x) matrix (x) ... (x) 1`` with ``matrix`` on ``leg``."""
    before = prod(dims[:leg])
    after = prod(dims[leg + 1 :])
    return np.kron(np.kron(np.eye(before), matrix), np.eye(after))


def conjugate_leg(
    matrix: np.ndarray,
    dims: Sequence[int],
    leg: int,
    iso: np.ndarray,
    out_dims: Sequence[int],
    mult: int,
) -> np.ndarray:
    """Applies ``x -> V (x (x) 1_m) V*`` on one leg, splitting it into ``out_dims``.

    ``V`` has shape ``(prod(out_dims), dims[leg] * mult)`` with the input index
    ordered (leg, multiplicity).  Returns the operator on the new legs
    ``dims[:leg] + out_dims + dims[leg + 1:]``.
    """
    dims = tuple(int(d) for d in dims)
    k = len(dims)
    if iso.shape != (prod(out_dims), dims[leg] * mult):
        raise StructuralError(
            f"isometry shape {iso.shape} does not map {dims[leg]}x{mult} onto {tuple(out_dims)}"
        )
    t = np.kron(matrix, np.eye(mult))
    # move the multiplicity leg right behind the target leg
    perm = list(range(leg + 1)) + [k] + list(range(leg + 1, k))
    t = permute_legs(t, dims + (mult,), perm)
    w = embed_on_leg(iso, dims[:leg] + (dims[leg] * mult,) + dims[leg + 1 :], leg)
    return w @ t @ w.conj().T


def multiply_legs(matrix: np.ndarray, dims: Sequence[int], i: int, j: int) -> np.ndarray:
    """Multiplies leg ``i`` by leg ``j`` as operators (``i`` on the left) and drops ``j``.

    On a simple tensor this sends ``... A_i ... B_j ...`` to ``... (A B)_i ...``.
    """
    dims = tuple(int(d) for d in dims)
    k = len(dims)
    if i == j or dims[i] != dims[j]:
        raise StructuralError(f"cannot multiply legs {i} and {j} of dims {dims}")
    t = np.asarray(matrix).reshape(dims + dims)
    rows = list(range(k))
    cols = list(range(k, 2 * k))
    shared = 2 * k
    rows_in = rows.copy()
    cols_in = cols.copy()
    rows_in[j] = shared
    cols_in[i] = shared
    out_rows = [rows[p] for p in range(k) if p != j]
    out_cols = [(cols[j] if p == i else cols[p]) for p in range(k) if p != j]
    res = np.einsum(t, rows_in + cols_in, out_rows + out_cols)
    n = prod(d for p, d in enumerate(dims) if p != j)
    return res.reshape(n, n)


def map_leg(
    matrix: np.ndarray, dims: Sequence[int], leg: int, linear: np.ndarray, out_dim: int
) -> np.ndarray:
    """Applies a linear map of matrices to one leg.

    ``linear`` acts on row-major vectorized matrices: shape ``(out_dim**2, dims[leg]**2)``.
    """
    dims = tuple(int(d) for d in dims)
    k = len(dims)
    n = dims[leg]
    t = np.asarray(matrix).reshape(dims + dims)
    t = np.moveaxis(t, (leg, k + leg), (2 * k - 2, 2 * k - 1))
    lead = t.shape[:-2]
    t = t.reshape(lead + (n * n,)) @ linear.T
    t = t.reshape(lead + (out_dim, out_dim))
    t = np.moveaxis(t, (2 * k - 2, 2 * k - 1), (leg, k + leg))
    new = dims[:leg] + (out_dim,) + dims[leg + 1 :]
    size = prod(new)
    return t.reshape(size, size)


def slice_leg(matrix: np.ndarray, dims: Sequence[int], leg: int, density: np.ndarray) -> np.ndarray:
    """Contracts one leg against the functional ``x -> trace(density @ x)``."""
    dims = tuple(int(d) for d in dims)
    k = len(dims)
    t = np.asarray(matrix).reshape(dims + dims)
    rows = list(range(k))
    cols = list(range(k, 2 * k))
    out = [r for p, r in enumerate(rows) if p != leg] + [c for p, c in enumerate(cols) if p != leg]
    res = np.einsum(t, rows + cols, density, [cols[leg], rows[leg]], out)
    n = prod(d for p, d in enumerate(dims) if p != leg)
    return res.reshape(n, n)


class TensorElement:
    """A finitely supported element of a tensor power of block algebras.

    Blocks are keyed by tuples of labels, one label per leg.  Each block
    remembers its leg dimensions so the leg routines can reshape it.

    Args:
        blocks (Mapping, optional): ``key -> (leg_dims, matrix)``.
    """

    __slots__ = ("blocks", "legdims")

    def __init__(self, blocks: Mapping[tuple, tuple[Sequence[int], ArrayLike]] | None = None):
        data: dict[tuple, np.ndarray] = {}
        legdims: dict[tuple, tuple[int, ...]] = {}
        for key, (dims, matrix) in (blocks or {}).items():
            dims = tuple(int(d) for d in dims)
            if len(dims) != len(key):
                raise StructuralError(f"tensor block {key!r}: {len(dims)} dims for {len(key)} legs")
            arr = _square(np.asarray(matrix, dtype=complex), f"tensor block {key!r}")
            if arr.shape[0] != prod(dims):
                raise StructuralError(
                    f"tensor block {key!r}: shape {arr.shape} does not match legs {dims}"
                )
            if np.linalg.norm(arr) >= PRUNE_TOL:
                data[key] = _frozen(arr)
                legdims[key] = dims
        self.blocks = MappingProxyType(data)
        self.legdims = MappingProxyType(legdims)

    def __repr__(self) -> str:
        return f"<TensorElement {len(self.blocks)} blocks>"

    @property
    def support(self) -> frozenset:
        return frozenset(self.blocks)

    def items(self) -> Iterable[tuple[tuple, tuple[int, ...], np.ndarray]]:
        for key, matrix in self.blocks.items():
            yield key, self.legdims[key], matrix

    def is_zero(self) -> bool:
        return not self.blocks

    def _combine(self, other: "TensorElement", sign: float) -> "TensorElement":
        data = {k: (self.legdims[k], np.array(v)) for k, v in self.blocks.items()}
        for key, dims, matrix in other.items():
            if key in data:
                if data[key][0] != dims:
                    raise StructuralError(f"tensor block {key!r}: legs {data[key][0]} vs {dims}")
                data[key] = (dims, data[key][1] + sign * matrix)
            else:
                data[key] = (dims, sign * matrix)
        return TensorElement(data)

    def __add__(self, other: "TensorElement") -> "TensorElement":
        return self._combine(other, 1.0)

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self._combine(other, -1.0)

    def __mul__(self, scalar: complex) -> "TensorElement":
        return TensorElement({k: (d, scalar * m) for k, d, m in self.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "TensorElement") -> "TensorElement":
        out = {}
        for key in self.support & other.support:
            if self.legdims[key] != other.legdims[key]:
                raise StructuralError(f"tensor block {key!r}: leg mismatch")
            out[key] = (self.legdims[key], self.blocks[key] @ other.blocks[key])
        return TensorElement(out)

    def adjoint(self) -> "TensorElement":
        return TensorElement({k: (d, m.conj().T) for k, d, m in self.items()})

    def opnorm(self) -> float:
        return max((_opnorm(m) for m in self.blocks.values()), default=0.0)

    def distance(self, other: "TensorElement") -> float:
        return (self - other).opnorm()

    def multiply_leg(self, leg: int, a: Element, side: str = "left") -> "TensorElement":
        """Multiplies ``leg`` by the element ``a`` on the given side."""
        out = {}
        for key, dims, matrix in self.items():
            block = a.get(key[leg])
            if block is None:
                continue
            op = embed_on_leg(block, dims, leg)
            out[key] = (dims, op @ matrix if side == "left" else matrix @ op)
        return TensorElement(out)


def tensor_product(*elements: Element) -> TensorElement:
    """The simple tensor ``a_1 (x) ... (x) a_k`` as a :class:`TensorElement`."""
    keys: list[tuple[tuple, tuple[int, ...], np.ndarray]] = [((), (), np.ones((1, 1)))]
    for elem in elements:
        keys = [
            (key + (label,), dims + (m.shape[0],), np.kron(acc, m))
            for key, dims, acc in keys
            for label, m in elem.blocks.items()
        ]
    return TensorElement({key: (dims, m) for key, dims, m in keys})


class Functional:
    """A finitely supported linear functional ``f(x) = sum_a trace(F_a @ x_a)``.

    Args:
        densities (Mapping, optional): ``label -> density matrix F_a``.
    """

    __slots__ = ("densities",)

    def __init__(self, densities: Mapping[Label, ArrayLike] | None = None):
        data = {}
        for label, matrix in (densities or {}).items():
            arr = _square(np.asarray(matrix, dtype=complex), f"density {label!r}")
            if np.linalg.norm(arr) >= PRUNE_TOL:
                data[label] = _frozen(arr)
        self.densities = MappingProxyType(data)

    def __repr__(self) -> str:
        return f"<Functional on {sorted(map(str, self.densities))}>"

    @property
    def support(self) -> frozenset:
        return frozenset(self.densities)

    def __call__(self, a: Element) -> complex:
        total = 0j
        for label in self.support & a.support:
            total += np.trace(self.densities[label] @ a.blocks[label])
        return complex(total)

    def __add__(self, other: "Functional") -> "Functional":
        data = {k: np.array(v) for k, v in self.densities.items()}
        for label, matrix in other.densities.items():
            data[label] = data[label] + matrix if label in data else matrix
        return Functional(data)

    def __sub__(self, other: "Functional") -> "Functional":
        return self + other * -1.0

    def __mul__(self, scalar: complex) -> "Functional":
        return Functional({k: scalar * v for k, v in self.densities.items()})

    __rmul__ = __mul__

    def distance(self, other: "Functional") -> float:
        diff = self - other
        return max((_opnorm(m) for m in diff.densities.values()), default=0.0)

    @classmethod
    def coordinate(cls, label: Label, dim: int, i: int, j: int) -> "Functional":
        """The coordinate functional ``x -> x_ij`` on block ``label`` (density ``e_ji``)."""
        density = np.zeros((dim, dim), dtype=complex)
        density[j, i] = 1.0
        return cls({label: density})


def pullback_density(density: np.ndarray, linear: np.ndarray, in_dim: int) -> np.ndarray:
    """Density of ``x -> trace(density @ M(x))`` for a linear map ``M`` given on vec'd matrices."""
    vec = linear.T @ density.T.reshape(-1)
    return vec.reshape(in_dim, in_dim).T


class RepBlockMatrix:
    """An element of ``B(H) (x) A`` with finitely many blocks, legs ordered (H, block).

    Args:
        hdim (int): Dimension of the auxiliary Hilbert space ``H``.
        blocks (Mapping, optional): ``label -> (hdim * n) x (hdim * n)`` matrix.
    """

    __slots__ = ("hdim", "blocks")

    def __init__(self, hdim: int, blocks: Mapping[Label, ArrayLike] | None = None):
        if int(hdim) < 1:
            raise StructuralError(f"auxiliary dimension {hdim} < 1")
        self.hdim = int(hdim)
        data = {}
        for label, matrix in (blocks or {}).items():
            arr = _square(np.asarray(matrix, dtype=complex), f"block {label!r}")
            if arr.shape[0] % self.hdim:
                raise StructuralError(
                    f"block {label!r}: size {arr.shape[0]} is not a multiple of hdim {self.hdim}"
                )
            if np.linalg.norm(arr) >= PRUNE_TOL:
                data[label] = _frozen(arr)
        self.blocks = MappingProxyType(data)

    def __repr__(self) -> str:
        return f"<RepBlockMatrix hdim={self.hdim} blocks={len(self.blocks)}>"

    @property
    def support(self) -> frozenset:
        return frozenset(self.blocks)

    def legs(self, label: Label) -> tuple[int, int]:
        return self.hdim, self.blocks[label].shape[0] // self.hdim

    def _check(self, other: "RepBlockMatrix"):
        if other.hdim != self.hdim:
            raise StructuralError(f"hdim {self.hdim} vs {other.hdim}")

    def __add__(self, other: "RepBlockMatrix") -> "RepBlockMatrix":
        self._check(other)
        data = {k: np.array(v) for k, v in self.blocks.items()}
        for label, matrix in other.blocks.items():
            data[label] = data[label] + matrix if label in data else matrix
        return RepBlockMatrix(self.hdim, data)

    def __sub__(self, other: "RepBlockMatrix") -> "RepBlockMatrix":
        return self + other * -1.0

    def __mul__(self, scalar: complex) -> "RepBlockMatrix":
        return RepBlockMatrix(self.hdim, {k: scalar * v for k, v in self.blocks.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "RepBlockMatrix") -> "RepBlockMatrix":
        self._check(other)
        return RepBlockMatrix(
            self.hdim,
            {k: self.blocks[k] @ other.blocks[k] for k in self.support & other.support},
        )

    def adjoint(self) -> "RepBlockMatrix":
        return RepBlockMatrix(self.hdim, {k: v.conj().T for k, v in self.blocks.items()})

    def opnorm(self) -> float:
        return max((_opnorm(m) for m in self.blocks.values()), default=0.0)

    def distance(self, other: "RepBlockMatrix") -> float:
        return (self - other).opnorm()

    def times_h(self, op: np.ndarray, side: str = "left") -> "RepBlockMatrix":
        """Multiplies by ``op (x) 1`` on the given side."""
        out = {}
        for label, matrix in self.blocks.items():
            n = matrix.shape[0] // self.hdim
            full = np.kron(op, np.eye(n))
            out[label] = full @ matrix if side == "left" else matrix @ full
        return RepBlockMatrix(self.hdim, out)

    def times_a(self, a: Element, side: str = "left") -> "RepBlockMatrix":
        """Multiplies by ``1 (x) a`` on the given side; blocks outside ``a`` vanish."""
        out = {}
        for label in self.support & a.support:
            full = np.kron(np.eye(self.hdim), a.blocks[label])
            matrix = self.blocks[label]
            out[label] = full @ matrix if side == "left" else matrix @ full
        return RepBlockMatrix(self.hdim, out)

    def apply(self, vec: np.ndarray) -> dict:
        """Applies the operator to ``vec (x) 1`` and returns ``label -> (hdim, n, n)`` slices."""
        out = {}
        for label, matrix in self.blocks.items():
            d, n = self.legs(label)
            t = matrix.reshape(d, n, d, n)
            out[label] = np.einsum("ikjl,j->ikl", t, vec)
        return out


def slice_T(xi: ArrayLike, eta: ArrayLike, X: RepBlockMatrix) -> Element:
    """``T_{xi,eta}(X)``: contracts the H legs against ``<xi|`` and ``|eta>``."""
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    eta = np.asarray(eta, dtype=complex).reshape(-1)
    if xi.shape[0] != X.hdim or eta.shape[0] != X.hdim:
        raise StructuralError(
            f"slice vectors of length {xi.shape[0]}, {eta.shape[0]} for hdim {X.hdim}"
        )
    out = {}
    for label, matrix in X.blocks.items():
        d, n = X.legs(label)
        t = matrix.reshape(d, n, d, n)
        out[label] = np.einsum("i,ikjl,j->kl", xi.conj(), t, eta)
    return Element(out)


def id_tensor_f(
    X: TensorElement | RepBlockMatrix, f: Functional, leg: int = -1
) -> Element | TensorElement | np.ndarray:
    """Slices one block leg of ``X`` against ``f``.

    For a :class:`RepBlockMatrix` the block leg is sliced and an ``hdim x hdim``
    matrix is returned.  For a two-leg :class:`TensorElement` an :class:`Element`
    is returned; for more legs a :class:`TensorElement`.
    """
    if isinstance(X, RepBlockMatrix):
        if leg not in (-1, 1):
            raise StructuralError(f"leg {leg} out of range for B(H) (x) A")
        total = np.zeros((X.hdim, X.hdim), dtype=complex)
        for label in X.support & f.support:
            d, n = X.legs(label)
            total += slice_leg(X.blocks[label], (d, n), 1, f.densities[label])
        return total

    legs = {len(key) for key in X.support}
    if not legs:
        return Element()
    if len(legs) != 1:
        raise StructuralError("tensor blocks disagree on the number of legs")
    (k,) = legs
    if leg < 0:
        leg += k
    if not 0 <= leg < k:
        raise StructuralError(f"leg {leg} out of range for {k} legs")

    acc: dict[tuple, tuple[tuple[int, ...], np.ndarray]] = {}
    for key, dims, matrix in X.items():
        density = f.densities.get(key[leg])
        if density is None:
            continue
        rest = key[:leg] + key[leg + 1 :]
        rest_dims = dims[:leg] + dims[leg + 1 :]
        piece = slice_leg(matrix, dims, leg, density)
        if rest in acc:
            acc[rest] = (rest_dims, acc[rest][1] + piece)
        else:
            acc[rest] = (rest_dims, piece)
    if k == 2:
        return Element({key[0]: m for key, (_, m) in acc.items()})
    return TensorElement(acc)

"""Discrete quantum group structure on a block spec.

A :class:`DqgSpec` stores the comultiplication as isometries with
multiplicity: for every target block ``gamma`` and pair ``(alpha, beta)``,

    Delta(x_gamma)(e_alpha (x) e_beta) = V (x_gamma (x) 1_m) V*,

with ``V`` of shape ``(n_alpha * n_beta, n_gamma * m)``.  The bare
``Delta(a)`` is never materialized; only the sandwiched Galois maps and
windowed multiplier blocks exist.

Certification: a pair ``(alpha, beta)`` is *complete* when the table lists
every ``gamma`` contributing to it.  ``Delta(a)(1 (x) b)`` on ``(gamma, beta)``
needs ``(gamma, beta')`` complete and ``(a (x) 1) Delta(b)`` on
``(alpha, gamma)`` needs ``(alpha', gamma)`` complete, where ``'`` is the
antipode pairing.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Literal, Mapping, Sequence

import numpy as np
import scipy.linalg

from .blockalg import (
    BlockIndex,
    Element,
    Functional,
    TensorElement,
    conjugate_leg,
    elem_adjoint,
    elem_product,
    id_tensor_f,
    map_leg,
    multiply_legs,
    tensor_product,
)
from .exceptions import StructuralError, WindowOverflow
from .report import Report
from .utils import label_key, make_rng, random_element

ISOMETRY_TOL = 1e-10

Label = Hashable


@dataclass(frozen=True)
class DeltaEntry:
    """One component ``x_gamma -> V (x_gamma (x) 1_m) V*`` landing in ``(alpha, beta)``."""

    gamma: Label
    alpha: Label
    beta: Label
    iso: np.ndarray = field(repr=False, compare=False)
    mult: int = 1


class DqgSpec:
    """Represents a discrete quantum group, or a finite window of one.

    Args:
        blocks (Sequence[:obj:`BlockIndex`]): The index set with block sizes.
        delta (Iterable[:obj:`DeltaEntry`]): The comultiplication table.
        pairing (Mapping): The involution ``alpha -> alpha'`` with ``S(e_alpha) = e_alpha'``.
        antipode (Mapping): ``alpha -> S_alpha`` as a matrix of shape
            ``(n_alpha'**2, n_alpha**2)`` acting on row-major vectorized blocks.
        counit (:obj:`Functional`): The counit, declared explicitly.
        complete (Iterable, optional): Certified pairs. Defaults to every pair.
        window (Sequence, optional): Labels used for sampling and truncations.
            Defaults to the whole index.
        name (str, optional): A display name.

    Raises:
        StructuralError: Shapes, pairing or antipode data are invalid, or an
            isometry fails ``V* V = 1``.
    """

    __slots__ = (
        "name",
        "index",
        "labels",
        "_dims",
        "entries",
        "by_gamma",
        "by_pair",
        "pairing",
        "antipode_maps",
        "antipode_inverse",
        "counit",
        "complete",
        "window",
    )

    def __init__(
        self,
        blocks: Sequence[BlockIndex],
        delta: Iterable[DeltaEntry],
        pairing: Mapping[Label, Label],
        antipode: Mapping[Label, np.ndarray],
        counit: Functional,
        complete: Iterable[tuple[Label, Label]] | None = None,
        window: Sequence[Label] | None = None,
        name: str = "",
    ):
        self.name = name
        self.index = tuple(blocks)
        self.labels = tuple(b.label for b in self.index)
        if len(set(self.labels)) != len(self.labels):
            raise StructuralError("block labels are not unique")
        self._dims = {b.label: int(b.dim) for b in self.index}

        self.entries: tuple[DeltaEntry, ...] = tuple(delta)
        self.by_gamma: dict[Label, list[DeltaEntry]] = {k: [] for k in self.labels}
        self.by_pair: dict[tuple[Label, Label], list[DeltaEntry]] = {}
        for entry in self.entries:
            self._check_entry(entry)
            self.by_gamma[entry.gamma].append(entry)
            self.by_pair.setdefault((entry.alpha, entry.beta), []).append(entry)

        self.pairing = dict(pairing)
        self._check_pairing()

        self.antipode_maps: dict[Label, np.ndarray] = {}
        self.antipode_inverse: dict[Label, np.ndarray] = {}
        for label in self.labels:
            self._load_antipode(label, antipode.get(label))

        for label, density in counit.densities.items():
            if label not in self._dims or density.shape != (self.dim(label),) * 2:
                raise StructuralError(f"counit density on {label!r} does not match the index")
        self.counit = counit

        if complete is None:
            self.complete = frozenset((a, b) for a in self.labels for b in self.labels)
        else:
            self.complete = frozenset(tuple(p) for p in complete)
            unknown = {x for p in self.complete for x in p} - set(self.labels)
            if unknown:
                raise StructuralError(f"certified pairs mention unknown labels {sorted(map(str, unknown))}")

        self.window = tuple(window) if window is not None else self.labels
        if set(self.window) - set(self.labels):
            raise StructuralError("window mentions labels outside the index")

    def __repr__(self) -> str:
        return f"<DqgSpec {self.name!r} blocks={len(self.labels)} entries={len(self.entries)}>"

    # validation

    def _check_entry(self, entry: DeltaEntry):
        for label in (entry.gamma, entry.alpha, entry.beta):
            if label not in self._dims:
                raise StructuralError(f"delta entry mentions unknown block {label!r}")
        na, nb, ng = self.dim(entry.alpha), self.dim(entry.beta), self.dim(entry.gamma)
        where = f"(gamma={entry.gamma!r}, alpha={entry.alpha!r}, beta={entry.beta!r})"
        if entry.mult < 1 or entry.iso.shape != (na * nb, ng * entry.mult):
            raise StructuralError(
                f"isometry {where} has shape {entry.iso.shape}, expected {(na * nb, ng * entry.mult)}"
            )
        gram = entry.iso.conj().T @ entry.iso
        err = np.abs(gram - np.eye(gram.shape[0])).max()
        if not err <= ISOMETRY_TOL:
            raise StructuralError(f"isometry {where} violates V*V = 1 by {err:.2e}")

    def _check_pairing(self):
        if set(self.pairing) != set(self.labels):
            raise StructuralError("antipode pairing must cover every block")
        for a, b in self.pairing.items():
            if b not in self._dims:
                raise StructuralError(f"pairing sends {a!r} to unknown block {b!r}")
            if self.pairing[b] != a:
                raise StructuralError(f"pairing is not an involution at {a!r}")
            if self.dim(a) != self.dim(b):
                raise StructuralError(f"paired blocks {a!r}, {b!r} differ in size")

    def _load_antipode(self, label: Label, matrix):
        if matrix is None:
            raise StructuralError(f"missing antipode map for block {label!r}")
        n = self.dim(label)
        arr = np.asarray(matrix, dtype=complex)
        if arr.shape != (n * n, n * n):
            raise StructuralError(f"antipode map on {label!r} has shape {arr.shape}")
        try:
            inv = np.linalg.inv(arr)
        except np.linalg.LinAlgError as exc:
            raise StructuralError(f"antipode map on {label!r} is not invertible") from exc
        if not np.all(np.isfinite(inv)):
            raise StructuralError(f"antipode map on {label!r} is not invertible")
        self.antipode_maps[label] = arr
        self.antipode_inverse[label] = inv

    # lookups

    def dim(self, label: Label) -> int:
        try:
            return self._dims[label]
        except KeyError:
            raise StructuralError(f"unknown block {label!r}") from None

    @property
    def counit_label(self) -> Label:
        (label,) = self.counit.support
        return label

    def prime(self, label: Label) -> Label:
        return self.pairing[label]

    def certified(self, alpha: Label, beta: Label) -> bool:
        return (alpha, beta) in self.complete

    def require(self, alpha: Label, beta: Label, context: str = ""):
        if (alpha, beta) not in self.complete:
            raise WindowOverflow((alpha, beta), context)

    def entries_fixing(
        self, gamma: Label, first: Label | None = None, second: Label | None = None
    ) -> list[DeltaEntry]:
        """Entries of ``Delta(x_gamma)`` with a fixed first or second leg, certified."""
        if first is not None:
            self.require(self.prime(first), gamma, f"delta of {gamma!r} with first leg {first!r}")
            return [e for e in self.by_gamma[gamma] if e.alpha == first]
        if second is not None:
            self.require(gamma, self.prime(second), f"delta of {gamma!r} with second leg {second!r}")
            return [e for e in self.by_gamma[gamma] if e.beta == second]
        raise StructuralError("a leg of the comultiplication must be fixed")

    def entries_for_pair(self, alpha: Label, beta: Label) -> list[DeltaEntry]:
        self.require(alpha, beta, "comultiplication block")
        return self.by_pair.get((alpha, beta), [])

    def unit(self, labels: Iterable[Label] | None = None) -> Element:
        """The central projection ``e_J`` (the whole window by default)."""
        labels = self.window if labels is None else labels
        return Element({k: np.eye(self.dim(k)) for k in labels})

    def matrix_unit(self, label: Label, i: int, j: int) -> Element:
        n = self.dim(label)
        m = np.zeros((n, n), dtype=complex)
        m[i, j] = 1.0
        return Element({label: m})

    def matrix_units(self, labels: Iterable[Label] | None = None) -> list[Element]:
        labels = self.labels if labels is None else labels
        return [
            self.matrix_unit(k, i, j)
            for k in labels
            for i in range(self.dim(k))
            for j in range(self.dim(k))
        ]


@dataclass(frozen=True)
class Window:
    """A finite set of certified pairs plus the block set ``J`` used for truncations."""

    pairs: frozenset
    J: tuple

    @classmethod
    def of(cls, spec: DqgSpec, J: Iterable[Label] | None = None) -> "Window":
        J = tuple(spec.window if J is None else J)
        return cls(pairs=spec.complete, J=J)

    def closure_under_pairing(self, spec: DqgSpec) -> "Window":
        """Enlarges ``J`` so that ``S(e_J) = e_J``."""
        J = set(self.J) | {spec.prime(k) for k in self.J}
        return Window(self.pairs, tuple(sorted(J, key=label_key)))

    def grow(self, spec: DqgSpec, steps: int = 1) -> "Window":
        """Adds ``steps`` layers of certified fusion neighbours to ``J``."""
        J = set(self.J)
        for _ in range(max(steps, 0)):
            new = set(J)
            for entry in spec.entries:
                if entry.gamma in J and entry.alpha in J and spec.certified(entry.alpha, entry.beta):
                    new.add(entry.beta)
                if entry.gamma in J and entry.beta in J and spec.certified(entry.alpha, entry.beta):
                    new.add(entry.alpha)
            new |= {spec.prime(k) for k in new}
            if new == J:
                break
            J = new
        return Window(self.pairs, tuple(sorted(J, key=label_key)))

    def describe(self) -> str:
        return "J={" + ",".join(str(k) for k in self.J) + "}"


class Multiplier:
    """A lazily evaluated algebraic multiplier ``(x_alpha)`` over the whole index.

    Block evaluations are cached; the cache is guarded by a lock so a
    multiplier can be shared between threads.
    """

    __slots__ = ("name", "_fn", "_cache", "_lock")

    def __init__(self, name: str, block_fn: Callable[[Label], np.ndarray]):
        self.name = name
        self._fn = block_fn
        self._cache: dict[Label, np.ndarray] = {}
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"<Multiplier {self.name}>"

    def block(self, label: Label) -> np.ndarray:
        with self._lock:
            if label not in self._cache:
                value = np.array(self._fn(label), dtype=complex)
                value.setflags(write=False)
                self._cache[label] = value
            return self._cache[label]

    def times(self, a: Element, side: str = "left") -> Element:
        """``X a`` (or ``a X``); finitely supported because ``a`` is."""
        out = {}
        for label, m in a.blocks.items():
            x = self.block(label)
            out[label] = x @ m if side == "left" else m @ x
        return Element(out)

    def restrict(self, labels: Iterable[Label]) -> Element:
        return Element({k: self.block(k) for k in labels})

    @classmethod
    def identity(cls, spec: DqgSpec) -> "Multiplier":
        return cls("1", lambda k: np.eye(spec.dim(k)))

    @classmethod
    def projection(cls, spec: DqgSpec, J: Iterable[Label]) -> "Multiplier":
        J = frozenset(J)
        return cls(
            "e_J", lambda k: np.eye(spec.dim(k)) if k in J else np.zeros((spec.dim(k),) * 2)
        )

    @classmethod
    def from_blocks(cls, name: str, blocks: Mapping[Label, np.ndarray]) -> "Multiplier":
        data = dict(blocks)
        return cls(name, lambda k: data[k])


# structure maps


def _delta_block(entry: DeltaEntry, spec: DqgSpec, x: np.ndarray) -> np.ndarray:
    return conjugate_leg(
        x, (spec.dim(entry.gamma),), 0, entry.iso, (spec.dim(entry.alpha), spec.dim(entry.beta)), entry.mult
    )


def apply_delta_leg(
    spec: DqgSpec,
    X: TensorElement,
    leg: int,
    first: Iterable[Label] | None = None,
    second: Iterable[Label] | None = None,
) -> TensorElement:
    """Applies ``Delta`` to one leg of ``X``, restricted to the given output labels.

    Exactly one of ``first`` / ``second`` restricts the corresponding output
    leg; the restriction is what keeps the result finitely supported.
    """
    if (first is None) == (second is None):
        raise StructuralError("restrict exactly one output leg of the comultiplication")
    acc: dict[tuple, tuple[tuple[int, ...], np.ndarray]] = {}
    for key, dims, matrix in X.items():
        gamma = key[leg]
        if first is not None:
            entries = [e for lab in first for e in spec.entries_fixing(gamma, first=lab)]
        else:
            entries = [e for lab in second for e in spec.entries_fixing(gamma, second=lab)]
        for entry in entries:
            out = (spec.dim(entry.alpha), spec.dim(entry.beta))
            block = conjugate_leg(matrix, dims, leg, entry.iso, out, entry.mult)
            new_key = key[:leg] + (entry.alpha, entry.beta) + key[leg + 1 :]
            new_dims = dims[:leg] + out + dims[leg + 1 :]
            if new_key in acc:
                acc[new_key] = (new_dims, acc[new_key][1] + block)
            else:
                acc[new_key] = (new_dims, block)
    return TensorElement(acc)


def galois_t1_tensor(spec: DqgSpec, X: TensorElement) -> TensorElement:
    """Linear extension of ``a (x) b -> Delta(a)(1 (x) b)``."""
    acc: dict[tuple, tuple[tuple[int, ...], np.ndarray]] = {}
    for (gamma, beta), dims, matrix in X.items():
        for entry in spec.entries_fixing(gamma, second=beta):
            na, nb = spec.dim(entry.alpha), spec.dim(beta)
            split = conjugate_leg(matrix, dims, 0, entry.iso, (na, nb), entry.mult)
            block = multiply_legs(split, (na, nb, nb), 1, 2)
            key = (entry.alpha, beta)
            acc[key] = ((na, nb), acc[key][1] + block if key in acc else block)
    return TensorElement(acc)


def galois_t2_tensor(spec: DqgSpec, X: TensorElement) -> TensorElement:
    """Linear extension of ``a (x) b -> (a (x) 1) Delta(b)``."""
    acc: dict[tuple, tuple[tuple[int, ...], np.ndarray]] = {}
    for (alpha, gamma), dims, matrix in X.items():
        for entry in spec.entries_fixing(gamma, first=alpha):
            na, nb = spec.dim(alpha), spec.dim(entry.beta)
            split = conjugate_leg(matrix, dims, 1, entry.iso, (na, nb), entry.mult)
            block = multiply_legs(split, (na, na, nb), 0, 1)
            key = (alpha, entry.beta)
            acc[key] = ((na, nb), acc[key][1] + block if key in acc else block)
    return TensorElement(acc)


def galois_t1(spec: DqgSpec, a: Element, b: Element) -> TensorElement:
    """``T_1(a (x) b) = Delta(a)(1 (x) b)``.

    Raises:
        WindowOverflow: A needed pair ``(gamma, beta')`` is not certified.
    """
    return galois_t1_tensor(spec, tensor_product(a, b))


def galois_t2(spec: DqgSpec, a: Element, b: Element) -> TensorElement:
    """``T_2(a (x) b) = (a (x) 1) Delta(b)``.

    Raises:
        WindowOverflow: A needed pair ``(alpha', gamma)`` is not certified.
    """
    return galois_t2_tensor(spec, tensor_product(a, b))


def delta_times_right(spec: DqgSpec, a: Element, c: Element) -> TensorElement:
    """``Delta(a)(c (x) 1)``, obtained as ``T_2(c*, a*)*``."""
    return galois_t2(spec, elem_adjoint(c), elem_adjoint(a)).adjoint()


def delta_times_left(spec: DqgSpec, b: Element, a: Element) -> TensorElement:
    """``(1 (x) b) Delta(a)``, obtained as ``T_1(a*, b*)*``."""
    return galois_t1(spec, elem_adjoint(a), elem_adjoint(b)).adjoint()


@dataclass
class GaloisSolution:
    """Result of inverting a Galois map on a window.

    A rank deficit or a large residual is a verdict about the spec, not an
    error.  ``outputs`` counts the coordinates of the certified output
    blocks; full rank onto them is the surjective half of ``bijective``.
    """

    tensor: TensorElement
    residual: float
    rank: int
    unknowns: int
    condition: float
    outputs: int = 0

    @property
    def bijective(self) -> bool:
        return self.rank == self.unknowns == self.outputs


def _unit_tensor(key: tuple, dims: tuple[int, ...], idx: int) -> TensorElement:
    n = int(np.prod(dims))
    m = np.zeros((n, n), dtype=complex)
    m.reshape(-1)[idx] = 1.0
    return TensorElement({key: (dims, m)})


def galois_solve(
    spec: DqgSpec, kind: Literal["T1", "T2"], y: TensorElement, rcond: float = 1e-10
) -> GaloisSolution:
    """Solves ``T(x) = y`` for ``x`` on the certified part of the window.

    For ``T1`` the second leg is preserved, so the system splits by second
    leg; for ``T2`` it splits by first leg.  Each piece is solved by least
    squares and the rank is compared with the number of unknowns and with
    the number of coordinates on certified output blocks.  Columns may
    reach past the window; those rows enter the solve but not the count.
    """
    if kind not in ("T1", "T2"):
        raise StructuralError(f"unknown Galois map {kind!r}")
    apply = galois_t1_tensor if kind == "T1" else galois_t2_tensor
    fixed_leg = 1 if kind == "T1" else 0

    groups: dict[Label, list[tuple]] = {}
    for key in y.support:
        groups.setdefault(key[fixed_leg], []).append(key)

    x_blocks: dict[tuple, tuple[tuple[int, ...], np.ndarray]] = {}
    rank = unknowns = outputs = 0
    condition = 1.0
    for fixed in sorted(groups, key=label_key):
        if kind == "T1":
            inputs = [(g, fixed) for g in spec.labels if spec.certified(g, spec.prime(fixed))]
        else:
            inputs = [(fixed, g) for g in spec.labels if spec.certified(spec.prime(fixed), g)]
        certified = set(inputs)

        columns: list[TensorElement] = []
        col_index: list[tuple[tuple, tuple[int, ...], int]] = []
        for key in inputs:
            dims = tuple(spec.dim(k) for k in key)
            size = int(np.prod(dims)) ** 2
            for idx in range(size):
                columns.append(apply(spec, _unit_tensor(key, dims, idx)))
                col_index.append((key, dims, idx))

        out_keys = sorted(
            {k for col in columns for k in col.support} | set(groups[fixed]),
            key=lambda k: tuple(label_key(x) for x in k),
        )
        out_dims = {k: tuple(spec.dim(x) for x in k) for k in out_keys}
        offsets, total = {}, 0
        for k in out_keys:
            offsets[k] = total
            total += int(np.prod(out_dims[k])) ** 2
        outputs += sum(int(np.prod(out_dims[k])) ** 2 for k in out_keys if k in certified)

        mat = np.zeros((total, len(columns)), dtype=complex)
        for c, col in enumerate(columns):
            for k, _, m in col.items():
                mat[offsets[k] : offsets[k] + m.size, c] = m.reshape(-1)
        rhs = np.zeros(total, dtype=complex)
        for k in groups[fixed]:
            m = y.blocks[k]
            rhs[offsets[k] : offsets[k] + m.size] = m.reshape(-1)

        if columns:
            sol, _, r, sv = scipy.linalg.lstsq(mat, rhs, cond=rcond)
            rank += int(r)
            if sv.size and sv[-1] > 0:
                condition = max(condition, float(sv[0] / sv[-1]))
            elif sv.size:
                condition = float("inf")
        else:
            sol = np.zeros(0, dtype=complex)
        unknowns += len(columns)

        for (key, dims, idx), value in zip(col_index, sol):
            if key not in x_blocks:
                n = int(np.prod(dims))
                x_blocks[key] = (dims, np.zeros((n, n), dtype=complex))
            x_blocks[key][1].reshape(-1)[idx] = value

    x = TensorElement(x_blocks)
    residual = apply(spec, x).distance(y)
    return GaloisSolution(x, float(residual), rank, unknowns, condition, outputs)


def antipode(spec: DqgSpec, a: Element, inverse: bool = False) -> Element:
    """Blockwise ``S`` (or ``S^-1``); block ``alpha`` of ``a`` lands in block ``alpha'``."""
    out = {}
    for label, m in a.blocks.items():
        n = m.shape[0]
        if inverse:
            # S^-1 takes block alpha back to alpha', undoing S_{alpha'}
            target = spec.prime(label)
            out[target] = (spec.antipode_inverse[target] @ m.reshape(-1)).reshape(n, n)
        else:
            out[spec.prime(label)] = (spec.antipode_maps[label] @ m.reshape(-1)).reshape(n, n)
    return Element(out)


def antipode_leg(spec: DqgSpec, X: TensorElement, leg: int, inverse: bool = False) -> TensorElement:
    """Applies ``S`` or ``S^-1`` to one leg of a tensor."""
    out = {}
    for key, dims, matrix in X.items():
        label = key[leg]
        target = spec.prime(label)
        linear = spec.antipode_inverse[target] if inverse else spec.antipode_maps[label]
        block = map_leg(matrix, dims, leg, linear, dims[leg])
        new_key = key[:leg] + (target,) + key[leg + 1 :]
        out[new_key] = (dims, block)
    return TensorElement(out)


def counit(spec: DqgSpec, a: Element) -> complex:
    return spec.counit(a)


def multiplier_delta_block(spec: DqgSpec, X: Multiplier, alpha: Label, beta: Label) -> np.ndarray:
    """Block ``(alpha, beta)`` of ``Delta(X)``: ``sum_gamma Delta(x_gamma) Delta(e_gamma)(e_alpha (x) e_beta)``."""
    n = spec.dim(alpha) * spec.dim(beta)
    total = np.zeros((n, n), dtype=complex)
    for entry in spec.entries_for_pair(alpha, beta):
        total += _delta_block(entry, spec, X.block(entry.gamma))
    return total


def multiplier_antipode(spec: DqgSpec, X: Multiplier, alpha: Label) -> np.ndarray:
    """Block ``alpha`` of ``S(X)``, i.e. ``S(x_{alpha'})``."""
    source = spec.prime(alpha)
    n = spec.dim(alpha)
    return (spec.antipode_maps[source] @ X.block(source).reshape(-1)).reshape(n, n)


def multiplier_delta(spec: DqgSpec, X: Multiplier, keys: Iterable[tuple[Label, Label]]) -> TensorElement:
    """``Delta(X)`` restricted to the given certified pairs."""
    return TensorElement(
        {
            (a, b): ((spec.dim(a), spec.dim(b)), multiplier_delta_block(spec, X, a, b))
            for a, b in keys
        }
    )


def perturb_isometry(
    spec: DqgSpec, gamma: Label, alpha: Label, beta: Label, eps: float, seed: int = 0
) -> DqgSpec:
    """Returns a copy with one isometry rotated by a unitary ``exp(i eps H)`` on its input.

    The entry stays an isometry, so the copy still loads, but the
    comultiplication it defines is no longer coassociative.
    """
    rng = make_rng(seed)
    entries = []
    hit = False
    for entry in spec.entries:
        if (entry.gamma, entry.alpha, entry.beta) == (gamma, alpha, beta) and not hit:
            k = entry.iso.shape[1]
            h = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
            h = (h + h.conj().T) / 2
            h /= np.linalg.norm(h, 2)
            rot = scipy.linalg.expm(1j * eps * h)
            entries.append(DeltaEntry(entry.gamma, entry.alpha, entry.beta, entry.iso @ rot, entry.mult))
            hit = True
        else:
            entries.append(entry)
    if not hit:
        raise StructuralError(f"no delta entry ({gamma!r}, {alpha!r}, {beta!r}) to perturb")
    return DqgSpec(
        spec.index,
        entries,
        spec.pairing,
        spec.antipode_maps,
        spec.counit,
        complete=spec.complete,
        window=spec.window,
        name=f"{spec.name}~perturbed",
    )


# verification


def _coassociativity(spec: DqgSpec, a: Element, b: Element, c: Element) -> float:
    # (a (x) 1 (x) 1)(Delta (x) id)(Delta(b)(1 (x) c))
    left = apply_delta_leg(spec, galois_t1(spec, b, c), 0, first=a.support).multiply_leg(0, a)
    # (id (x) Delta)((a (x) 1)Delta(b))(1 (x) 1 (x) c)
    right = apply_delta_leg(spec, galois_t2(spec, a, b), 1, second=c.support).multiply_leg(
        2, c, side="right"
    )
    return left.distance(right)


def _counit_left(spec: DqgSpec, a: Element, b: Element) -> float:
    sliced = id_tensor_f(galois_t1(spec, a, b), spec.counit, leg=0)
    return sliced.distance(elem_product(a, b))


def _counit_right(spec: DqgSpec, a: Element, b: Element) -> float:
    sliced = id_tensor_f(galois_t2(spec, a, b), spec.counit, leg=1)
    return sliced.distance(elem_product(a, b))


def _star_involution(spec: DqgSpec, a: Element) -> float:
    back = elem_adjoint(antipode(spec, elem_adjoint(antipode(spec, a))))
    return back.distance(a)


def _antimultiplicative(spec: DqgSpec, a: Element, b: Element) -> float:
    lhs = antipode(spec, elem_product(a, b))
    rhs = elem_product(antipode(spec, b), antipode(spec, a))
    return lhs.distance(rhs)


def _nondegenerate(spec: DqgSpec) -> float:
    worst = 0.0
    for (alpha, beta) in spec.complete:
        n = spec.dim(alpha) * spec.dim(beta)
        total = np.zeros((n, n), dtype=complex)
        for entry in spec.by_pair.get((alpha, beta), []):
            total += entry.iso @ entry.iso.conj().T
        worst = max(worst, float(np.abs(total - np.eye(n)).max()))
    return worst


def _counit_multiplicative(spec: DqgSpec, a: Element, b: Element) -> float:
    return abs(counit(spec, elem_product(a, b)) - counit(spec, a) * counit(spec, b))


def verify_bialgebra(
    spec: DqgSpec,
    samples: int = 8,
    tol: float = 1e-9,
    seed: int | np.random.Generator | None = 0,
) -> Report:
    """Checks the discrete quantum group axioms on sampled elements.

    Window overflow is counted per check, never raised.
    """
    rng = make_rng(seed)
    report = Report(f"bialgebra: {spec.name}")
    window = Window.of(spec).describe()
    draw = lambda r: random_element(spec, r)  # noqa: E731

    report.value("isometries", max(
        (float(np.abs(e.iso.conj().T @ e.iso - np.eye(e.iso.shape[1])).max()) for e in spec.entries),
        default=0.0,
    ), tol)
    report.value("delta-nondegenerate", _nondegenerate(spec), tol)
    report.sample(
        "coassociativity",
        tol,
        lambda r: _coassociativity(spec, draw(r), draw(r), draw(r)),
        rng,
        samples,
        window,
    )
    report.sample("counit-left", tol, lambda r: _counit_left(spec, draw(r), draw(r)), rng, samples, window)
    report.sample("counit-right", tol, lambda r: _counit_right(spec, draw(r), draw(r)), rng, samples, window)
    report.sample(
        "counit-multiplicative",
        tol,
        lambda r: _counit_multiplicative(spec, random_element(spec, r, blocks=2), random_element(spec, r, blocks=2)),
        rng,
        samples,
        window,
    )
    report.sample("antipode-star-involution", tol, lambda r: _star_involution(spec, draw(r)), rng, samples, window)
    report.sample(
        "antipode-antimultiplicative",
        tol,
        lambda r: _antimultiplicative(spec, draw(r), draw(r)),
        rng,
        samples,
        window,
    )

    def galois_round_trip(kind: str):
        def trial(r: np.random.Generator) -> float:
            a, b = draw(r), draw(r)
            y = galois_t1(spec, a, b) if kind == "T1" else galois_t2(spec, a, b)
            sol = galois_solve(spec, kind, y)
            if not sol.bijective:
                return float("inf")
            return sol.residual

        return trial

    report.sample("galois-T1-bijective", tol, galois_round_trip("T1"), rng, max(1, samples // 2), window)
    report.sample("galois-T2-bijective", tol, galois_round_trip("T2"), rng, max(1, samples // 2), window)
    return report


def verify_multiplier_rule(
    spec: DqgSpec,
    multipliers: Sequence[Multiplier],
    samples: int = 8,
    tol: float = 1e-9,
    seed: int | np.random.Generator | None = 0,
) -> Report:
    """Checks ``Delta(X) Delta(a) = Delta(X a)`` through the ``T_1`` sandwich."""
    rng = make_rng(seed)
    report = Report(f"multiplier rule: {spec.name}")
    for X in multipliers:

        def trial(r: np.random.Generator, X=X) -> float:
            a, b = random_element(spec, r), random_element(spec, r)
            sandwich = galois_t1(spec, a, b)
            lazy = multiplier_delta(spec, X, sandwich.support) @ sandwich
            direct = galois_t1(spec, X.times(a), b)
            return lazy.distance(direct)

        report.sample(f"multiplier-rule[{X.name}]", tol, trial, rng, samples)
    return report

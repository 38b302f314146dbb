"""Numerical intertwiner solves shared by the group-dual and SU_q(2) builders."""

from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.linalg

from ..exceptions import BuilderError

NULL_TOL = 1e-9


def nullspace(A: np.ndarray, eps: float = NULL_TOL) -> np.ndarray:
    """Columns spanning the kernel of ``A``; singular values below ``eps * s_max`` count as zero."""
    if A.shape[0] == 0:
        return np.eye(A.shape[1], dtype=complex)
    _, s, vh = scipy.linalg.svd(A)
    scale = max(float(s.max(initial=0.0)), 1.0)
    rank = int((s > eps * scale).sum())
    return vh[rank:].conj().T


def intertwiner_space(
    source: Sequence[np.ndarray], target: Sequence[np.ndarray], eps: float = NULL_TOL
) -> list[np.ndarray]:
    """Solves ``target[g] X = X source[g]`` for every generator ``g``.

    Returns a basis of solutions ``X`` of shape ``(dim target, dim source)``.
    """
    n_in = source[0].shape[0]
    n_out = target[0].shape[0]
    # row-major vec(A X B) = (A kron B^T) vec(X)
    rows = [
        np.kron(t, np.eye(n_in)) - np.kron(np.eye(n_out), s.T) for s, t in zip(source, target)
    ]
    null = nullspace(np.vstack(rows), eps)
    return [null[:, k].reshape(n_out, n_in) for k in range(null.shape[1])]


def orthonormal_intertwiners(solutions: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Rescales intertwiners out of an irreducible so that ``X_k* X_l = delta_kl 1``."""
    if not solutions:
        return []
    n = solutions[0].shape[1]
    gram = np.array([[np.trace(x.conj().T @ y) / n for y in solutions] for x in solutions])
    w, v = scipy.linalg.eigh((gram + gram.conj().T) / 2)
    if w.min() <= 1e-12:
        raise BuilderError("intertwiner solutions are linearly dependent")
    T = v / np.sqrt(w)
    return [sum(T[l, k] * solutions[l] for l in range(len(solutions))) for k in range(len(solutions))]


def isotypic_isometry(
    tensor: Sequence[np.ndarray],
    irrep: Sequence[np.ndarray],
    expected: int | None = None,
    where: tuple = (),
) -> tuple[np.ndarray, int]:
    """Isometry ``V`` with ``tensor[g] V = V (irrep[g] (x) 1_m)``.

    Columns are ordered (irrep index, multiplicity) to match the comultiplication
    table format.

    Raises:
        BuilderError: The solution space does not have the expected multiplicity.
    """
    solutions = intertwiner_space(irrep, tensor)
    m = len(solutions)
    if expected is not None and m != expected:
        raise BuilderError(f"intertwiner space for {where!r} has dimension {m}, expected {expected}")
    if m == 0:
        return np.zeros((tensor[0].shape[0], 0), dtype=complex), 0
    xs = orthonormal_intertwiners(solutions)
    n = irrep[0].shape[0]
    V = np.zeros((tensor[0].shape[0], n * m), dtype=complex)
    for k, x in enumerate(xs):
        V[:, k::m] = x
    return V, m


def swap_matrix(n: int) -> np.ndarray:
    """``vec(y^T) = P vec(y)`` for row-major vec."""
    P = np.zeros((n * n, n * n))
    for i in range(n):
        for j in range(n):
            P[j * n + i, i * n + j] = 1.0
    return P


def transpose_conjugation(D: np.ndarray) -> np.ndarray:
    """Matrix of ``y -> D y^T D^-1`` on row-major vectorized blocks."""
    n = D.shape[0]
    return np.kron(D, np.linalg.inv(D).T) @ swap_matrix(n)


def solve_antipode_twist(
    source: Sequence[np.ndarray], target: Sequence[np.ndarray], where: str = ""
) -> np.ndarray:
    """Solves ``D source[g]^T = target[g] D`` for an invertible ``D``.

    Raises:
        BuilderError: The solution is not unique up to scale or not invertible.
    """
    transposed = [s.T for s in source]
    solutions = intertwiner_space(transposed, target)
    if len(solutions) != 1:
        raise BuilderError(f"antipode twist for {where!r} has {len(solutions)} solutions, expected 1")
    D = solutions[0]
    cond = np.linalg.cond(D)
    if not np.isfinite(cond) or cond > 1e12:
        raise BuilderError(f"antipode twist for {where!r} is singular (condition {cond:.2e})")
    return D / np.abs(np.linalg.det(D)) ** (1 / D.shape[0])

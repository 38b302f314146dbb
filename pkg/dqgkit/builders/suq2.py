"""A finite window of the discrete dual of SU_q(2).

Spin ``l`` carries the basis ``m = -l, ..., l`` with

    k e_m = q^m e_m,   E e_m = sqrt([l-m][l+m+1]) e_{m+1},   F = E^T

and the coproduct ``Delta(E) = E (x) k + k^-1 (x) E`` (same for ``F``),
``Delta(k) = k (x) k``, under which tensor products of these *-representations
stay *-representations.  Clebsch-Gordan isometries and the antipode twists are
nullspace solves; nothing is read from coefficient tables.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..blockalg import BlockIndex, Functional
from ..core import DeltaEntry, DqgSpec
from ..exceptions import BuilderError
from ..formats import SpecDocument
from ..haar import canonical_haar
from .intertwiners import isotypic_isometry, solve_antipode_twist, transpose_conjugation


def spin_label(twice: int) -> str:
    return str(Fraction(twice, 2))


def qint(n: float, q: float) -> float:
    """The quantum integer ``[n] = (q^n - q^-n) / (q - q^-1)``."""
    return (q**n - q**-n) / (q - 1 / q)


def generators(twice: int, q: float) -> dict[str, np.ndarray]:
    """``E``, ``F`` and ``k`` on spin ``twice / 2``."""
    l = twice / 2
    n = twice + 1
    ms = [-l + i for i in range(n)]
    E = np.zeros((n, n), dtype=complex)
    for i, m in enumerate(ms[:-1]):
        E[i + 1, i] = np.sqrt(qint(l - m, q) * qint(l + m + 1, q))
    k = np.diag([q**m for m in ms]).astype(complex)
    return {"E": E, "F": E.T.copy(), "k": k}


def tensor_generators(a: dict, b: dict) -> list[np.ndarray]:
    ka_inv = np.linalg.inv(a["k"])
    return [
        np.kron(a["E"], b["k"]) + np.kron(ka_inv, b["E"]),
        np.kron(a["F"], b["k"]) + np.kron(ka_inv, b["F"]),
        np.kron(a["k"], b["k"]),
    ]


def antipode_images(gens: dict, q: float) -> list[np.ndarray]:
    """``S(E) = -q E``, ``S(F) = -q^-1 F``, ``S(k) = k^-1``."""
    return [-q * gens["E"], -gens["F"] / q, np.linalg.inv(gens["k"])]


def suq2_spec(q: float, L: float) -> DqgSpec:
    """Blocks ``l = 0, 1/2, ..., L``; pairs with ``l1 + l2 <= L`` are certified.

    Raises:
        BuilderError: ``q`` is not a positive number other than 1, ``L < 1/2``,
            or an intertwiner space has the wrong dimension.
    """
    if not q > 0 or abs(q - 1) < 1e-12:
        raise BuilderError(f"q must be positive and different from 1, got {q}")
    top = int(round(2 * L))
    if top < 1 or abs(top - 2 * L) > 1e-12:
        raise BuilderError(f"L must be a positive half-integer, got {L}")

    gens = {t: generators(t, q) for t in range(top + 1)}
    order = lambda g: [g["E"], g["F"], g["k"]]  # noqa: E731
    entries = []
    for ta in range(top + 1):
        for tb in range(top + 1):
            tensor = tensor_generators(gens[ta], gens[tb])
            for tg in range(abs(ta - tb), min(ta + tb, top) + 1, 2):
                V, m = isotypic_isometry(
                    tensor, order(gens[tg]), 1, (spin_label(tg), spin_label(ta), spin_label(tb))
                )
                entries.append(DeltaEntry(spin_label(tg), spin_label(ta), spin_label(tb), V, m))

    antipode = {}
    for t, g in gens.items():
        D = solve_antipode_twist(order(g), antipode_images(g, q), spin_label(t))
        antipode[spin_label(t)] = transpose_conjugation(D)

    labels = [spin_label(t) for t in range(top + 1)]
    complete = [
        (spin_label(ta), spin_label(tb))
        for ta in range(top + 1)
        for tb in range(top + 1)
        if ta + tb <= top
    ]
    window = [spin_label(t) for t in range(top // 2 + 1)]
    return DqgSpec(
        [BlockIndex(spin_label(t), t + 1) for t in range(top + 1)],
        entries,
        {label: label for label in labels},
        antipode,
        Functional({"0": np.eye(1, dtype=complex)}),
        complete=complete,
        window=window,
        name=f"dual(SU_q(2)) q={q:g} L={spin_label(top)}",
    )


def build_suq2_window(q: float, L: float) -> SpecDocument:
    """Builds the window with Haar data fixed by ``S^2``."""
    spec = suq2_spec(q, L)
    return SpecDocument(spec, canonical_haar(spec))

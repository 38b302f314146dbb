from __future__ import annotations

import numpy as np

from ..assembly import Coaction, CycleRep
from ..blockalg import BlockIndex, Functional
from ..core import DeltaEntry, DqgSpec
from ..corep import Corep
from ..exceptions import BuilderError
from ..formats import SpecDocument
from ..haar import HaarData, canonical_haar
from .cycles import CycleKind, alternating, point_cycle, trivial_cycle
from .groups import GroupTable, irreps_by_averaging


def commutative_spec(group: GroupTable) -> DqgSpec:
    """``c0(G)``: one 1-dim block per element, ``Delta(f)(s, t) = f(st)``."""
    labels = [group.label(g) for g in range(group.order)]
    one = np.eye(1, dtype=complex)
    entries = [
        DeltaEntry(group.label(group.mul(s, t)), group.label(s), group.label(t), one, 1)
        for s in range(group.order)
        for t in range(group.order)
    ]
    pairing = {group.label(g): group.label(group.inverse(g)) for g in range(group.order)}
    antipode = {label: one for label in labels}
    counit = Functional({group.label(group.identity): one})
    return DqgSpec(
        [BlockIndex(label, 1) for label in labels],
        entries,
        pairing,
        antipode,
        counit,
        name=f"c0({group.name})",
    )


def character_blocks(group: GroupTable, seed: int = 0) -> dict:
    """Blocks ``U_t = chi(t)`` of the first non-trivial character, or the trivial one."""
    irreps = irreps_by_averaging(group, seed)
    chars = [r for label, r in irreps.irreps.items() if r.dim == 1 and label != "triv"]
    chi = chars[0].character if chars else np.ones(group.order)
    return {group.label(t): np.array([[chi[t]]], dtype=complex) for t in range(group.order)}


def regular_cycle(group: GroupTable, spec: DqgSpec, haar: HaarData) -> tuple[Coaction, CycleRep]:
    """``H = l2(G)``, ``pi`` by multiplication and ``U_t = R_t`` with ``(R_t f)(s) = f(st)``."""
    d = group.order
    blocks = {}
    pi = {}
    for t in range(d):
        R = np.zeros((d, d), dtype=complex)
        for s in range(d):
            R[s, group.mul(s, t)] = 1.0
        blocks[group.label(t)] = R
        P = np.zeros((d, 1), dtype=complex)
        P[t, 0] = 1.0
        pi[group.label(t)] = (P, 1)
    coaction = Coaction.regular(spec, haar)
    corep = Corep.from_blocks(d, blocks, "right-regular")
    cycle = CycleRep(corep, pi, alternating(d), dict(coaction.cdims), "regular")
    return coaction, cycle


def build_commutative(group: GroupTable, cycle: CycleKind | None = None, seed: int = 0) -> SpecDocument:
    """Builds ``c0(G)`` with its Haar data and an optional cycle.

    Raises:
        BuilderError: Unknown cycle kind.
    """
    spec = commutative_spec(group)
    haar = canonical_haar(spec)
    doc = SpecDocument(spec, haar)
    if cycle is None:
        return doc
    if cycle == "point":
        doc.coaction, doc.cycle = point_cycle(spec, haar, character_blocks(group, seed), "character")
    elif cycle == "trivial":
        doc.coaction, doc.cycle = trivial_cycle(spec, haar)
    elif cycle == "regular":
        doc.coaction, doc.cycle = regular_cycle(group, spec, haar)
    else:
        raise BuilderError(f"unknown cycle kind {cycle!r}")
    return doc


def convolution_oracle(group: GroupTable, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """``(f * g)(s) = sum_t f(t) g(t^-1 s)`` on ``l1(G)``."""
    out = np.zeros(group.order, dtype=complex)
    for s in range(group.order):
        for t in range(group.order):
            out[s] += f[t] * g[group.mul(group.inverse(t), s)]
    return out

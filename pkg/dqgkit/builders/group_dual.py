"""The discrete dual of a finite group: blocks are irreducible representations.

``Delta`` is read off the decomposition of ``rho_alpha (x) rho_beta`` into
isotypic components and ``S`` is transported from inversion,
``S(rho(g)) = rho'(g^-1)``.  Both are solved numerically.
"""

from __future__ import annotations

import numpy as np

from ..assembly import Coaction, CycleRep
from ..blockalg import BlockIndex, Element, Functional
from ..core import DeltaEntry, DqgSpec
from ..corep import Corep
from ..exceptions import BuilderError
from ..formats import SpecDocument
from ..haar import HaarData, canonical_haar
from .cycles import CycleKind, alternating, point_cycle, trivial_cycle
from .groups import TRIVIAL, GroupIrreps, GroupTable, irreps_by_averaging
from .intertwiners import isotypic_isometry, transpose_conjugation


def group_dual_spec(data: GroupIrreps) -> DqgSpec:
    group = data.group
    irreps = data.irreps
    entries = []
    for alpha, ra in irreps.items():
        for beta, rb in irreps.items():
            tensor = [np.kron(ra.matrices[g], rb.matrices[g]) for g in range(group.order)]
            for gamma, rg in irreps.items():
                m = data.multiplicity(gamma, alpha, beta)
                if m == 0:
                    continue
                V, _ = isotypic_isometry(tensor, rg.matrices, m, (gamma, alpha, beta))
                entries.append(DeltaEntry(gamma, alpha, beta, V, m))
    antipode = {label: transpose_conjugation(data.twists[label]) for label in irreps}
    counit = Functional({TRIVIAL: np.eye(1, dtype=complex)})
    return DqgSpec(
        [BlockIndex(label, r.dim) for label, r in irreps.items()],
        entries,
        data.conjugate,
        antipode,
        counit,
        name=f"dual({group.name})",
    )


def group_element(data: GroupIrreps, g: int) -> Element:
    """The group-like multiplier ``u(g) = (rho(g))_rho``."""
    return Element({label: r.matrices[g] for label, r in data.irreps.items()})


def fourier_transform(data: GroupIrreps, haar: HaarData, a: Element) -> np.ndarray:
    """``g -> psi(a u(g))``; sends convolution to pointwise products and ``#`` to conjugation."""
    return np.array([haar.psi(a @ group_element(data, g)) for g in range(data.group.order)])


def regular_cycle(data: GroupIrreps, spec: DqgSpec, haar: HaarData) -> tuple[Coaction, CycleRep]:
    """``H = l2(G)``, ``U_rho = sum_g e_gg (x) rho(g)`` and ``pi(u(g)) = lambda(g)``."""
    group = data.group
    d = group.order
    regs = [group.regular(g) for g in range(d)]
    blocks = {}
    pi = {}
    for label, r in data.irreps.items():
        blocks[label] = sum(
            np.kron(np.diag(np.eye(d)[g]), r.matrices[g]) for g in range(d)
        )
        Q, m = isotypic_isometry(regs, r.matrices, r.dim, (label, "regular"))
        pi[label] = (Q, m)
    coaction = Coaction.regular(spec, haar)
    corep = Corep.from_blocks(d, blocks, "diagonal")
    cycle = CycleRep(corep, pi, alternating(d), dict(coaction.cdims), "regular")
    return coaction, cycle


def build_group_dual(group: GroupTable, cycle: CycleKind | None = None, seed: int = 0) -> SpecDocument:
    """Builds the dual of ``group`` with Plancherel Haar data and an optional cycle.

    Raises:
        BuilderError: Irreps or intertwiners could not be solved, or unknown cycle kind.
    """
    data = irreps_by_averaging(group, seed)
    spec = group_dual_spec(data)
    haar = canonical_haar(spec)
    doc = SpecDocument(spec, haar)
    if cycle is None:
        return doc
    if cycle == "point":
        g0 = next(g for g in range(group.order) if g != group.identity) if group.order > 1 else group.identity
        blocks = {label: r.matrices[g0] for label, r in data.irreps.items()}
        doc.coaction, doc.cycle = point_cycle(spec, haar, blocks, f"group-like({group.label(g0)})")
    elif cycle == "trivial":
        doc.coaction, doc.cycle = trivial_cycle(spec, haar)
    elif cycle == "regular":
        doc.coaction, doc.cycle = regular_cycle(data, spec, haar)
    else:
        raise BuilderError(f"unknown cycle kind {cycle!r}")
    return doc

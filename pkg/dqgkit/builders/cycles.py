"""Cycle attachments shared by the finite builders."""

from __future__ import annotations

from typing import Literal

import numpy as np

from ..assembly import Coaction, CycleRep
from ..core import DqgSpec
from ..corep import Corep
from ..haar import HaarData

CycleKind = Literal["point", "trivial", "regular"]

CYCLE_KINDS = ("point", "trivial", "regular")


def point_cycle(spec: DqgSpec, haar: HaarData, blocks: dict, name: str) -> tuple[Coaction, CycleRep]:
    """A one-dimensional corepresentation over the point coaction with ``F = 0``."""
    coaction = Coaction.point(spec, haar)
    corep = Corep.from_blocks(1, blocks, name)
    cycle = CycleRep(corep, {"pt": (np.eye(1), 1)}, np.zeros((1, 1), dtype=complex), {"pt": 1}, name)
    return coaction, cycle


def trivial_cycle(spec: DqgSpec, haar: HaarData) -> tuple[Coaction, CycleRep]:
    """``H = C^2``, ``U = 1`` and ``F = diag(1, -1)`` over the point coaction."""
    coaction = Coaction.point(spec, haar)
    corep = Corep.trivial(spec, 2)
    F = np.diag([1.0, -1.0]).astype(complex)
    cycle = CycleRep(corep, {"pt": (np.eye(2), 2)}, F, {"pt": 1}, "trivial")
    return coaction, cycle


def alternating(d: int) -> np.ndarray:
    return np.diag([(-1.0) ** i for i in range(d)]).astype(complex)

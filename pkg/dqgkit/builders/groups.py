"""Finite group tables, their regular representation and numerically computed irreps."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from ..exceptions import BuilderError, GroupTableError
from ..log import logger
from ..utils import make_rng, random_hermitian
from .intertwiners import solve_antipode_twist

TRIVIAL = "triv"

CHARACTER_TOL = 1e-8


@dataclass
class GroupTable:
    """A finite group given by its multiplication table ``table[g, h] = gh``."""

    name: str
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=int)
        validate_table(self.table)

    @property
    def order(self) -> int:
        return self.table.shape[0]

    @property
    def identity(self) -> int:
        return next(e for e in range(self.order) if list(self.table[e]) == list(range(self.order)))

    def inverse(self, g: int) -> int:
        return int(np.flatnonzero(self.table[g] == self.identity)[0])

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def label(self, g: int) -> str:
        return str(g)

    @property
    def abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    def regular(self, g: int) -> np.ndarray:
        """Left regular representation ``e_h -> e_gh``."""
        n = self.order
        L = np.zeros((n, n))
        for h in range(n):
            L[self.mul(g, h), h] = 1.0
        return L


def validate_table(table: np.ndarray):
    """Checks closure, associativity, identity and inverses.

    Raises:
        GroupTableError: The table is not a group.
    """
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise GroupTableError(f"table of shape {table.shape} is not square")
    n = table.shape[0]
    if table.min() < 0 or table.max() >= n:
        raise GroupTableError("table entries leave the element set")
    identities = [e for e in range(n) if list(table[e]) == list(range(n)) and list(table[:, e]) == list(range(n))]
    if not identities:
        raise GroupTableError("table has no identity element")
    e = identities[0]
    for g in range(n):
        if e not in table[g] or e not in table[:, g]:
            raise GroupTableError(f"element {g} has no inverse")
    for a, b, c in itertools.product(range(n), repeat=3):
        if table[table[a, b], c] != table[a, table[b, c]]:
            raise GroupTableError(f"associativity fails on ({a}, {b}, {c})")


def cyclic(n: int) -> GroupTable:
    return GroupTable(f"Z{n}", [[(i + j) % n for j in range(n)] for i in range(n)])


def symmetric3() -> GroupTable:
    perms = list(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(g[h[x]] for x in range(3))] for h in perms] for g in perms]
    return GroupTable("S3", table)


NAMED_GROUPS = {
    "Z2": lambda: cyclic(2),
    "Z3": lambda: cyclic(3),
    "Z5": lambda: cyclic(5),
    "Z6": lambda: cyclic(6),
    "S3": symmetric3,
}


def load_group(name_or_path: str) -> GroupTable:
    """A named group, or a JSON file ``{"name": ..., "table": [[...], ...]}``.

    Raises:
        GroupTableError: Unknown name, unreadable file or invalid table.
    """
    if name_or_path in NAMED_GROUPS:
        return NAMED_GROUPS[name_or_path]()
    path = Path(name_or_path)
    if not path.is_file():
        raise GroupTableError(f"unknown group {name_or_path!r}; named groups are {sorted(NAMED_GROUPS)}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        return GroupTable(str(data.get("name", path.stem)), data["table"])
    except (ValueError, KeyError, TypeError) as e:
        raise GroupTableError(f"{path}: {e}") from None


@dataclass
class Irrep:
    label: str
    matrices: list = field(repr=False)
    character: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]


@dataclass
class GroupIrreps:
    """Pairwise inequivalent unitary irreps, their conjugates and antipode twists."""

    group: GroupTable
    irreps: dict
    conjugate: dict
    twists: dict = field(repr=False)

    @property
    def labels(self) -> list:
        return list(self.irreps)

    def multiplicity(self, gamma: str, alpha: str, beta: str) -> int:
        """``<chi_alpha chi_beta, chi_gamma>``."""
        ca, cb, cg = (self.irreps[k].character for k in (alpha, beta, gamma))
        value = (ca * cb * cg.conj()).sum() / self.group.order
        return int(round(value.real))


def _characters_match(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(np.abs(a - b).max() < 1e-6)


def irreps_by_averaging(group: GroupTable, seed: int = 0) -> GroupIrreps:
    """Decomposes the regular representation with a random element of its commutant.

    ``X = sum_g L(g) H L(g)*`` commutes with every ``L(g)``; for a generic
    Hermitian ``H`` each eigenspace carries one irreducible subrepresentation.

    Raises:
        BuilderError: The eigenspaces do not account for ``sum dim^2 = |G|``.
    """
    rng = make_rng(seed)
    n = group.order
    regs = [group.regular(g) for g in range(n)]
    H = random_hermitian(rng, n)
    X = sum(L @ H @ L.T for L in regs)
    w, v = scipy.linalg.eigh(X)
    scale = max(float(np.abs(w).max()), 1.0)

    spaces = []
    start = 0
    for k in range(1, n + 1):
        if k == n or w[k] - w[k - 1] > CHARACTER_TOL * scale:
            spaces.append(v[:, start:k])
            start = k

    found: list[Irrep] = []
    for Q in spaces:
        mats = [Q.conj().T @ L @ Q for L in regs]
        chi = np.array([np.trace(m) for m in mats])
        if any(_characters_match(chi, other.character) for other in found):
            continue
        found.append(Irrep("", mats, chi))

    total = sum(r.dim**2 for r in found)
    if total != n:
        gaps = np.diff(w)
        raise BuilderError(
            f"irreps of {group.name} cover {total} of {n} dimensions "
            f"(smallest eigenvalue gap {gaps.min() if len(gaps) else 0.0:.2e})"
        )

    e = group.identity
    trivial = next(r for r in found if r.dim == 1 and np.allclose(r.character, 1.0))
    rest = [r for r in found if r is not trivial]
    rest.sort(key=lambda r: (r.dim, tuple(np.round(r.character.real, 6)), tuple(np.round(r.character.imag, 6))))
    irreps = {TRIVIAL: trivial}
    for k, r in enumerate(rest, 1):
        irreps[f"rho{k}"] = r
    for label, r in irreps.items():
        r.label = label
        if abs(r.character[e] - r.dim) > 1e-8:
            raise BuilderError(f"irrep {label} has character {r.character[e]} at the identity")

    conjugate = {}
    for label, r in irreps.items():
        conjugate[label] = next(k for k, s in irreps.items() if _characters_match(s.character, r.character.conj()))

    twists = {}
    for label, r in irreps.items():
        target = irreps[conjugate[label]]
        inverse = [target.matrices[group.inverse(g)] for g in range(n)]
        twists[label] = solve_antipode_twist(r.matrices, inverse, label)

    logger.log(f"{group.name}: irreps of dimensions {[r.dim for r in irreps.values()]}")
    return GroupIrreps(group, irreps, conjugate, twists)

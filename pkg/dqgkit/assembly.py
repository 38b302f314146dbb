"""Coactions, covariant cycles and the representative of their assembly class.

Coactions and cycles are modelled on finite specs (every pair certified), so
``(id (x) phi)`` slices are finite sums.  The averaged operator is

    F' = (id (x) phi)(U (pi(h) F pi(h) (x) 1) U*)

and compactness of ``Sigma T Sigma*`` is witnessed by the finite expansion
``sum B_ij^alpha (x) L_{e_ij^alpha}`` with
``B_ij^alpha = (id (x) phi_ij^alpha)((pi(h) (x) theta^-1) U (T pi(h) (x) 1))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Hashable, Sequence

import numpy as np
import scipy.linalg

from .blockalg import (
    Element,
    RepBlockMatrix,
    TensorElement,
    conjugate_leg,
    elem_adjoint,
    id_tensor_f,
    slice_leg,
)
from .core import DeltaEntry, DqgSpec, Window, apply_delta_leg
from .corep import (
    Corep,
    FreeModuleVector,
    ModuleVector,
    action_functional_alt,
    corep_validate,
    module_act,
    module_inner,
    sigma_map,
    sigma_star,
    verify_module,
)
from .dual import convolve, sharp
from .exceptions import StructuralError, WindowOverflow
from .haar import HaarData, id_tensor_phi_trunc
from .log import logger
from .report import Report
from .utils import label_key, make_rng, psd_sqrt, random_element

Label = Hashable

STABILIZATION_TOL = 1e-12
SUPPORT_TOL = 1e-12
LSTSQ_RCOND = 1e-10
BASIS_CUTOFF = 1e-10


def _require_finite(spec: DqgSpec):
    if len(spec.complete) != len(spec.labels) ** 2:
        raise StructuralError(f"coactions need a fully certified spec; {spec.name!r} is a window")


@dataclass(eq=False)
class Coaction:
    """A coaction ``Delta_C`` of ``A`` on a finite-dimensional ``C`` with a cutoff ``h``.

    ``C = sum M_{n_kappa}`` and ``Delta_C`` uses the same isometry format as
    the comultiplication: an entry ``(kappa, kappa', beta)`` sends ``c_kappa``
    into the ``(kappa', beta)`` block of ``C (x) A``.
    """

    spec: DqgSpec = field(repr=False)
    cdims: dict
    entries: tuple = field(repr=False)
    h: Element | None = None
    name: str = ""

    @property
    def labels(self) -> list:
        return sorted(self.cdims, key=label_key)

    def dim(self, kappa: Label) -> int:
        return self.cdims[kappa]

    def unit(self) -> Element:
        return Element({k: np.eye(n) for k, n in self.cdims.items()})

    def basis(self) -> list[Element]:
        """Matrix units of ``C``."""
        out = []
        for k in self.labels:
            n = self.cdims[k]
            for i in range(n):
                for j in range(n):
                    m = np.zeros((n, n), dtype=complex)
                    m[i, j] = 1.0
                    out.append(Element({k: m}))
        return out

    def delta(self, c: Element) -> TensorElement:
        """``Delta_C(c)`` as a tensor keyed by ``(kappa', beta)``."""
        acc: dict = {}
        for entry in self.entries:
            x = c.get(entry.gamma)
            if x is None:
                continue
            out = (self.dim(entry.alpha), self.spec.dim(entry.beta))
            block = conjugate_leg(x, (self.dim(entry.gamma),), 0, entry.iso, out, entry.mult)
            key = (entry.alpha, entry.beta)
            acc[key] = (out, acc[key][1] + block if key in acc else block)
        return TensorElement(acc)

    def delta_leg0(self, X: TensorElement) -> TensorElement:
        """Applies ``Delta_C`` to the first leg of a tensor over ``C (x) A``."""
        acc: dict = {}
        for key, dims, matrix in X.items():
            for entry in self.entries:
                if entry.gamma != key[0]:
                    continue
                out = (self.dim(entry.alpha), self.spec.dim(entry.beta))
                block = conjugate_leg(matrix, dims, 0, entry.iso, out, entry.mult)
                new_key = (entry.alpha, entry.beta) + key[1:]
                acc[new_key] = (out + dims[1:], acc[new_key][1] + block if new_key in acc else block)
        return TensorElement(acc)

    def with_cutoff(self, haar: HaarData, weights: Element | None = None) -> "Coaction":
        return replace(self, h=normalized_cutoff(self, haar, weights))

    @classmethod
    def point(cls, spec: DqgSpec, haar: HaarData) -> "Coaction":
        """``C = C`` with ``Delta_C(1) = 1 (x) 1`` and ``h = phi(1)^(-1/2)``."""
        _require_finite(spec)
        entries = tuple(
            DeltaEntry("pt", "pt", beta, np.eye(spec.dim(beta)), spec.dim(beta)) for beta in spec.labels
        )
        coaction = cls(spec, {"pt": 1}, entries, None, "point")
        return coaction.with_cutoff(haar)

    @classmethod
    def regular(cls, spec: DqgSpec, haar: HaarData, weights: Element | None = None) -> "Coaction":
        """``C = A`` coacted on by ``Delta``; ``h^2`` defaults to ``e_0 / phi(e_0)``."""
        _require_finite(spec)
        cdims = {k: spec.dim(k) for k in spec.labels}
        coaction = cls(spec, cdims, spec.entries, None, "regular")
        return coaction.with_cutoff(haar, weights)


def cutoff_average(coaction: Coaction, haar: HaarData, c: Element) -> Element:
    """``(id (x) phi)(Delta_C(c))`` as an element of ``C``."""
    return id_tensor_f(coaction.delta(c), haar.phi_functional, leg=1)


def normalized_cutoff(
    coaction: Coaction, haar: HaarData, weights: Element | None = None, tol: float = 1e-9
) -> Element:
    """Scales a positive ``weights`` so that ``h^2 = weights / lambda`` has unit Haar average.

    ``lambda`` is read off ``(id (x) phi)(Delta_C(weights)) = lambda 1``.

    Raises:
        StructuralError: The averaged weights are not a positive multiple of the unit.
    """
    if weights is None:
        if "pt" in coaction.cdims:
            weights = coaction.unit()
        else:
            label = coaction.spec.counit_label
            weights = Element({label: np.eye(coaction.dim(label))})
    avg = cutoff_average(coaction, haar, weights)
    total = sum(np.trace(avg.get(k, n)).real for k, n in coaction.cdims.items())
    lam = total / sum(coaction.cdims.values())
    if not lam > 0:
        raise StructuralError("cutoff weights average to a non-positive multiple of the unit")
    spread = avg.distance(lam * coaction.unit())
    if not spread <= tol * lam:
        raise StructuralError(f"cutoff weights do not average to a multiple of the unit (off by {spread:.3e})")
    return Element({k: psd_sqrt(m / lam) for k, m in weights.blocks.items()})


def cutoff_residual(coaction: Coaction, haar: HaarData, h: Element | None = None) -> float:
    h = coaction.h if h is None else h
    if h is None:
        raise StructuralError("coaction has no cutoff element")
    return cutoff_average(coaction, haar, h @ h).distance(coaction.unit())


def coaction_validate(
    coaction: Coaction,
    spec: DqgSpec,
    haar: HaarData,
    tol: float = 1e-9,
    samples: int = 8,
    seed: int | np.random.Generator | None = 0,
) -> Report:
    """``Delta_C`` is a unital *-homomorphism, averages ``h^2`` to the unit and is coassociative."""
    rng = make_rng(seed)
    report = Report(f"coaction {coaction.name}: {spec.name}")

    worst = 0.0
    for entry in coaction.entries:
        V = entry.iso
        worst = max(worst, float(np.abs(V.conj().T @ V - np.eye(V.shape[1])).max()))
    report.value("coaction-isometries", worst, tol)

    ones = {}
    for kappa in coaction.labels:
        for beta in spec.labels:
            n = coaction.dim(kappa) * spec.dim(beta)
            ones[(kappa, beta)] = ((coaction.dim(kappa), spec.dim(beta)), np.eye(n))
    report.value("coaction-unital", coaction.delta(coaction.unit()).distance(TensorElement(ones)), tol)

    def draw(r) -> Element:
        k = coaction.labels[int(r.integers(len(coaction.labels)))]
        n = coaction.dim(k)
        return Element({k: r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))})

    def multiplicative(r):
        c1, c2 = draw(r), draw(r)
        return coaction.delta(c1 @ c2).distance(coaction.delta(c1) @ coaction.delta(c2))

    report.sample("coaction-multiplicative", tol, multiplicative, rng, samples)
    report.sample(
        "coaction-star",
        tol,
        lambda r: coaction.delta(elem_adjoint(c := draw(r))).distance(coaction.delta(c).adjoint()),
        rng,
        samples,
    )
    report.value("cutoff-normalization", cutoff_residual(coaction, haar), tol)

    def coassociative(r):
        c = draw(r)
        D = coaction.delta(c)
        lhs = coaction.delta_leg0(D)
        rhs = apply_delta_leg(spec, D, 1, first=spec.labels)
        return lhs.distance(rhs)

    report.sample("coaction-coassociative", tol, coassociative, rng, samples)
    return report


@dataclass(eq=False)
class CycleRep:
    """A covariant cycle ``(U, pi, F)``.

    ``pi`` is given by isometries: ``pi(c) = sum P_kappa (c_kappa (x) 1_m) P_kappa*``.
    """

    corep: Corep
    pi: dict
    F: np.ndarray
    cdims: dict
    name: str = ""

    @property
    def hdim(self) -> int:
        return self.corep.hdim

    def pi_of(self, c: Element) -> np.ndarray:
        d = self.hdim
        total = np.zeros((d, d), dtype=complex)
        for kappa, x in c.blocks.items():
            P, m = self.pi[kappa]
            total += conjugate_leg(x, (self.cdims[kappa],), 0, P, (d,), m)
        return total

    @property
    def pi_unit(self) -> np.ndarray:
        return self.pi_of(Element({k: np.eye(n) for k, n in self.cdims.items()}))

    def pi_tensor(self, X: TensorElement) -> RepBlockMatrix:
        """``(pi (x) id)(X)`` for ``X`` keyed by ``(kappa, beta)``."""
        d = self.hdim
        acc: dict = {}
        for (kappa, beta), dims, matrix in X.items():
            P, m = self.pi[kappa]
            block = conjugate_leg(matrix, dims, 0, P, (d,), m)
            acc[beta] = acc[beta] + block if beta in acc else block
        return RepBlockMatrix(d, acc)

    def with_F(self, F: np.ndarray) -> "CycleRep":
        return replace(self, F=np.asarray(F, dtype=complex))


def covariance_residual(cycle: CycleRep, coaction: Coaction, c: Element) -> float:
    """``||(pi (x) id)(Delta_C(c)) - U (pi(c) (x) 1) U*||``."""
    lhs = cycle.pi_tensor(coaction.delta(c))
    pc = cycle.pi_of(c)
    worst = 0.0
    for label, u in cycle.corep.U.blocks.items():
        n = u.shape[0] // cycle.hdim
        rhs = u @ np.kron(pc, np.eye(n)) @ u.conj().T
        left = lhs.blocks.get(label)
        diff = rhs if left is None else left - rhs
        worst = max(worst, float(np.abs(diff).max()))
    return worst


def equivariance_profile(cycle: CycleRep, T: np.ndarray) -> dict:
    """Per-block ``||U (T (x) 1) U* - T (x) 1||``."""
    out = {}
    for label, u in cycle.corep.U.blocks.items():
        n = u.shape[0] // cycle.hdim
        t1 = np.kron(T, np.eye(n))
        out[label] = float(np.abs(u @ t1 @ u.conj().T - t1).max())
    return out


def cycle_validate(
    cycle: CycleRep, coaction: Coaction, spec: DqgSpec, tol: float = 1e-9
) -> Report:
    """Representation data, covariance and the cycle-condition norm profile."""
    report = Report(f"cycle {cycle.name}: {spec.name}")
    d = cycle.hdim
    worst = 0.0
    for kappa, (P, m) in cycle.pi.items():
        worst = max(worst, float(np.abs(P.conj().T @ P - np.eye(P.shape[1])).max()))
    report.value("pi-isometries", worst, tol)
    report.value("pi-nondegenerate", float(np.abs(cycle.pi_unit - np.eye(d)).max()), tol)
    report.value("F-hermitian", float(np.abs(cycle.F - cycle.F.conj().T).max()), tol)
    report.value(
        "covariance", max(covariance_residual(cycle, coaction, c) for c in coaction.basis()), tol
    )

    F = cycle.F
    comm = sq = 0.0
    for c in coaction.basis():
        pc = cycle.pi_of(c)
        comm = max(comm, float(np.linalg.norm(F @ pc - pc @ F, 2)))
        sq = max(sq, float(np.linalg.norm(pc @ (F @ F - np.eye(d)), 2)))
    report.info("cycle-commutator", comm, note="[F, pi(c)]")
    report.info("cycle-square", sq, note="pi(c)(F^2 - 1)")
    for label, value in sorted(equivariance_profile(cycle, F).items(), key=lambda kv: label_key(kv[0])):
        report.info(f"cycle-equivariance-profile[{label}]", value)
    return report


# averaged operator


def f_prime_truncated(
    cycle: CycleRep, haar: HaarData, pi_h: np.ndarray, J: Sequence[Label]
) -> np.ndarray:
    M = pi_h @ cycle.F @ pi_h
    blocks = {}
    for label in J:
        u = cycle.corep.block(label)
        n = u.shape[0] // cycle.hdim
        blocks[label] = u @ np.kron(M, np.eye(n)) @ u.conj().T
    return id_tensor_phi_trunc(haar, RepBlockMatrix(cycle.hdim, blocks), J)


def f_prime(
    cycle: CycleRep,
    coaction: Coaction,
    haar: HaarData,
    window: Window | None = None,
    h: Element | None = None,
) -> np.ndarray:
    """``F' = (id (x) phi)(U (pi(h) F pi(h) (x) 1) U*)`` truncated to a stabilized window.

    Raises:
        WindowOverflow: Growing the window still moves the truncated slice.
    """
    spec = haar.spec
    window = Window.of(spec) if window is None else window
    h = coaction.h if h is None else h
    pi_h = cycle.pi_of(h)
    current = f_prime_truncated(cycle, haar, pi_h, window.J)
    grown = window.grow(spec)
    if set(grown.J) != set(window.J):
        bigger = f_prime_truncated(cycle, haar, pi_h, grown.J)
        if float(np.abs(bigger - current).max()) > STABILIZATION_TOL:
            new = sorted(set(grown.J) - set(window.J), key=label_key)[0]
            raise WindowOverflow((new, new), "averaged operator has not stabilized")
    return (current + current.conj().T) / 2


def classical_average(cycle: CycleRep, pi_h: np.ndarray) -> np.ndarray:
    """``sum_s U_s pi(h) F pi(h) U_s*`` for one-dimensional blocks."""
    M = pi_h @ cycle.F @ pi_h
    total = np.zeros_like(M)
    for u in cycle.corep.U.blocks.values():
        if u.shape[0] != cycle.hdim:
            raise StructuralError("classical averaging needs one-dimensional blocks")
        total += u @ M @ u.conj().T
    return total


def averaging_bound(cycle: CycleRep, Fp: np.ndarray) -> float:
    """How far ``||F|| 1 +- F'`` is from positive."""
    norm = float(np.linalg.norm(cycle.F, 2))
    d = Fp.shape[0]
    herm = (Fp + Fp.conj().T) / 2
    lows = [scipy.linalg.eigvalsh(norm * np.eye(d) + s * herm).min() for s in (1.0, -1.0)]
    return max(0.0, -float(min(lows)))


# compactness witnesses


def conv_action(X: RepBlockMatrix, a: Element, spec: DqgSpec, haar: HaarData) -> RepBlockMatrix:
    """``X * a = (id (x) id (x) psi_a S^-1)((id (x) Delta)(X))``."""
    g = _convolution_functional(haar, a)
    d = X.hdim
    acc: dict = {}
    for gamma, matrix in X.blocks.items():
        ng = spec.dim(gamma)
        for beta, density in g.densities.items():
            for entry in spec.entries_fixing(gamma, second=beta):
                na, nb = spec.dim(entry.alpha), spec.dim(beta)
                split = conjugate_leg(matrix, (d, ng), 1, entry.iso, (na, nb), entry.mult)
                piece = slice_leg(split, (d, na, nb), 2, density)
                acc[entry.alpha] = acc[entry.alpha] + piece if entry.alpha in acc else piece
    return RepBlockMatrix(d, acc)


def _convolution_functional(haar: HaarData, a: Element):
    """``psi_a o S^-1``."""
    return action_functional_alt(haar, haar.twist(a, left=-1.0))


@dataclass
class Witness:
    label: Label
    i: int
    j: int
    B: np.ndarray = field(repr=False)


@dataclass
class WitnessResult:
    witnesses: list
    equivariance: float
    identity_residual: float
    decomposition_residual: float
    conv_residual: float

    @property
    def residual(self) -> float:
        return max(self.identity_residual, self.decomposition_residual, self.conv_residual)


def witness_operator(cycle: CycleRep, haar: HaarData, T: np.ndarray, pi_h: np.ndarray) -> RepBlockMatrix:
    """``(pi(h) (x) theta^-1) U (T pi(h) (x) 1)``."""
    theta_inv = haar.theta_power(-1.0)
    blocks = {}
    for label, u in cycle.corep.U.blocks.items():
        n = u.shape[0] // cycle.hdim
        blocks[label] = np.kron(pi_h, theta_inv[label]) @ u @ np.kron(T @ pi_h, np.eye(n))
    return RepBlockMatrix(cycle.hdim, blocks)


def expand_witnesses(Y: RepBlockMatrix) -> list[Witness]:
    """``B_ij^alpha = (id (x) phi_ij^alpha)(Y)``, keeping the nonzero ones."""
    out = []
    for label in sorted(Y.support, key=label_key):
        d, n = Y.legs(label)
        for i in range(n):
            for j in range(n):
                unit = np.zeros((n, n), dtype=complex)
                unit[j, i] = 1.0
                B = slice_leg(Y.blocks[label], (d, n), 1, unit)
                if np.abs(B).max() > SUPPORT_TOL:
                    out.append(Witness(label, i, j, B))
    return out


def proper_support_residual(cycle: CycleRep, coaction: Coaction, T: np.ndarray) -> float:
    """Least-squares residual of ``T pi(c) = sum_k pi(c_k) A_k`` over the basis of ``C``."""
    basis = coaction.basis()
    pis = [cycle.pi_of(c) for c in basis]
    worst = 0.0
    for pc in pis:
        target = T @ pc
        if np.abs(target).max() <= SUPPORT_TOL:
            continue
        used = [pk for pk in pis if np.abs(pk @ target).max() > SUPPORT_TOL]
        if not used:
            worst = max(worst, float(np.abs(target).max()))
            continue
        system = np.hstack(used)
        A, *_ = scipy.linalg.lstsq(system, target, cond=LSTSQ_RCOND)
        worst = max(worst, float(np.abs(system @ A - target).max()))
    return worst


def compact_witness(
    T: np.ndarray,
    cycle: CycleRep,
    coaction: Coaction,
    haar: HaarData,
    samples: int = 4,
    seed: int | np.random.Generator | None = 0,
) -> WitnessResult:
    """Builds the ``B_ij^alpha`` expansion of ``Sigma T Sigma*`` and checks it on samples."""
    rng = make_rng(seed)
    spec = haar.spec
    T = np.asarray(T, dtype=complex)
    equivariance = max(equivariance_profile(cycle, T).values(), default=0.0)
    pi_h = cycle.pi_of(coaction.h)
    Y = witness_operator(cycle, haar, T, pi_h)
    witnesses = expand_witnesses(Y)
    cert = cycle.pi_unit
    d = cycle.hdim

    identity = conv = 0.0
    for _ in range(max(samples, 1)):
        eta = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        a = random_element(spec, rng)
        f = FreeModuleVector(d, [(eta, a)])
        inner = sigma_star(f, pi_h, cycle.corep, haar, module=cert)
        lhs = sigma_map(ModuleVector(T @ inner.vec, cert), pi_h, cycle.corep, haar)
        expanded = FreeModuleVector(
            d, [(w.B @ eta, convolve(haar, spec.matrix_unit(w.label, w.i, w.j), a)) for w in witnesses]
        )
        identity = max(identity, lhs.distance(expanded))
        applied = conv_action(Y, a, spec, haar).apply(eta)
        conv = max(conv, _canonical_distance(applied, expanded.canonical()))

    decomposition = proper_support_residual(cycle, coaction, T)
    return WitnessResult(witnesses, equivariance, identity, decomposition, conv)


def _canonical_distance(x: dict, y: dict) -> float:
    worst = 0.0
    for label in set(x) | set(y):
        a, b = x.get(label), y.get(label)
        diff = a if b is None else (-b if a is None else a - b)
        worst = max(worst, float(np.abs(diff).max()))
    return worst


# assembly class


@dataclass
class AssemblyClassRep:
    """Finite data standing in for the assembly class of a cycle."""

    fprime: np.ndarray
    module_basis: list
    gram: list = field(repr=False)
    fprime_matrix: np.ndarray = field(repr=False)
    witnesses: list = field(repr=False)
    residuals: dict
    report: Report = field(repr=False)


def module_basis(cycle: CycleRep, coaction: Coaction, cutoff: float = BASIS_CUTOFF) -> list[ModuleVector]:
    """``pi(c) e_i`` over matrix units ``c`` and a basis ``e_i`` of ``H``, pruned to independence."""
    d = cycle.hdim
    kept: list[ModuleVector] = []
    frame = np.zeros((d, 0), dtype=complex)
    pruned = 0
    images = [cycle.pi_of(c) for c in coaction.basis()]
    span = np.hstack(images) if images else None
    for pc in images:
        for i in range(d):
            v = pc[:, i]
            if np.linalg.norm(v) <= cutoff:
                continue
            rest = v - frame @ (frame.conj().T @ v)
            if np.linalg.norm(rest) <= cutoff * max(1.0, np.linalg.norm(v)):
                pruned += 1
                continue
            frame = np.hstack([frame, (rest / np.linalg.norm(rest))[:, None]])
            kept.append(ModuleVector(v, pc, span))
    if pruned:
        logger.log(f"[yellow]pruned {pruned} dependent module basis vector(s)[/yellow]")
    return kept


def assembly_class(
    cycle: CycleRep,
    coaction: Coaction,
    haar: HaarData,
    window: Window | None = None,
    tol: float = 1e-9,
    samples: int = 4,
    seed: int | np.random.Generator | None = 0,
) -> AssemblyClassRep:
    """Computes ``F'``, the module data and the witnesses for ``F'^2 - 1``."""
    rng = make_rng(seed)
    spec = haar.spec
    report = Report(f"assembly {cycle.name}: {spec.name}")
    report.merge(cycle_validate(cycle, coaction, spec, tol), prefix="cycle")
    report.merge(coaction_validate(coaction, spec, haar, tol, samples, rng), prefix="coaction")
    report.merge(corep_validate(spec, cycle.corep, samples, tol, rng), prefix="corep")

    Fp = f_prime(cycle, coaction, haar, window)
    pi_h = cycle.pi_of(coaction.h)
    d = cycle.hdim
    report.value("fprime-hermitian", float(np.abs(Fp - Fp.conj().T).max()), tol)
    report.value("fprime-equivariant", max(equivariance_profile(cycle, Fp).values()), tol)
    report.value("fprime-bound", averaging_bound(cycle, Fp), tol)
    if all(u.shape[0] == d for u in cycle.corep.U.blocks.values()):
        report.value("fprime-classical", float(np.abs(Fp - classical_average(cycle, pi_h)).max()), tol)

    basis = module_basis(cycle, coaction)
    gram = [[module_inner(x, y, cycle.corep, haar) for y in basis] for x in basis]
    Mf = np.zeros((0, 0), dtype=complex)
    if basis:
        frame = np.column_stack([b.vec for b in basis])
        Mf, *_ = scipy.linalg.lstsq(frame, Fp @ frame)
    cert = cycle.pi_unit

    gram_sharp = 0.0
    for i in range(len(basis)):
        for j in range(len(basis)):
            gram_sharp = max(gram_sharp, sharp(haar, gram[i][j]).distance(gram[j][i]))
    report.value("gram-sharp-hermitian", gram_sharp, tol)

    selfadj = 0.0
    for x in basis:
        for y in basis:
            fx = ModuleVector(Fp @ x.vec, cert)
            fy = ModuleVector(Fp @ y.vec, cert)
            lhs = module_inner(x, fy, cycle.corep, haar)
            rhs = module_inner(fx, y, cycle.corep, haar)
            selfadj = max(selfadj, lhs.distance(rhs))
    report.value("fprime-module-selfadjoint", selfadj, tol)

    def module_map(r):
        x = basis[int(r.integers(len(basis)))]
        a = random_element(spec, r)
        lhs = Fp @ module_act(x, a, cycle.corep, haar).vec
        rhs = module_act(ModuleVector(Fp @ x.vec, cert), a, cycle.corep, haar).vec
        return float(np.abs(lhs - rhs).max())

    if basis:
        report.sample("fprime-module-map", tol, module_map, rng, samples)

    T = Fp @ Fp - np.eye(d)
    result = compact_witness(T, cycle, coaction, haar, samples, rng)
    report.value("witness-equivariance", result.equivariance, tol)
    report.value("witness-identity", result.identity_residual, tol)
    report.value("witness-convolution-form", result.conv_residual, tol)
    report.value("witness-proper-support", result.decomposition_residual, tol)
    report.info("witness-count", len(result.witnesses))

    report.merge(
        verify_module(spec, haar, cycle.corep, pi_h, [cycle.pi_of(c) for c in coaction.basis()], samples, tol, rng),
        prefix="module",
    )
    residuals = {c.name: c.residual for c in report.checks}
    return AssemblyClassRep(Fp, basis, gram, Mf, result.witnesses, residuals, report)


def homotopy_check(
    cycle: CycleRep,
    coaction: Coaction,
    haar: HaarData,
    h1: Element,
    h2: Element,
    steps: int = 5,
    tol: float = 1e-9,
    samples: int = 4,
    seed: int | np.random.Generator | None = 0,
) -> Report:
    """Checks that two normalized cutoffs give averaged operators joined by a witnessed path."""
    rng = make_rng(seed)
    spec = haar.spec
    report = Report(f"homotopy {cycle.name}: {spec.name}")
    report.value("cutoff-normalization-h1", cutoff_residual(coaction, haar, h1), tol)
    report.value("cutoff-normalization-h2", cutoff_residual(coaction, haar, h2), tol)

    F1 = f_prime(cycle, coaction, haar, h=h1)
    F2 = f_prime(cycle, coaction, haar, h=h2)
    report.info("endpoint-distance", float(np.abs(F1 - F2).max()))
    diff = compact_witness(F1 - F2, cycle, coaction, haar, samples, rng)
    report.value("difference-proper-support", diff.decomposition_residual, tol)
    report.value("difference-witness", max(diff.identity_residual, diff.conv_residual), tol)

    d = cycle.hdim
    ts = np.linspace(0.0, 1.0, steps + 2)
    for t in ts:
        Ft = t * F2 + (1 - t) * F1
        res = compact_witness(Ft @ Ft - np.eye(d), cycle, coaction, haar, samples, rng)
        report.value(f"path-witness[t={t:.3f}]", res.residual, tol)
        report.value(f"path-equivariance[t={t:.3f}]", res.equivariance, tol)
    return report


__all__ = (
    "Coaction",
    "CycleRep",
    "AssemblyClassRep",
    "Witness",
    "WitnessResult",
    "cutoff_average",
    "normalized_cutoff",
    "cutoff_residual",
    "coaction_validate",
    "cycle_validate",
    "covariance_residual",
    "equivariance_profile",
    "f_prime",
    "classical_average",
    "averaging_bound",
    "conv_action",
    "witness_operator",
    "expand_witnesses",
    "proper_support_residual",
    "compact_witness",
    "module_basis",
    "assembly_class",
    "homotopy_check",
)

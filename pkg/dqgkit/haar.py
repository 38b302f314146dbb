"""Haar functionals, the modular element and the checks built on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

import numpy as np
import scipy.linalg

from .blockalg import Element, Functional, RepBlockMatrix, TensorElement, elem_adjoint, elem_product, id_tensor_f
from .core import (
    DqgSpec,
    Multiplier,
    Window,
    antipode,
    delta_times_left,
    galois_t2,
    multiplier_antipode,
    multiplier_delta_block,
)
from .exceptions import StructuralError
from .report import Report
from .utils import make_rng, psd_power, random_element, random_matrix

Label = Hashable

POSITIVE_TOL = 1e-12


@dataclass(eq=False)
class HaarData:
    """Per-block data of the Haar functionals.

    ``phi = sum Tr(K^-1 .)``, ``psi = sum c_alpha Tr(K .)``,
    ``delta = c^-1 c_alpha K^2`` and ``theta = delta^(1/2)``.
    """

    spec: DqgSpec = field(repr=False)
    K: dict
    c_alpha: dict
    c: float
    delta: dict = field(repr=False)
    theta: dict = field(repr=False)
    K_inv: dict = field(repr=False)
    _powers: dict = field(default_factory=dict, repr=False)

    @property
    def phi_functional(self) -> Functional:
        return Functional(self.K_inv)

    @property
    def psi_functional(self) -> Functional:
        return Functional({k: self.c_alpha[k] * m for k, m in self.K.items()})

    def phi(self, a: Element) -> complex:
        return self.phi_functional(a)

    def psi(self, a: Element) -> complex:
        return self.psi_functional(a)

    def theta_power(self, p: float) -> dict:
        """Blocks of ``theta**p``, cached per exponent."""
        if p not in self._powers:
            self._powers[p] = {k: psd_power(d, p / 2) for k, d in self.delta.items()}
        return self._powers[p]

    def theta_multiplier(self, p: float = 1.0) -> Multiplier:
        return Multiplier.from_blocks(f"theta^{p:g}", self.theta_power(p))

    def twist(self, a: Element, left: float = 0.0, right: float = 0.0) -> Element:
        """``theta**left a theta**right``."""
        lp = self.theta_power(left) if left else None
        rp = self.theta_power(right) if right else None
        out = {}
        for k, m in a.blocks.items():
            if lp is not None:
                m = lp[k] @ m
            if rp is not None:
                m = m @ rp[k]
            out[k] = m
        return Element(out)

    @property
    def kac(self) -> bool:
        return all(np.allclose(t, np.eye(t.shape[0]), atol=1e-12) for t in self.theta.values())


def modular_data(
    spec: DqgSpec,
    K: Mapping[Label, np.ndarray],
    c_alpha: Mapping[Label, float],
    c: float = 1.0,
) -> HaarData:
    """Builds :class:`HaarData` from ``K``, ``c_alpha`` and ``c``.

    Raises:
        StructuralError: A ``K_alpha`` is missing, not Hermitian or not positive
            definite, or a constant is not positive.
    """
    if not c > 0:
        raise StructuralError(f"constant c must be positive, got {c}")
    Ks, Kinv, deltas, thetas, cs = {}, {}, {}, {}, {}
    for label in spec.labels:
        if label not in K or label not in c_alpha:
            raise StructuralError(f"haar data missing for block {label!r}")
        k = np.asarray(K[label], dtype=complex)
        n = spec.dim(label)
        if k.shape != (n, n):
            raise StructuralError(f"K on {label!r} has shape {k.shape}, expected {(n, n)}")
        if np.abs(k - k.conj().T).max() > 1e-10:
            raise StructuralError(f"K on {label!r} is not Hermitian")
        k = (k + k.conj().T) / 2
        if scipy.linalg.eigvalsh(k).min() <= POSITIVE_TOL:
            raise StructuralError(f"K on {label!r} is not positive definite")
        ca = float(c_alpha[label])
        if not ca > 0:
            raise StructuralError(f"c_alpha on {label!r} must be positive")
        Ks[label] = k
        Kinv[label] = np.linalg.inv(k)
        cs[label] = ca
        deltas[label] = (ca / c) * k @ k
        thetas[label] = psd_power(deltas[label], 0.5)
    return HaarData(spec, Ks, cs, float(c), deltas, thetas, Kinv)


def phi(haar: HaarData, a: Element) -> complex:
    """``sum_alpha Tr(K_alpha^-1 a_alpha)``."""
    return haar.phi(a)


def psi(haar: HaarData, a: Element) -> complex:
    """``sum_alpha c_alpha Tr(K_alpha a_alpha)``."""
    return haar.psi(a)


def phi_truncated(haar: HaarData, J: Iterable[Label]) -> Functional:
    J = set(J)
    return Functional({k: m for k, m in haar.K_inv.items() if k in J})


def id_tensor_phi_trunc(
    haar: HaarData, X: RepBlockMatrix | TensorElement, J: Window | Iterable[Label]
) -> np.ndarray | Element | TensorElement:
    """``(id (x) phi_J)(X)``, the slice of the last leg against ``phi(e_J .)``."""
    labels = J.J if isinstance(J, Window) else J
    return id_tensor_f(X, phi_truncated(haar, labels), leg=-1)


def s_squared_map(spec: DqgSpec, label: Label) -> np.ndarray:
    """``S^2`` on block ``label`` as a matrix on row-major vectorized blocks."""
    return spec.antipode_maps[spec.prime(label)] @ spec.antipode_maps[label]


@dataclass
class KDerivation:
    """Outcome of solving ``K S^2(a) = a K`` blockwise."""

    K: dict
    positive: bool
    residual: float
    failed: list = field(default_factory=list)


def derive_K_from_S2(spec: DqgSpec) -> KDerivation:
    """Solves ``S^2(a) = K^-1 a K`` for a positive ``K`` on every block.

    The solution is unique up to a scalar; the balanced representative with
    ``Tr K = Tr K^-1`` is returned.  A block with no positive solution is
    listed in ``failed`` rather than raised.
    """
    Ks: dict = {}
    failed = []
    worst = 0.0
    for label in spec.labels:
        n = spec.dim(label)
        s2 = s_squared_map(spec, label)
        # columns: vec(K S^2(e_ij) - e_ij K) for each unit K = e_kl
        rows = []
        for idx in range(n * n):
            unit = np.zeros(n * n, dtype=complex)
            unit[idx] = 1.0
            Kunit = unit.reshape(n, n)
            block = []
            for jdx in range(n * n):
                e = np.zeros(n * n, dtype=complex)
                e[jdx] = 1.0
                a = e.reshape(n, n)
                block.append((Kunit @ (s2 @ e).reshape(n, n) - a @ Kunit).reshape(-1))
            rows.append(np.concatenate(block))
        system = np.array(rows).T
        null = scipy.linalg.null_space(system, rcond=1e-10)
        if null.shape[1] != 1:
            failed.append(label)
            continue
        k = null[:, 0].reshape(n, n)
        tr = np.trace(k)
        if abs(tr) < 1e-14:
            failed.append(label)
            continue
        k = k * (abs(tr) / tr)
        k = (k + k.conj().T) / 2
        w = scipy.linalg.eigvalsh(k)
        if w.min() <= POSITIVE_TOL:
            failed.append(label)
            continue
        kinv = np.linalg.inv(k)
        k = k * np.sqrt(np.trace(kinv).real / np.trace(k).real)
        Ks[label] = k
        kinv = np.linalg.inv(k)
        for jdx in range(n * n):
            e = np.zeros(n * n, dtype=complex)
            e[jdx] = 1.0
            a = e.reshape(n, n)
            worst = max(worst, float(np.abs((s2 @ e).reshape(n, n) - kinv @ a @ k).max()))
    return KDerivation(Ks, not failed, worst, failed)


def K_angle(A: np.ndarray, B: np.ndarray) -> float:
    """Angle between two matrices as vectors; zero when they agree up to a positive scalar."""
    a, b = np.asarray(A, dtype=complex).reshape(-1), np.asarray(B, dtype=complex).reshape(-1)
    nb = np.linalg.norm(b)
    if nb == 0 or np.linalg.norm(a) == 0:
        return 0.0 if nb == np.linalg.norm(a) else float(np.pi / 2)
    inner = np.vdot(b, a)
    # arccos of a cosine loses half the digits near zero
    orth = np.linalg.norm(a - (inner / nb**2) * b)
    return float(np.arctan2(orth, abs(inner) / nb))


def canonical_haar(spec: DqgSpec) -> HaarData:
    """Haar data fixed by the antipode: ``K = F / Tr F`` and ``c_alpha = (Tr F)^2``.

    ``F`` is the balanced solution of ``S^2 = Ad F^-1``, so ``Tr F`` is the
    quantum dimension of the block.  ``c`` is 1.

    Raises:
        StructuralError: ``S^2`` is not implemented by a positive matrix on some block.
    """
    derived = derive_K_from_S2(spec)
    if not derived.positive:
        raise StructuralError(f"S^2 is not a positive inner automorphism on {derived.failed!r}")
    K, c_alpha = {}, {}
    for label, F in derived.K.items():
        dim_q = float(np.trace(F).real)
        K[label] = F / dim_q
        c_alpha[label] = dim_q**2
    return modular_data(spec, K, c_alpha, 1.0)


@dataclass
class FittedConstants:
    c_from_antipode: float
    c_from_counit: float
    relation_residual: float


def fit_constants(haar: HaarData) -> FittedConstants:
    """Fits ``c`` from ``psi = c phi S`` on matrix units, and from ``delta = 1`` on the counit block."""
    spec = haar.spec
    num = 0j
    den = 0.0
    pairs = []
    for a in spec.matrix_units(spec.window):
        lhs = haar.psi(a)
        rhs = haar.phi(antipode(spec, a))
        pairs.append((lhs, rhs))
        num += np.conj(rhs) * lhs
        den += abs(rhs) ** 2
    c_fit = float((num / den).real) if den else float("nan")
    scale = max((abs(p) for p, _ in pairs), default=1.0) or 1.0
    relation = max((abs(p - c_fit * r) for p, r in pairs), default=0.0) / scale

    label = spec.counit_label
    k = haar.K[label]
    c_eps = float((haar.c_alpha[label] * np.trace(k @ k) / k.shape[0]).real)
    return FittedConstants(c_fit, c_eps, float(relation))


# verification


def _left_invariance(spec: DqgSpec, haar: HaarData, a: Element, b: Element) -> float:
    sliced = id_tensor_f(galois_t2(spec, b, a), haar.phi_functional, leg=1)
    return sliced.distance(b * haar.phi(a))


def _right_invariance(spec: DqgSpec, haar: HaarData, a: Element, b: Element) -> float:
    sliced = id_tensor_f(delta_times_left(spec, b, a), haar.psi_functional, leg=0)
    return sliced.distance(b * haar.psi(a))


def _random_rep(spec: DqgSpec, rng: np.random.Generator, hdim: int, labels) -> RepBlockMatrix:
    blocks = {}
    for k in labels:
        y = random_matrix(rng, hdim * spec.dim(k))
        blocks[k] = y.conj().T @ y
    return RepBlockMatrix(hdim, blocks)


def verify_haar(
    spec: DqgSpec,
    haar: HaarData,
    samples: int = 8,
    tol: float = 1e-9,
    seed: int | np.random.Generator | None = 0,
) -> Report:
    """Checks invariance, the modular properties of ``theta`` and the truncated slice identities."""
    rng = make_rng(seed)
    report = Report(f"haar: {spec.name}")
    window = Window.of(spec)
    J = window.closure_under_pairing(spec).J
    desc = window.describe()
    draw = lambda r: random_element(spec, r)  # noqa: E731
    theta = haar.theta_multiplier(1.0)
    theta_inv = haar.theta_power(-1.0)

    report.sample(
        "left-invariance", tol, lambda r: _left_invariance(spec, haar, draw(r), draw(r)), rng, samples, desc
    )
    report.sample(
        "right-invariance", tol, lambda r: _right_invariance(spec, haar, draw(r), draw(r)), rng, samples, desc
    )
    unit = spec.unit(J)
    report.sample(
        "truncated-left-slice",
        tol,
        lambda r: _left_invariance(spec, haar, draw(r), unit),
        rng,
        samples,
        desc,
    )
    report.sample(
        "truncated-right-slice",
        tol,
        lambda r: _right_invariance(spec, haar, draw(r), unit),
        rng,
        samples,
        desc,
    )

    worst = 0.0
    for alpha, beta in sorted(spec.complete, key=str):
        block = multiplier_delta_block(spec, theta, alpha, beta)
        worst = max(worst, float(np.abs(block - np.kron(haar.theta[alpha], haar.theta[beta])).max()))
    report.value("delta-theta", worst, tol, window=desc)

    worst = max(
        float(np.abs(multiplier_antipode(spec, theta, k) - theta_inv[k]).max()) for k in spec.labels
    )
    report.value("antipode-theta", worst, tol)

    def s_squared(r):
        a = draw(r)
        return antipode(spec, antipode(spec, a)).distance(haar.twist(a, left=-1.0, right=1.0))

    report.sample("s-squared-ad-theta", tol, s_squared, rng, samples)
    report.sample(
        "phi-s-squared",
        tol,
        lambda r: abs(haar.phi(antipode(spec, antipode(spec, (a := draw(r))))) - haar.phi(a)),
        rng,
        samples,
    )
    report.sample(
        "psi-s-squared",
        tol,
        lambda r: abs(haar.psi(antipode(spec, antipode(spec, (a := draw(r))))) - haar.psi(a)),
        rng,
        samples,
    )
    report.sample(
        "psi-phi-theta-squared",
        tol,
        lambda r: abs(haar.psi(a := draw(r)) - haar.phi(haar.twist(a, right=2.0))),
        rng,
        samples,
    )
    report.sample(
        "phi-antipode-delta",
        tol,
        lambda r: abs(haar.phi(antipode(spec, a := draw(r))) - haar.phi(haar.twist(a, right=2.0))),
        rng,
        samples,
    )

    def positivity(r):
        a = draw(r)
        aa = elem_product(elem_adjoint(a), a)
        values = (haar.phi(aa), haar.psi(aa))
        return max(max(0.0, -v.real) + abs(v.imag) for v in values)

    report.sample("positivity", tol, positivity, rng, samples)

    def monotone(r):
        labels = list(J)
        cut = max(1, len(labels) // 2)
        X = _random_rep(spec, r, 2, labels)
        small = id_tensor_phi_trunc(haar, X, labels[:cut])
        large = id_tensor_phi_trunc(haar, X, labels)
        diff = large - small
        return max(0.0, -float(scipy.linalg.eigvalsh((diff + diff.conj().T) / 2).min()))

    report.sample("truncation-monotone", tol, monotone, rng, max(1, samples // 2))

    t = 2.5
    scaled = modular_data(
        spec, {k: t * m for k, m in haar.K.items()}, haar.c_alpha, haar.c * t * t
    )
    report.value(
        "delta-scaling-covariance",
        max(float(np.abs(scaled.delta[k] - haar.delta[k]).max()) for k in spec.labels),
        tol,
    )

    derived = derive_K_from_S2(spec)
    if derived.positive:
        angle = max(K_angle(derived.K[k], haar.K[k]) for k in spec.labels)
        report.value("K-from-s-squared", angle, max(tol, 1e-8), note=f"S^2 residual {derived.residual:.2e}")
    else:
        report.value("K-from-s-squared", float("inf"), tol, note=f"no positive K on {derived.failed!r}")

    fitted = fit_constants(haar)
    report.info("c-fitted-antipode", fitted.c_from_antipode, note="psi = c phi S")
    report.info("c-fitted-counit", fitted.c_from_counit, note="delta = 1 on the counit block")
    report.info("c-declared", haar.c)
    report.value("psi-phi-antipode-relation", fitted.relation_residual, tol)
    return report

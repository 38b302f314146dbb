"""Unitary corepresentations and the dual-algebra module they induce.

For a corepresentation ``U`` on ``H`` and a vector ``xi`` in ``pi(C) H``:

    xi . a      = (id (x) psi_{theta^-1 S(a) theta^-2})(U) xi
    <xi, eta>   = theta^-1 T_{xi, eta}(U)
    Sigma(xi)   = sum_i e_i (x) theta^-1 T_{pi(h) e_i, xi}(U)
    Sigma*(eta (x) a) = (pi(h) eta) . a
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np
import scipy.linalg

from .blockalg import (
    Element,
    Functional,
    RepBlockMatrix,
    conjugate_leg,
    elem_adjoint,
    id_tensor_f,
    map_leg,
    permute_legs,
    pullback_density,
    slice_T,
)
from .core import DqgSpec, Window, antipode
from .dual import convolve, left_regular, psi_embed, sharp
from .exceptions import CertificateError, StructuralError, WindowOverflow
from .haar import HaarData
from .report import Report
from .utils import make_rng, random_element, random_matrix

Label = Hashable

CERTIFICATE_TOL = 1e-10


@dataclass(eq=False)
class Corep:
    """A unitary corepresentation ``U`` in ``B(H) (x) A`` stored block by block."""

    U: RepBlockMatrix
    name: str = ""

    @property
    def hdim(self) -> int:
        return self.U.hdim

    def block(self, label: Label) -> np.ndarray:
        return self.U.blocks[label]

    @classmethod
    def trivial(cls, spec: DqgSpec, hdim: int = 1) -> "Corep":
        """``U = 1``."""
        return cls(
            RepBlockMatrix(hdim, {k: np.eye(hdim * spec.dim(k)) for k in spec.labels}), "trivial"
        )

    @classmethod
    def from_blocks(cls, hdim: int, blocks: dict, name: str = "") -> "Corep":
        return cls(RepBlockMatrix(hdim, blocks), name)


def perturb_corep(corep: Corep, label: Label, eps: float, seed: int = 0) -> Corep:
    """Rotates one block by ``exp(i eps H)``; unitarity survives, comultiplicativity does not."""
    rng = make_rng(seed)
    block = corep.block(label)
    h = random_matrix(rng, block.shape[0])
    h = (h + h.conj().T) / 2
    h /= np.linalg.norm(h, 2)
    blocks = dict(corep.U.blocks)
    blocks[label] = scipy.linalg.expm(1j * eps * h) @ block
    return Corep(RepBlockMatrix(corep.hdim, blocks), f"{corep.name}~perturbed")


@dataclass
class ModuleVector:
    """A vector of ``pi(C) H`` together with a matrix ``pi(c)`` whose range contains it.

    ``module`` is a matrix whose range is all of ``pi(C) H``; it certifies
    ``xi . a`` and is handed on along the action.
    """

    vec: np.ndarray
    certificate: np.ndarray | None = field(default=None, repr=False)
    module: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.vec = np.asarray(self.vec, dtype=complex).reshape(-1)

    def residual(self) -> float:
        """Relative distance of ``vec`` from the range of the certificate."""
        if self.certificate is None:
            return float("inf")
        norm = np.linalg.norm(self.vec)
        if norm == 0:
            return 0.0
        x, *_ = scipy.linalg.lstsq(self.certificate, self.vec)
        return float(np.linalg.norm(self.certificate @ x - self.vec) / norm)

    def require(self) -> np.ndarray:
        """Returns the vector after checking its certificate.

        Raises:
            CertificateError: The certificate is missing or does not cover the vector.
        """
        if self.certificate is None:
            raise CertificateError("module vector carries no support certificate")
        res = self.residual()
        if res > CERTIFICATE_TOL:
            raise CertificateError(f"support certificate misses the vector by {res:.2e}")
        return self.vec

    def acted(self, vec: np.ndarray) -> "ModuleVector":
        """``vec`` as an element of the module, certified by ``module``."""
        return ModuleVector(vec, self.module, self.module)


@dataclass
class FreeModuleVector:
    """A finite sum ``sum_k eta_k (x) a_k`` in ``H (x) A``."""

    hdim: int
    terms: list = field(default_factory=list)

    def __add__(self, other: "FreeModuleVector") -> "FreeModuleVector":
        return FreeModuleVector(self.hdim, self.terms + other.terms)

    def canonical(self) -> dict:
        """``label -> (hdim, n, n)`` array of ``sum_k eta_k (x) a_k``."""
        out: dict = {}
        for eta, a in self.terms:
            for label, m in a.blocks.items():
                piece = np.einsum("i,kl->ikl", eta, m)
                out[label] = out[label] + piece if label in out else piece
        return out

    def distance(self, other: "FreeModuleVector") -> float:
        mine, theirs = self.canonical(), other.canonical()
        worst = 0.0
        for label in set(mine) | set(theirs):
            a = mine.get(label)
            b = theirs.get(label)
            diff = a if b is None else (-b if a is None else a - b)
            worst = max(worst, float(np.abs(diff).max()))
        return worst


def free_module_inner(haar: HaarData, f: FreeModuleVector, g: FreeModuleVector) -> Element:
    """``<xi (x) a, eta (x) b> = <xi, eta> a# * b``, extended sesquilinearly."""
    total = Element()
    for xi, a in f.terms:
        for eta, b in g.terms:
            coeff = np.vdot(xi, eta)
            if abs(coeff) < 1e-15:
                continue
            total = total + coeff * convolve(haar, sharp(haar, a), b)
    return total


def free_module_act(haar: HaarData, f: FreeModuleVector, a: Element) -> FreeModuleVector:
    """``(eta (x) b) . a = eta (x) (b * a)``."""
    return FreeModuleVector(f.hdim, [(eta, convolve(haar, b, a)) for eta, b in f.terms])


# corepresentation checks


def comultiplicativity_residual(spec: DqgSpec, corep: Corep, alpha: Label, beta: Label) -> float:
    """``||(id (x) Delta)(U) - U_12 U_13||`` on the pair ``(alpha, beta)``."""
    d = corep.hdim
    na, nb = spec.dim(alpha), spec.dim(beta)
    lhs = np.zeros((d * na * nb,) * 2, dtype=complex)
    for entry in spec.entries_for_pair(alpha, beta):
        lhs += conjugate_leg(corep.block(entry.gamma), (d, spec.dim(entry.gamma)), 1, entry.iso, (na, nb), entry.mult)
    u12 = np.kron(corep.block(alpha), np.eye(nb))
    u13 = permute_legs(np.kron(corep.block(beta), np.eye(na)), (d, nb, na), (0, 2, 1))
    return float(np.abs(lhs - u12 @ u13).max())


def antipode_relation_residual(spec: DqgSpec, corep: Corep, a: Element) -> float:
    """``||(id (x) S)(U(1 (x) a)) - (1 (x) S(a)) U*||``."""
    d = corep.hdim
    Sa = antipode(spec, a)
    worst = 0.0
    for label, m in a.blocks.items():
        n = spec.dim(label)
        target = spec.prime(label)
        left = map_leg(corep.block(label) @ np.kron(np.eye(d), m), (d, n), 1, spec.antipode_maps[label], n)
        right = np.kron(np.eye(d), Sa.get(target, n)) @ corep.block(target).conj().T
        worst = max(worst, float(np.abs(left - right).max()))
    return worst


def corep_validate(
    spec: DqgSpec,
    corep: Corep,
    samples: int = 8,
    tol: float = 1e-9,
    seed: int | np.random.Generator | None = 0,
) -> Report:
    """Unitarity, comultiplicativity on certified pairs and the antipode relation."""
    rng = make_rng(seed)
    report = Report(f"corep {corep.name}: {spec.name}")
    missing = set(spec.labels) - corep.U.support
    if missing:
        raise StructuralError(f"corepresentation has no block on {sorted(map(str, missing))}")

    worst = 0.0
    for label in spec.labels:
        u = corep.block(label)
        eye = np.eye(u.shape[0])
        worst = max(worst, float(np.abs(u @ u.conj().T - eye).max()), float(np.abs(u.conj().T @ u - eye).max()))
    report.value("corep-unitary", worst, tol)

    worst, overflow, done = 0.0, 0, 0
    for alpha in spec.labels:
        for beta in spec.labels:
            try:
                worst = max(worst, comultiplicativity_residual(spec, corep, alpha, beta))
                done += 1
            except WindowOverflow:
                overflow += 1
    report.value(
        "corep-comultiplicative", worst, tol, samples=done, overflow=overflow, window=Window.of(spec).describe()
    )
    report.sample(
        "corep-antipode",
        tol,
        lambda r: antipode_relation_residual(spec, corep, random_element(spec, r)),
        rng,
        samples,
    )
    return report


# module structure


def action_functional(haar: HaarData, a: Element) -> Functional:
    """``psi_{theta^-1 S(a) theta^-2}``."""
    return psi_embed(haar, haar.twist(antipode(haar.spec, a), left=-1.0, right=-2.0))


def action_functional_alt(haar: HaarData, a: Element) -> Functional:
    """``psi_{theta a} o S^-1``."""
    spec = haar.spec
    f = psi_embed(haar, haar.twist(a, left=1.0))
    out = {}
    for label, density in f.densities.items():
        source = spec.prime(label)
        out[source] = pullback_density(density, spec.antipode_inverse[label], spec.dim(label))
    return Functional(out)


def module_act(xi: ModuleVector, a: Element, U: Corep, haar: HaarData, alternate: bool = False) -> ModuleVector:
    """``xi . a = (id (x) psi_{theta^-1 S(a) theta^-2})(U) xi``.

    Raises:
        CertificateError: ``xi`` is not certified to lie in ``pi(C) H``. The result
            is certified by ``xi.module`` and carries no certificate without it.
    """
    vec = xi.require()
    f = action_functional_alt(haar, a) if alternate else action_functional(haar, a)
    return xi.acted(id_tensor_f(U.U, f) @ vec)


def module_inner(xi: ModuleVector, eta: ModuleVector, U: Corep, haar: HaarData) -> Element:
    """``<xi, eta> = theta^-1 T_{xi, eta}(U)``; theta multiplies from the left only."""
    return haar.twist(slice_T(xi.require(), eta.require(), U.U), left=-1.0)


def sigma_map(xi: ModuleVector, pi_h: np.ndarray, U: Corep, haar: HaarData) -> FreeModuleVector:
    """``Sigma(xi) = ((pi(h) (x) theta^-1) U) xi`` as a finite sum over a basis of ``H``."""
    vec = xi.require()
    d = U.hdim
    terms = []
    for i in range(d):
        e = np.zeros(d, dtype=complex)
        e[i] = 1.0
        coeff = haar.twist(slice_T(pi_h @ e, vec, U.U), left=-1.0)
        if not coeff.is_zero():
            terms.append((e, coeff))
    return FreeModuleVector(d, terms)


def sigma_star(
    f: FreeModuleVector, pi_h: np.ndarray, U: Corep, haar: HaarData, module: np.ndarray | None = None
) -> ModuleVector:
    """``Sigma*(eta (x) a) = (pi(h) eta) . a``, certified by ``module`` (``pi(h)`` if omitted)."""
    span = pi_h if module is None else module
    total = np.zeros(f.hdim, dtype=complex)
    for eta, a in f.terms:
        total += module_act(ModuleVector(pi_h @ eta, pi_h, span), a, U, haar).vec
    return ModuleVector(total, span, span)


def module_gram(family: Sequence[ModuleVector], U: Corep, haar: HaarData) -> list[list[Element]]:
    return [[module_inner(x, y, U, haar) for y in family] for x in family]


def gram_min_eigenvalue(haar: HaarData, gram: list[list[Element]], basis: Sequence[Element]) -> float:
    """Smallest eigenvalue of ``[L(<xi_i, xi_j>)]`` acting on ``L^2(phi)^k`` over ``span(basis)``."""
    rows = [np.hstack([left_regular(haar, g, basis) for g in row]) for row in gram]
    M = np.vstack(rows)
    return float(scipy.linalg.eigvalsh((M + M.conj().T) / 2).min())


# identities that only involve the dual algebra


def twist_psi_antipode(haar: HaarData, a: Element) -> float:
    """``psi_a o S^-1`` against ``psi_{theta^-1 S(a) theta^-1}``."""
    spec = haar.spec
    f = psi_embed(haar, a)
    lhs = {}
    for label, density in f.densities.items():
        lhs[spec.prime(label)] = pullback_density(density, spec.antipode_inverse[label], spec.dim(label))
    rhs = psi_embed(haar, haar.twist(antipode(spec, a), left=-1.0, right=-1.0))
    return Functional(lhs).distance(rhs)


def twist_convolution(haar: HaarData, x: Element, y: Element) -> float:
    lhs = convolve(haar, haar.twist(x, left=-1.0), haar.twist(y, left=-1.0))
    return lhs.distance(haar.twist(convolve(haar, x, y), left=-1.0))


def twist_sharp(haar: HaarData, x: Element) -> float:
    """``(theta^-1 x)#`` against ``theta^-1 S^-1(x*)``."""
    spec = haar.spec
    lhs = sharp(haar, haar.twist(x, left=-1.0))
    return lhs.distance(haar.twist(antipode(spec, elem_adjoint(x), inverse=True), left=-1.0))


def twist_sharp_literal(haar: HaarData, x: Element) -> float:
    """``(theta^-1 x)#`` against ``theta^-1 x#``; holds only when ``theta = 1``."""
    return sharp(haar, haar.twist(x, left=-1.0)).distance(haar.twist(sharp(haar, x), left=-1.0))


def twist_antipode_convolution(haar: HaarData, a: Element, b: Element) -> float:
    spec = haar.spec
    t = lambda z: haar.twist(antipode(spec, z), left=-1.0, right=-2.0)  # noqa: E731
    return convolve(haar, t(b), t(a)).distance(t(convolve(haar, a, b)))


def verify_module(
    spec: DqgSpec,
    haar: HaarData,
    U: Corep,
    pi_h: np.ndarray | None = None,
    certificates: Sequence[np.ndarray] | None = None,
    samples: int = 8,
    tol: float = 1e-9,
    seed: int | np.random.Generator | None = 0,
) -> Report:
    """Checks the twist identities and the module structure induced by ``U``.

    Args:
        spec (:obj:`DqgSpec`): The quantum group.
        haar (:obj:`HaarData`): Its Haar data.
        U (:obj:`Corep`): The corepresentation.
        pi_h (numpy.ndarray, optional): ``pi(h)`` for the cutoff ``h``. Without it the
            ``Sigma`` checks are skipped.
        certificates (Sequence, optional): Matrices ``pi(c)`` used to draw
            certified vectors. Defaults to the identity.
    """
    rng = make_rng(seed)
    report = Report(f"module {U.name}: {spec.name}")
    desc = Window.of(spec).describe()
    draw = lambda r: random_element(spec, r)  # noqa: E731
    d = U.hdim
    certs = list(certificates) if certificates else [np.eye(d)]
    span = np.hstack(certs)

    def vector(r: np.random.Generator) -> ModuleVector:
        P = certs[int(r.integers(len(certs)))]
        v = r.standard_normal(d) + 1j * r.standard_normal(d)
        return ModuleVector(P @ v, P, span)

    report.sample("twist-psi-antipode", tol, lambda r: twist_psi_antipode(haar, draw(r)), rng, samples)
    report.sample(
        "twist-convolution", tol, lambda r: twist_convolution(haar, draw(r), draw(r)), rng, samples, desc
    )
    report.sample("twist-sharp", tol, lambda r: twist_sharp(haar, draw(r)), rng, samples)
    literal = max(twist_sharp_literal(haar, draw(rng)) for _ in range(max(samples, 1)))
    report.info("twist-sharp-literal", literal, note="exact only in the Kac case")
    report.sample(
        "twist-antipode-convolution",
        tol,
        lambda r: twist_antipode_convolution(haar, draw(r), draw(r)),
        rng,
        samples,
        desc,
    )

    report.sample(
        "action-forms-agree",
        tol,
        lambda r: float(
            np.abs(module_act(xi := vector(r), a := draw(r), U, haar).vec - module_act(xi, a, U, haar, True).vec).max()
        ),
        rng,
        samples,
    )

    def associativity(r):
        xi, a, b = vector(r), draw(r), draw(r)
        lhs = module_act(module_act(xi, a, U, haar), b, U, haar).vec
        rhs = module_act(xi, convolve(haar, a, b), U, haar).vec
        return float(np.abs(lhs - rhs).max())

    report.sample("action-associative", tol, associativity, rng, samples, desc)

    def inner_action(r):
        xi, eta, a = vector(r), vector(r), draw(r)
        lhs = module_inner(xi, module_act(eta, a, U, haar), U, haar)
        return lhs.distance(convolve(haar, module_inner(xi, eta, U, haar), a))

    report.sample("inner-action", tol, inner_action, rng, samples, desc)
    report.sample(
        "inner-sharp",
        tol,
        lambda r: sharp(haar, module_inner(xi := vector(r), eta := vector(r), U, haar)).distance(
            module_inner(eta, xi, U, haar)
        ),
        rng,
        samples,
    )

    if pi_h is None:
        return report

    report.sample(
        "sigma-isometry",
        tol,
        lambda r: free_module_inner(
            haar, sigma_map(xi := vector(r), pi_h, U, haar), sigma_map(eta := vector(r), pi_h, U, haar)
        ).distance(module_inner(xi, eta, U, haar)),
        rng,
        samples,
        desc,
    )

    def sigma_module_map(r):
        xi, a = vector(r), draw(r)
        lhs = sigma_map(module_act(xi, a, U, haar), pi_h, U, haar)
        rhs = free_module_act(haar, sigma_map(xi, pi_h, U, haar), a)
        return lhs.distance(rhs)

    report.sample("sigma-module-map", tol, sigma_module_map, rng, samples, desc)

    def adjointness(r):
        xi = vector(r)
        eta = r.standard_normal(d) + 1j * r.standard_normal(d)
        f = FreeModuleVector(d, [(eta, draw(r))])
        lhs = free_module_inner(haar, sigma_map(xi, pi_h, U, haar), f)
        rhs = module_inner(xi, sigma_star(f, pi_h, U, haar, span), U, haar)
        return lhs.distance(rhs)

    report.sample("sigma-adjoint", tol, adjointness, rng, samples, desc)
    report.sample(
        "sigma-star-sigma",
        tol,
        lambda r: float(
            np.abs(sigma_star(sigma_map(xi := vector(r), pi_h, U, haar), pi_h, U, haar, span).vec - xi.vec).max()
        ),
        rng,
        samples,
        desc,
    )

    basis = spec.matrix_units(Window.of(spec).closure_under_pairing(spec).J)

    def gram_positive(r):
        gram = module_gram([vector(r), vector(r)], U, haar)
        return max(0.0, -gram_min_eigenvalue(haar, gram, basis))

    report.sample("gram-positive", tol, gram_positive, rng, max(1, samples // 4), desc)
    return report

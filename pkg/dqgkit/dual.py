"""The dual convolution algebra, its functional picture and the GNS space ``L^2(phi)``.

The GNS map is ``Lambda(a) = theta a theta``, so that

    <a, b> = phi(Lambda(a)* Lambda(b)) = eps(a# * b)

and left convolution is a *-representation for ``#``.  In the Kac case
``theta = 1`` this is the plain ``phi(a* b)``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .blockalg import Element, Functional, elem_adjoint, id_tensor_f, pullback_density
from .core import (
    DqgSpec,
    Window,
    antipode,
    antipode_leg,
    delta_times_right,
    galois_t1,
)
from .exceptions import StructuralError
from .haar import HaarData
from .log import logger
from .report import Report
from .utils import make_rng, random_element, random_functional

GNS_CONVENTION = "Lambda(a) = theta a theta in L2(phi)"

GRAM_CUTOFF = 1e-10


class DualElement:
    """An element of the dual algebra: the same blocks with product ``*`` and involution ``#``."""

    __slots__ = ("carrier", "haar")

    def __init__(self, carrier: Element, haar: HaarData):
        self.carrier = carrier
        self.haar = haar

    def __repr__(self) -> str:
        return f"<DualElement {self.carrier!r}>"

    def __mul__(self, other: "DualElement") -> "DualElement":
        return DualElement(convolve(self.haar, self.carrier, other.carrier), self.haar)

    def __add__(self, other: "DualElement") -> "DualElement":
        return DualElement(self.carrier + other.carrier, self.haar)

    @property
    def sharp(self) -> "DualElement":
        return DualElement(sharp(self.haar, self.carrier), self.haar)


def convolve(haar: HaarData, a: Element, b: Element) -> Element:
    """``a * b = (id (x) psi S^-1)(Delta(a)(1 (x) S(b)))``.

    Raises:
        WindowOverflow: ``Delta(a)(1 (x) S(b))`` leaves the certified window.
    """
    spec = haar.spec
    t = galois_t1(spec, a, antipode(spec, b))
    t = antipode_leg(spec, t, 1, inverse=True)
    return id_tensor_f(t, haar.psi_functional, leg=1)


def convolve_phi_form(haar: HaarData, a: Element, b: Element) -> Element:
    """``a * b = (phi (x) id)((S (x) id)(Delta(b)(S^-1(a) (x) 1)))``."""
    spec = haar.spec
    t = delta_times_right(spec, b, antipode(spec, a, inverse=True))
    t = antipode_leg(spec, t, 0)
    return id_tensor_f(t, haar.phi_functional, leg=0)


def sharp(haar: HaarData, a: Element) -> Element:
    """``a# = theta^-2 S^-1(a*)``."""
    return haar.twist(antipode(haar.spec, elem_adjoint(a), inverse=True), left=-2.0)


def psi_embed(haar: HaarData, a: Element) -> Functional:
    """``psi_a = psi(a .)``, with density ``c_alpha K_alpha a_alpha``."""
    return Functional({k: haar.c_alpha[k] * haar.K[k] @ m for k, m in a.blocks.items()})


def func_convolve(spec: DqgSpec, f: Functional, g: Functional) -> Functional:
    """``(f * g)(a) = (f (x) g)(Delta(a))``, assembled blockwise.

    Raises:
        WindowOverflow: Some ``(alpha, beta)`` in ``supp f x supp g`` is not certified.
    """
    acc: dict = {}
    for alpha, F in f.densities.items():
        for beta, G in g.densities.items():
            for entry in spec.entries_for_pair(alpha, beta):
                n = spec.dim(entry.gamma)
                sandwich = entry.iso.conj().T @ np.kron(F, G) @ entry.iso
                density = np.einsum("ikjk->ij", sandwich.reshape(n, entry.mult, n, entry.mult))
                acc[entry.gamma] = acc[entry.gamma] + density if entry.gamma in acc else density
    return Functional(acc)


def func_star(spec: DqgSpec, f: Functional) -> Functional:
    """``f*(a) = conj(f(S(a)*))``."""
    out = {}
    for label, F in f.densities.items():
        source = spec.prime(label)
        out[source] = pullback_density(F.conj().T, spec.antipode_maps[source], spec.dim(source))
    return Functional(out)


def gns_vector(haar: HaarData, a: Element) -> Element:
    return haar.twist(a, left=1.0, right=1.0)


def gns_inner(haar: HaarData, a: Element, b: Element) -> complex:
    """``<a, b> = phi((theta a theta)* theta b theta)``."""
    x, y = gns_vector(haar, a), gns_vector(haar, b)
    return haar.phi(elem_adjoint(x) @ y)


def gram_matrix(haar: HaarData, basis: Sequence[Element]) -> np.ndarray:
    n = len(basis)
    G = np.zeros((n, n), dtype=complex)
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            G[i, j] = gns_inner(haar, bi, bj)
    return G


def orthonormalizer(G: np.ndarray, cutoff: float = GRAM_CUTOFF) -> np.ndarray:
    """Columns ``W`` with ``W* G W = 1`` spanning the non-degenerate part of ``G``."""
    herm = (G + G.conj().T) / 2
    w, v = scipy.linalg.eigh(herm)
    scale = max(float(np.abs(w).max(initial=0.0)), 1.0)
    keep = w > cutoff * scale
    dropped = int((~keep).sum())
    if dropped:
        logger.log(f"[yellow]pruned {dropped} degenerate Gram direction(s)[/yellow]")
    return v[:, keep] / np.sqrt(w[keep])


def left_regular(haar: HaarData, a: Element, basis: Sequence[Element] | None = None) -> np.ndarray:
    """Matrix of ``b -> a * b`` compressed to ``span(basis)`` in an orthonormal frame.

    Args:
        haar (:obj:`HaarData`): Haar data of the spec.
        a (:obj:`Element`): The convolving element.
        basis (Sequence[:obj:`Element`], optional): Spanning family. Defaults to
            all matrix units of the window.

    Raises:
        StructuralError: Every basis direction is degenerate.
    """
    if basis is None:
        basis = haar.spec.matrix_units(haar.spec.window)
    W = orthonormalizer(gram_matrix(haar, basis))
    if W.shape[1] == 0:
        raise StructuralError("basis spans the zero subspace of L2(phi)")
    n = len(basis)
    M = np.zeros((n, n), dtype=complex)
    images = [convolve(haar, a, b) for b in basis]
    for i, bi in enumerate(basis):
        for j, img in enumerate(images):
            M[i, j] = gns_inner(haar, bi, img)
    return W.conj().T @ M @ W


def reduced_norm_profile(
    haar: HaarData, a: Element, windows: Iterable[Iterable] | None = None, steps: int = 2
) -> list[float]:
    """Lower bounds for the reduced norm of ``a`` from nested windows.

    Without explicit windows the document window is grown ``steps`` times;
    layers that leave the certified region end the profile.
    """
    spec = haar.spec
    if windows is None:
        base = Window.of(spec)
        windows = [base.grow(spec, k).J for k in range(steps + 1)]
    profile = []
    for J in windows:
        try:
            matrix = left_regular(haar, a, spec.matrix_units(J))
        except StructuralError:
            break
        profile.append(float(np.linalg.norm(matrix, 2)))
    return profile


# verification


def verify_dual(
    spec: DqgSpec,
    haar: HaarData,
    samples: int = 8,
    tol: float = 1e-9,
    seed: int | np.random.Generator | None = 0,
) -> Report:
    """Checks the dual algebra identities and the functional picture."""
    rng = make_rng(seed)
    report = Report(f"dual: {spec.name}", header={"gns": GNS_CONVENTION})
    desc = Window.of(spec).describe()
    draw = lambda r: random_element(spec, r)  # noqa: E731
    conv = lambda a, b: convolve(haar, a, b)  # noqa: E731
    sh = lambda a: sharp(haar, a)  # noqa: E731

    def associativity(r):
        a, b, c = draw(r), draw(r), draw(r)
        return conv(conv(a, b), c).distance(conv(a, conv(b, c)))

    report.sample("convolution-associative", tol, associativity, rng, samples, desc)
    report.sample(
        "convolution-forms-agree",
        tol,
        lambda r: conv(a := draw(r), b := draw(r)).distance(convolve_phi_form(haar, a, b)),
        rng,
        samples,
        desc,
    )
    report.sample(
        "sharp-antihomomorphism",
        tol,
        lambda r: sh(conv(a := draw(r), b := draw(r))).distance(conv(sh(b), sh(a))),
        rng,
        samples,
        desc,
    )
    report.sample("sharp-involution", tol, lambda r: sh(sh(a := draw(r))).distance(a), rng, samples)

    def conjugate_linear(r):
        a, b = draw(r), draw(r)
        z = complex(r.standard_normal(), r.standard_normal())
        return sh(a + z * b).distance(sh(a) + np.conj(z) * sh(b))

    report.sample("sharp-conjugate-linear", tol, conjugate_linear, rng, samples)

    def psi_convolution(r):
        a, b = draw(r), draw(r)
        lhs = func_convolve(spec, psi_embed(haar, a), psi_embed(haar, b))
        return lhs.distance(psi_embed(haar, conv(a, b)))

    report.sample("psi-convolution", tol, psi_convolution, rng, samples, desc)

    def psi_bilinear(r):
        a, b, c = draw(r), draw(r), draw(r)
        z = complex(r.standard_normal(), r.standard_normal())
        left = psi_embed(haar, a + z * c)(b) - psi_embed(haar, a)(b) - z * psi_embed(haar, c)(b)
        right = psi_embed(haar, a)(b + z * c) - psi_embed(haar, a)(b) - z * psi_embed(haar, a)(c)
        return max(abs(left), abs(right))

    report.sample("psi-bilinear", tol, psi_bilinear, rng, samples, desc)
    report.sample(
        "psi-star",
        tol,
        lambda r: func_star(spec, psi_embed(haar, a := draw(r))).distance(psi_embed(haar, sh(a))),
        rng,
        samples,
    )
    report.sample(
        "func-star-involution",
        tol,
        lambda r: func_star(spec, func_star(spec, f := random_functional(spec, r))).distance(f),
        rng,
        samples,
    )

    def counit_functional(r):
        g = random_functional(spec, r)
        return func_convolve(spec, spec.counit, g).distance(g)

    report.sample("func-counit-unit", tol, counit_functional, rng, samples, desc)

    def gns_pairing(r):
        a, b = draw(r), draw(r)
        return abs(gns_inner(haar, a, b) - spec.counit(conv(sh(a), b)))

    report.sample("gns-counit-pairing", tol, gns_pairing, rng, samples, desc)

    def gram_positive(r):
        basis = [draw(r) for _ in range(4)]
        G = gram_matrix(haar, basis)
        return max(0.0, -float(scipy.linalg.eigvalsh((G + G.conj().T) / 2).min()))

    report.sample("gram-positive", tol, gram_positive, rng, samples)

    def regular_adjoint(r):
        a = draw(r)
        basis = spec.matrix_units(list(a.support) + [spec.prime(k) for k in a.support])
        lhs = left_regular(haar, sh(a), basis)
        rhs = left_regular(haar, a, basis).conj().T
        return float(np.abs(lhs - rhs).max())

    report.sample("left-regular-sharp-adjoint", tol, regular_adjoint, rng, max(1, samples // 2), desc)
    return report


__all__ = (
    "GNS_CONVENTION",
    "DualElement",
    "convolve",
    "convolve_phi_form",
    "sharp",
    "psi_embed",
    "func_convolve",
    "func_star",
    "gns_vector",
    "gns_inner",
    "gram_matrix",
    "left_regular",
    "reduced_norm_profile",
    "verify_dual",
)

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dqgkit.blockalg import Element, Functional
from dqgkit.builders import (
    convolution_oracle,
    cyclic,
    fourier_transform,
    group_dual_spec,
    irreps_by_averaging,
    symmetric3,
)
from dqgkit.dual import (
    DualElement,
    convolve,
    convolve_phi_form,
    func_convolve,
    func_star,
    gram_matrix,
    left_regular,
    psi_embed,
    reduced_norm_profile,
    sharp,
    verify_dual,
)
from dqgkit.haar import canonical_haar
from dqgkit.utils import random_element


def _function(values) -> Element:
    return Element({str(g): [[v]] for g, v in enumerate(values)})


def _values(a: Element, n: int) -> np.ndarray:
    return np.array([a.get(str(g), 1)[0, 0] for g in range(n)])


@pytest.mark.parametrize("fixture", ["z5_doc", "s3_doc", "s3_dual_doc", "suq2_wide_doc"])
def test_verify_dual_passes(fixture, request):
    doc = request.getfixturevalue(fixture)
    report = verify_dual(doc.spec, doc.haar, samples=4, tol=1e-9, seed=21)
    assert report.passed, [(c.name, c.residual) for c in report.failed]
    assert report["psi-bilinear"].samples > 0
    assert report.header["gns"]


@pytest.mark.parametrize("group", [cyclic(5), symmetric3()], ids=["Z5", "S3"])
def test_convolution_matches_group_algebra(group, request):
    doc = request.getfixturevalue("z5_doc" if group.order == 5 else "s3_doc")
    rng = np.random.default_rng(22)
    n = group.order
    f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    out = convolve(doc.haar, _function(f), _function(g))
    assert_allclose(_values(out, n), convolution_oracle(group, f, g), atol=1e-12)


def test_sharp_on_c0_is_conjugated_inversion(s3_doc):
    group = symmetric3()
    f = np.arange(6) + 1j * np.arange(6, 12)
    out = _values(sharp(s3_doc.haar, _function(f)), 6)
    assert_allclose(out, [np.conj(f[group.inverse(s)]) for s in range(6)])


def test_two_convolution_formulas_agree(s3_dual_doc, suq2_wide_doc):
    for doc in (s3_dual_doc, suq2_wide_doc):
        rng = np.random.default_rng(23)
        a, b = random_element(doc.spec, rng), random_element(doc.spec, rng)
        assert convolve(doc.haar, a, b).distance(convolve_phi_form(doc.haar, a, b)) < 1e-9


def test_fourier_transform_on_group_dual():
    data = irreps_by_averaging(symmetric3(), seed=0)
    spec = group_dual_spec(data)
    haar = canonical_haar(spec)
    rng = np.random.default_rng(24)
    for _ in range(4):
        a, b = random_element(spec, rng, blocks=3), random_element(spec, rng, blocks=3)
        Fa, Fb = fourier_transform(data, haar, a), fourier_transform(data, haar, b)
        assert_allclose(fourier_transform(data, haar, convolve(haar, a, b)), Fa * Fb, atol=1e-9)
        assert_allclose(fourier_transform(data, haar, sharp(haar, a)), Fa.conj(), atol=1e-9)


def test_dual_element_operators(s3_dual_doc):
    haar = s3_dual_doc.haar
    rng = np.random.default_rng(25)
    a, b = random_element(haar.spec, rng), random_element(haar.spec, rng)
    x, y = DualElement(a, haar), DualElement(b, haar)
    assert (x * y).carrier.distance(convolve(haar, a, b)) < 1e-12
    assert (x * y).sharp.carrier.distance((y.sharp * x.sharp).carrier) < 1e-9


def test_functional_convolution_matches_psi_embedding(s3_dual_doc):
    spec, haar = s3_dual_doc.spec, s3_dual_doc.haar
    rng = np.random.default_rng(26)
    a, b = random_element(spec, rng), random_element(spec, rng)
    lhs = func_convolve(spec, psi_embed(haar, a), psi_embed(haar, b))
    assert lhs.distance(psi_embed(haar, convolve(haar, a, b))) < 1e-9
    star = func_star(spec, psi_embed(haar, a))
    assert star.distance(psi_embed(haar, sharp(haar, a))) < 1e-9


def test_counit_is_the_unit_for_functional_convolution(s3_dual_doc):
    spec = s3_dual_doc.spec
    f = Functional({"rho2": [[1.0, 2.0], [0.5, -1.0]]})
    assert func_convolve(spec, spec.counit, f).distance(f) < 1e-12
    assert func_convolve(spec, f, spec.counit).distance(f) < 1e-12


def test_left_regular_translation_is_unitary(z5_doc):
    haar = z5_doc.haar
    delta = Element({"2": [[1.0]]})
    L = left_regular(haar, delta)
    assert_allclose(L.conj().T @ L, np.eye(5), atol=1e-12)
    assert_allclose(gram_matrix(haar, z5_doc.spec.matrix_units()), np.eye(5), atol=1e-12)


def test_reduced_norm_profile_is_monotone(suq2_wide_doc):
    haar = suq2_wide_doc.haar
    a = Element({"1/2": [[1.0, 0.5], [0.0, 1.0]]})
    profile = reduced_norm_profile(haar, a, steps=1)
    assert len(profile) >= 1
    assert all(x <= y + 1e-9 for x, y in zip(profile, profile[1:]))

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dqgkit.blockalg import Element
from dqgkit.builders import build_commutative, build_group_dual, cyclic, symmetric3
from dqgkit.corep import (
    Corep,
    FreeModuleVector,
    ModuleVector,
    corep_validate,
    free_module_inner,
    module_act,
    module_inner,
    perturb_corep,
    sigma_map,
    sigma_star,
    twist_sharp,
    twist_sharp_literal,
    verify_module,
)
from dqgkit.dual import convolve
from dqgkit.exceptions import CertificateError, StructuralError


@pytest.fixture(scope="module")
def s3_dual_regular():
    return build_group_dual(symmetric3(), "regular")


@pytest.fixture(scope="module")
def z6_point():
    return build_commutative(cyclic(6), "point")


def test_regular_corep_of_group_dual(s3_dual_regular):
    doc = s3_dual_regular
    report = corep_validate(doc.spec, doc.cycle.corep, samples=4, seed=31)
    assert report.passed, [c.name for c in report.failed]
    assert report["corep-comultiplicative"].samples == 9


def test_character_corep_of_c0(z6_point):
    doc = z6_point
    assert doc.cycle.hdim == 1
    assert corep_validate(doc.spec, doc.cycle.corep, samples=4, seed=32).passed


def test_perturbed_corep_is_flagged(s3_dual_regular):
    doc = s3_dual_regular
    broken = perturb_corep(doc.cycle.corep, "rho2", 1e-3, seed=33)
    report = corep_validate(doc.spec, broken, samples=4, seed=34)
    assert report["corep-unitary"].verdict == "pass"
    assert report["corep-comultiplicative"].residual > 1e-5
    assert not report.passed


def test_corep_needs_every_block(s3_dual_doc):
    partial = Corep.from_blocks(1, {"triv": np.eye(1)})
    with pytest.raises(StructuralError):
        corep_validate(s3_dual_doc.spec, partial)


def test_trivial_corep_windowed(suq2_wide_doc):
    report = corep_validate(suq2_wide_doc.spec, Corep.trivial(suq2_wide_doc.spec, 2), samples=3)
    assert report.passed
    assert report["corep-comultiplicative"].overflow > 0


def test_module_with_trivial_corep(s3_doc):
    spec, haar = s3_doc.spec, s3_doc.haar
    U = Corep.trivial(spec, 2)
    xi = ModuleVector([1.0, 2.0], np.eye(2))
    a = Element({str(g): [[g + 1.0]] for g in range(6)})
    assert_allclose(module_act(xi, a, U, haar).vec, 21.0 * np.array([1.0, 2.0]))
    eta = ModuleVector([1j, 0.0], np.eye(2))
    inner = module_inner(xi, eta, U, haar)
    assert inner.distance(np.vdot(xi.vec, eta.vec) * spec.unit(spec.labels)) < 1e-12


def test_certificates_are_enforced(s3_doc):
    U = Corep.trivial(s3_doc.spec, 2)
    a = Element({"0": [[1.0]]})
    with pytest.raises(CertificateError):
        module_act(ModuleVector([1.0, 0.0]), a, U, s3_doc.haar)
    P = np.diag([1.0, 0.0])
    with pytest.raises(CertificateError):
        module_act(ModuleVector([0.0, 1.0], P), a, U, s3_doc.haar)
    assert ModuleVector([1.0, 0.0], P).residual() < 1e-14


@pytest.mark.parametrize("fixture", ["z3_regular_doc", "s3_dual_regular", "z6_point"])
def test_verify_module_with_cycle(fixture, request):
    doc = request.getfixturevalue(fixture)
    pi_h = doc.cycle.pi_of(doc.coaction.h)
    certs = [doc.cycle.pi_of(c) for c in doc.coaction.basis()]
    report = verify_module(doc.spec, doc.haar, doc.cycle.corep, pi_h, certs, samples=3, seed=35)
    assert report.passed, [(c.name, c.residual) for c in report.failed]
    assert report["sigma-adjoint"].samples == 3


def test_sigma_is_isometric(s3_dual_regular):
    doc = s3_dual_regular
    U, haar = doc.cycle.corep, doc.haar
    pi_h = doc.cycle.pi_of(doc.coaction.h)
    cert = doc.cycle.pi_unit
    rng = np.random.default_rng(36)
    xi = ModuleVector(cert @ rng.standard_normal(U.hdim), cert)
    eta = ModuleVector(cert @ rng.standard_normal(U.hdim), cert)
    lhs = free_module_inner(haar, sigma_map(xi, pi_h, U, haar), sigma_map(eta, pi_h, U, haar))
    assert lhs.distance(module_inner(xi, eta, U, haar)) < 1e-9
    back = sigma_star(sigma_map(xi, pi_h, U, haar), pi_h, U, haar, cert)
    assert_allclose(back.vec, xi.vec, atol=1e-9)


def test_free_module_vectors_add():
    a = Element({"x": [[1.0]]})
    f = FreeModuleVector(2, [(np.array([1.0, 0.0]), a)])
    g = FreeModuleVector(2, [(np.array([0.0, 1.0]), a)])
    total = (f + g).canonical()["x"]
    assert_allclose(total[:, 0, 0], [1.0, 1.0])
    assert f.distance(f) == 0.0


def test_sharp_twist_is_not_literal_outside_kac(suq2_wide_doc, s3_dual_doc):
    x = Element({"1/2": np.eye(2)})
    assert twist_sharp(suq2_wide_doc.haar, x) < 1e-10
    assert twist_sharp_literal(suq2_wide_doc.haar, x) > 1e-3
    y = Element({"rho2": np.eye(2)})
    assert twist_sharp_literal(s3_dual_doc.haar, y) < 1e-10


def test_successive_actions_stay_certified(z3_regular_doc):
    doc = z3_regular_doc
    cycle, haar = doc.cycle, doc.haar
    U = cycle.corep
    span = np.hstack([cycle.pi_of(c) for c in doc.coaction.basis()])
    P = cycle.pi_of(Element({"0": [[1.0]]}))
    xi = ModuleVector(P @ np.ones(3), P, span)
    a, b = Element({"1": [[1.0]]}), Element({"2": [[1.0]]})
    once = module_act(xi, a, U, haar)
    assert once.residual() < 1e-12
    twice = module_act(once, b, U, haar)
    assert_allclose(twice.vec, module_act(xi, convolve(haar, a, b), U, haar).vec, atol=1e-12)
    # no module certificate, so the image is uncertified
    bare = module_act(ModuleVector(P @ np.ones(3), P), a, U, haar)
    with pytest.raises(CertificateError):
        module_act(bare, b, U, haar)

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dqgkit.blockalg import Element
from dqgkit.builders import suq2_spec
from dqgkit.exceptions import StructuralError
from dqgkit.haar import (
    K_angle,
    canonical_haar,
    derive_K_from_S2,
    fit_constants,
    modular_data,
    s_squared_map,
    verify_haar,
)


@pytest.mark.parametrize("fixture", ["z5_doc", "s3_doc", "s3_dual_doc", "suq2_wide_doc"])
def test_verify_haar_passes(fixture, request):
    doc = request.getfixturevalue(fixture)
    report = verify_haar(doc.spec, doc.haar, samples=4, tol=1e-9, seed=11)
    assert report.passed, [(c.name, c.residual) for c in report.failed]


def test_counting_measure_on_c0(z5_doc):
    haar = z5_doc.haar
    assert haar.kac
    assert haar.phi(Element({"3": [[2.0]]})) == pytest.approx(2.0)
    assert haar.psi(Element({"3": [[2.0]]})) == pytest.approx(2.0)


def test_plancherel_weights_on_group_dual(s3_dual_doc):
    haar = s3_dual_doc.haar
    assert haar.kac
    assert_allclose(haar.K["rho2"], np.eye(2) / 2, atol=1e-10)
    assert haar.c_alpha["rho2"] == pytest.approx(4.0)
    fitted = fit_constants(haar)
    assert fitted.c_from_antipode == pytest.approx(1.0)
    assert fitted.c_from_counit == pytest.approx(1.0)
    assert fitted.relation_residual < 1e-9


def test_suq2_modular_element(suq2_doc):
    q = 1.5
    derived = derive_K_from_S2(suq2_doc.spec)
    assert derived.positive
    K = derived.K["1/2"]
    assert_allclose(K, np.diag([q, 1 / q]), atol=1e-8)
    assert np.trace(K).real == pytest.approx(q + 1 / q)
    assert np.trace(np.linalg.inv(K)).real == pytest.approx(q + 1 / q)
    assert not suq2_doc.haar.kac


def test_suq2_s_squared_scales_matrix_units():
    spec = suq2_spec(2.0, 1.0)
    s2 = s_squared_map(spec, "1/2")
    e01 = np.zeros(4)
    e01[1] = 1.0
    assert_allclose(s2 @ e01, 0.25 * e01, atol=1e-10)
    derived = derive_K_from_S2(spec)
    haar = canonical_haar(spec)
    assert max(K_angle(derived.K[k], haar.K[k]) for k in spec.labels) <= 1e-8


def test_modular_data_rejects_bad_input(s3_dual_doc):
    spec, haar = s3_dual_doc.spec, s3_dual_doc.haar
    bad = dict(haar.K)
    bad["rho2"] = np.array([[1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(StructuralError, match="Hermitian"):
        modular_data(spec, bad, haar.c_alpha)
    bad["rho2"] = -np.eye(2)
    with pytest.raises(StructuralError, match="positive definite"):
        modular_data(spec, bad, haar.c_alpha)
    with pytest.raises(StructuralError):
        modular_data(spec, haar.K, haar.c_alpha, c=0.0)


def test_modular_group_from_K(suq2_doc):
    haar = suq2_doc.haar
    delta = haar.delta["1/2"]
    expected = haar.c_alpha["1/2"] / haar.c * haar.K["1/2"] @ haar.K["1/2"]
    assert_allclose(delta, expected, atol=1e-12)
    theta = haar.theta["1/2"]
    assert_allclose(theta @ theta, delta, atol=1e-10)


def test_twist_multiplies_theta_powers(s3_dual_doc):
    haar = s3_dual_doc.haar
    a = Element({"rho2": [[1.0, 2.0], [3.0, 4.0]]})
    assert haar.twist(a, left=1.0, right=-1.0).distance(a) < 1e-12


def test_K_angle_resolves_small_angles(suq2_wide_doc):
    for K in suq2_wide_doc.haar.K.values():
        assert K_angle(K, 2.5 * K) < 1e-14
    assert K_angle(np.array([[1.0, 0.0]]), np.array([[1.0, 1e-12]])) == pytest.approx(1e-12, rel=1e-6)
    assert K_angle(np.eye(2), np.diag([1.0, -1.0])) == pytest.approx(np.pi / 2)

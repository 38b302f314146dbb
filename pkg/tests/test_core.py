import numpy as np
import pytest
from numpy.testing import assert_allclose

from dqgkit.blockalg import BlockIndex, Element, Functional, TensorElement, tensor_product
from dqgkit.core import (
    DeltaEntry,
    DqgSpec,
    Multiplier,
    Window,
    antipode,
    counit,
    galois_solve,
    galois_t1,
    galois_t2,
    perturb_isometry,
    verify_bialgebra,
    verify_multiplier_rule,
)
from dqgkit.exceptions import StructuralError, WindowOverflow
from dqgkit.utils import random_element


def test_commutative_bialgebra_is_exact(z5_doc, s3_doc):
    for doc in (z5_doc, s3_doc):
        report = verify_bialgebra(doc.spec, samples=6, tol=1e-12, seed=1)
        assert report.passed, [c.name for c in report.failed]
        assert report["coassociativity"].samples == 6


def test_group_dual_bialgebra(s3_dual_doc):
    report = verify_bialgebra(s3_dual_doc.spec, samples=6, tol=1e-9, seed=2)
    assert report.passed, [c.name for c in report.failed]
    assert report["galois-T1-bijective"].samples > 0


def test_suq2_window_bialgebra(suq2_wide_doc):
    report = verify_bialgebra(suq2_wide_doc.spec, samples=4, tol=1e-9, seed=3)
    assert report.passed, [c.name for c in report.failed]
    assert report["coassociativity"].samples == 4


def test_perturbed_isometry_breaks_coassociativity(s3_dual_doc):
    spec = perturb_isometry(s3_dual_doc.spec, "rho2", "rho2", "rho2", 1e-3, seed=4)
    report = verify_bialgebra(spec, samples=32, tol=1e-9, seed=5)
    assert report["coassociativity"].residual > 1e-4
    assert not report.passed


def test_perturb_unknown_entry(s3_dual_doc):
    with pytest.raises(StructuralError):
        perturb_isometry(s3_dual_doc.spec, "triv", "rho2", "rho1", 1e-3)


def test_galois_maps_invert(s3_dual_doc):
    spec = s3_dual_doc.spec
    rng = np.random.default_rng(6)
    a, b = random_element(spec, rng), random_element(spec, rng)
    for kind, y in (("T1", galois_t1(spec, a, b)), ("T2", galois_t2(spec, a, b))):
        sol = galois_solve(spec, kind, y)
        assert sol.bijective
        assert sol.residual < 1e-9
        assert sol.tensor.distance(tensor_product(a, b)) < 1e-8
        assert sol.outputs == sol.unknowns


def test_galois_rank_without_surjectivity_is_not_bijective(s3_dual_doc):
    spec = s3_dual_doc.spec
    two = next(k for k in spec.labels if spec.dim(k) == 2)
    triv = spec.counit_label
    truncated = DqgSpec(
        spec.index,
        spec.entries,
        spec.pairing,
        spec.antipode_maps,
        spec.counit,
        complete=spec.complete - {(two, two)},
        name="truncated",
    )
    y = TensorElement({(triv, two): ((1, 2), np.eye(2))})
    sol = galois_solve(truncated, "T1", y)
    # both one-dimensional inputs land in the dropped block
    assert sol.rank == sol.unknowns == 8
    assert sol.outputs == 4
    assert not sol.bijective
    assert sol.residual > 0.5


def test_galois_overflow_outside_window(suq2_doc):
    spec = suq2_doc.spec
    a = Element({"1": np.eye(3)})
    with pytest.raises(WindowOverflow) as info:
        galois_t1(spec, a, a)
    assert info.value.pair == ("1", "1")


def test_counit_on_c0(z5_doc):
    spec = z5_doc.spec
    a = Element({"0": [[2.0]], "3": [[7.0]]})
    assert counit(spec, a) == pytest.approx(2.0)


def test_antipode_on_c0_inverts_group(z5_doc):
    spec = z5_doc.spec
    a = Element({"2": [[1.5]]})
    assert antipode(spec, a).distance(Element({"3": [[1.5]]})) < 1e-15
    assert antipode(spec, antipode(spec, a), inverse=True).distance(a) < 1e-15


def test_multiplier_rule(s3_dual_doc):
    spec, haar = s3_dual_doc.spec, s3_dual_doc.haar
    report = verify_multiplier_rule(
        spec, [Multiplier.identity(spec), haar.theta_multiplier(1.0)], samples=4, seed=7
    )
    assert report.passed


def test_window_grow(suq2_wide_doc):
    spec = suq2_wide_doc.spec
    window = Window.of(spec)
    assert window.J == ("0", "1/2", "1")
    assert window.grow(spec, 1).J == ("0", "1/2", "1", "3/2")
    assert window.grow(spec, 0).J == window.J


def _tiny_spec(**overrides):
    one = np.eye(1)
    kwargs = dict(
        blocks=[BlockIndex("e", 1)],
        delta=[DeltaEntry("e", "e", "e", one, 1)],
        pairing={"e": "e"},
        antipode={"e": one},
        counit=Functional({"e": one}),
    )
    kwargs.update(overrides)
    return DqgSpec(**kwargs)


def test_structural_validation():
    assert _tiny_spec().counit_label == "e"
    with pytest.raises(StructuralError, match="shape"):
        _tiny_spec(delta=[DeltaEntry("e", "e", "e", np.ones((2, 1)), 1)])
    with pytest.raises(StructuralError, match="V\\*V"):
        _tiny_spec(delta=[DeltaEntry("e", "e", "e", 2 * np.eye(1), 1)])
    with pytest.raises(StructuralError, match="antipode"):
        _tiny_spec(antipode={})
    with pytest.raises(StructuralError, match="invertible"):
        _tiny_spec(antipode={"e": np.zeros((1, 1))})
    with pytest.raises(StructuralError, match="unknown"):
        _tiny_spec(pairing={"e": "f"})


def test_matrix_units_span_blocks(s3_dual_doc):
    spec = s3_dual_doc.spec
    units = spec.matrix_units()
    assert len(units) == 1 + 1 + 4
    assert_allclose(spec.unit().blocks["rho2"], np.eye(2))

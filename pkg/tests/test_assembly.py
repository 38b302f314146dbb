import numpy as np
import pytest
from numpy.testing import assert_allclose

from dqgkit.assembly import (
    Coaction,
    CycleRep,
    normalized_cutoff,
    cutoff_residual,
    assembly_class,
    averaging_bound,
    classical_average,
    coaction_validate,
    compact_witness,
    conv_action,
    cycle_validate,
    f_prime,
    homotopy_check,
    module_basis,
    witness_operator,
)
from dqgkit.blockalg import Element
from dqgkit.builders import build_commutative, build_group_dual, cyclic, symmetric3
from dqgkit.core import DeltaEntry
from dqgkit.corep import Corep
from dqgkit.dual import convolve
from dqgkit.exceptions import StructuralError
from dqgkit.utils import random_element


@pytest.fixture(scope="module")
def s3_dual_regular():
    return build_group_dual(symmetric3(), "regular")


@pytest.fixture(scope="module")
def s3_dual_trivial():
    return build_group_dual(symmetric3(), "trivial")


def test_point_coaction_cutoff(s3_dual_doc):
    spec, haar = s3_dual_doc.spec, s3_dual_doc.haar
    coaction = Coaction.point(spec, haar)
    # phi(1) = sum of squared dimensions
    assert_allclose(coaction.h.blocks["pt"], [[1 / np.sqrt(6)]])
    assert coaction_validate(coaction, spec, haar, samples=3).passed


def test_regular_coaction(z3_regular_doc, s3_dual_regular):
    for doc in (z3_regular_doc, s3_dual_regular):
        report = coaction_validate(doc.coaction, doc.spec, doc.haar, samples=4, seed=41)
        assert report.passed, [(c.name, c.residual) for c in report.failed]


def test_cutoff_residual_scales(z3_regular_doc):
    doc = z3_regular_doc
    assert cutoff_residual(doc.coaction, doc.haar) < 1e-12
    assert cutoff_residual(doc.coaction, doc.haar, doc.coaction.h * 2.0) == pytest.approx(3.0)


def test_cutoff_weights_must_average_to_a_scalar(s3_dual_doc):
    spec, haar = s3_dual_doc.spec, s3_dual_doc.haar
    entries = tuple(
        DeltaEntry(k, k, beta, np.eye(spec.dim(beta)), spec.dim(beta)) for k in ("a", "b") for beta in spec.labels
    )
    # two fixed points: the average keeps the weights apart
    coaction = Coaction(spec, {"a": 1, "b": 1}, entries, None, "two points")
    h = normalized_cutoff(coaction, haar, Element({"a": [[3.0]], "b": [[3.0]]}))
    assert cutoff_residual(coaction, haar, h) < 1e-12
    with pytest.raises(StructuralError, match="multiple of the unit"):
        normalized_cutoff(coaction, haar, Element({"a": [[1.0]], "b": [[2.0]]}))


def test_coactions_need_a_finite_spec(suq2_doc):
    with pytest.raises(StructuralError):
        Coaction.point(suq2_doc.spec, suq2_doc.haar)


def test_cycle_validate(z3_regular_doc, s3_dual_regular):
    for doc in (z3_regular_doc, s3_dual_regular):
        report = cycle_validate(doc.cycle, doc.coaction, doc.spec)
        assert report.passed, [(c.name, c.residual) for c in report.failed]
        assert report["cycle-commutator"].verdict == "info"


def test_covariance_breaks_with_wrong_corep(z3_regular_doc):
    doc = z3_regular_doc
    cycle = doc.cycle
    wrong = CycleRep(Corep.trivial(doc.spec, cycle.hdim), cycle.pi, cycle.F, cycle.cdims, "wrong")
    report = cycle_validate(wrong, doc.coaction, doc.spec)
    assert report["covariance"].verdict == "fail"


def test_regular_c0_averages_to_identity(z3_regular_doc):
    doc = z3_regular_doc
    Fp = f_prime(doc.cycle, doc.coaction, doc.haar)
    assert_allclose(Fp, np.eye(3), atol=1e-12)
    pi_h = doc.cycle.pi_of(doc.coaction.h)
    assert_allclose(classical_average(doc.cycle, pi_h), Fp, atol=1e-12)
    assert averaging_bound(doc.cycle, Fp) < 1e-12


def test_trivial_cycle_keeps_F(s3_dual_trivial):
    doc = s3_dual_trivial
    Fp = f_prime(doc.cycle, doc.coaction, doc.haar)
    assert_allclose(Fp, np.diag([1.0, -1.0]), atol=1e-10)


@pytest.mark.parametrize("fixture", ["z3_regular_doc", "s3_dual_regular", "s3_dual_trivial"])
def test_assembly_class_passes(fixture, request):
    doc = request.getfixturevalue(fixture)
    rep = assembly_class(doc.cycle, doc.coaction, doc.haar, samples=2, seed=42)
    assert rep.report.passed, [(c.name, c.residual) for c in rep.report.failed]
    assert rep.fprime.shape == (doc.cycle.hdim, doc.cycle.hdim)
    assert len(rep.module_basis) == len(rep.gram)
    assert "witness-identity" in rep.residuals


def test_module_basis_spans_H(s3_dual_regular):
    doc = s3_dual_regular
    basis = module_basis(doc.cycle, doc.coaction)
    frame = np.column_stack([b.vec for b in basis])
    assert np.linalg.matrix_rank(frame) == doc.cycle.hdim


def test_witness_expansion_reproduces_operator(s3_dual_regular):
    doc = s3_dual_regular
    T = f_prime(doc.cycle, doc.coaction, doc.haar) @ f_prime(doc.cycle, doc.coaction, doc.haar)
    T = T - np.eye(doc.cycle.hdim)
    result = compact_witness(T, doc.cycle, doc.coaction, doc.haar, samples=2, seed=44)
    assert result.equivariance < 1e-9
    assert result.identity_residual < 1e-9
    assert result.conv_residual < 1e-9
    assert result.witnesses

    rng = np.random.default_rng(43)
    d = doc.cycle.hdim
    skew = compact_witness(rng.standard_normal((d, d)), doc.cycle, doc.coaction, doc.haar, samples=1)
    assert skew.equivariance > 1e-6


def test_conv_action_is_linear(s3_dual_regular):
    doc = s3_dual_regular
    rng = np.random.default_rng(45)
    pi_h = doc.cycle.pi_of(doc.coaction.h)
    Y = witness_operator(doc.cycle, doc.haar, np.eye(doc.cycle.hdim), pi_h)
    a, b = random_element(doc.spec, rng), random_element(doc.spec, rng)
    lhs = conv_action(Y, a + b, doc.spec, doc.haar)
    rhs = conv_action(Y, a, doc.spec, doc.haar) + conv_action(Y, b, doc.spec, doc.haar)
    assert lhs.distance(rhs) < 1e-10
    twice = conv_action(conv_action(Y, a, doc.spec, doc.haar), b, doc.spec, doc.haar)
    once = conv_action(Y, convolve(doc.haar, a, b), doc.spec, doc.haar)
    assert twice.distance(once) < 1e-9


def test_homotopy_between_cutoffs():
    doc = build_commutative(cyclic(3), "regular")
    coaction, haar = doc.coaction, doc.haar
    h1 = coaction.h
    h2 = normalized_cutoff(coaction, haar, Element({"1": [[1.0]]}))
    assert_allclose(f_prime(doc.cycle, coaction, haar, h=h2), -np.eye(3), atol=1e-12)
    report = homotopy_check(doc.cycle, coaction, haar, h1, h2, steps=3, samples=2, seed=46)
    assert report.passed, [(c.name, c.residual) for c in report.failed]
    assert report["endpoint-distance"].residual == pytest.approx(2.0)
    assert len([c for c in report.checks if c.name.startswith("path-witness")]) == 5

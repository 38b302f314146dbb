import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dqgkit.builders import (
    NAMED_GROUPS,
    TRIVIAL,
    build_commutative,
    build_group_dual,
    build_suq2_window,
    cyclic,
    generators,
    intertwiner_space,
    irreps_by_averaging,
    isotypic_isometry,
    load_group,
    nullspace,
    qint,
    spin_label,
    suq2_spec,
    symmetric3,
    transpose_conjugation,
    validate_table,
)
from dqgkit.builders.intertwiners import solve_antipode_twist, swap_matrix
from dqgkit.builders.suq2 import tensor_generators
from dqgkit.exceptions import BuilderError, GroupTableError


def test_named_groups_are_groups():
    for name, make in NAMED_GROUPS.items():
        group = make()
        assert group.name == name
        g = group.order - 1
        assert group.mul(g, group.inverse(g)) == group.identity
    assert not symmetric3().abelian
    assert cyclic(6).abelian


def test_invalid_tables_are_rejected():
    with pytest.raises(GroupTableError, match="square"):
        validate_table(np.zeros((2, 3), dtype=int))
    with pytest.raises(GroupTableError, match="identity"):
        validate_table(np.array([[1, 0], [1, 0]]))
    with pytest.raises(GroupTableError):
        validate_table(np.array([[0, 1, 2], [1, 0, 2], [2, 2, 0]]))


def test_load_group_from_file(tmp_path):
    path = tmp_path / "z4.json"
    path.write_text(json.dumps({"name": "Z4", "table": [[(i + j) % 4 for j in range(4)] for i in range(4)]}))
    group = load_group(str(path))
    assert group.name == "Z4"
    assert group.order == 4
    with pytest.raises(GroupTableError, match="unknown group"):
        load_group("Q8")


def test_s3_irreps():
    data = irreps_by_averaging(symmetric3(), seed=0)
    assert [r.dim for r in data.irreps.values()] == [1, 1, 2]
    assert data.labels[0] == TRIVIAL
    assert data.multiplicity("rho2", "rho2", "rho2") == 1
    assert data.multiplicity(TRIVIAL, "rho2", "rho2") == 1
    assert data.multiplicity("rho1", "rho1", "rho1") == 0
    for r in data.irreps.values():
        for g in range(6):
            assert_allclose(r.matrices[g] @ r.matrices[g].conj().T, np.eye(r.dim), atol=1e-10)


def test_cyclic_irreps_are_characters():
    data = irreps_by_averaging(cyclic(5), seed=3)
    assert len(data.irreps) == 5
    assert all(r.dim == 1 for r in data.irreps.values())
    # conjugation pairs the non-trivial characters
    assert all(data.conjugate[data.conjugate[k]] == k for k in data.irreps)
    assert sum(1 for k, v in data.conjugate.items() if k == v) == 1


def test_group_dual_spec_shape(s3_dual_doc):
    spec = s3_dual_doc.spec
    assert [spec.dim(k) for k in spec.labels] == [1, 1, 2]
    entry = next(e for e in spec.entries if (e.gamma, e.alpha, e.beta) == ("rho2", "rho2", "rho2"))
    assert entry.mult == 1
    assert entry.iso.shape == (4, 2)
    assert spec.counit_label == TRIVIAL


def test_nullspace_and_intertwiners():
    A = np.array([[1.0, 1.0], [2.0, 2.0]])
    null = nullspace(A)
    assert null.shape == (2, 1)
    assert_allclose(A @ null, 0, atol=1e-12)
    sols = intertwiner_space([np.diag([1.0, -1.0])], [np.diag([-1.0, 1.0])])
    assert len(sols) == 2


def test_isotypic_isometry_checks_multiplicity():
    X = np.diag([1.0, -1.0])
    V, m = isotypic_isometry([X], [np.array([[1.0]])], 1)
    assert m == 1
    assert_allclose(np.abs(V[:, 0]), [1.0, 0.0])
    with pytest.raises(BuilderError):
        isotypic_isometry([X], [np.array([[1.0]])], 2, ("x", "y", "z"))


def test_transpose_conjugation():
    rng = np.random.default_rng(51)
    D = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    y = rng.standard_normal((3, 3))
    out = transpose_conjugation(D) @ y.reshape(-1)
    assert_allclose(out.reshape(3, 3), D @ y.T @ np.linalg.inv(D), atol=1e-10)
    assert_allclose(swap_matrix(3) @ y.reshape(-1), y.T.reshape(-1))


def test_antipode_twist_needs_irreducible():
    with pytest.raises(BuilderError, match="solutions"):
        solve_antipode_twist([np.eye(2)], [np.eye(2)], "reducible")


def test_quantum_integers():
    assert qint(1, 1.5) == pytest.approx(1.0)
    assert qint(2, 2.0) == pytest.approx(2.5)
    assert spin_label(3) == "3/2"
    assert spin_label(2) == "1"


@pytest.mark.parametrize("q", [0.7, 1.5, 2.0])
def test_suq2_generators_satisfy_relations(q):
    for twice in range(4):
        g = generators(twice, q)
        E, F, k = g["E"], g["F"], g["k"]
        kinv = np.linalg.inv(k)
        assert_allclose(k @ E @ kinv, q * E, atol=1e-10)
        assert_allclose(E @ F - F @ E, (k @ k - kinv @ kinv) / (q - 1 / q), atol=1e-10)
    a, b = generators(1, q), generators(2, q)
    E, F, k = tensor_generators(a, b)
    kinv = np.linalg.inv(k)
    assert_allclose(E @ F - F @ E, (k @ k - kinv @ kinv) / (q - 1 / q), atol=1e-10)
    assert_allclose(F, E.conj().T, atol=1e-12)


def test_suq2_window(suq2_doc):
    spec = suq2_doc.spec
    assert spec.labels == ("0", "1/2", "1")
    assert [spec.dim(k) for k in spec.labels] == [1, 2, 3]
    assert spec.certified("1/2", "1/2")
    assert not spec.certified("1/2", "1")
    assert spec.window == ("0", "1/2")
    assert "q=1.5" in spec.name


@pytest.mark.parametrize("q, L", [(1.0, 1.0), (-2.0, 1.0), (1.5, 0.0), (1.5, 0.75)])
def test_suq2_rejects_bad_parameters(q, L):
    with pytest.raises(BuilderError):
        suq2_spec(q, L)


def test_builders_attach_cycles():
    doc = build_commutative(symmetric3(), "point")
    assert doc.cycle.hdim == 1
    # the sign character
    signs = sorted(float(doc.cycle.corep.block(k)[0, 0].real) for k in doc.spec.labels)
    assert_allclose(signs, [-1, -1, -1, 1, 1, 1], atol=1e-10)
    doc = build_group_dual(cyclic(2), "trivial")
    assert doc.cycle.hdim == 2
    with pytest.raises(BuilderError):
        build_commutative(cyclic(2), "nonsense")


def test_suq2_document_has_no_cycle():
    doc = build_suq2_window(2.0, 0.5)
    assert doc.coaction is None and doc.cycle is None

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dqgkit.blockalg import Element
from dqgkit.builders import build_group_dual, symmetric3
from dqgkit.exceptions import SpecFormatError, StructuralError
from dqgkit.formats import (
    SPEC_VERSION,
    decode_matrix,
    emit_element,
    emit_spec,
    encode_matrix,
    load_spec,
    parse_element,
    parse_spec,
    save_spec,
)


@pytest.fixture(scope="module")
def s3_dual_regular():
    return build_group_dual(symmetric3(), "regular")


def _raw(doc) -> dict:
    return json.loads(emit_spec(doc))


def _dims(spec) -> dict:
    return {k: spec.dim(k) for k in spec.labels}


@pytest.mark.parametrize("fixture", ["s3_dual_regular", "suq2_doc", "z3_regular_doc"])
def test_emitted_documents_reparse_identically(fixture, request):
    doc = request.getfixturevalue(fixture)
    data = emit_spec(doc)
    again = parse_spec(data)
    assert emit_spec(again) == data
    assert again.name == doc.name
    assert again.spec.labels == doc.spec.labels


def test_cycle_survives_parsing(s3_dual_regular):
    doc = parse_spec(emit_spec(s3_dual_regular))
    assert doc.cycle.hdim == s3_dual_regular.cycle.hdim
    assert_allclose(doc.cycle.F, s3_dual_regular.cycle.F)
    assert doc.coaction.h.distance(s3_dual_regular.coaction.h) == 0.0


def test_complete_and_window_are_null_for_full_specs(s3_dual_doc, suq2_doc):
    raw = _raw(s3_dual_doc)
    assert raw["version"] == SPEC_VERSION
    assert raw["complete"] is None and raw["window"] is None
    assert "coaction" not in raw and "cycle" not in raw
    raw = _raw(suq2_doc)
    assert raw["window"] == ["0", "1/2"]
    assert ["1/2", "1/2"] in raw["complete"]
    assert ["1/2", "1"] not in raw["complete"]


def test_missing_haar_section(s3_dual_doc):
    raw = _raw(s3_dual_doc)
    del raw["haar"]
    with pytest.raises(SpecFormatError) as info:
        parse_spec(json.dumps(raw))
    assert info.value.field == "haar"


def test_iso_shape_mismatch_names_the_entry(s3_dual_doc):
    raw = _raw(s3_dual_doc)
    raw["delta"][0]["iso"]["shape"] = [99, 1]
    with pytest.raises(SpecFormatError) as info:
        parse_spec(json.dumps(raw))
    assert info.value.field == "delta.0.iso.shape"
    assert "(gamma, alpha, beta)" in info.value.message


def test_schema_errors(s3_dual_doc, s3_dual_regular):
    raw = _raw(s3_dual_doc)
    raw["version"] = "dqgkit-spec/0"
    with pytest.raises(SpecFormatError) as info:
        parse_spec(json.dumps(raw))
    assert info.value.field == "version"

    with pytest.raises(SpecFormatError) as info:
        parse_spec(b"{not json")
    assert info.value.field.startswith("line")

    raw = _raw(s3_dual_regular)
    del raw["coaction"]
    with pytest.raises(SpecFormatError) as info:
        parse_spec(json.dumps(raw))
    assert info.value.field == "cycle"

    raw = _raw(s3_dual_doc)
    raw["blocks"][1]["label"] = raw["blocks"][0]["label"]
    with pytest.raises(SpecFormatError, match="duplicate"):
        parse_spec(json.dumps(raw))


def test_structural_violations_still_raise(s3_dual_doc):
    raw = _raw(s3_dual_doc)
    entry = raw["delta"][-1]
    entry["iso"]["data"] = [[2 * re, 2 * im] for re, im in entry["iso"]["data"]]
    with pytest.raises(StructuralError, match="V\\*V"):
        parse_spec(json.dumps(raw))


def test_matrix_codec():
    m = np.array([[1 + 2j, 0.5], [-1e-300, 3j]])
    assert_allclose(decode_matrix(encode_matrix(m), "m"), m)
    with pytest.raises(SpecFormatError) as info:
        decode_matrix(encode_matrix(m), "m", (3, 3))
    assert info.value.field == "m.shape"
    with pytest.raises(SpecFormatError) as info:
        decode_matrix({"shape": [1, 1], "data": [[1.0, True]]}, "m")
    assert info.value.field == "m.data.0"


def test_non_finite_numbers_are_format_errors(s3_dual_doc):
    raw = _raw(s3_dual_doc)
    raw["delta"][0]["iso"]["data"][0] = [float("nan"), 0.0]
    with pytest.raises(SpecFormatError) as info:
        parse_spec(json.dumps(raw))
    assert info.value.field == "delta.0.iso.data.0"

    raw = _raw(s3_dual_doc)
    raw["haar"]["c"] = float("inf")
    with pytest.raises(SpecFormatError) as info:
        parse_spec(json.dumps(raw))
    assert info.value.field == "haar.c"

    with pytest.raises(SpecFormatError) as info:
        decode_matrix({"shape": [1, 1], "data": [[0.0, float("-inf")]]}, "m")
    assert info.value.field == "m.data.0"


def test_element_documents(s3_dual_doc):
    dims = _dims(s3_dual_doc.spec)
    h = Element({"triv": [[0.5]], "rho2": [[1.0, 1j], [-1j, 2.0]]})
    back = parse_element(emit_element(h), dims)
    assert back.distance(h) == 0.0
    with pytest.raises(SpecFormatError):
        parse_element(emit_element(Element({"rho2": np.eye(3)})), dims)
    with pytest.raises(SpecFormatError) as info:
        parse_element("[", dims)
    assert info.value.field == "document"


def test_save_and_load(tmp_path, suq2_doc):
    path = tmp_path / "suq2.json"
    save_spec(suq2_doc, path)
    assert path.read_bytes() == emit_spec(suq2_doc)
    doc = load_spec(path)
    assert doc.spec.window == suq2_doc.spec.window
    assert doc.haar.c == pytest.approx(suq2_doc.haar.c)

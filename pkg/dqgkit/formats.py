"""JSON spec documents.

Schema ``dqgkit-spec/1``.  Matrices are ``{"shape": [rows, cols], "data": [[re, im], ...]}``
with row-major data; labels are strings.  Top-level keys:

    version, name, blocks, delta, pairing, antipode, counit, haar,
    complete (null = every pair), window (null = every block),
    coaction (optional), cycle (optional, needs coaction)

Emission uses sorted keys and Python's shortest float repr, so
``emit_spec(parse_spec(x)) == x`` for every emitted ``x``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from numbers import Real
from pathlib import Path
from typing import Any

import numpy as np

from .abc import AbstractDocument
from .assembly import Coaction, CycleRep
from .blockalg import BlockIndex, Element, Functional
from .core import DeltaEntry, DqgSpec
from .corep import Corep
from .exceptions import SpecFormatError
from .haar import HaarData, modular_data
from .utils import label_key

SPEC_VERSION = "dqgkit-spec/1"


def encode_matrix(matrix: np.ndarray) -> dict[str, Any]:
    arr = np.asarray(matrix, dtype=complex)
    flat = arr.reshape(-1)
    return {
        "shape": [int(s) for s in arr.shape],
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def decode_matrix(obj: Any, path: str, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Decodes a matrix, checking the declared shape against ``shape`` when given.

    Raises:
        SpecFormatError: Malformed matrix or shape mismatch.
    """
    if not isinstance(obj, dict) or "shape" not in obj or "data" not in obj:
        raise SpecFormatError(path, "expected an object with 'shape' and 'data'")
    dims = obj["shape"]
    if (
        not isinstance(dims, list)
        or len(dims) != 2
        or not all(isinstance(d, int) and not isinstance(d, bool) and d >= 0 for d in dims)
    ):
        raise SpecFormatError(f"{path}.shape", "expected two non-negative integers")
    rows, cols = dims
    if shape is not None and (rows, cols) != tuple(shape):
        raise SpecFormatError(f"{path}.shape", f"got {(rows, cols)}, expected {tuple(shape)}")
    data = obj["data"]
    if not isinstance(data, list) or len(data) != rows * cols:
        raise SpecFormatError(f"{path}.data", f"expected {rows * cols} [re, im] pairs")
    re = np.empty(rows * cols)
    im = np.empty(rows * cols)
    for i, pair in enumerate(data):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(x, Real) and not isinstance(x, bool) for x in pair)
        ):
            raise SpecFormatError(f"{path}.data.{i}", "expected a [re, im] pair of numbers")
        if not np.isfinite(pair).all():
            raise SpecFormatError(f"{path}.data.{i}", f"non-finite entry {pair!r}")
        re[i], im[i] = pair
    arr = np.empty(rows * cols, dtype=complex)
    arr.real = re
    arr.imag = im
    return arr.reshape(rows, cols)


def _section(obj: dict, key: str, path: str = "") -> Any:
    where = f"{path}.{key}" if path else key
    if not isinstance(obj, dict) or key not in obj:
        raise SpecFormatError(where, "missing section")
    return obj[key]


def _mapping(obj: Any, path: str) -> dict:
    if not isinstance(obj, dict):
        raise SpecFormatError(path, "expected an object keyed by block label")
    return obj


def _label(value: Any, path: str, known: dict | None = None) -> str:
    if not isinstance(value, str):
        raise SpecFormatError(path, f"labels are strings, got {value!r}")
    if known is not None and value not in known:
        raise SpecFormatError(path, f"unknown block {value!r}")
    return value


def _int(value: Any, path: str, minimum: int = 1) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise SpecFormatError(path, f"expected an integer >= {minimum}, got {value!r}")
    return value


def _number(value: Any, path: str) -> float:
    if not isinstance(value, Real) or isinstance(value, bool) or not np.isfinite(value):
        raise SpecFormatError(path, f"expected a finite number, got {value!r}")
    return float(value)


def _entry(obj: Any, path: str, gdims: dict, adims: dict, bdims: dict) -> DeltaEntry:
    gamma = _label(_section(obj, "gamma", path), f"{path}.gamma", gdims)
    alpha = _label(_section(obj, "alpha", path), f"{path}.alpha", adims)
    beta = _label(_section(obj, "beta", path), f"{path}.beta", bdims)
    mult = _int(_section(obj, "mult", path), f"{path}.mult")
    expected = (adims[alpha] * bdims[beta], gdims[gamma] * mult)
    iso = _section(obj, "iso", path)
    try:
        V = decode_matrix(iso, f"{path}.iso", expected)
    except SpecFormatError as e:
        raise SpecFormatError(e.field, f"{e.message} for (gamma, alpha, beta) = ({gamma}, {alpha}, {beta})") from None
    return DeltaEntry(gamma, alpha, beta, V, mult)


@dataclass(eq=False)
class SpecDocument(AbstractDocument):
    """A spec with its Haar data and an optional coaction and cycle."""

    spec: DqgSpec
    haar: HaarData
    coaction: Coaction | None = None
    cycle: CycleRep | None = None
    version: str = SPEC_VERSION

    @property
    def name(self) -> str:
        return self.spec.name

    def to_json(self) -> dict[str, Any]:
        spec, haar = self.spec, self.haar
        n_pairs = len(spec.labels) ** 2
        out: dict[str, Any] = {
            "version": self.version,
            "name": spec.name,
            "blocks": [{"label": b.label, "dim": int(b.dim)} for b in spec.index],
            "delta": [_encode_entry(e) for e in spec.entries],
            "pairing": dict(spec.pairing),
            "antipode": {k: encode_matrix(m) for k, m in spec.antipode_maps.items()},
            "counit": {k: encode_matrix(m) for k, m in spec.counit.densities.items()},
            "haar": {
                "K": {k: encode_matrix(m) for k, m in haar.K.items()},
                "c_alpha": {k: float(v) for k, v in haar.c_alpha.items()},
                "c": float(haar.c),
            },
            "complete": None
            if len(spec.complete) == n_pairs
            else sorted(([a, b] for a, b in spec.complete), key=lambda p: (label_key(p[0]), label_key(p[1]))),
            "window": None if spec.window == spec.labels else list(spec.window),
        }
        if self.coaction is not None:
            c = self.coaction
            out["coaction"] = {
                "name": c.name,
                "cdims": {k: int(n) for k, n in c.cdims.items()},
                "entries": [_encode_entry(e) for e in c.entries],
                "h": None if c.h is None else {k: encode_matrix(m) for k, m in c.h.blocks.items()},
            }
        if self.cycle is not None:
            cy = self.cycle
            out["cycle"] = {
                "name": cy.name,
                "hdim": cy.hdim,
                "U": {k: encode_matrix(m) for k, m in cy.corep.U.blocks.items()},
                "pi": {k: {"mult": int(m), "iso": encode_matrix(P)} for k, (P, m) in cy.pi.items()},
                "F": encode_matrix(cy.F),
            }
        return out


def _encode_entry(e: DeltaEntry) -> dict[str, Any]:
    return {"gamma": e.gamma, "alpha": e.alpha, "beta": e.beta, "mult": int(e.mult), "iso": encode_matrix(e.iso)}


def emit_spec(doc: SpecDocument) -> bytes:
    return (json.dumps(doc.to_json(), indent=1, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def _decode_element(obj: Any, path: str, dims: dict) -> Element:
    blocks = {}
    for key, value in _mapping(obj, path).items():
        label = _label(key, f"{path}.{key}", dims)
        blocks[label] = decode_matrix(value, f"{path}.{key}", (dims[label],) * 2)
    return Element(blocks)


def parse_spec(data: bytes | str) -> SpecDocument:
    """Parses and re-validates a spec document.

    Raises:
        SpecFormatError: The document violates the schema; the field path names the culprit.
        StructuralError: The data parse but violate the structural invariants.
    """
    try:
        raw = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise SpecFormatError(f"line {getattr(e, 'lineno', 0)}", f"not valid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise SpecFormatError("document", "expected a JSON object")

    version = _section(raw, "version")
    if version != SPEC_VERSION:
        raise SpecFormatError("version", f"unsupported version {version!r}, expected {SPEC_VERSION!r}")
    name = _section(raw, "name")
    if not isinstance(name, str):
        raise SpecFormatError("name", "expected a string")

    blocks_raw = _section(raw, "blocks")
    if not isinstance(blocks_raw, list) or not blocks_raw:
        raise SpecFormatError("blocks", "expected a non-empty list")
    blocks, dims = [], {}
    for i, b in enumerate(blocks_raw):
        label = _label(_section(b, "label", f"blocks.{i}"), f"blocks.{i}.label")
        if label in dims:
            raise SpecFormatError(f"blocks.{i}.label", f"duplicate block {label!r}")
        dims[label] = _int(_section(b, "dim", f"blocks.{i}"), f"blocks.{i}.dim")
        blocks.append(BlockIndex(label, dims[label]))

    delta_raw = _section(raw, "delta")
    if not isinstance(delta_raw, list):
        raise SpecFormatError("delta", "expected a list of entries")
    entries = [_entry(e, f"delta.{i}", dims, dims, dims) for i, e in enumerate(delta_raw)]

    pairing = {}
    for key, value in _mapping(_section(raw, "pairing"), "pairing").items():
        pairing[_label(key, f"pairing.{key}", dims)] = _label(value, f"pairing.{key}", dims)

    antipode = {}
    for key, value in _mapping(_section(raw, "antipode"), "antipode").items():
        label = _label(key, f"antipode.{key}", dims)
        n = dims[label] ** 2
        antipode[label] = decode_matrix(value, f"antipode.{key}", (n, n))
    for label in dims:
        if label not in antipode:
            raise SpecFormatError(f"antipode.{label}", "missing section")

    counit = Functional(dict(_decode_element(_section(raw, "counit"), "counit", dims).blocks))

    complete_raw = _section(raw, "complete")
    complete = None
    if complete_raw is not None:
        if not isinstance(complete_raw, list):
            raise SpecFormatError("complete", "expected null or a list of [alpha, beta] pairs")
        complete = []
        for i, pair in enumerate(complete_raw):
            if not isinstance(pair, list) or len(pair) != 2:
                raise SpecFormatError(f"complete.{i}", "expected an [alpha, beta] pair")
            complete.append((_label(pair[0], f"complete.{i}.0", dims), _label(pair[1], f"complete.{i}.1", dims)))

    window_raw = _section(raw, "window")
    window = None
    if window_raw is not None:
        if not isinstance(window_raw, list):
            raise SpecFormatError("window", "expected null or a list of labels")
        window = [_label(x, f"window.{i}", dims) for i, x in enumerate(window_raw)]

    spec = DqgSpec(blocks, entries, pairing, antipode, counit, complete, window, name)

    haar_raw = _section(raw, "haar")
    K = {
        _label(k, f"haar.K.{k}", dims): decode_matrix(v, f"haar.K.{k}", (dims[k],) * 2)
        for k, v in _mapping(_section(haar_raw, "K", "haar"), "haar.K").items()
    }
    c_alpha = {
        _label(k, f"haar.c_alpha.{k}", dims): _number(v, f"haar.c_alpha.{k}")
        for k, v in _mapping(_section(haar_raw, "c_alpha", "haar"), "haar.c_alpha").items()
    }
    c = _number(_section(haar_raw, "c", "haar"), "haar.c")
    haar = modular_data(spec, K, c_alpha, c)

    doc = SpecDocument(spec, haar)
    if raw.get("coaction") is not None:
        doc.coaction = _parse_coaction(raw["coaction"], spec, dims)
    if raw.get("cycle") is not None:
        if doc.coaction is None:
            raise SpecFormatError("cycle", "a cycle needs a coaction section")
        doc.cycle = _parse_cycle(raw["cycle"], doc.coaction, dims)
    return doc


def _parse_coaction(obj: Any, spec: DqgSpec, dims: dict) -> Coaction:
    name = _section(obj, "name", "coaction")
    cdims = {}
    for key, value in _mapping(_section(obj, "cdims", "coaction"), "coaction.cdims").items():
        cdims[_label(key, f"coaction.cdims.{key}")] = _int(value, f"coaction.cdims.{key}")
    entries_raw = _section(obj, "entries", "coaction")
    if not isinstance(entries_raw, list):
        raise SpecFormatError("coaction.entries", "expected a list of entries")
    entries = tuple(_entry(e, f"coaction.entries.{i}", cdims, cdims, dims) for i, e in enumerate(entries_raw))
    h_raw = _section(obj, "h", "coaction")
    h = None if h_raw is None else _decode_element(h_raw, "coaction.h", cdims)
    return Coaction(spec, cdims, entries, h, str(name))


def _parse_cycle(obj: Any, coaction: Coaction, dims: dict) -> CycleRep:
    hdim = _int(_section(obj, "hdim", "cycle"), "cycle.hdim")
    U = {}
    for key, value in _mapping(_section(obj, "U", "cycle"), "cycle.U").items():
        label = _label(key, f"cycle.U.{key}", dims)
        n = hdim * dims[label]
        U[label] = decode_matrix(value, f"cycle.U.{key}", (n, n))
    pi = {}
    for key, value in _mapping(_section(obj, "pi", "cycle"), "cycle.pi").items():
        kappa = _label(key, f"cycle.pi.{key}", coaction.cdims)
        m = _int(_section(value, "mult", f"cycle.pi.{key}"), f"cycle.pi.{key}.mult")
        P = decode_matrix(_section(value, "iso", f"cycle.pi.{key}"), f"cycle.pi.{key}.iso", (hdim, coaction.dim(kappa) * m))
        pi[kappa] = (P, m)
    F = decode_matrix(_section(obj, "F", "cycle"), "cycle.F", (hdim, hdim))
    name = str(_section(obj, "name", "cycle"))
    return CycleRep(Corep.from_blocks(hdim, U, name), pi, F, dict(coaction.cdims), name)


def emit_element(h: Element) -> bytes:
    """An ``{"h": {...}}`` document, as read by :func:`parse_element`."""
    body = {"h": {k: encode_matrix(m) for k, m in h.blocks.items()}}
    return (json.dumps(body, indent=1, sort_keys=True) + "\n").encode("utf-8")


def parse_element(data: bytes | str, dims: dict) -> Element:
    """Reads an element document such as a second cutoff for ``homotopy``.

    Raises:
        SpecFormatError: Malformed document or blocks that do not fit ``dims``.
    """
    try:
        raw = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise SpecFormatError("document", f"not valid JSON: {e}") from None
    return _decode_element(_section(raw, "h"), "h", dims)


def load_spec(path: str | Path) -> SpecDocument:
    return parse_spec(Path(path).read_bytes())


def save_spec(doc: SpecDocument, path: str | Path) -> None:
    Path(path).write_bytes(emit_spec(doc))

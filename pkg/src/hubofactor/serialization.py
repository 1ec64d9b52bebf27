"""JSON model files and a flat coordinate format for quadratic models.

Every integer that can grow with N is written as a decimal string, so a file
carries coefficients of any size without precision loss. Unknown fields are
ignored on load.

Model file layout::

    {
      "format_version": "1.0",
      "variables": 15,
      "degree": 2,
      "offset": "196",
      "terms": [{"vars": [0], "coeff": "-52"}, ...],
      "metadata": {"big_n": "15", "n": "3", "fix_lsb": true, "s_i": "0",
                   "s_j": "0", "paper_gme": "-196", "num_ancillas": "0"},
      "reduction": {...}          # only for quadratized models
    }
"""

from __future__ import annotations

import json
import os
import re
from typing import Optional, Tuple, Union

from .errors import IoFailure, ParseFailure, VersionMismatch
from .modelgen import FactorLayout, FactorModel
from .polycore import BinaryPolynomial
from .quadratize import GadgetRecord, ReductionLedger

__all__ = [
    "FORMAT_VERSION",
    "model_to_dict",
    "model_from_dict",
    "ledger_to_dict",
    "ledger_from_dict",
    "dumps_model",
    "loads_model",
    "save_model",
    "load_model",
    "load_model_and_ledger",
    "save_qubo_coo",
    "load_qubo_coo",
]

FORMAT_VERSION = "1.0"

_INT_RE = re.compile(r"-?[0-9]+\Z")

PathLike = Union[str, "os.PathLike[str]"]


def _int(value, what: str) -> int:
    if isinstance(value, bool):
        raise ParseFailure(f"{what}: expected an integer, got a boolean")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and _INT_RE.match(value):
        return int(value)
    raise ParseFailure(f"{what}: expected a decimal integer string, got {value!r}")


def ledger_to_dict(ledger: ReductionLedger) -> dict:
    return {
        "first_ancilla": str(ledger.first_ancilla),
        "total_shift": str(ledger.total_shift),
        "reduced_gme": str(ledger.reduced_gme),
        "records": [
            {"kind": r.kind, "source_vars": list(r.source_vars), "coeff": str(r.coeff),
             "ancillas": list(r.ancillas), "constant_shift": str(r.constant_shift)}
            for r in ledger.records
        ],
    }


def ledger_from_dict(d: dict) -> ReductionLedger:
    try:
        records = [
            GadgetRecord(r["kind"], tuple(_int(v, "source_vars") for v in r["source_vars"]),
                         _int(r["coeff"], "coeff"),
                         tuple(_int(v, "ancillas") for v in r["ancillas"]),
                         _int(r["constant_shift"], "constant_shift"))
            for r in d["records"]
        ]
        return ReductionLedger(records, _int(d["first_ancilla"], "first_ancilla"),
                               _int(d["total_shift"], "total_shift"),
                               _int(d["reduced_gme"], "reduced_gme"))
    except (KeyError, TypeError) as exc:
        raise ParseFailure(f"malformed reduction section: {exc!r}") from None


def model_to_dict(model: FactorModel, ledger: Optional[ReductionLedger] = None) -> dict:
    lay = model.layout
    d = {
        "format_version": FORMAT_VERSION,
        "variables": model.num_vars,
        "degree": model.poly.degree,
        "offset": str(model.poly.offset),
        "terms": [{"vars": list(k), "coeff": str(c)} for k, c in model.poly],
        "metadata": {
            "big_n": str(model.big_n),
            "n": str(lay.n),
            "fix_lsb": lay.fix_lsb,
            "s_i": str(lay.s_i),
            "s_j": str(lay.s_j),
            "paper_gme": str(model.paper_gme),
            "num_ancillas": str(model.num_ancillas),
        },
    }
    if ledger is not None:
        d["reduction"] = ledger_to_dict(ledger)
    return d


def _check_version(version):
    if not isinstance(version, str):
        raise ParseFailure(f"format_version must be a string, got {version!r}")
    if version.split(".")[0] != FORMAT_VERSION.split(".")[0]:
        raise VersionMismatch(f"file format {version} is not compatible with {FORMAT_VERSION}")


def model_from_dict(d: dict) -> Tuple[FactorModel, Optional[ReductionLedger]]:
    if not isinstance(d, dict):
        raise ParseFailure("model file must contain a JSON object")
    try:
        _check_version(d["format_version"])
        meta = d["metadata"]
        terms = [(tuple(_int(v, "vars") for v in t["vars"]), _int(t["coeff"], "coeff"))
                 for t in d["terms"]]
        offset = _int(d["offset"], "offset")
        layout = FactorLayout(_int(meta["n"], "n"), bool(meta["fix_lsb"]),
                              _int(meta["s_i"], "s_i"), _int(meta["s_j"], "s_j"))
        big_n = _int(meta["big_n"], "big_n")
        ancillas = _int(meta.get("num_ancillas", "0"), "num_ancillas")
    except KeyError as exc:
        raise ParseFailure(f"missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseFailure):
            raise
        raise ParseFailure(f"malformed model: {exc}") from None
    poly = BinaryPolynomial(terms, offset)
    model = FactorModel(big_n, layout, poly, ancillas)
    if "paper_gme" in meta and _int(meta["paper_gme"], "paper_gme") != model.paper_gme:
        raise ParseFailure("paper_gme does not match the stored offset")
    if "degree" in d and d["degree"] != poly.degree:
        raise ParseFailure(f"declared degree {d['degree']} but terms have degree {poly.degree}")
    if "variables" in d and d["variables"] != model.num_vars:
        raise ParseFailure(f"declared {d['variables']} variables, model has {model.num_vars}")
    ledger = ledger_from_dict(d["reduction"]) if d.get("reduction") is not None else None
    return model, ledger


def dumps_model(model: FactorModel, ledger: Optional[ReductionLedger] = None) -> str:
    return json.dumps(model_to_dict(model, ledger), indent=1, sort_keys=True) + "\n"


def loads_model(text: str) -> Tuple[FactorModel, Optional[ReductionLedger]]:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseFailure(exc.msg, exc.lineno, exc.colno) from None
    return model_from_dict(d)


def save_model(model: FactorModel, path: PathLike,
               ledger: Optional[ReductionLedger] = None) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps_model(model, ledger))
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def load_model_and_ledger(path: PathLike) -> Tuple[FactorModel, Optional[ReductionLedger]]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return loads_model(text)


def load_model(path: PathLike) -> FactorModel:
    return load_model_and_ledger(path)[0]


def save_qubo_coo(poly: BinaryPolynomial, path: PathLike) -> None:
    """Write a degree <= 2 polynomial as ``i j coeff`` lines (``i <= j``;
    ``i == j`` is a linear term). The offset goes in a ``# offset`` header."""
    if poly.degree > 2:
        raise ValueError("coordinate format holds quadratic models only")
    lines = [f"# offset {poly.offset}"]
    for key, c in poly:
        i, j = (key[0], key[0]) if len(key) == 1 else key
        lines.append(f"{i} {j} {c}")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def load_qubo_coo(path: PathLike) -> BinaryPolynomial:
    terms = []
    offset = 0
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "offset":
                offset = _int(parts[1], f"line {lineno}")
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseFailure("expected 'i j coeff'", lineno, 1)
        i, j, c = (_int(x, f"line {lineno}") for x in parts)
        terms.append(((i, j), c))
    return BinaryPolynomial(terms, offset)

"""
JSON documents for certificates (schema ``detcert/1``).

Every document is ``{"schema": "detcert/1", "kind": ..., "certificate": ...}``.
Cells are 1-based in JSON.  ``load_document(dump_document(x))`` rebuilds an
equal object and re-dumping it gives byte-identical text.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Any

from detcert.certify import (
    Cm2Certificate,
    DeterminacyCertificate,
    EidsConclusion,
    Eq1Certificate,
    GenericSampleReport,
)
from detcert.graded import CodimReport, LevelRecord, MembershipCertificate, Target
from detcert.matrix_family import DegreeMatrix, MatrixFamily

SCHEMA_ID = "detcert/1"


def load_schema() -> dict:
    text = resources.files("detcert").joinpath("schema/detcert-1.json").read_text(encoding="utf-8")
    return json.loads(text)


def family_to_dict(F: MatrixFamily) -> dict:
    return {"N": F.N, "m": F.m, "n": F.n, "weights": list(F.weights), "vars": F.letter,
            "entries": F.to_strings()}


def family_from_dict(data: dict) -> MatrixFamily:
    return MatrixFamily.from_rows(data["entries"], data["N"], data["weights"], data["vars"])


def _target_to_dict(t: Target | None):
    if t is None:
        return None
    return {"monomial": list(t.monomial), "cell": [t.cell[0] + 1, t.cell[1] + 1], "level": t.level}


def _target_from_dict(data):
    if data is None:
        return None
    return Target(tuple(data["monomial"]), (data["cell"][0] - 1, data["cell"][1] - 1), data["level"])


def membership_to_dict(c: MembershipCertificate | None):
    if c is None:
        return None
    return {
        "verdict": c.verdict,
        "mode": c.mode,
        "bound": c.bound,
        "covered_levels": [[r.level, r.ambient_dim, r.rank] for r in c.covered_levels],
        "window_start": c.window_start,
        "window_width": c.window_width,
        "k": c.k,
        "obstruction": _target_to_dict(c.obstruction),
    }


def membership_from_dict(data):
    if data is None:
        return None
    return MembershipCertificate(
        data["verdict"], data["mode"], data["bound"],
        [LevelRecord(*r) for r in data["covered_levels"]],
        data["window_start"], data["window_width"], data["k"],
        _target_from_dict(data["obstruction"]),
    )


def codim_to_dict(c: CodimReport | None):
    if c is None:
        return None
    return {"total": c.total, "infinite": c.infinite, "bound": c.bound, "mode": c.mode,
            "per_level": [list(x) for x in c.per_level]}


def codim_from_dict(data):
    if data is None:
        return None
    return CodimReport(data["total"], [tuple(x) for x in data["per_level"]], data["bound"], data["mode"])


def degrees_to_dict(D: DegreeMatrix | None):
    if D is None:
        return None
    return {"d": D.as_lists(), "whomog_type_ok": D.whomog_type_ok,
            "derived": sorted([i + 1, j + 1] for i, j in D.derived)}


def degrees_from_dict(data):
    if data is None:
        return None
    return DegreeMatrix(tuple(tuple(r) for r in data["d"]), data["whomog_type_ok"],
                        frozenset((i - 1, j - 1) for i, j in data["derived"]))


def determinacy_to_dict(c: DeterminacyCertificate) -> dict:
    return {
        "family": family_to_dict(c.family),
        "verdict": c.verdict,
        "route": c.route,
        "mode": c.mode,
        "k": c.k,
        "membership": membership_to_dict(c.membership),
        "eids_conclusion": [
            {"t": e.t, "expected_codim": e.expected_codim, "statement": e.statement}
            for e in c.eids_conclusion
        ],
        "degrees": degrees_to_dict(c.degrees),
        "scaling": None if c.scaling is None else {"a": list(c.scaling[0]), "b": list(c.scaling[1])},
        "codimension": codim_to_dict(c.codimension),
        "facts": dict(c.facts),
        "notes": list(c.notes),
        "base": None if c.base is None else determinacy_to_dict(c.base),
    }


def determinacy_from_dict(data: dict) -> DeterminacyCertificate:
    sc = data["scaling"]
    return DeterminacyCertificate(
        family=family_from_dict(data["family"]),
        verdict=data["verdict"],
        route=data["route"],
        mode=data["mode"],
        k=data["k"],
        membership=membership_from_dict(data["membership"]),
        eids_conclusion=[EidsConclusion(e["t"], e["expected_codim"], e["statement"])
                         for e in data["eids_conclusion"]],
        degrees=degrees_from_dict(data["degrees"]),
        scaling=None if sc is None else (tuple(sc["a"]), tuple(sc["b"])),
        codimension=codim_from_dict(data["codimension"]),
        facts=dict(data["facts"]),
        notes=list(data["notes"]),
        base=None if data["base"] is None else determinacy_from_dict(data["base"]),
    )


def eq1_to_dict(c: Eq1Certificate) -> dict:
    return {
        "linear_family": family_to_dict(c.linear_family),
        "verdict": c.verdict,
        "r": c.r,
        "r_max": c.r_max,
        "levels": [list(x) for x in c.levels],
        "obstructions": [{"r": r, "target": _target_to_dict(t)} for r, t in c.obstructions],
    }


def eq1_from_dict(data: dict) -> Eq1Certificate:
    return Eq1Certificate(
        family_from_dict(data["linear_family"]), data["verdict"], data["r"], data["r_max"],
        [tuple(x) for x in data["levels"]],
        [(o["r"], _target_from_dict(o["target"])) for o in data["obstructions"]],
    )


def _tensor_to_list(a):
    return [[list(c) for c in row] for row in a]


def sample_to_dict(rep: GenericSampleReport) -> dict:
    return {"N": rep.N, "m": rep.m, "n": rep.n, "d": rep.d, "trials": rep.trials,
            "passes": rep.passes, "seed": rep.seed,
            "failures": [_tensor_to_list(a) for a in rep.failures]}


def sample_from_dict(data: dict) -> GenericSampleReport:
    fails = [tuple(tuple(tuple(c) for c in row) for row in a) for a in data["failures"]]
    return GenericSampleReport(data["N"], data["m"], data["n"], data["d"], data["trials"],
                               data["passes"], data["seed"], fails)


def cm2_to_dict(c: Cm2Certificate) -> dict:
    return {"family": family_to_dict(c.family), "verdict": c.verdict, "r": c.r,
            "membership": membership_to_dict(c.membership), "minor_count": c.minor_count,
            "jacobian_minor_count": c.jacobian_minor_count}


def cm2_from_dict(data: dict) -> Cm2Certificate:
    return Cm2Certificate(family_from_dict(data["family"]), data["verdict"], data["r"],
                          membership_from_dict(data["membership"]), data["minor_count"],
                          data["jacobian_minor_count"])


def validation_to_dict(F: MatrixFamily, D: DegreeMatrix | None, error: str | None) -> dict:
    return {"family": family_to_dict(F), "valid": error is None,
            "degrees": degrees_to_dict(D), "error": error}


_ENCODERS = {
    DeterminacyCertificate: ("determinacy", determinacy_to_dict),
    Eq1Certificate: ("eq1", eq1_to_dict),
    GenericSampleReport: ("sample", sample_to_dict),
    Cm2Certificate: ("cm2", cm2_to_dict),
}

_DECODERS = {
    "determinacy": determinacy_from_dict,
    "eq1": eq1_from_dict,
    "sample": sample_from_dict,
    "cm2": cm2_from_dict,
}


def to_document(obj: Any) -> dict:
    kind, enc = _ENCODERS[type(obj)]
    return {"schema": SCHEMA_ID, "kind": kind, "certificate": enc(obj)}


def dump_document(obj: Any) -> str:
    doc = obj if isinstance(obj, dict) else to_document(obj)
    return json.dumps(doc, indent=2, sort_keys=True)


def load_document(text: str) -> Any:
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA_ID:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    decode = _DECODERS.get(doc["kind"])
    if decode is None:
        return doc
    return decode(doc["certificate"])

"""Canonical JSON snapshot serialization: sorted keys, id-ordered arrays,
no floats, sha256 checksum; loading validates the declared data and then
rebuilds and byte-compares.
"""
from __future__ import annotations

import hashlib
import json
from typing import Dict, List, Tuple

from .orbit import CartanSingular, CategorySnapshot, OrbitError, build_category


class SnapshotFormatError(OrbitError):
    pass


def _basis_ids(cat: CategorySnapshot) -> Dict[Tuple[int, int, int], int]:
    """Global ids for basis elements (x, y, degree), sorted."""
    triples = []
    for x in range(cat.N):
        for y in range(cat.N):
            for (deg, _kind) in cat.hom_entries(x, y):
                triples.append((x, y, deg))
    triples.sort()
    return {t: i for i, t in enumerate(triples)}


def snapshot_dict(cat: CategorySnapshot) -> Dict:
    bid = _basis_ids(cat)
    hom = {}
    for x in range(cat.N):
        for y in range(cat.N):
            entries = cat.hom_entries(x, y)
            if entries:
                hom[f"{x},{y}"] = [{"degree": int(d), "basis_id": bid[(x, y, d)]}
                                   for (d, _k) in entries]
    composition = []
    for (x, y, dx) in sorted(bid):
        for z in range(cat.N):
            for (dy, _k) in cat.hom_entries(y, z):
                deg, c = cat.comp_const(x, y, z, dx, dy)
                if c:
                    composition.append([bid[(x, y, dx)], bid[(y, z, dy)],
                                        bid[(x, z, deg)], int(c)])
    composition.sort()
    doc = {
        "kind": "orbit_category",
        "type": "A",
        "rank": cat.n,
        "cy_weight": cat.w,
        "prime": cat.p,
        "indecomposables": [
            {"id": o.id, "name": o.name,
             "coord": [int(o.rep.shift), int(o.rep.a), int(o.rep.b)]}
            for o in cat.indecs
        ],
        "hom": hom,
        "perm_shift": [int(v) for v in cat.perm_shift],
        "perm_tau": [int(v) for v in cat.perm_tau],
        "cartan": [[int(v) for v in row] for row in cat.cartan],
        "composition": composition,
    }
    doc["checksum"] = payload_checksum(doc)
    return doc


def payload_checksum(doc: Dict) -> str:
    body = {k: v for k, v in doc.items() if k != "checksum"}
    blob = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def dumps(cat: CategorySnapshot) -> str:
    return json.dumps(snapshot_dict(cat), sort_keys=True, separators=(",", ":")) + "\n"


def save(cat: CategorySnapshot, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(cat))


def validate_dict(doc: Dict) -> None:
    required = ["kind", "type", "rank", "cy_weight", "prime", "indecomposables",
                "hom", "perm_shift", "perm_tau", "cartan", "composition", "checksum"]
    for k in required:
        if k not in doc:
            raise SnapshotFormatError(f"missing field {k!r}")
    if doc["kind"] != "orbit_category" or doc["type"] != "A":
        raise SnapshotFormatError("unsupported snapshot kind/type")
    if doc["checksum"] != payload_checksum(doc):
        raise SnapshotFormatError("checksum mismatch")
    n = len(doc["indecomposables"])
    cartan = doc["cartan"]
    if len(cartan) != n or any(len(r) != n for r in cartan):
        raise SnapshotFormatError("cartan matrix has wrong shape")
    # declared Cartan must agree with the declared Hom data
    for x in range(n):
        for y in range(n):
            dim = len(doc["hom"].get(f"{x},{y}", []))
            if cartan[x][y] != dim:
                raise CartanSingular(
                    f"declared Cartan entry ({x},{y}) = {cartan[x][y]} does not "
                    f"match the Hom data ({dim}); fingerprinting impossible")
    # Serre symmetry of the declared dimensions
    perm_shift = doc["perm_shift"]
    perm_tau = doc["perm_tau"]
    perm_shift_inv = [0] * n
    for i, v in enumerate(perm_shift):
        perm_shift_inv[v] = i
    serre = [perm_shift[perm_tau[i]] for i in range(n)]
    for x in range(n):
        for y in range(n):
            if cartan[x][y] != cartan[y][serre[x]]:
                raise SnapshotFormatError(
                    f"Serre symmetry violated at pair (x_{x + 1}, x_{y + 1})")


def loads(text: str) -> CategorySnapshot:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SnapshotFormatError(f"not valid JSON: {e}")
    validate_dict(doc)
    cat = build_category(doc["rank"], doc["cy_weight"], doc["prime"])
    rebuilt = dumps(cat)
    if json.loads(rebuilt) != doc:
        raise SnapshotFormatError("declared snapshot differs from the rebuilt category")
    return cat


def load(path: str) -> CategorySnapshot:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())

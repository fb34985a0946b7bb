"""JSON files holding a flattened decomposition.

Field elements are integer labels (base-p digits, little-endian by degree).
Keys are written in a fixed order, so equal decompositions give equal bytes.
"""

from __future__ import annotations

import json

from .errors import KMulError
from .field import field, prime_power, trim
from .tensor import TensorDecomposition, make_decomposition

FORMAT_VERSION = 1


class FileFormatError(KMulError, ValueError):
    pass


def to_dict(dec: TensorDecomposition, provenance: dict | None = None) -> dict:
    F = dec.F
    return {
        "format": FORMAT_VERSION,
        "p": F.p,
        "base_modulus": list(F.modulus),
        "n": dec.n,
        "modulus": list(dec.modulus),
        "k": dec.k,
        "rank": dec.rank,
        "terms": [
            {"forms": [list(f) for f in t.forms], "output": list(t.output)} for t in dec.terms
        ],
        "provenance": provenance or {},
    }


def dumps(dec: TensorDecomposition, provenance: dict | None = None) -> str:
    return json.dumps(to_dict(dec, provenance), indent=1) + "\n"


def _int_list(x, what):
    if not isinstance(x, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in x):
        raise FileFormatError(f"{what} must be a list of integers")
    return x


def from_dict(d) -> tuple[TensorDecomposition, dict]:
    if not isinstance(d, dict):
        raise FileFormatError("top level must be an object")
    try:
        if d["format"] != FORMAT_VERSION:
            raise FileFormatError(f"unsupported format version {d['format']!r}")
        p, n, k = d["p"], d["n"], d["k"]
        base = trim(_int_list(d["base_modulus"], "base_modulus"))
        modulus = trim(_int_list(d["modulus"], "modulus"))
        raw_terms = d["terms"]
    except KeyError as e:
        raise FileFormatError(f"missing key {e.args[0]!r}") from None
    if not all(isinstance(v, int) for v in (p, n, k)) or n < 1 or k < 1:
        raise FileFormatError("p, n, k must be positive integers")
    m = len(base) - 1
    try:
        prime_power(p)
        F = field(p**m, base)
    except (ValueError, ArithmeticError) as e:
        raise FileFormatError(f"bad base field: {e}") from None
    if F.p != p:
        raise FileFormatError("p is not prime")
    if len(modulus) != n + 1:
        raise FileFormatError("modulus degree does not match n")
    terms = []
    if not isinstance(raw_terms, list):
        raise FileFormatError("terms must be a list")
    for t in raw_terms:
        if not isinstance(t, dict) or "forms" not in t or "output" not in t:
            raise FileFormatError("each term needs forms and output")
        forms = [_int_list(f, "form") for f in t["forms"]] if isinstance(t["forms"], list) else None
        if forms is None:
            raise FileFormatError("forms must be a list")
        out = _int_list(t["output"], "output")
        for v in forms + [out]:
            if any(c < 0 or c >= F.q for c in v):
                raise FileFormatError("field label out of range")
        terms.append((forms, out))
    for c in modulus:
        if c < 0 or c >= F.q:
            raise FileFormatError("field label out of range")
    try:
        dec = make_decomposition(F, modulus, k, terms)
    except ValueError as e:
        raise FileFormatError(str(e)) from None
    if "rank" in d and d["rank"] != dec.rank:
        raise FileFormatError("rank field does not match the number of terms")
    return dec, d.get("provenance") or {}


def loads(text: str):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise FileFormatError(f"not valid JSON: {e}") from None
    return from_dict(d)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def save(path, dec: TensorDecomposition, provenance: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(dec, provenance))

"""JSON envelopes and byte encodings for every file artifact.

Numbers serialize as lowercase big-endian hex without leading zeros.  Every
top-level artifact is an envelope {"kind", "version", "fingerprint", ...}
where the fingerprint hashes (p, q, g, h) and binds artifacts of one
session together.  Group elements are membership-checked on the way in.
"""

import hashlib
import json
from typing import Any

from . import deg, hpkeet
from .errors import ValidationError
from .group import GroupParams, validate_params

VERSION = 1


def to_hex(n: int) -> str:
    if n < 0:
        raise ValidationError("negative integers do not serialize")
    return format(n, "x")


def from_hex(s: str) -> int:
    try:
        n = int(s, 16)
    except (ValueError, TypeError):
        raise ValidationError(f"bad hex field: {s!r}") from None
    if n < 0:
        raise ValidationError(f"bad hex field: {s!r}")
    return n


def params_fingerprint(params: GroupParams) -> str:
    blob = f"blindtm/params|{params.p:x}|{params.q:x}|{params.g:x}|{params.h:x}"
    return hashlib.sha256(blob.encode()).hexdigest()


def element_width(params: GroupParams) -> int:
    return (params.p.bit_length() + 7) // 8


def element_bytes(params: GroupParams, x: int) -> bytes:
    """Fixed-width big-endian encoding, for hashing and byte comparisons."""
    return x.to_bytes(element_width(params), "big")


def ciphertext_bytes(params: GroupParams, ct: hpkeet.HpkeetCiphertext) -> bytes:
    parts = (ct.c1.u, ct.c1.v, ct.c1.w, ct.c2, ct.c3.u, ct.c3.v, ct.c3.w)
    return b"".join(element_bytes(params, x) for x in parts)


# ---------------------------------------------------------------------------
# Per-type object (de)serializers
# ---------------------------------------------------------------------------


def params_to_obj(params: GroupParams) -> dict:
    return {
        "p": to_hex(params.p),
        "q": to_hex(params.q),
        "g": to_hex(params.g),
        "h": to_hex(params.h),
    }


def params_from_obj(obj: dict, validate: bool = True) -> GroupParams:
    params = GroupParams(
        p=from_hex(obj["p"]),
        q=from_hex(obj["q"]),
        g=from_hex(obj["g"]),
        h=from_hex(obj["h"]),
    )
    if validate:
        validate_params(params)
    return params


def _element_from_hex(params: GroupParams, s: str) -> int:
    x = from_hex(s)
    if not params.is_member(x):
        raise ValidationError("element is not in the order-q subgroup")
    return x


def _deg_ct_to_obj(ct: deg.DegCiphertext) -> dict:
    return {"u": to_hex(ct.u), "v": to_hex(ct.v), "w": to_hex(ct.w)}


def _deg_ct_from_obj(params: GroupParams, obj: dict) -> deg.DegCiphertext:
    return deg.DegCiphertext(
        u=_element_from_hex(params, obj["u"]),
        v=_element_from_hex(params, obj["v"]),
        w=_element_from_hex(params, obj["w"]),
    )


def ciphertext_to_obj(ct: hpkeet.HpkeetCiphertext) -> dict:
    return {
        "c1": _deg_ct_to_obj(ct.c1),
        "c2": to_hex(ct.c2),
        "c3": _deg_ct_to_obj(ct.c3),
    }


def ciphertext_from_obj(params: GroupParams, obj: dict) -> hpkeet.HpkeetCiphertext:
    return hpkeet.HpkeetCiphertext(
        c1=_deg_ct_from_obj(params, obj["c1"]),
        c2=_element_from_hex(params, obj["c2"]),
        c3=_deg_ct_from_obj(params, obj["c3"]),
    )


def _deg_pk_to_obj(pk: deg.DegPublicKey) -> dict:
    return {"y1": to_hex(pk.y1), "y2": to_hex(pk.y2)}


def _deg_pk_from_obj(params: GroupParams, obj: dict) -> deg.DegPublicKey:
    return deg.DegPublicKey(
        y1=_element_from_hex(params, obj["y1"]),
        y2=_element_from_hex(params, obj["y2"]),
    )


def _deg_sk_to_obj(sk: deg.DegSecretKey) -> dict:
    return {"x1": to_hex(sk.x1), "x2": to_hex(sk.x2)}


def _deg_sk_from_obj(obj: dict) -> deg.DegSecretKey:
    return deg.DegSecretKey(x1=from_hex(obj["x1"]), x2=from_hex(obj["x2"]))


def public_key_to_obj(pk: hpkeet.HpkeetPublicKey) -> dict:
    return {"pk1": _deg_pk_to_obj(pk.pk1), "pk2": _deg_pk_to_obj(pk.pk2)}


def public_key_from_obj(params: GroupParams, obj: dict) -> hpkeet.HpkeetPublicKey:
    return hpkeet.HpkeetPublicKey(
        pk1=_deg_pk_from_obj(params, obj["pk1"]),
        pk2=_deg_pk_from_obj(params, obj["pk2"]),
    )


# ---------------------------------------------------------------------------
# File envelopes
# ---------------------------------------------------------------------------


def keys_envelope(params: GroupParams, keys: hpkeet.HpkeetKeys) -> dict:
    return {
        "kind": "hpkeet-keys",
        "version": VERSION,
        "fingerprint": params_fingerprint(params),
        "params": params_to_obj(params),
        "pk": public_key_to_obj(keys.public),
        "sk": {
            "sk1": _deg_sk_to_obj(keys.secret.sk1),
            "sk2": _deg_sk_to_obj(keys.secret.sk2),
        },
    }


def keys_from_envelope(obj: dict) -> tuple[GroupParams, hpkeet.HpkeetKeys]:
    _expect_kind(obj, "hpkeet-keys")
    params = params_from_obj(obj["params"])
    _check_fingerprint(obj, params)
    keys = hpkeet.HpkeetKeys(
        public=public_key_from_obj(params, obj["pk"]),
        secret=hpkeet.HpkeetSecretKey(
            sk1=_deg_sk_from_obj(obj["sk"]["sk1"]),
            sk2=_deg_sk_from_obj(obj["sk"]["sk2"]),
        ),
    )
    return params, keys


def token_envelope(params: GroupParams, token: hpkeet.Token) -> dict:
    return {
        "kind": "hpkeet-token",
        "version": VERSION,
        "fingerprint": params_fingerprint(params),
        "sk2": _deg_sk_to_obj(token.sk2),
    }


def token_from_envelope(obj: dict) -> tuple[str, hpkeet.Token]:
    _expect_kind(obj, "hpkeet-token")
    return obj["fingerprint"], hpkeet.Token(sk2=_deg_sk_from_obj(obj["sk2"]))


def _expect_kind(obj: Any, kind: str):
    if not isinstance(obj, dict) or obj.get("kind") != kind:
        got = obj.get("kind") if isinstance(obj, dict) else type(obj).__name__
        raise ValidationError(f"expected a {kind!r} envelope, got {got!r}")
    if obj.get("version") != VERSION:
        raise ValidationError(f"unsupported envelope version {obj.get('version')!r}")


def _check_fingerprint(obj: dict, params: GroupParams):
    if obj.get("fingerprint") != params_fingerprint(params):
        raise ValidationError("envelope fingerprint does not match its parameters")


def write_envelope(path, obj: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_envelope(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot load envelope {path}: {exc}") from None

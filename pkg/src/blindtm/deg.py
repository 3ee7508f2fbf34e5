"""Tagged ElGamal base cipher (keygen / encrypt / decrypt, written G, E, D).

Ciphertexts are triples (u, v, w) = (g^r, y1^r, y2^r * msg); decryption
checks the tag v = u^x1 before releasing w * (u^x2)^-1, which is what buys
security against non-adaptive chosen-ciphertext attacks while keeping the
scheme multiplicatively homomorphic.

Messages are always subgroup elements (in this package: commitments g^m),
never raw exponents.
"""

from dataclasses import dataclass

from .errors import DecryptionError
from .group import GroupElement, GroupParams, OpCounts, _tally

# Fixed internal group-op cost of each base-cipher call, used by the
# op-count assertions to separate "2 x E" from the surrounding "2e + m".
G_COST = OpCounts(G=1, exp=2)
E_COST = OpCounts(E=1, exp=3, mul=1)
D_COST = OpCounts(D=1, exp=2, inv=1, mul=1)


@dataclass(frozen=True)
class DegPublicKey:
    y1: GroupElement
    y2: GroupElement


@dataclass(frozen=True)
class DegSecretKey:
    x1: int
    x2: int


@dataclass(frozen=True)
class DegKeyPair:
    public: DegPublicKey
    secret: DegSecretKey


@dataclass(frozen=True)
class DegCiphertext:
    u: GroupElement
    v: GroupElement
    w: GroupElement


def keygen(params: GroupParams, rng) -> DegKeyPair:
    """Fresh keypair; x1 != x2 is enforced so the tag key is independent."""
    _tally().G += 1
    x1 = params.random_scalar(rng)
    x2 = params.random_scalar(rng)
    while x2 == x1:
        x2 = params.random_scalar(rng)
    return DegKeyPair(
        public=DegPublicKey(y1=params.exp(params.g, x1), y2=params.exp(params.g, x2)),
        secret=DegSecretKey(x1=x1, x2=x2),
    )


def encrypt(params: GroupParams, pk: DegPublicKey, msg: GroupElement, rng) -> DegCiphertext:
    """Probabilistic encryption of a subgroup element."""
    _tally().E += 1
    r = params.random_scalar(rng)
    return DegCiphertext(
        u=params.exp(params.g, r),
        v=params.exp(pk.y1, r),
        w=params.mul(params.exp(pk.y2, r), msg),
    )


def decrypt(params: GroupParams, sk: DegSecretKey, ct: DegCiphertext) -> GroupElement:
    """Return the message, or raise DecryptionError if the tag check fails."""
    _tally().D += 1
    if params.exp(ct.u, sk.x1) != ct.v:
        raise DecryptionError("base-cipher tag check failed")
    return params.mul(ct.w, params.inv(params.exp(ct.u, sk.x2)))


def hom_mul(params: GroupParams, a: DegCiphertext, b: DegCiphertext) -> DegCiphertext:
    """Componentwise product; decrypts to the product of the messages.

    Both inputs must be under the same public key -- this is the caller's
    responsibility and cannot be verified from the ciphertexts alone.
    """
    return DegCiphertext(
        u=params.mul(a.u, b.u),
        v=params.mul(a.v, b.v),
        w=params.mul(a.w, b.w),
    )


def rerandomize(params: GroupParams, pk: DegPublicKey, a: DegCiphertext, rng) -> DegCiphertext:
    """Fold in a fresh encryption of the identity: same message, new bytes."""
    return hom_mul(params, a, encrypt(params, pk, 1, rng))

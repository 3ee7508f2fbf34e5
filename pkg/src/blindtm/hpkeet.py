"""Equality-test homomorphic encryption (KeyGen/Enc/Dec/Aut/Com).

A ciphertext is (c1, c2, c3) where c1 encrypts the commitment g^m under the
first base keypair, c2 = g^m * h^r blinds that commitment, and c3 encrypts
the blinding commitment h^r under the second keypair.  Handing out the
second secret key (the token) lets a third party strip the blinding and
compare commitments -- i.e. test plaintext equality -- without being able
to decrypt payloads.

Componentwise multiplication adds plaintexts mod q, because all three
components are multiplicatively homomorphic over exponents.
"""

import math
from dataclasses import dataclass

from . import deg
from .errors import DecryptionError, ValidationError
from .group import GroupElement, GroupParams, Scalar


@dataclass(frozen=True)
class HpkeetPublicKey:
    pk1: deg.DegPublicKey
    pk2: deg.DegPublicKey


@dataclass(frozen=True)
class HpkeetSecretKey:
    sk1: deg.DegSecretKey
    sk2: deg.DegSecretKey


@dataclass(frozen=True)
class HpkeetKeys:
    public: HpkeetPublicKey
    secret: HpkeetSecretKey


@dataclass(frozen=True)
class Token:
    """Comparison authorization: the second secret key and nothing else.

    A Token can open c3 (the blinding commitment) but is not accepted where
    an HpkeetSecretKey is required, so payload decryption with a token
    alone fails by construction.
    """

    sk2: deg.DegSecretKey


@dataclass(frozen=True)
class HpkeetCiphertext:
    c1: deg.DegCiphertext
    c2: GroupElement
    c3: deg.DegCiphertext


@dataclass(frozen=True)
class MinEntropyReport:
    """Advisory lower bound on plaintext min-entropy against trial encryption."""

    trial_budget: int
    advantage_bound: float
    required_bits: float


def keygen(params: GroupParams, rng) -> HpkeetKeys:
    """Two independent base keypairs: payload under 1, blinding under 2."""
    pair1 = deg.keygen(params, rng)
    pair2 = deg.keygen(params, rng)
    return HpkeetKeys(
        public=HpkeetPublicKey(pk1=pair1.public, pk2=pair2.public),
        secret=HpkeetSecretKey(sk1=pair1.secret, sk2=pair2.secret),
    )


def encrypt(params: GroupParams, pk: HpkeetPublicKey, m: Scalar, rng) -> HpkeetCiphertext:
    """Encrypt exponent m as (E(g^m), g^m * h^r, E(h^r)) with fresh r."""
    m = m % params.q
    r = params.random_scalar(rng)
    gm = params.exp(params.g, m)
    hr = params.exp(params.h, r)
    return HpkeetCiphertext(
        c1=deg.encrypt(params, pk.pk1, gm, rng),
        c2=params.mul(gm, hr),
        c3=deg.encrypt(params, pk.pk2, hr, rng),
    )


def decrypt(params: GroupParams, sk: HpkeetSecretKey, ct: HpkeetCiphertext) -> GroupElement:
    """Return the commitment g^m, or raise DecryptionError.

    c2 arrives unauthenticated by either base-cipher tag, so it gets a
    subgroup membership check before use (blocks small-subgroup probes).
    Recovering m from g^m is the caller's job via a lookup table; see the
    blind module's Encoding.
    """
    if not params.is_member(ct.c2):
        raise DecryptionError("c2 is not a subgroup element")
    gm = deg.decrypt(params, sk.sk1, ct.c1)
    hr = deg.decrypt(params, sk.sk2, ct.c3)
    if params.mul(gm, hr) != ct.c2:
        raise DecryptionError("blinded commitment mismatch")
    return gm


def authorize(keys: HpkeetKeys) -> Token:
    """Project out the comparison token; performs no group operations."""
    return Token(sk2=keys.secret.sk2)


def unblind(params: GroupParams, token: Token, ct: HpkeetCiphertext) -> GroupElement:
    """Strip the blinding from c2, yielding the bare commitment g^m."""
    if not params.is_member(ct.c2):
        raise DecryptionError("c2 is not a subgroup element")
    hr = deg.decrypt(params, token.sk2, ct.c3)
    return params.mul(ct.c2, params.inv(hr))


def compare(params: GroupParams, token: Token, a: HpkeetCiphertext, b: HpkeetCiphertext) -> bool:
    """Token-gated plaintext equality test.

    Malformed inputs raise DecryptionError rather than returning False, so
    an error can never masquerade as inequality.
    """
    return unblind(params, token, a) == unblind(params, token, b)


def hom_add(params: GroupParams, a: HpkeetCiphertext, b: HpkeetCiphertext) -> HpkeetCiphertext:
    """Componentwise product: decrypts to g^(m_a + m_b mod q).

    Same-public-key discipline is the caller's responsibility.
    """
    return HpkeetCiphertext(
        c1=deg.hom_mul(params, a.c1, b.c1),
        c2=params.mul(a.c2, b.c2),
        c3=deg.hom_mul(params, a.c3, b.c3),
    )


def rerandomize(params: GroupParams, pk: HpkeetPublicKey, ct: HpkeetCiphertext, rng) -> HpkeetCiphertext:
    """Fold in a fresh encryption of zero: same plaintext, all-new bytes."""
    return hom_add(params, ct, encrypt(params, pk, 0, rng))


def min_entropy_bound(trial_budget: int, target_advantage: float) -> MinEntropyReport:
    """Bits of plaintext min-entropy needed so that ``trial_budget`` trial
    encryptions succeed with probability below ``target_advantage``.

    Union bound: N trials, each hitting the plaintext with probability at
    most 2^-k, stay below epsilon whenever k > log2(N / epsilon).
    """
    if trial_budget < 1:
        raise ValidationError("trial budget must be at least 1")
    if not 0 < target_advantage <= 1:
        raise ValidationError("target advantage must lie in (0, 1]")
    required = math.log2(trial_budget) - math.log2(target_advantage)
    return MinEntropyReport(
        trial_budget=trial_budget,
        advantage_bound=target_advantage,
        required_bits=max(0.0, required),
    )

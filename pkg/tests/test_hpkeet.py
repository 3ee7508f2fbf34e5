import math
import random

import pytest

from blindtm import deg, group, hpkeet, serial
from blindtm.errors import DecryptionError, ValidationError
from blindtm.group import OpCounts

from helpers import ScriptedRng

UNBLIND_NET = OpCounts(exp=1, inv=1, mul=1)


@pytest.fixture(scope="module")
def setup64(params64):
    rng = random.Random(100)
    keys = hpkeet.keygen(params64, rng)
    return params64, keys, hpkeet.authorize(keys), rng


# --- round trips ---------------------------------------------------------------


def test_round_trips(setup64):
    params, keys, _, rng = setup64
    for _ in range(200):
        m = params.random_scalar(rng)
        ct = hpkeet.encrypt(params, keys.public, m, rng)
        assert hpkeet.decrypt(params, keys.secret, ct) == params.exp(params.g, m)


def test_both_key_halves_round_trip(setup64):
    params, keys, _, rng = setup64
    msg = params.exp(params.g, 77)
    for pk, sk in ((keys.public.pk1, keys.secret.sk1), (keys.public.pk2, keys.secret.sk2)):
        ct = deg.encrypt(params, pk, msg, rng)
        assert deg.decrypt(params, sk, ct) == msg


def test_toy_blinded_commitment_forced_nonce(toy_params):
    rng = random.Random(0)
    keys = hpkeet.keygen(toy_params, rng)
    # The first scalar drawn by encrypt is the blinding exponent r.
    ct = hpkeet.encrypt(toy_params, keys.public, 5, ScriptedRng([2]))
    expected = (pow(2, 5, 23) * pow(13, 2, 23)) % 23
    assert ct.c2 == expected
    assert hpkeet.decrypt(toy_params, keys.secret, ct) == pow(2, 5, 23)


def test_token_key_cannot_open_payload_half(params64):
    rng = random.Random(101)
    keys = hpkeet.keygen(params64, rng)
    for _ in range(100):
        ct = hpkeet.encrypt(params64, keys.public, params64.random_scalar(rng), rng)
        with pytest.raises(DecryptionError):
            deg.decrypt(params64, keys.secret.sk2, ct.c1)


# --- decrypt rejections ----------------------------------------------------------


def test_tampered_c2_rejected(setup64):
    params, keys, _, rng = setup64
    ct = hpkeet.encrypt(params, keys.public, 9, rng)
    bad = hpkeet.HpkeetCiphertext(c1=ct.c1, c2=params.mul(ct.c2, params.g), c3=ct.c3)
    with pytest.raises(DecryptionError):
        hpkeet.decrypt(params, keys.secret, bad)


def test_non_subgroup_c2_rejected(setup64):
    params, keys, _, rng = setup64
    ct = hpkeet.encrypt(params, keys.public, 9, rng)
    bad = hpkeet.HpkeetCiphertext(c1=ct.c1, c2=params.p - 1, c3=ct.c3)
    with pytest.raises(DecryptionError):
        hpkeet.decrypt(params, keys.secret, bad)


def test_spliced_ciphertexts_rejected(setup64):
    params, keys, _, rng = setup64
    for _ in range(100):
        m1 = params.random_scalar(rng)
        m2 = (m1 + 1 + rng.randrange(params.q - 1)) % params.q
        a = hpkeet.encrypt(params, keys.public, m1, rng)
        b = hpkeet.encrypt(params, keys.public, m2, rng)
        spliced = hpkeet.HpkeetCiphertext(c1=a.c1, c2=b.c2, c3=b.c3)
        with pytest.raises(DecryptionError):
            hpkeet.decrypt(params, keys.secret, spliced)


# --- authorization and comparison -------------------------------------------------


def test_token_is_a_projection(setup64):
    _, keys, token, _ = setup64
    assert token.sk2 == keys.secret.sk2
    assert not isinstance(token, hpkeet.HpkeetSecretKey)
    with pytest.raises(AttributeError):
        token.sk1


def test_compare_semantics(setup64):
    params, keys, token, rng = setup64
    a5 = hpkeet.encrypt(params, keys.public, 5, rng)
    b5 = hpkeet.encrypt(params, keys.public, 5, rng)
    c7 = hpkeet.encrypt(params, keys.public, 7, rng)
    assert hpkeet.compare(params, token, a5, b5)
    assert not hpkeet.compare(params, token, a5, c7)
    assert hpkeet.compare(params, token, a5, a5)


def test_compare_exhaustive_four_symbols(setup64):
    params, keys, token, rng = setup64
    codes = [3, 11, 19, 27]
    cts = {m: hpkeet.encrypt(params, keys.public, m, rng) for m in codes}
    for m1 in codes:
        for m2 in codes:
            assert hpkeet.compare(params, token, cts[m1], cts[m2]) == (m1 == m2)


def test_compare_soundness_random_unequal(setup64):
    params, keys, token, rng = setup64
    for _ in range(200):
        m1 = params.random_scalar(rng)
        m2 = (m1 + 1 + rng.randrange(params.q - 1)) % params.q
        a = hpkeet.encrypt(params, keys.public, m1, rng)
        b = hpkeet.encrypt(params, keys.public, m2, rng)
        assert not hpkeet.compare(params, token, a, b)


def test_compare_error_is_not_false(setup64):
    params, keys, token, rng = setup64
    a = hpkeet.encrypt(params, keys.public, 5, rng)
    b = hpkeet.encrypt(params, keys.public, 5, rng)
    bad = hpkeet.HpkeetCiphertext(
        c1=b.c1, c2=b.c2, c3=deg.DegCiphertext(u=params.mul(b.c3.u, params.g), v=b.c3.v, w=b.c3.w)
    )
    with pytest.raises(DecryptionError):
        hpkeet.compare(params, token, a, bad)


# --- homomorphic addition -----------------------------------------------------------


def test_hom_add_basic(setup64):
    params, keys, _, rng = setup64
    s = hpkeet.hom_add(
        params,
        hpkeet.encrypt(params, keys.public, 2, rng),
        hpkeet.encrypt(params, keys.public, 3, rng),
    )
    assert hpkeet.decrypt(params, keys.secret, s) == params.exp(params.g, 5)


def test_hom_add_identity(setup64):
    params, keys, _, rng = setup64
    ct = hpkeet.encrypt(params, keys.public, 42, rng)
    s = hpkeet.hom_add(params, ct, hpkeet.encrypt(params, keys.public, 0, rng))
    assert hpkeet.decrypt(params, keys.secret, s) == hpkeet.decrypt(params, keys.secret, ct)


def test_hom_add_wraparound(setup64):
    params, keys, _, rng = setup64
    s = hpkeet.hom_add(
        params,
        hpkeet.encrypt(params, keys.public, params.q - 1, rng),
        hpkeet.encrypt(params, keys.public, 2, rng),
    )
    assert hpkeet.decrypt(params, keys.secret, s) == params.exp(params.g, 1)


def test_hom_add_commutes_and_associates(setup64):
    params, keys, _, rng = setup64
    dec = lambda ct: hpkeet.decrypt(params, keys.secret, ct)
    for _ in range(20):
        a = hpkeet.encrypt(params, keys.public, params.random_scalar(rng), rng)
        b = hpkeet.encrypt(params, keys.public, params.random_scalar(rng), rng)
        c = hpkeet.encrypt(params, keys.public, params.random_scalar(rng), rng)
        assert dec(hpkeet.hom_add(params, a, b)) == dec(hpkeet.hom_add(params, b, a))
        assert dec(
            hpkeet.hom_add(params, hpkeet.hom_add(params, a, b), c)
        ) == dec(hpkeet.hom_add(params, a, hpkeet.hom_add(params, b, c)))


# --- rerandomization ------------------------------------------------------------------


def test_rerandomize_preserves_plaintext_and_changes_bytes(setup64):
    params, keys, token, rng = setup64
    for _ in range(200):
        m = params.random_scalar(rng)
        ct = hpkeet.encrypt(params, keys.public, m, rng)
        out = hpkeet.rerandomize(params, keys.public, ct, rng)
        assert hpkeet.decrypt(params, keys.secret, out) == params.exp(params.g, m)
        assert serial.ciphertext_bytes(params, out) != serial.ciphertext_bytes(params, ct)
        assert hpkeet.compare(params, token, ct, out)


def test_rerandomize_chain(setup64):
    params, keys, _, rng = setup64
    ct = hpkeet.encrypt(params, keys.public, 13, rng)
    for _ in range(50):
        ct = hpkeet.rerandomize(params, keys.public, ct, rng)
    assert hpkeet.decrypt(params, keys.secret, ct) == params.exp(params.g, 13)


# --- unblinding ----------------------------------------------------------------------


def test_unblind_definitional(setup64):
    params, keys, token, rng = setup64
    ct = hpkeet.encrypt(params, keys.public, 31, rng)
    assert hpkeet.unblind(params, token, ct) == params.exp(params.g, 31)


def test_unblind_ignores_randomness(setup64):
    params, keys, token, rng = setup64
    a = hpkeet.encrypt(params, keys.public, 8, rng)
    b = hpkeet.encrypt(params, keys.public, 8, rng)
    assert a != b
    assert hpkeet.unblind(params, token, a) == hpkeet.unblind(params, token, b)


def test_unblind_agrees_with_decrypt(setup64):
    params, keys, token, rng = setup64
    for _ in range(200):
        ct = hpkeet.encrypt(params, keys.public, params.random_scalar(rng), rng)
        assert hpkeet.unblind(params, token, ct) == hpkeet.decrypt(params, keys.secret, ct)


# --- operation counts -------------------------------------------------------------------


def test_keygen_costs_two_base_keygens(params64):
    rng = random.Random(200)
    group.reset_op_counts()
    hpkeet.keygen(params64, rng)
    assert group.op_counts() == 2 * deg.G_COST


def test_encrypt_cost(setup64):
    params, keys, _, rng = setup64
    group.reset_op_counts()
    hpkeet.encrypt(params, keys.public, 5, rng)
    assert group.op_counts() == 2 * deg.E_COST + OpCounts(exp=2, mul=1)


def test_decrypt_cost(setup64):
    params, keys, _, rng = setup64
    ct = hpkeet.encrypt(params, keys.public, 5, rng)
    group.reset_op_counts()
    hpkeet.decrypt(params, keys.secret, ct)
    assert group.op_counts() == 2 * deg.D_COST + OpCounts(exp=1, mul=1)


def test_authorize_costs_nothing(setup64):
    _, keys, _, _ = setup64
    group.reset_op_counts()
    hpkeet.authorize(keys)
    assert group.op_counts() == OpCounts()


def test_compare_cost(setup64):
    params, keys, token, rng = setup64
    a = hpkeet.encrypt(params, keys.public, 5, rng)
    b = hpkeet.encrypt(params, keys.public, 5, rng)
    group.reset_op_counts()
    hpkeet.compare(params, token, a, b)
    assert group.op_counts() == 2 * (deg.D_COST + UNBLIND_NET)


def test_hom_add_cost(setup64):
    params, keys, _, rng = setup64
    a = hpkeet.encrypt(params, keys.public, 1, rng)
    b = hpkeet.encrypt(params, keys.public, 2, rng)
    group.reset_op_counts()
    hpkeet.hom_add(params, a, b)
    assert group.op_counts() == OpCounts(mul=7)


# --- min-entropy advisory ------------------------------------------------------------------


def test_min_entropy_degenerate():
    report = hpkeet.min_entropy_bound(1, 1.0)
    assert report.required_bits == 0.0
    assert report.trial_budget == 1


def test_min_entropy_power_of_two_cases():
    assert hpkeet.min_entropy_bound(2**40, 2.0**-40).required_bits == pytest.approx(80.0)
    assert hpkeet.min_entropy_bound(2**20, 2.0**-20).required_bits == pytest.approx(40.0)


def test_min_entropy_rejects_bad_inputs():
    with pytest.raises(ValidationError):
        hpkeet.min_entropy_bound(0, 0.5)
    with pytest.raises(ValidationError):
        hpkeet.min_entropy_bound(4, 0.0)
    with pytest.raises(ValidationError):
        hpkeet.min_entropy_bound(4, 1.5)

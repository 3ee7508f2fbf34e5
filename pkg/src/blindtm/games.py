"""Executable security experiments: statistical sanity checks, not proofs.

Each game runs an adversary through query / challenge / guess phases
against fresh randomness per trial and reports an empirical advantage with
its standard error.  The harness enforces the query budget, never hands out
the payload secret key, and answers authorization queries with exactly the
comparison token.

Two attacker flavors matter throughout: a token holder can win the
one-wayness game whenever the plaintext space is small and known (trial
encryption plus comparison), while without the token the scheme stays
indistinguishable -- the built-in adversaries exercise both sides of that
boundary.
"""

import math
import random
from dataclasses import dataclass
from typing import Callable, Sequence

from . import hpkeet, serial
from .errors import BlindTmError, DecryptionError
from .group import GroupParams, Scalar


class QueryBudgetExceeded(BlindTmError):
    """Raised inside a trial when the adversary overdraws its oracle budget."""


class HarnessViolation(BlindTmError):
    """The adversary broke the experiment's contract (not a lost trial)."""


@dataclass
class GameResult:
    trials: int
    wins: int
    advantage_estimate: float
    std_error: float

    def to_obj(self) -> dict:
        return {
            "trials": self.trials,
            "wins": self.wins,
            "advantage_estimate": self.advantage_estimate,
            "std_error": self.std_error,
        }


def _std_error(wins: int, trials: int) -> float:
    p = wins / trials
    return math.sqrt(p * (1.0 - p) / trials)


class Oracle:
    """Decryption (and optionally authorization) oracle with a shared budget."""

    def __init__(self, params: GroupParams, keys: hpkeet.HpkeetKeys, budget: int,
                 allow_authorize: bool):
        self._params = params
        self._keys = keys
        self._budget = budget
        self._allow_authorize = allow_authorize
        self.queries = 0
        self.returned_commitments: set[int] = set()

    def _charge(self):
        self.queries += 1
        if self.queries > self._budget:
            raise QueryBudgetExceeded(f"query budget {self._budget} exceeded")

    def decrypt(self, ct: hpkeet.HpkeetCiphertext):
        """Decrypt a chosen ciphertext; returns the commitment or None on bottom."""
        self._charge()
        try:
            commit = hpkeet.decrypt(self._params, self._keys.secret, ct)
        except DecryptionError:
            return None
        self.returned_commitments.add(commit)
        return commit

    def authorize(self) -> hpkeet.Token:
        """Hand out the comparison token (only in the one-wayness games)."""
        if not self._allow_authorize:
            raise HarnessViolation("authorization queries are not allowed in this game")
        self._charge()
        return hpkeet.authorize(self._keys)


def run_ow_game(params: GroupParams, keys: hpkeet.HpkeetKeys,
                make_adversary: Callable[[random.Random], object],
                *, plaintext_space: Sequence[Scalar], query_budget: int = 16,
                trials: int = 100, rng: random.Random) -> GameResult:
    """One-wayness with decryption and authorization queries.

    Per trial the challenge encrypts a plaintext drawn uniformly from
    ``plaintext_space`` that the oracle did not already reveal; the
    adversary wins by guessing that exponent exactly.
    """
    wins = 0
    for _ in range(trials):
        trial_rng = random.Random(rng.getrandbits(64))
        adversary = make_adversary(trial_rng)
        oracle = Oracle(params, keys, query_budget, allow_authorize=True)
        try:
            adversary.query(oracle)
            m = _fresh_plaintext(params, plaintext_space, oracle, trial_rng)
            adversary.challenge(hpkeet.encrypt(params, keys.public, m, trial_rng))
            guess = adversary.guess()
        except QueryBudgetExceeded:
            continue
        if guess is not None and guess % params.q == m:
            wins += 1
    return GameResult(
        trials=trials,
        wins=wins,
        advantage_estimate=wins / trials,
        std_error=_std_error(wins, trials),
    )


def _fresh_plaintext(params, plaintext_space, oracle, rng) -> Scalar:
    for _ in range(1000):
        m = plaintext_space[rng.randrange(len(plaintext_space))] % params.q
        if params.exp(params.g, m) not in oracle.returned_commitments:
            return m
    raise HarnessViolation("no challenge plaintext left outside the queried set")


def run_ind_game(params: GroupParams, keys: hpkeet.HpkeetKeys,
                 make_adversary: Callable[[random.Random], object],
                 *, query_budget: int = 16, trials: int = 100,
                 rng: random.Random) -> GameResult:
    """Indistinguishability with a decryption oracle only (no token queries)."""
    return _ind_game(params, keys, make_adversary, query_budget, trials, rng, 1)


def run_multi_challenge_ind(params: GroupParams, keys: hpkeet.HpkeetKeys,
                            make_adversary: Callable[[random.Random], object],
                            *, n_challenges: int, query_budget: int = 16,
                            trials: int = 100, rng: random.Random) -> GameResult:
    """Indistinguishability where the challenge phase emits n ciphertexts of
    the same hidden message, modeling a whole encrypted computation."""
    return _ind_game(params, keys, make_adversary, query_budget, trials, rng, n_challenges)


def _ind_game(params, keys, make_adversary, query_budget, trials, rng, n) -> GameResult:
    if n < 1:
        raise HarnessViolation("need at least one challenge encryption")
    wins = 0
    for _ in range(trials):
        trial_rng = random.Random(rng.getrandbits(64))
        adversary = make_adversary(trial_rng)
        oracle = Oracle(params, keys, query_budget, allow_authorize=False)
        try:
            adversary.query(oracle)
            m0, m1 = adversary.choose_messages()
            if m0 % params.q == m1 % params.q:
                raise HarnessViolation("challenge messages must differ")
            b = trial_rng.randrange(2)
            cts = tuple(
                hpkeet.encrypt(params, keys.public, (m0, m1)[b], trial_rng)
                for _ in range(n)
            )
            adversary.challenge(cts if n > 1 else cts[0])
            guess = adversary.guess()
        except QueryBudgetExceeded:
            continue
        if guess == b:
            wins += 1
    p = wins / trials
    return GameResult(
        trials=trials,
        wins=wins,
        advantage_estimate=abs(p - 0.5),
        std_error=_std_error(wins, trials),
    )


# ---------------------------------------------------------------------------
# Built-in adversaries
# ---------------------------------------------------------------------------


class RandomGuessOw:
    """Baseline: guesses a uniform exponent; wins with probability ~1/q."""

    def __init__(self, params: GroupParams, rng: random.Random):
        self._params = params
        self._rng = rng

    def query(self, oracle):
        pass

    def challenge(self, ct):
        pass

    def guess(self) -> Scalar:
        return self._params.random_scalar(self._rng)


class TrialCompareOw:
    """Token holder running trial encryptions against the challenge.

    With the true plaintext domain in hand (a known, low-entropy encoding)
    this wins every time; against a secret uniform encoding it can only
    probe random exponents and essentially never wins.
    """

    def __init__(self, params: GroupParams, pk: hpkeet.HpkeetPublicKey,
                 rng: random.Random, candidates: Sequence[Scalar] | None = None,
                 probe_count: int = 32):
        self._params = params
        self._pk = pk
        self._rng = rng
        self._candidates = candidates
        self._probe_count = probe_count
        self._token = None
        self._found: Scalar | None = None

    def query(self, oracle):
        self._token = oracle.authorize()

    def challenge(self, ct):
        if self._candidates is not None:
            candidates = self._candidates
        else:
            candidates = [
                self._params.random_scalar(self._rng) for _ in range(self._probe_count)
            ]
        for cand in candidates:
            probe = hpkeet.encrypt(self._params, self._pk, cand, self._rng)
            if hpkeet.compare(self._params, self._token, ct, probe):
                self._found = cand
                return

    def guess(self) -> Scalar:
        if self._found is not None:
            return self._found
        return self._params.random_scalar(self._rng)


class CoinFlipInd:
    """Baseline distinguisher: ignores everything and flips a coin."""

    def __init__(self, rng: random.Random, m0: Scalar = 5, m1: Scalar = 6):
        self._rng = rng
        self._m = (m0, m1)

    def query(self, oracle):
        pass

    def choose_messages(self):
        return self._m

    def challenge(self, ct):
        pass

    def guess(self) -> int:
        return self._rng.randrange(2)


class TokenDistinguisherInd:
    """Distinguisher holding a token obtained out of band.

    The harness forbids authorization queries in the indistinguishability
    game; granting the token anyway models the attacker the scheme openly
    does not defend against, and it wins every trial by comparing the
    challenge with a fresh encryption of m0.
    """

    def __init__(self, params: GroupParams, pk: hpkeet.HpkeetPublicKey,
                 token: hpkeet.Token, rng: random.Random,
                 m0: Scalar = 5, m1: Scalar = 6):
        self._params = params
        self._pk = pk
        self._token = token
        self._rng = rng
        self._m = (m0, m1)
        self._guess = 0

    def query(self, oracle):
        pass

    def choose_messages(self):
        return self._m

    def challenge(self, ct):
        cts = ct if isinstance(ct, tuple) else (ct,)
        probe = hpkeet.encrypt(self._params, self._pk, self._m[0], self._rng)
        self._guess = 0 if hpkeet.compare(self._params, self._token, cts[0], probe) else 1

    def guess(self) -> int:
        return self._guess


class ByteMatcherInd:
    """Compares challenge bytes against fresh encryptions of both messages.

    Probabilistic encryption makes serialized collisions vanishingly rare,
    so this degrades to a coin flip.
    """

    def __init__(self, params: GroupParams, pk: hpkeet.HpkeetPublicKey,
                 rng: random.Random, m0: Scalar = 5, m1: Scalar = 6):
        self._params = params
        self._pk = pk
        self._rng = rng
        self._m = (m0, m1)
        self._guess: int | None = None

    def query(self, oracle):
        pass

    def choose_messages(self):
        return self._m

    def challenge(self, ct):
        cts = ct if isinstance(ct, tuple) else (ct,)
        blobs = {serial.ciphertext_bytes(self._params, c) for c in cts}
        for b, m in enumerate(self._m):
            probe = hpkeet.encrypt(self._params, self._pk, m, self._rng)
            if serial.ciphertext_bytes(self._params, probe) in blobs:
                self._guess = b
                return

    def guess(self) -> int:
        if self._guess is not None:
            return self._guess
        return self._rng.randrange(2)

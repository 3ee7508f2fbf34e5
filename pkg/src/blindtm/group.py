"""Prime-order subgroup arithmetic underlying every layer above.

The ciphertext group is the order-q subgroup of Z_p* for primes p, q with
q | p - 1; the plaintext/exponent group is Z_q with addition.  Elements are
plain ints in [1, p), exponents ("scalars") plain ints in [0, q).  All
subgroup operations funnel through :class:`GroupParams` methods so the
per-thread operation tallies used by the benchmark assertions stay exact.

Arithmetic is not constant time; this is a research artifact, not a
hardened implementation.
"""

import hashlib
import threading
from dataclasses import dataclass

from .errors import GenerationError, ValidationError

GroupElement = int
Scalar = int

MIN_MODULUS_BITS = 16
PRIMALITY_ROUNDS = 64

_HASH_SUBGROUP_ATTEMPTS = 256
_PARAM_SUBGROUP_ATTEMPTS = 64


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for i in range(2, int(limit**0.5) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(flags[i * i :: i]))
    return [i for i, f in enumerate(flags) if f]


_SMALL_PRIMES = _sieve(4096)


# ---------------------------------------------------------------------------
# Operation tallies (per thread, merged on demand)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OpCounts:
    """Immutable snapshot of operation tallies.

    ``exp``/``mul``/``inv`` count subgroup operations; ``E``/``D``/``G``
    count invocations of the base cipher's encrypt/decrypt/keygen.
    Supports +, - and integer scaling so tests can write cost algebra like
    ``2 * E_COST + OpCounts(exp=2, mul=1)``.
    """

    exp: int = 0
    mul: int = 0
    inv: int = 0
    E: int = 0
    D: int = 0
    G: int = 0

    def __add__(self, other: "OpCounts") -> "OpCounts":
        return OpCounts(
            self.exp + other.exp,
            self.mul + other.mul,
            self.inv + other.inv,
            self.E + other.E,
            self.D + other.D,
            self.G + other.G,
        )

    def __sub__(self, other: "OpCounts") -> "OpCounts":
        return OpCounts(
            self.exp - other.exp,
            self.mul - other.mul,
            self.inv - other.inv,
            self.E - other.E,
            self.D - other.D,
            self.G - other.G,
        )

    def __mul__(self, k: int) -> "OpCounts":
        return OpCounts(
            self.exp * k, self.mul * k, self.inv * k, self.E * k, self.D * k, self.G * k
        )

    __rmul__ = __mul__


class _Tally:
    __slots__ = ("exp", "mul", "inv", "E", "D", "G")

    def __init__(self):
        self.exp = self.mul = self.inv = self.E = self.D = self.G = 0

    def snapshot(self) -> OpCounts:
        return OpCounts(self.exp, self.mul, self.inv, self.E, self.D, self.G)

    def clear(self):
        self.exp = self.mul = self.inv = self.E = self.D = self.G = 0


_local = threading.local()
_tallies: dict[int, _Tally] = {}
_tallies_lock = threading.Lock()


def _tally() -> _Tally:
    t = getattr(_local, "tally", None)
    if t is None:
        t = _Tally()
        _local.tally = t
        with _tallies_lock:
            _tallies[threading.get_ident()] = t
    return t


def op_counts() -> OpCounts:
    """Snapshot of the calling thread's tallies."""
    return _tally().snapshot()


def reset_op_counts():
    """Zero the calling thread's tallies."""
    _tally().clear()


def merged_op_counts() -> OpCounts:
    """Sum of tallies across all threads that performed group operations."""
    with _tallies_lock:
        total = OpCounts()
        for t in _tallies.values():
            total = total + t.snapshot()
        return total


# ---------------------------------------------------------------------------
# Primality
# ---------------------------------------------------------------------------


def is_probable_prime(n: int, rng, rounds: int = PRIMALITY_ROUNDS) -> bool:
    """Miller-Rabin with ``rounds`` rng-drawn witnesses (small primes first)."""
    if n < 2:
        return False
    for sp in _SMALL_PRIMES:
        if n == sp:
            return True
        if n % sp == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int, rng, rounds: int = PRIMALITY_ROUNDS) -> int:
    """Uniform-ish odd prime with exactly ``bits`` bits."""
    if bits < 3:
        raise ValidationError("prime size must be at least 3 bits")
    for _ in range(64 * bits):
        cand = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_probable_prime(cand, rng, rounds):
            return cand
    raise GenerationError(f"no {bits}-bit prime found within the iteration cap")


# ---------------------------------------------------------------------------
# Group parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupParams:
    """Subgroup description (p, q, g, h).

    g and h generate the same order-q subgroup; h is derived by hashing so
    that nobody knows log_g(h), which the blinded-commitment soundness
    relies on.
    """

    p: int
    q: int
    g: int
    h: int

    @property
    def bits(self) -> int:
        return self.p.bit_length()

    # -- subgroup operations (tallied) --

    def exp(self, base: GroupElement, e: Scalar) -> GroupElement:
        _tally().exp += 1
        return pow(base, e, self.p)

    def mul(self, a: GroupElement, b: GroupElement) -> GroupElement:
        _tally().mul += 1
        return (a * b) % self.p

    def inv(self, a: GroupElement) -> GroupElement:
        _tally().inv += 1
        return pow(a, -1, self.p)

    def is_member(self, x: int) -> bool:
        """Order-q subgroup membership; costs one exponentiation."""
        return 0 < x < self.p and self.exp(x, self.q) == 1

    # -- exponent-group arithmetic (mod q, not tallied: these are not
    #    ciphertext-group operations) --

    def scalar_add(self, a: Scalar, b: Scalar) -> Scalar:
        return (a + b) % self.q

    def scalar_sub(self, a: Scalar, b: Scalar) -> Scalar:
        return (a - b) % self.q

    def scalar_neg(self, a: Scalar) -> Scalar:
        return (-a) % self.q

    def random_scalar(self, rng) -> Scalar:
        return rng.randrange(self.q)

    def hash_to_subgroup(self, data: bytes) -> GroupElement:
        """Deterministic map bytes -> subgroup element (never the identity).

        Expands the input to the width of p, reduces into Z_p*, and raises
        to the cofactor; identity outputs retry with a counter.
        """
        width = (self.p.bit_length() + 7) // 8
        cofactor = (self.p - 1) // self.q
        for ctr in range(_HASH_SUBGROUP_ATTEMPTS):
            buf = b""
            block = 0
            while len(buf) < width:
                hsh = hashlib.sha256()
                hsh.update(b"blindtm/h2g")
                hsh.update(ctr.to_bytes(4, "big"))
                hsh.update(block.to_bytes(4, "big"))
                hsh.update(data)
                buf += hsh.digest()
                block += 1
            x = int.from_bytes(buf[:width], "big") % (self.p - 1) + 1
            y = self.exp(x, cofactor)
            if y != 1:
                return y
        raise GenerationError("hash_to_subgroup hit the identity 256 times")


def validate_params(params: GroupParams, rng=None, rounds: int = PRIMALITY_ROUNDS):
    """Check every GroupParams invariant; raise ValidationError naming the offense."""
    import random as _random

    if rng is None:
        rng = _random.SystemRandom()
    p, q, g, h = params.p, params.q, params.g, params.h
    if not is_probable_prime(p, rng, rounds):
        raise ValidationError("p is not prime")
    if not is_probable_prime(q, rng, rounds):
        raise ValidationError("q is not prime")
    if (p - 1) % q != 0:
        raise ValidationError("q does not divide p - 1")
    for name, gen in (("g", g), ("h", h)):
        if not 1 < gen < p:
            raise ValidationError(f"{name} out of range")
        if pow(gen, q, p) != 1:
            raise ValidationError(f"{name} is not in the order-q subgroup")
    if g == h:
        raise ValidationError("g and h must be distinct")


def _subgroup_order_bits(bits: int) -> int:
    if bits < 256:
        return max(8, bits - 8)
    return min(256, bits - 16)


def generate_params(bits: int, rng) -> GroupParams:
    """Search (p, q, g, h) with |p| = bits; deterministic for a seeded rng.

    q is drawn first, then p = k*q + 1 is searched; g is a random cofactor
    power, h is hash-derived from (p, q, g).
    """
    if bits < MIN_MODULUS_BITS:
        raise ValidationError(f"modulus must have at least {MIN_MODULUS_BITS} bits")
    q_bits = _subgroup_order_bits(bits)
    for _ in range(_PARAM_SUBGROUP_ATTEMPTS):
        q = random_prime(q_bits, rng)
        k_lo = ((1 << (bits - 1)) - 1) // q + 1
        k_hi = ((1 << bits) - 2) // q
        if k_hi <= k_lo + 1:
            continue
        p = 0
        for _ in range(64 * bits):
            k = rng.randrange(k_lo, k_hi + 1) & ~1
            if k < k_lo:
                continue
            cand = k * q + 1
            if cand.bit_length() != bits:
                continue
            if is_probable_prime(cand, rng):
                p = cand
                break
        if not p:
            continue
        cofactor = (p - 1) // q
        g = 1
        while g == 1:
            g = pow(rng.randrange(2, p - 1), cofactor, p)
        params = GroupParams(p=p, q=q, g=g, h=g)
        seed = f"blindtm/nums-h|{p:x}|{q:x}|{g:x}".encode()
        for ctr in range(_HASH_SUBGROUP_ATTEMPTS):
            h = params.hash_to_subgroup(seed + b"|" + ctr.to_bytes(4, "big"))
            if h != g:
                return GroupParams(p=p, q=q, g=g, h=h)
        raise GenerationError("could not derive an h distinct from g")
    raise GenerationError("parameter search exceeded its iteration cap")

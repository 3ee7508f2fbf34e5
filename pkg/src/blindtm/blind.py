"""Encrypted machine execution: encoding, compilation, oblivious running.

A machine is compiled against a secret random encoding of its states and
symbols.  The compiled program stores, per rule, encryptions of the state
and symbol *differences* (so applying a rule is a homomorphic addition plus
rerandomization) keyed by a hash of the unblinded (state, symbol)
commitments.  The executor sweeps the whole tape once per logical step and
rerandomizes every cell it passes, so the physical access pattern is a pure
function of input length and declared bounds, never of tape content.

The replacement-style compiler and `leaky_run` exist as a negative control:
substituting stored ciphertexts verbatim (no homomorphic update, no
rerandomization) makes repeated writes byte-identical, which lets anyone --
with no token at all -- distinguish inputs by the repetition pattern.
"""

import hashlib
from dataclasses import dataclass
from typing import Callable, Mapping

from . import hpkeet, serial, tm
from .errors import (
    BlindRunError,
    DecryptionError,
    FingerprintError,
    GenerationError,
    ValidationError,
)
from .group import GroupElement, GroupParams, Scalar

_COMPILE_SALT_ATTEMPTS = 64

# Observer callback: (kind, logical_step, position, ciphertext) where kind
# is "cell" for tape touches (position is the cell index) and "state" for
# state-ciphertext replacements (position is None).
Observer = Callable[[str, int, int | None, hpkeet.HpkeetCiphertext], None]


@dataclass(frozen=True)
class Encoding:
    """Secret injective maps state/symbol -> exponent, plus decode tables.

    Codes are uniform over [0, q), which is what makes trial-encryption
    attacks against a token holder infeasible at cryptographic group sizes.
    Decode tables are keyed by the commitment g^code.
    """

    state_code: Mapping[str, Scalar]
    symbol_code: Mapping[str, Scalar]
    blank: str
    decode_state: Mapping[GroupElement, str]
    decode_symbol: Mapping[GroupElement, str]


@dataclass(frozen=True)
class TransitionEntry:
    state_ct: hpkeet.HpkeetCiphertext
    sym_ct: hpkeet.HpkeetCiphertext
    move: str


@dataclass(frozen=True)
class BlindProgram:
    """Hash-keyed encrypted transition table plus execution metadata.

    ``style`` is "delta" for the homomorphic construction and
    "replacement" for the insecure negative control.  Moves are stored in
    the clear: head motion is observable by the executor anyway.
    """

    table: Mapping[str, TransitionEntry]
    enc_start: hpkeet.HpkeetCiphertext
    halt_commitments: frozenset[GroupElement]
    time_coeffs: tuple[int, ...]
    space_coeffs: tuple[int, ...]
    fingerprint: str
    salt: int = 0
    style: str = "delta"

    def time_bound(self, n: int) -> int:
        return tm.eval_poly(self.time_coeffs, n)

    def space_bound(self, n: int) -> int:
        return tm.eval_poly(self.space_coeffs, n)


@dataclass
class EncryptedConfiguration:
    """Encrypted machine snapshot: state ciphertext plus one ciphertext per
    tape cell over [-bound, bound].  The head index is plain; hiding it is
    the sweep schedule's job, not the configuration's."""

    enc_state: hpkeet.HpkeetCiphertext
    cells: list[hpkeet.HpkeetCiphertext]
    bound: int
    head: int
    logical_step: int
    input_length: int
    fingerprint: str

    def cell(self, pos: int) -> hpkeet.HpkeetCiphertext:
        return self.cells[pos + self.bound]


def make_encoding(spec: tm.TmSpec, params: GroupParams, rng) -> Encoding:
    """Draw distinct uniform codes for every state and tape symbol."""
    states = sorted(spec.states)
    symbols = sorted(spec.tape_alphabet)
    need = len(states) + len(symbols)
    if params.q < need:
        raise ValidationError(
            f"group order {params.q} cannot injectively encode {need} names"
        )
    codes: set[Scalar] = set()
    drawn: list[Scalar] = []
    attempts = 0
    while len(drawn) < need:
        attempts += 1
        if attempts > 64 * need + 256:
            raise GenerationError("could not draw distinct codes (order too small)")
        c = params.random_scalar(rng)
        if c not in codes:
            codes.add(c)
            drawn.append(c)
    state_code = dict(zip(states, drawn[: len(states)]))
    symbol_code = dict(zip(symbols, drawn[len(states) :]))
    return Encoding(
        state_code=state_code,
        symbol_code=symbol_code,
        blank=spec.blank,
        decode_state={params.exp(params.g, c): s for s, c in state_code.items()},
        decode_symbol={params.exp(params.g, c): s for s, c in symbol_code.items()},
    )


def transition_key(params: GroupParams, salt: int, state_commit: GroupElement,
                   sym_commit: GroupElement) -> str:
    """256-bit digest of the fixed-width commitment pair; the table key."""
    hsh = hashlib.sha256()
    hsh.update(b"blindtm/transition")
    hsh.update(salt.to_bytes(8, "big"))
    hsh.update(serial.element_bytes(params, state_commit))
    hsh.update(serial.element_bytes(params, sym_commit))
    return hsh.hexdigest()


def _build_table(spec, encoding, params, pk, rng, salt, style):
    table: dict[str, TransitionEntry] = {}
    for (q_state, sym), (p_state, wsym, move) in spec.delta.items():
        key = transition_key(
            params,
            salt,
            params.exp(params.g, encoding.state_code[q_state]),
            params.exp(params.g, encoding.symbol_code[sym]),
        )
        if key in table:
            return None
        if style == "delta":
            m_state = params.scalar_sub(
                encoding.state_code[p_state], encoding.state_code[q_state]
            )
            m_sym = params.scalar_sub(encoding.symbol_code[wsym], encoding.symbol_code[sym])
        else:
            m_state = encoding.state_code[p_state]
            m_sym = encoding.symbol_code[wsym]
        table[key] = TransitionEntry(
            state_ct=hpkeet.encrypt(params, pk, m_state, rng),
            sym_ct=hpkeet.encrypt(params, pk, m_sym, rng),
            move=move,
        )
    return table


def _compile(spec, encoding, params, pk, rng, style) -> BlindProgram:
    for salt in range(_COMPILE_SALT_ATTEMPTS):
        table = _build_table(spec, encoding, params, pk, rng, salt, style)
        if table is not None:
            return BlindProgram(
                table=table,
                enc_start=hpkeet.encrypt(params, pk, encoding.state_code[spec.start], rng),
                halt_commitments=frozenset(
                    params.exp(params.g, encoding.state_code[h]) for h in spec.halt
                ),
                time_coeffs=spec.time_coeffs,
                space_coeffs=spec.space_coeffs,
                fingerprint=serial.params_fingerprint(params),
                salt=salt,
                style=style,
            )
    raise GenerationError("transition-table hashing collided for every salt")


def compile_program(spec: tm.TmSpec, encoding: Encoding, params: GroupParams,
                    pk: hpkeet.HpkeetPublicKey, rng) -> BlindProgram:
    """Encrypt the transition function as differences keyed by commitment hash."""
    return _compile(spec, encoding, params, pk, rng, "delta")


def compile_replacement(spec: tm.TmSpec, encoding: Encoding, params: GroupParams,
                        pk: hpkeet.HpkeetPublicKey, rng) -> BlindProgram:
    """Negative control: entries hold absolute targets instead of differences."""
    return _compile(spec, encoding, params, pk, rng, "replacement")


def select_transition(program: BlindProgram, token: hpkeet.Token, params: GroupParams,
                      enc_state: hpkeet.HpkeetCiphertext,
                      cell: hpkeet.HpkeetCiphertext) -> TransitionEntry:
    """Unblind state and symbol, then one O(1) table lookup (never a scan)."""
    key = transition_key(
        params,
        program.salt,
        hpkeet.unblind(params, token, enc_state),
        hpkeet.unblind(params, token, cell),
    )
    entry = program.table.get(key)
    if entry is None:
        raise BlindRunError("no transition entry for the current configuration")
    return entry


def encrypt_tape(input_str: str, encoding: Encoding, program: BlindProgram,
                 params: GroupParams, pk: hpkeet.HpkeetPublicKey, rng,
                 bound: int | None = None) -> EncryptedConfiguration:
    """Cell-by-cell encryption of the padded input; head at cell 0.

    The initial state ciphertext is a rerandomization of the program's
    start encryption, so it is fresh bytes but needs no knowledge of the
    (secret) state names beyond the program itself.
    """
    if bound is None:
        bound = program.space_bound(len(input_str))
    if bound < 1:
        raise ValidationError("tape bound must be at least 1")
    if len(input_str) > bound:
        raise ValidationError(
            f"input of length {len(input_str)} exceeds the tape bound {bound}"
        )
    blank_code = encoding.symbol_code[encoding.blank]
    cells = []
    for pos in range(-bound, bound + 1):
        if 0 <= pos < len(input_str):
            sym = input_str[pos]
            code = encoding.symbol_code.get(sym)
            if code is None:
                raise ValidationError(f"input symbol {sym!r} has no encoding")
        else:
            code = blank_code
        cells.append(hpkeet.encrypt(params, pk, code, rng))
    return EncryptedConfiguration(
        enc_state=hpkeet.rerandomize(params, pk, program.enc_start, rng),
        cells=cells,
        bound=bound,
        head=0,
        logical_step=0,
        input_length=len(input_str),
        fingerprint=program.fingerprint,
    )


def sweep_schedule(bound: int, steps: int) -> list[int]:
    """Physical touch positions: one full left-to-right pass per logical step.

    Depends only on (bound, steps); length is steps * (2 * bound + 1).
    """
    if bound < 1 or steps < 1:
        raise ValidationError("bound and steps must be at least 1")
    return [pos for _ in range(steps) for pos in range(-bound, bound + 1)]


def blind_run(program: BlindProgram, token: hpkeet.Token, params: GroupParams,
              pk: hpkeet.HpkeetPublicKey, conf: EncryptedConfiguration, rng,
              observer: Observer | None = None) -> EncryptedConfiguration:
    """Run exactly time_bound(input_length) logical steps obliviously.

    Every logical step is one sweep over [-bound, bound]: the cell under
    the logical head gets the homomorphic rule application, every other
    cell gets a rerandomization, and the two are indistinguishable in the
    access pattern.  Once the state reaches a halt commitment the remaining
    sweeps are all dummies (the state keeps being rerandomized too, so no
    ciphertext ever goes stale).
    """
    if program.fingerprint != conf.fingerprint:
        raise FingerprintError("program and tape were made for different parameters")
    if program.fingerprint != serial.params_fingerprint(params):
        raise FingerprintError("parameters do not match the program fingerprint")
    if program.style != "delta":
        raise ValidationError("blind_run requires a delta-style program")

    bound = conf.bound
    steps_total = program.time_bound(conf.input_length)
    cells = list(conf.cells)
    enc_state = conf.enc_state
    head = conf.head
    halted = hpkeet.unblind(params, token, enc_state) in program.halt_commitments

    for step in range(steps_total):
        fired = False
        if halted:
            enc_state = hpkeet.rerandomize(params, pk, enc_state, rng)
            if observer:
                observer("state", step, None, enc_state)
        for pos in range(-bound, bound + 1):
            idx = pos + bound
            if not halted and not fired and pos == head:
                try:
                    entry = select_transition(program, token, params, enc_state, cells[idx])
                except BlindRunError:
                    raise BlindRunError(
                        f"machine is stuck at logical step {step}: "
                        "no transition entry for the current configuration"
                    ) from None
                enc_state = hpkeet.rerandomize(
                    params, pk, hpkeet.hom_add(params, enc_state, entry.state_ct), rng
                )
                cells[idx] = hpkeet.rerandomize(
                    params, pk, hpkeet.hom_add(params, cells[idx], entry.sym_ct), rng
                )
                head += tm.MOVES[entry.move]
                if not -bound <= head <= bound:
                    raise BlindRunError(
                        f"head left the tape bound at logical step {step}"
                    )
                halted = (
                    hpkeet.unblind(params, token, enc_state) in program.halt_commitments
                )
                fired = True
                if observer:
                    observer("state", step, None, enc_state)
            else:
                cells[idx] = hpkeet.rerandomize(params, pk, cells[idx], rng)
            if observer:
                observer("cell", step, pos, cells[idx])

    return EncryptedConfiguration(
        enc_state=enc_state,
        cells=cells,
        bound=bound,
        head=head,
        logical_step=conf.logical_step + steps_total,
        input_length=conf.input_length,
        fingerprint=conf.fingerprint,
    )


def decrypt_tape(params: GroupParams, sk: hpkeet.HpkeetSecretKey, encoding: Encoding,
                 conf: EncryptedConfiguration) -> str:
    """Decrypt and decode every cell, then strip surrounding blanks."""
    symbols = []
    for ct in conf.cells:
        commit = hpkeet.decrypt(params, sk, ct)
        sym = encoding.decode_symbol.get(commit)
        if sym is None:
            raise DecryptionError(
                "cell decrypted to a commitment outside the decode table"
            )
        symbols.append(sym)
    return "".join(symbols).strip(encoding.blank)


def decrypt_state(params: GroupParams, sk: hpkeet.HpkeetSecretKey, encoding: Encoding,
                  conf: EncryptedConfiguration) -> str:
    """Decrypt and decode the state ciphertext (diagnostics and tests)."""
    commit = hpkeet.decrypt(params, sk, conf.enc_state)
    state = encoding.decode_state.get(commit)
    if state is None:
        raise DecryptionError(
            "state decrypted to a commitment outside the decode table"
        )
    return state


def leaky_run(program: BlindProgram, token: hpkeet.Token, params: GroupParams,
              conf: EncryptedConfiguration) -> list[bytes]:
    """Negative control: execute by verbatim substitution of table ciphertexts.

    No homomorphic update, no rerandomization.  Returns the byte pattern of
    every cell write; because a rule always writes the same stored
    ciphertext, repeated rule firings repeat bytes, and the repetition
    pattern distinguishes inputs without any token.
    """
    if program.style != "replacement":
        raise ValidationError("leaky_run requires a replacement-style program")
    if program.fingerprint != conf.fingerprint:
        raise FingerprintError("program and tape were made for different parameters")
    bound = conf.bound
    cells = list(conf.cells)
    enc_state = conf.enc_state
    head = conf.head
    writes: list[bytes] = []
    for step in range(program.time_bound(conf.input_length)):
        if hpkeet.unblind(params, token, enc_state) in program.halt_commitments:
            break
        idx = head + bound
        try:
            entry = select_transition(program, token, params, enc_state, cells[idx])
        except BlindRunError:
            raise BlindRunError(
                f"machine is stuck at logical step {step}: "
                "no transition entry for the current configuration"
            ) from None
        enc_state = entry.state_ct
        cells[idx] = entry.sym_ct
        writes.append(serial.ciphertext_bytes(params, cells[idx]))
        head += tm.MOVES[entry.move]
        if not -bound <= head <= bound:
            raise BlindRunError(f"head left the tape bound at logical step {step}")
    return writes


def repetition_fingerprint(trace: list[bytes]) -> tuple[int, ...]:
    """Map each write to the index of its first byte-identical occurrence."""
    return tuple(trace.index(b) for b in trace)


def head_trace_bytes(trace: list[tuple[int, int]]) -> bytes:
    """Canonical bytes of a physical head trace [(logical_step, position)]."""
    return "\n".join(f"{step} {pos}" for step, pos in trace).encode()


# ---------------------------------------------------------------------------
# Envelopes for the blind-module artifacts
# ---------------------------------------------------------------------------


def program_envelope(params: GroupParams, pk: hpkeet.HpkeetPublicKey,
                     program: BlindProgram) -> dict:
    return {
        "kind": "blind-program",
        "version": serial.VERSION,
        "fingerprint": program.fingerprint,
        "style": program.style,
        "salt": program.salt,
        "params": serial.params_to_obj(params),
        "pk": serial.public_key_to_obj(pk),
        "time": list(program.time_coeffs),
        "space": list(program.space_coeffs),
        "enc_start": serial.ciphertext_to_obj(program.enc_start),
        "halt_commitments": sorted(serial.to_hex(c) for c in program.halt_commitments),
        "table": {
            key: {
                "state": serial.ciphertext_to_obj(entry.state_ct),
                "sym": serial.ciphertext_to_obj(entry.sym_ct),
                "move": entry.move,
            }
            for key, entry in program.table.items()
        },
    }


def program_from_envelope(obj: dict) -> tuple[GroupParams, hpkeet.HpkeetPublicKey, BlindProgram]:
    serial._expect_kind(obj, "blind-program")
    params = serial.params_from_obj(obj["params"])
    serial._check_fingerprint(obj, params)
    pk = serial.public_key_from_obj(params, obj["pk"])
    table = {
        key: TransitionEntry(
            state_ct=serial.ciphertext_from_obj(params, ent["state"]),
            sym_ct=serial.ciphertext_from_obj(params, ent["sym"]),
            move=ent["move"],
        )
        for key, ent in obj["table"].items()
    }
    for ent in table.values():
        if ent.move not in tm.MOVES:
            raise ValidationError(f"bad move {ent.move!r} in program table")
    program = BlindProgram(
        table=table,
        enc_start=serial.ciphertext_from_obj(params, obj["enc_start"]),
        halt_commitments=frozenset(
            serial._element_from_hex(params, c) for c in obj["halt_commitments"]
        ),
        time_coeffs=tuple(int(c) for c in obj["time"]),
        space_coeffs=tuple(int(c) for c in obj["space"]),
        fingerprint=obj["fingerprint"],
        salt=int(obj["salt"]),
        style=obj["style"],
    )
    return params, pk, program


def encoding_envelope(params: GroupParams, encoding: Encoding) -> dict:
    return {
        "kind": "tm-encoding",
        "version": serial.VERSION,
        "secret": True,
        "fingerprint": serial.params_fingerprint(params),
        "blank": encoding.blank,
        "states": {name: serial.to_hex(c) for name, c in encoding.state_code.items()},
        "symbols": {sym: serial.to_hex(c) for sym, c in encoding.symbol_code.items()},
    }


def encoding_from_envelope(obj: dict, params: GroupParams) -> Encoding:
    serial._expect_kind(obj, "tm-encoding")
    serial._check_fingerprint(obj, params)
    state_code = {name: serial.from_hex(c) for name, c in obj["states"].items()}
    symbol_code = {sym: serial.from_hex(c) for sym, c in obj["symbols"].items()}
    blank = obj["blank"]
    if blank not in symbol_code:
        raise ValidationError("encoding blank symbol is missing from the symbol table")
    return Encoding(
        state_code=state_code,
        symbol_code=symbol_code,
        blank=blank,
        decode_state={params.exp(params.g, c): s for s, c in state_code.items()},
        decode_symbol={params.exp(params.g, c): s for s, c in symbol_code.items()},
    )


def tape_envelope(params: GroupParams, conf: EncryptedConfiguration) -> dict:
    return {
        "kind": "encrypted-tape",
        "version": serial.VERSION,
        "fingerprint": conf.fingerprint,
        "bound": conf.bound,
        "head": conf.head,
        "logical_step": conf.logical_step,
        "input_length": conf.input_length,
        "enc_state": serial.ciphertext_to_obj(conf.enc_state),
        "cells": [serial.ciphertext_to_obj(ct) for ct in conf.cells],
    }


def tape_from_envelope(obj: dict, params: GroupParams) -> EncryptedConfiguration:
    serial._expect_kind(obj, "encrypted-tape")
    serial._check_fingerprint(obj, params)
    bound = int(obj["bound"])
    cells = [serial.ciphertext_from_obj(params, c) for c in obj["cells"]]
    if len(cells) != 2 * bound + 1:
        raise ValidationError("cell count does not match the declared bound")
    return EncryptedConfiguration(
        enc_state=serial.ciphertext_from_obj(params, obj["enc_state"]),
        cells=cells,
        bound=bound,
        head=int(obj["head"]),
        logical_step=int(obj["logical_step"]),
        input_length=int(obj["input_length"]),
        fingerprint=obj["fingerprint"],
    )

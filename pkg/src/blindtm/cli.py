"""File-based command-line workflow.

Subcommands cover the whole lifecycle: key generation, token extraction,
machine compilation, tape encryption, blind execution, decryption, an
oracle-equivalence verifier, an operation-count benchmark, and the security
games.  Artifacts are JSON envelopes bound together by a group-parameter
fingerprint; commands refuse to mix artifacts from different sessions.

Exit codes: 0 success, 1 usage, 2 validation/fingerprint, 3 crypto failure,
4 verification mismatch.
"""

import argparse
import itertools
import json
import random
import statistics
import sys
import time
from dataclasses import dataclass

from . import blind, deg, games, hpkeet, machines, serial, tm
from .errors import (
    BlindRunError,
    BlindTmError,
    DecryptionError,
    FingerprintError,
    GenerationError,
    TmRunError,
    ValidationError,
)
from .group import OpCounts, generate_params, op_counts, reset_op_counts

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_CRYPTO = 3
EXIT_MISMATCH = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass
class Manifest:
    """Fingerprints of every artifact taking part in one command."""

    fingerprints: dict[str, str]

    def check(self):
        values = set(self.fingerprints.values())
        if len(values) > 1:
            detail = ", ".join(f"{k}={v[:12]}..." for k, v in self.fingerprints.items())
            raise FingerprintError(f"artifacts belong to different sessions: {detail}")


def _rng(seed):
    return random.Random(seed) if seed is not None else random.SystemRandom()


def _load_keys(path):
    return serial.keys_from_envelope(serial.load_envelope(path))


def _load_program(path):
    return blind.program_from_envelope(serial.load_envelope(path))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_keygen(args) -> int:
    rng = _rng(args.seed)
    params = generate_params(args.bits, rng)
    keys = hpkeet.keygen(params, rng)
    serial.write_envelope(args.out, serial.keys_envelope(params, keys))
    print(f"wrote {args.out} ({args.bits}-bit modulus, fingerprint "
          f"{serial.params_fingerprint(params)[:12]}...)")
    return EXIT_OK


def cmd_token(args) -> int:
    params, keys = _load_keys(args.keys)
    token = hpkeet.authorize(keys)
    serial.write_envelope(args.out, serial.token_envelope(params, token))
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_compile(args) -> int:
    rng = _rng(args.seed)
    with open(args.tm, "r", encoding="utf-8") as fh:
        spec = tm.parse_tm(fh.read())
    params, keys = _load_keys(args.keys)
    encoding = blind.make_encoding(spec, params, rng)
    program = blind.compile_program(spec, encoding, params, keys.public, rng)
    serial.write_envelope(args.out_program, blind.program_envelope(params, keys.public, program))
    serial.write_envelope(args.out_encoding, blind.encoding_envelope(params, encoding))
    print(f"wrote {args.out_program} ({len(program.table)} transitions) and "
          f"{args.out_encoding} (SECRET)")
    return EXIT_OK


def cmd_encrypt_tape(args) -> int:
    rng = _rng(args.seed)
    params, pk, program = _load_program(args.program)
    encoding = blind.encoding_from_envelope(serial.load_envelope(args.encoding), params)
    Manifest({"program": program.fingerprint,
              "encoding": serial.params_fingerprint(params)}).check()
    conf = blind.encrypt_tape(args.input, encoding, program, params, pk, rng)
    serial.write_envelope(args.out, blind.tape_envelope(params, conf))
    print(f"wrote {args.out} ({2 * conf.bound + 1} cells, bound {conf.bound})")
    return EXIT_OK


def cmd_run(args) -> int:
    rng = _rng(args.seed)
    params, pk, program = _load_program(args.program)
    token_fp, token = serial.token_from_envelope(serial.load_envelope(args.token))
    conf = blind.tape_from_envelope(serial.load_envelope(args.tape), params)
    Manifest({"program": program.fingerprint, "token": token_fp,
              "tape": conf.fingerprint}).check()
    trace: list[tuple[int, int]] = []

    def observer(kind, step, pos, ct):
        if kind == "cell":
            trace.append((step, pos))

    result = blind.blind_run(program, token, params, pk, conf, rng, observer=observer)
    serial.write_envelope(args.out, blind.tape_envelope(params, result))
    if args.trace:
        with open(args.trace, "wb") as fh:
            fh.write(blind.head_trace_bytes(trace))
            fh.write(b"\n")
        print(f"wrote {args.out} and head trace {args.trace} "
              f"({len(trace)} touches, {result.logical_step} logical steps)")
    else:
        print(f"wrote {args.out} ({result.logical_step} logical steps)")
    return EXIT_OK


def cmd_decrypt_tape(args) -> int:
    params, keys = _load_keys(args.keys)
    encoding = blind.encoding_from_envelope(serial.load_envelope(args.encoding), params)
    conf = blind.tape_from_envelope(serial.load_envelope(args.tape), params)
    Manifest({"keys": serial.params_fingerprint(params),
              "tape": conf.fingerprint}).check()
    print(blind.decrypt_tape(params, keys.secret, encoding, conf))
    return EXIT_OK


def _enumerate_inputs(alphabet, max_len):
    symbols = sorted(alphabet)
    for n in range(max_len + 1):
        for tup in itertools.product(symbols, repeat=n):
            yield "".join(tup)


def cmd_verify(args) -> int:
    rng = _rng(args.seed)
    with open(args.tm, "r", encoding="utf-8") as fh:
        spec = tm.parse_tm(fh.read())
    if args.keys:
        params, keys = _load_keys(args.keys)
    else:
        params = generate_params(args.bits, rng)
        keys = hpkeet.keygen(params, rng)
    if args.program and args.encoding:
        prog_params, pk, program = _load_program(args.program)
        encoding = blind.encoding_from_envelope(serial.load_envelope(args.encoding), params)
        Manifest({"keys": serial.params_fingerprint(params),
                  "program": program.fingerprint}).check()
    else:
        encoding = blind.make_encoding(spec, params, rng)
        program = blind.compile_program(spec, encoding, params, keys.public, rng)
        pk = keys.public
    if args.token:
        token_fp, token = serial.token_from_envelope(serial.load_envelope(args.token))
        Manifest({"keys": serial.params_fingerprint(params), "token": token_fp}).check()
    else:
        token = hpkeet.authorize(keys)

    if args.inputs is not None:
        inputs = [w for w in args.inputs.split(",")] if args.inputs else [""]
    else:
        inputs = list(_enumerate_inputs(spec.input_alphabet, args.max_len))

    mismatches = 0
    for w in inputs:
        expected_res = tm.run(spec, w, max_steps=spec.time_bound(len(w)))
        expected = tm.tape_output(spec, expected_res.final)
        try:
            conf = blind.encrypt_tape(w, encoding, program, params, pk, rng)
            out = blind.blind_run(program, token, params, pk, conf, rng)
            actual = blind.decrypt_tape(params, keys.secret, encoding, out)
        except BlindTmError as exc:
            mismatches += 1
            print(f"MISMATCH {w!r}: blind pipeline failed: {exc}")
            continue
        if actual != expected or not expected_res.halted:
            mismatches += 1
            print(f"MISMATCH {w!r}: plaintext {expected!r} (halted={expected_res.halted}) "
                  f"vs blind {actual!r}")
    print(f"verified {len(inputs)} inputs, {mismatches} mismatches")
    return EXIT_MISMATCH if mismatches else EXIT_OK


# -- benchmark -------------------------------------------------------------

_UNBLIND_NET = OpCounts(exp=1, inv=1, mul=1)
_EXPECTED = {
    "keygen": 2 * deg.G_COST,
    "enc": 2 * deg.E_COST + OpCounts(exp=2, mul=1),
    "dec": 2 * deg.D_COST + OpCounts(exp=1, mul=1),
    "aut": OpCounts(),
    "com": 2 * (deg.D_COST + _UNBLIND_NET),
    "transition_selection": 2 * (deg.D_COST + _UNBLIND_NET),
    "tape_manipulation": OpCounts(mul=7),
}


def _measure(fn, iters):
    times = []
    counts = None
    for _ in range(iters):
        reset_op_counts()
        t0 = time.perf_counter()
        fn()
        times.append((time.perf_counter() - t0) * 1000.0)
        snap = op_counts()
        if counts is None:
            counts = snap
        elif snap != counts:
            raise ValidationError("operation counts varied between iterations")
    return times, counts


def cmd_bench(args) -> int:
    rng = _rng(args.seed)
    bits_list = [int(b) for b in args.bits_list.split(",")]
    rows = []
    for bits in bits_list:
        params = generate_params(bits, rng)
        keys = hpkeet.keygen(params, rng)
        token = hpkeet.authorize(keys)
        spec = tm.parse_tm(machines.PARITY)
        encoding = blind.make_encoding(spec, params, rng)
        program = blind.compile_program(spec, encoding, params, keys.public, rng)
        conf = blind.encrypt_tape("10", encoding, program, params, keys.public, rng)
        m = params.random_scalar(rng)
        ct = hpkeet.encrypt(params, keys.public, m, rng)
        ct2 = hpkeet.encrypt(params, keys.public, m, rng)

        # Count-only assertions for the rows that are not timed.
        _, counts = _measure(lambda: hpkeet.keygen(params, rng), 1)
        _assert_counts("keygen", counts, bits)
        _, counts = _measure(lambda: hpkeet.authorize(keys), 1)
        _assert_counts("aut", counts, bits)

        cases = {
            "enc": lambda: hpkeet.encrypt(params, keys.public, m, rng),
            "dec": lambda: hpkeet.decrypt(params, keys.secret, ct),
            "com": lambda: hpkeet.compare(params, token, ct, ct2),
            "transition_selection": lambda: blind.select_transition(
                program, token, params, conf.enc_state, conf.cell(0)
            ),
            "tape_manipulation": lambda: hpkeet.hom_add(params, ct, ct2),
        }
        for op, fn in cases.items():
            times, counts = _measure(fn, args.iters)
            _assert_counts(op, counts, bits)
            rows.append({
                "op": op,
                "bits": bits,
                "mean_ms": statistics.fmean(times),
                "min_ms": min(times),
                "max_ms": max(times),
                "counts": counts,
            })
    _print_bench(rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(_bench_csv(rows))
        print(f"wrote {args.csv}")
    return EXIT_OK


def _assert_counts(op, counts, bits):
    if counts != _EXPECTED[op]:
        raise ValidationError(
            f"{op} at {bits} bits performed {counts}, expected {_EXPECTED[op]}"
        )


def _print_bench(rows):
    header = f"{'op':<22}{'bits':>6}{'mean_ms':>10}{'min_ms':>10}{'max_ms':>10}" \
             f"{'exp':>5}{'mul':>5}{'inv':>5}{'E':>4}{'D':>4}"
    print(header)
    print("-" * len(header))
    for r in rows:
        c = r["counts"]
        print(f"{r['op']:<22}{r['bits']:>6}{r['mean_ms']:>10.3f}{r['min_ms']:>10.3f}"
              f"{r['max_ms']:>10.3f}{c.exp:>5}{c.mul:>5}{c.inv:>5}{c.E:>4}{c.D:>4}")


def _bench_csv(rows) -> str:
    lines = ["op,bits,mean_ms,min_ms,max_ms,exp,mul,inv,E,D"]
    for r in rows:
        c = r["counts"]
        lines.append(
            f"{r['op']},{r['bits']},{r['mean_ms']:.6f},{r['min_ms']:.6f},"
            f"{r['max_ms']:.6f},{c.exp},{c.mul},{c.inv},{c.E},{c.D}"
        )
    return "\n".join(lines) + "\n"


# -- games -------------------------------------------------------------------

_GAME_ADVERSARIES = {
    "ow": ("random", "token-known", "token-secret"),
    "ind": ("coin", "token", "bytes"),
    "multi": ("coin", "bytes"),
}


def cmd_games(args) -> int:
    if args.adversary not in _GAME_ADVERSARIES[args.game]:
        raise ValidationError(
            f"adversary {args.adversary!r} not available for game {args.game!r}; "
            f"choose from {_GAME_ADVERSARIES[args.game]}"
        )
    rng = _rng(args.seed)
    params = generate_params(args.bits, rng)
    keys = hpkeet.keygen(params, rng)

    if args.game == "ow":
        known = [params.random_scalar(rng) for _ in range(4)]
        if args.adversary == "random":
            space = range(2**32)
            factory = lambda r: games.RandomGuessOw(params, r)
        elif args.adversary == "token-known":
            space = known
            factory = lambda r: games.TrialCompareOw(params, keys.public, r, candidates=known)
        else:
            space = [params.random_scalar(rng) for _ in range(4)]
            factory = lambda r: games.TrialCompareOw(params, keys.public, r)
        result = games.run_ow_game(
            params, keys, factory, plaintext_space=space,
            query_budget=args.q_budget, trials=args.trials, rng=rng,
        )
    else:
        if args.adversary == "coin":
            factory = lambda r: games.CoinFlipInd(r)
        elif args.adversary == "token":
            token = hpkeet.authorize(keys)
            factory = lambda r: games.TokenDistinguisherInd(params, keys.public, token, r)
        else:
            factory = lambda r: games.ByteMatcherInd(params, keys.public, r)
        if args.game == "ind":
            result = games.run_ind_game(
                params, keys, factory,
                query_budget=args.q_budget, trials=args.trials, rng=rng,
            )
        else:
            result = games.run_multi_challenge_ind(
                params, keys, factory, n_challenges=args.n_challenges,
                query_budget=args.q_budget, trials=args.trials, rng=rng,
            )

    print(f"{'game':<8}{'adversary':<14}{'trials':>8}{'wins':>8}"
          f"{'advantage':>12}{'std_err':>10}")
    print(f"{args.game:<8}{args.adversary:<14}{result.trials:>8}{result.wins:>8}"
          f"{result.advantage_estimate:>12.4f}{result.std_error:>10.4f}")
    print(json.dumps({"kind": "game-result", "game": args.game,
                      "adversary": args.adversary, **result.to_obj()}))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="blindtm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("keygen", help="generate group parameters and a keypair")
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("token", help="extract the comparison token from a key file")
    p.add_argument("--keys", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_token)

    p = sub.add_parser("compile", help="compile a machine into an encrypted program")
    p.add_argument("--tm", required=True)
    p.add_argument("--keys", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-program", required=True)
    p.add_argument("--out-encoding", required=True)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("encrypt-tape", help="encrypt an input word cell by cell")
    p.add_argument("--input", required=True)
    p.add_argument("--program", required=True)
    p.add_argument("--encoding", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encrypt_tape)

    p = sub.add_parser("run", help="execute an encrypted program over an encrypted tape")
    p.add_argument("--program", required=True)
    p.add_argument("--token", required=True)
    p.add_argument("--tape", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--trace", help="write the physical head-trace log here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("decrypt-tape", help="decrypt a result tape and print it")
    p.add_argument("--tape", required=True)
    p.add_argument("--keys", required=True)
    p.add_argument("--encoding", required=True)
    p.set_defaults(func=cmd_decrypt_tape)

    p = sub.add_parser("verify", help="compare plaintext and blind runs over many inputs")
    p.add_argument("--tm", required=True)
    p.add_argument("--inputs", help="comma-separated explicit inputs")
    p.add_argument("--max-len", type=int, default=4)
    p.add_argument("--bits", type=int, default=80)
    p.add_argument("--seed", type=int)
    p.add_argument("--keys")
    p.add_argument("--program")
    p.add_argument("--encoding")
    p.add_argument("--token")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time core operations and assert their op counts")
    p.add_argument("--bits-list", default="256,512,2048")
    p.add_argument("--iters", type=int, default=20)
    p.add_argument("--seed", type=int)
    p.add_argument("--csv", help="also write the report as CSV")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("games", help="run a security experiment")
    p.add_argument("--game", choices=("ow", "ind", "multi"), required=True)
    p.add_argument("--adversary", required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--bits", type=int, default=80)
    p.add_argument("--seed", type=int)
    p.add_argument("--q-budget", type=int, default=16)
    p.add_argument("--n-challenges", type=int, default=16)
    p.set_defaults(func=cmd_games)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except FingerprintError as exc:
        print(f"fingerprint error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DecryptionError, BlindRunError, GenerationError, TmRunError) as exc:
        print(f"crypto error: {exc}", file=sys.stderr)
        return EXIT_CRYPTO


if __name__ == "__main__":
    sys.exit(main())

"""Deterministic Turing machines over a two-way infinite tape.

This is the plaintext oracle every encrypted execution is checked against.
Machines are described in a small text format:

    #start q0
    #halt qH
    #blank _
    #time 4 8          time bound 4n + 8, coefficients highest degree first
    #space 1 2         space bound n + 2
    q0 1 -> q1 0 R     rule: state symbol -> state symbol move (L/R/S)
    # anything else starting with '#' is a comment

Symbols are single non-whitespace characters; the tape is a sparse map from
signed cell index to symbol, absent cells reading as the blank.
"""

from dataclasses import dataclass
from typing import Mapping

from .errors import TmParseError, TmRunError, TmStuckError, ValidationError

MOVES = {"L": -1, "R": 1, "S": 0}

_DIRECTIVES = ("#start", "#halt", "#blank", "#time", "#space", "#timedeg", "#spacedeg")


def eval_poly(coeffs: tuple[int, ...], n: int) -> int:
    """Evaluate a coefficient tuple (highest degree first) at n."""
    acc = 0
    for c in coeffs:
        acc = acc * n + c
    return acc


@dataclass(frozen=True)
class TmSpec:
    states: frozenset[str]
    tape_alphabet: frozenset[str]
    input_alphabet: frozenset[str]
    blank: str
    start: str
    halt: frozenset[str]
    delta: Mapping[tuple[str, str], tuple[str, str, str]]
    time_coeffs: tuple[int, ...]
    space_coeffs: tuple[int, ...]

    def time_bound(self, n: int) -> int:
        return eval_poly(self.time_coeffs, n)

    def space_bound(self, n: int) -> int:
        return eval_poly(self.space_coeffs, n)


@dataclass
class Configuration:
    state: str
    tape: dict[int, str]
    head: int


@dataclass
class RunResult:
    final: Configuration
    steps: int
    halted: bool
    trace: list[tuple[str, int, str]] | None


def parse_tm(text: str) -> TmSpec:
    """Parse and validate a machine description; errors carry line numbers."""
    start = None
    halt: set[str] = set()
    blank = "_"
    time_coeffs = space_coeffs = None
    time_deg = space_deg = None
    delta: dict[tuple[str, str], tuple[str, str, str]] = {}
    rule_lines: dict[tuple[str, str], int] = {}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head in _DIRECTIVES:
            if head == "#start":
                if len(tokens) != 2:
                    raise TmParseError("#start takes exactly one state", lineno)
                start = tokens[1]
            elif head == "#halt":
                if len(tokens) < 2:
                    raise TmParseError("#halt takes at least one state", lineno)
                halt.update(tokens[1:])
            elif head == "#blank":
                if len(tokens) != 2 or len(tokens[1]) != 1:
                    raise TmParseError("#blank takes a single symbol", lineno)
                blank = tokens[1]
            elif head in ("#time", "#space"):
                coeffs = _parse_coeffs(tokens, lineno)
                if head == "#time":
                    time_coeffs = coeffs
                else:
                    space_coeffs = coeffs
            else:  # "#timedeg" / "#spacedeg"
                deg = _parse_degree(tokens, lineno)
                if head == "#timedeg":
                    time_deg = deg
                else:
                    space_deg = deg
        elif head.startswith("#"):
            continue
        else:
            if len(tokens) != 6 or tokens[2] != "->":
                raise TmParseError(
                    "rule must read 'state symbol -> state symbol move'", lineno
                )
            q, sym, _, p, wsym, move = tokens
            if len(sym) != 1 or len(wsym) != 1:
                raise TmParseError("symbols must be single characters", lineno)
            if move not in MOVES:
                raise TmParseError(f"move must be one of L/R/S, got {move!r}", lineno)
            key = (q, sym)
            if key in delta:
                raise TmParseError(
                    f"duplicate transition for ({q}, {sym!r}); "
                    f"first defined on line {rule_lines[key]}",
                    lineno,
                )
            delta[key] = (p, wsym, move)
            rule_lines[key] = lineno

    if start is None:
        raise TmParseError("missing start directive")
    if time_coeffs is None:
        raise TmParseError("missing time directive")
    if space_coeffs is None:
        raise TmParseError("missing space directive")
    if time_deg is not None and time_deg != len(time_coeffs) - 1:
        raise TmParseError(
            f"#timedeg {time_deg} disagrees with {len(time_coeffs)} time coefficients"
        )
    if space_deg is not None and space_deg != len(space_coeffs) - 1:
        raise TmParseError(
            f"#spacedeg {space_deg} disagrees with {len(space_coeffs)} space coefficients"
        )
    if eval_poly(time_coeffs, 0) < 1:
        raise TmParseError("time bound must be at least 1 for every input length")
    if eval_poly(space_coeffs, 0) < 1:
        raise TmParseError("space bound must be at least 1 for every input length")

    states = {start} | halt
    symbols = {blank}
    for (q, sym), (p, wsym, _) in delta.items():
        states.update((q, p))
        symbols.update((sym, wsym))
        if q in halt:
            raise TmParseError(f"halt state {q} has an outgoing transition")
    return TmSpec(
        states=frozenset(states),
        tape_alphabet=frozenset(symbols),
        input_alphabet=frozenset(symbols - {blank}),
        blank=blank,
        start=start,
        halt=frozenset(halt),
        delta=dict(delta),
        time_coeffs=time_coeffs,
        space_coeffs=space_coeffs,
    )


def _parse_coeffs(tokens: list[str], lineno: int) -> tuple[int, ...]:
    if len(tokens) < 2:
        raise TmParseError(f"{tokens[0]} needs at least one coefficient", lineno)
    coeffs = []
    for t in tokens[1:]:
        try:
            c = int(t)
        except ValueError:
            raise TmParseError(f"bad coefficient {t!r}", lineno) from None
        if c < 0:
            raise TmParseError("bound coefficients must be nonnegative", lineno)
        coeffs.append(c)
    return tuple(coeffs)


def _parse_degree(tokens: list[str], lineno: int) -> int:
    if len(tokens) != 2:
        raise TmParseError(f"{tokens[0]} takes exactly one integer", lineno)
    try:
        return int(tokens[1])
    except ValueError:
        raise TmParseError(f"bad degree {tokens[1]!r}", lineno) from None


def initial_configuration(spec: TmSpec, input_str: str) -> Configuration:
    for ch in input_str:
        if ch not in spec.input_alphabet:
            raise ValidationError(f"input symbol {ch!r} outside the input alphabet")
    tape = {i: ch for i, ch in enumerate(input_str) if ch != spec.blank}
    return Configuration(state=spec.start, tape=tape, head=0)


def step(spec: TmSpec, conf: Configuration) -> Configuration:
    """One transition; pure (returns a new configuration)."""
    if conf.state in spec.halt:
        raise TmRunError("machine already halted")
    sym = conf.tape.get(conf.head, spec.blank)
    rule = spec.delta.get((conf.state, sym))
    if rule is None:
        raise TmStuckError(f"no transition for state {conf.state!r} reading {sym!r}")
    new_state, wsym, move = rule
    tape = dict(conf.tape)
    if wsym == spec.blank:
        tape.pop(conf.head, None)
    else:
        tape[conf.head] = wsym
    return Configuration(state=new_state, tape=tape, head=conf.head + MOVES[move])


def run(spec: TmSpec, input_str: str, max_steps: int, record_trace: bool = False) -> RunResult:
    """Iterate step until halt, a stuck error, or the step cap."""
    conf = initial_configuration(spec, input_str)
    trace: list[tuple[str, int, str]] | None = [] if record_trace else None
    steps = 0
    while steps < max_steps:
        if conf.state in spec.halt:
            return RunResult(final=conf, steps=steps, halted=True, trace=trace)
        sym = conf.tape.get(conf.head, spec.blank)
        written = spec.delta.get((conf.state, sym))
        conf = step(spec, conf)
        steps += 1
        if trace is not None:
            trace.append((conf.state, conf.head, written[1]))
    halted = conf.state in spec.halt
    return RunResult(final=conf, steps=steps, halted=halted, trace=trace)


def tape_output(spec: TmSpec, conf: Configuration) -> str:
    """Tape content between the outermost non-blank cells."""
    cells = [i for i, s in conf.tape.items() if s != spec.blank]
    if not cells:
        return ""
    lo, hi = min(cells), max(cells)
    return "".join(conf.tape.get(i, spec.blank) for i in range(lo, hi + 1))


@dataclass
class BoundsReport:
    entries: list[tuple[str, int, int, int]]
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_bounds(spec: TmSpec, inputs: list[str]) -> BoundsReport:
    """Run each input and compare actual steps/cells against declared bounds."""
    entries = []
    violations = []
    for w in inputs:
        n = len(w)
        cap = 10 * spec.time_bound(n) + 1000
        result = run(spec, w, max_steps=cap, record_trace=True)
        heads = [0] + [h for _, h, _ in result.trace or []]
        lo, hi = min(heads), max(heads)
        entries.append((w, result.steps, lo, hi))
        if not result.halted:
            violations.append(f"input {w!r}: did not halt within {cap} steps")
            continue
        if result.steps > spec.time_bound(n):
            violations.append(
                f"input {w!r}: took {result.steps} steps, bound is {spec.time_bound(n)}"
            )
        bound = spec.space_bound(n)
        if lo < -bound or hi > bound:
            violations.append(
                f"input {w!r}: touched cells [{lo}, {hi}] outside [-{bound}, {bound}]"
            )
    return BoundsReport(entries=entries, violations=violations)

import itertools

import pytest

from blindtm import machines, tm
from blindtm.errors import TmParseError, TmRunError, TmStuckError, ValidationError


def all_words(alphabet, max_len):
    for n in range(max_len + 1):
        for tup in itertools.product(sorted(alphabet), repeat=n):
            yield "".join(tup)


# Independent oracles, computed from integer/string arithmetic rather than
# by stepping the machines.

def increment_oracle(w: str) -> str:
    value = int(w, 2) + 1 if w else 1
    return format(value, "b").zfill(len(w))


def parity_oracle(w: str) -> str:
    return str(w.count("1") % 2)


def unary_add_oracle(w: str) -> str:
    if "+" not in w:
        return w
    return "1" * (w.count("1") + w.count("+") - 1)


# --- parsing -----------------------------------------------------------------


def test_corpus_machines_parse():
    inc = machines.load("increment")
    assert inc.start == "right"
    assert inc.halt == frozenset({"done"})
    assert inc.blank == "_"
    assert inc.tape_alphabet == frozenset("01_")
    assert inc.input_alphabet == frozenset("01")
    assert len(inc.delta) == 6
    assert inc.time_bound(3) == 12 and inc.space_bound(3) == 5

    par = machines.load("parity")
    assert par.input_alphabet == frozenset("01")
    add = machines.load("unary_add")
    assert add.input_alphabet == frozenset("1+")


def test_duplicate_transition_rejected():
    text = machines.INCREMENT + "\nright 1 -> carry 0 L\n"
    with pytest.raises(TmParseError, match="duplicate transition"):
        tm.parse_tm(text)


def test_empty_file_rejected():
    with pytest.raises(TmParseError, match="missing start directive"):
        tm.parse_tm("")


def test_missing_time_directive_rejected():
    text = "#start a\n#halt h\n#space 1 1\na 0 -> h 0 S\n"
    with pytest.raises(TmParseError, match="missing time directive"):
        tm.parse_tm(text)


def test_missing_space_directive_rejected():
    text = "#start a\n#halt h\n#time 1 1\na 0 -> h 0 S\n"
    with pytest.raises(TmParseError, match="missing space directive"):
        tm.parse_tm(text)


def test_parse_error_carries_line_number():
    text = "#start a\n#halt h\n#time 1 1\n#space 1 1\nbroken rule line\n"
    with pytest.raises(TmParseError, match="line 5"):
        tm.parse_tm(text)


def test_bad_move_rejected():
    text = "#start a\n#halt h\n#time 1 1\n#space 1 1\na 0 -> h 0 X\n"
    with pytest.raises(TmParseError, match="move"):
        tm.parse_tm(text)


def test_negative_coefficients_rejected():
    text = "#start a\n#halt h\n#time -1 4\n#space 1 1\na 0 -> h 0 S\n"
    with pytest.raises(TmParseError, match="nonnegative"):
        tm.parse_tm(text)


def test_zero_constant_bounds_rejected():
    base = "#start a\n#halt h\na 0 -> h 0 S\n"
    with pytest.raises(TmParseError, match="time bound"):
        tm.parse_tm(base + "#time 1 0\n#space 1 1\n")
    with pytest.raises(TmParseError, match="space bound"):
        tm.parse_tm(base + "#time 1 1\n#space 0\n")


def test_degree_directives_checked():
    good = "#start a\n#halt h\n#timedeg 1\n#time 2 6\n#space 1 2\na 0 -> h 0 S\n"
    assert tm.parse_tm(good).time_coeffs == (2, 6)
    bad = good.replace("#timedeg 1", "#timedeg 2")
    with pytest.raises(TmParseError, match="timedeg"):
        tm.parse_tm(bad)


def test_halt_state_with_outgoing_rule_rejected():
    text = "#start a\n#halt h\n#time 1 1\n#space 1 1\na 0 -> h 0 S\nh 0 -> a 0 S\n"
    with pytest.raises(TmParseError, match="halt state"):
        tm.parse_tm(text)


def test_comments_and_blanks_ignored():
    text = "# a comment\n\n#start a\n#halt h\n#time 1 1\n#space 1 1\n# more\na 0 -> h 1 S\n"
    spec = tm.parse_tm(text)
    assert spec.delta[("a", "0")] == ("h", "1", "S")


# --- stepping -----------------------------------------------------------------


def test_step_applies_authored_rule():
    spec = machines.load("increment")
    conf = tm.initial_configuration(spec, "1")
    nxt = tm.step(spec, conf)
    assert nxt.state == "right" and nxt.head == 1 and nxt.tape == {0: "1"}


def test_step_on_halted_configuration_errors():
    spec = machines.load("increment")
    conf = tm.Configuration(state="done", tape={}, head=0)
    with pytest.raises(TmRunError):
        tm.step(spec, conf)


def test_stuck_is_distinct_from_halted():
    text = "#start a\n#halt h\n#time 1 2\n#space 1 1\na 0 -> a 1 R\n"
    spec = tm.parse_tm(text)
    conf = tm.Configuration(state="a", tape={0: "1"}, head=0)
    with pytest.raises(TmStuckError):
        tm.step(spec, conf)


def test_s_move_keeps_head():
    spec = machines.load("parity")
    conf = tm.Configuration(state="even", tape={}, head=5)
    nxt = tm.step(spec, conf)  # even reading blank -> done 0 S
    assert nxt.head == 5 and nxt.state == "done" and nxt.tape == {5: "0"}


def test_step_is_pure():
    spec = machines.load("increment")
    conf = tm.initial_configuration(spec, "1")
    tm.step(spec, conf)
    assert conf.state == "right" and conf.head == 0


def test_input_outside_alphabet_rejected():
    spec = machines.load("increment")
    with pytest.raises(ValidationError):
        tm.run(spec, "12", max_steps=10)
    with pytest.raises(ValidationError):
        tm.run(spec, "_", max_steps=10)


# --- running against independent oracles ----------------------------------------


def test_increment_against_integer_oracle():
    spec = machines.load("increment")
    for w in all_words("01", 8):
        res = tm.run(spec, w, max_steps=spec.time_bound(len(w)))
        assert res.halted, w
        assert tm.tape_output(spec, res.final) == increment_oracle(w), w


def test_parity_against_popcount_oracle():
    spec = machines.load("parity")
    for w in all_words("01", 8):
        res = tm.run(spec, w, max_steps=spec.time_bound(len(w)))
        assert res.halted, w
        assert tm.tape_output(spec, res.final) == parity_oracle(w), w


def test_unary_add_against_count_oracle():
    spec = machines.load("unary_add")
    for w in all_words("1+", 8):
        res = tm.run(spec, w, max_steps=spec.time_bound(len(w)))
        assert res.halted, w
        assert tm.tape_output(spec, res.final) == unary_add_oracle(w), w


def test_unary_add_well_formed_sums():
    spec = machines.load("unary_add")
    for a in range(4):
        for b in range(4):
            w = "1" * a + "+" + "1" * b
            res = tm.run(spec, w, max_steps=spec.time_bound(len(w)))
            assert tm.tape_output(spec, res.final) == "1" * (a + b)


def test_increment_empty_input():
    spec = machines.load("increment")
    res = tm.run(spec, "", max_steps=spec.time_bound(0))
    assert tm.tape_output(spec, res.final) == "1"


def test_increment_example():
    spec = machines.load("increment")
    res = tm.run(spec, "111", max_steps=100)
    assert tm.tape_output(spec, res.final) == "1000"
    assert res.steps == 8


def test_parity_example():
    spec = machines.load("parity")
    res = tm.run(spec, "1011", max_steps=100)
    assert tm.tape_output(spec, res.final) == "1"


def test_max_steps_flags_unfinished_run():
    spec = machines.load("increment")
    res = tm.run(spec, "111", max_steps=2)
    assert not res.halted and res.steps == 2


def test_run_determinism_and_trace_invariants():
    spec = machines.load("increment")
    r1 = tm.run(spec, "1011", max_steps=100, record_trace=True)
    r2 = tm.run(spec, "1011", max_steps=100, record_trace=True)
    assert r1.trace == r2.trace and r1.steps == r2.steps
    assert len(r1.trace) == r1.steps
    heads = [0] + [h for _, h, _ in r1.trace]
    assert all(abs(a - b) <= 1 for a, b in zip(heads, heads[1:]))


def test_tape_output_keeps_interior_blanks():
    spec = machines.load("increment")
    conf = tm.Configuration(state="done", tape={0: "1", 2: "1"}, head=0)
    assert tm.tape_output(spec, conf) == "1_1"


# --- bounds ------------------------------------------------------------------------


def test_check_bounds_passes_generous_declaration():
    text = machines.INCREMENT.replace("#time 2 6", "#time 4 8")
    spec = tm.parse_tm(text)
    report = tm.check_bounds(spec, list(all_words("01", 8)))
    assert report.ok, report.violations


def test_check_bounds_passes_corpus():
    for name in machines.CORPUS:
        spec = machines.load(name)
        report = tm.check_bounds(spec, list(all_words(spec.input_alphabet, 6)))
        assert report.ok, (name, report.violations)


def test_check_bounds_flags_undersized_time():
    text = machines.INCREMENT.replace("#time 2 6", "#time 1")
    spec = tm.parse_tm(text)
    report = tm.check_bounds(spec, ["11"])
    assert not report.ok
    assert any("'11'" in v for v in report.violations)


def test_check_bounds_flags_undersized_space():
    # constant bound B(n) = 1, but the scan reaches cell 3 on input "111"
    text = machines.INCREMENT.replace("#space 1 2", "#space 1")
    spec = tm.parse_tm(text)
    report = tm.check_bounds(spec, ["111"])
    assert not report.ok
    assert any("outside" in v for v in report.violations)


def test_zero_space_bound_rejected_at_parse():
    text = machines.INCREMENT.replace("#space 1 2", "#space 1 0")
    with pytest.raises(TmParseError):
        tm.parse_tm(text)


def test_eval_poly():
    assert tm.eval_poly((2, 6), 3) == 12
    assert tm.eval_poly((1, 0, 0), 5) == 25
    assert tm.eval_poly((7,), 100) == 7

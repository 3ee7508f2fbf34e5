"""Bundled corpus machines used by tests, demos, and `blindtm verify`."""

from . import tm

# Binary increment, most significant bit first: "111" -> "1000", "" -> "1".
# Scans right to the end, then carries left; preserves leading zeros.
INCREMENT = """\
# binary increment (MSB first)
#start right
#halt done
#blank _
#time 2 6
#space 1 2

right 0 -> right 0 R
right 1 -> right 1 R
right _ -> carry _ L
carry 1 -> carry 0 L
carry 0 -> done 1 S
carry _ -> done 1 S
"""

# Parity of the number of 1s: erases the input, writes a single 0/1.
PARITY = """\
# parity of ones
#start even
#halt done
#blank _
#time 1 3
#space 1 2

even 0 -> even _ R
even 1 -> odd _ R
odd 0 -> odd _ R
odd 1 -> even _ R
even _ -> done 0 S
odd _ -> done 1 S
"""

# Unary addition "111+11" -> "11111".  Inputs without '+' pass through
# unchanged; every '+' becomes a mark and one mark is erased at the end.
UNARY_ADD = """\
# unary addition
#start scan
#halt done
#blank _
#time 2 6
#space 1 2

scan 1 -> scan 1 R
scan + -> join 1 R
scan _ -> done _ S
join 1 -> join 1 R
join + -> join 1 R
join _ -> back _ L
back 1 -> done _ S
back _ -> done _ S
"""

CORPUS = {
    "increment": INCREMENT,
    "parity": PARITY,
    "unary_add": UNARY_ADD,
}


def load(name: str) -> tm.TmSpec:
    return tm.parse_tm(CORPUS[name])

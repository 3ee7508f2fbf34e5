"""Equality-test homomorphic encryption and blind machine execution.

Layers, bottom up: ``group`` (prime-order subgroup arithmetic with
operation tallies), ``deg`` (tagged ElGamal base cipher), ``hpkeet``
(equality-test homomorphic encryption), ``tm`` (plaintext machines and
their text format), ``blind`` (encoding, compilation, oblivious encrypted
execution), ``games`` (security experiments), ``cli`` (file-based
workflow).
"""

from . import blind, deg, games, group, hpkeet, machines, serial, tm
from .group import GroupParams, OpCounts, generate_params, op_counts, reset_op_counts

__all__ = [
    "blind",
    "deg",
    "games",
    "group",
    "hpkeet",
    "machines",
    "serial",
    "tm",
    "GroupParams",
    "OpCounts",
    "generate_params",
    "op_counts",
    "reset_op_counts",
]

__version__ = "0.1.0"

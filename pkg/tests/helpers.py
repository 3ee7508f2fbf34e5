"""Shared test utilities."""

import random


class ScriptedRng:
    """Hands out scripted randrange values first, then seeded fallback values.

    Lets tests force specific nonces/keys while later draws stay valid.
    """

    def __init__(self, values, seed=0):
        self._values = list(values)
        self._fallback = random.Random(seed)

    def randrange(self, *args):
        if self._values:
            return self._values.pop(0)
        return self._fallback.randrange(*args)

    def getrandbits(self, k):
        return self._fallback.getrandbits(k)

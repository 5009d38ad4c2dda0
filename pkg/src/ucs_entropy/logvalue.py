"""Exact entropy values of the form ``(1/k) * log2(p)``."""

from __future__ import annotations

import math
from functools import total_ordering


def iroot(n: int, d: int) -> int:
    """Floor of the ``d``-th root of a nonnegative integer."""
    if n < 0 or d < 1:
        raise ValueError("iroot needs n >= 0 and d >= 1")
    if n < 2 or d == 1:
        return n
    # Newton from an upper starting point; exact on big ints.
    x = 1 << ((n.bit_length() + d - 1) // d)
    while True:
        y = ((d - 1) * x + n // x ** (d - 1)) // d
        if y >= x:
            return x
        x = y


@total_ordering
class LogValue:
    """The number ``log2(p) / k`` for integers ``p >= 1``, ``k >= 1``.

    Stored in lowest terms: ``k`` is the smallest period for which ``p`` stays
    integral, so equal values have equal ``(p, k)``. Ordering uses the exact
    test ``p1**k2`` vs ``p2**k1``.
    """

    __slots__ = ("p", "k")

    def __init__(self, p: int, k: int = 1) -> None:
        p, k = int(p), int(k)
        if p < 1 or k < 1:
            raise ValueError(f"LogValue needs p >= 1 and k >= 1, got ({p}, {k})")
        if p == 1:
            k = 1
        else:
            for d in sorted(_divisors(k), reverse=True):
                if d == 1:
                    break
                r = iroot(p, d)
                if r**d == p:
                    p, k = r, k // d
                    break
        self.p = p
        self.k = k

    @classmethod
    def zero(cls) -> LogValue:
        return cls(1, 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LogValue):
            return NotImplemented
        return self.p == other.p and self.k == other.k

    def __lt__(self, other: LogValue) -> bool:
        if not isinstance(other, LogValue):
            return NotImplemented
        return self.p**other.k < other.p**self.k

    def __hash__(self) -> int:
        return hash((self.p, self.k))

    def __float__(self) -> float:
        return math.log2(self.p) / self.k

    def __repr__(self) -> str:
        return f"LogValue({self.p}, {self.k})"

    def is_zero(self) -> bool:
        return self.p == 1

    def exact_str(self) -> str:
        if self.p == 1:
            return "0"
        return f"(1/{self.k})*log2({self.p})"

    def decimal_str(self) -> str:
        return f"{float(self):.12f}"

    def __str__(self) -> str:
        return f"exact={self.exact_str()}\tdecimal={self.decimal_str()}"


def _divisors(k: int) -> list[int]:
    out = []
    for d in range(1, math.isqrt(k) + 1):
        if k % d == 0:
            out.append(d)
            if d * d != k:
                out.append(k // d)
    return out

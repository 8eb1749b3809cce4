"""Kazhdan-Lusztig polynomials and the Iwahori-Hecke algebra of ``S_n``.

The Hecke algebra has basis ``T_w`` with ``(T_s - q)(T_s + 1) = 0``.
``kl_poly`` uses the usual descent recursion with memoization;
``kl_poly_via_r`` recomputes the same polynomials from R-polynomials and
the bar-invariance characterization, and serves as a cross-check.

>>> kl_poly((1, 2, 3, 4), (3, 4, 1, 2))
1 + q
>>> kl_poly((1, 2, 3, 4), (4, 2, 3, 1))
1 + q
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .weyl import (
    Parabolic,
    Perm,
    all_perms,
    bruhat_leq,
    compose,
    identity,
    inverse,
    length,
    parabolic_elements,
    reduced_word,
)

__all__ = [
    "LaurentPoly",
    "kl_poly",
    "kl_poly_via_r",
    "r_poly",
    "mu",
    "hecke_multiply",
    "hecke_specialize_q1",
    "hecke_T",
    "group_multiply",
    "kl_basis_at_one",
    "kl_element_at_one",
    "save_cache",
    "load_cache",
]


@dataclass(frozen=True)
class LaurentPoly:
    """Integer Laurent polynomial in ``q``, stored as sorted ``(power, coeff)`` pairs."""

    terms: tuple[tuple[int, int], ...] = ()

    @classmethod
    def of(cls, coeffs: Mapping[int, int] | Iterable[int] | int) -> "LaurentPoly":
        if isinstance(coeffs, int):
            coeffs = {0: coeffs}
        elif not isinstance(coeffs, Mapping):
            coeffs = dict(enumerate(coeffs))
        return cls(tuple(sorted((p, c) for p, c in coeffs.items() if c)))

    def as_dict(self) -> dict[int, int]:
        return dict(self.terms)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        d = self.as_dict()
        for p, c in other.terms:
            d[p] = d.get(p, 0) + c
        return LaurentPoly.of(d)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(tuple((p, -c) for p, c in self.terms))

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, int):
            return LaurentPoly.of({p: c * other for p, c in self.terms})
        d: dict[int, int] = {}
        for p, c in self.terms:
            for r, e in other.terms:
                d[p + r] = d.get(p + r, 0) + c * e
        return LaurentPoly.of(d)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentPoly":
        return LaurentPoly(tuple((p + k, c) for p, c in self.terms))

    def __call__(self, q: int = 1):
        return sum(c * q**p for p, c in self.terms)

    def degree(self) -> int:
        return self.terms[-1][0] if self.terms else -1

    def coeff(self, p: int) -> int:
        return self.as_dict().get(p, 0)

    def coefficients(self) -> list[int]:
        """Coefficients of ``q^0 .. q^deg`` for an honest polynomial."""
        if self.terms and self.terms[0][0] < 0:
            raise ValueError("negative powers present")
        d = self.as_dict()
        return [d.get(p, 0) for p in range(self.degree() + 1)]

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for p, c in self.terms:
            mon = "" if p == 0 else ("q" if p == 1 else f"q^{p}")
            if not mon:
                parts.append(str(c))
            elif c == 1:
                parts.append(mon)
            elif c == -1:
                parts.append("-" + mon)
            else:
                parts.append(f"{c}{mon}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


ZERO = LaurentPoly()
ONE = LaurentPoly.of(1)
Q = LaurentPoly.of({1: 1})

_lock = threading.Lock()
_kl_memo: dict[tuple[Perm, Perm], LaurentPoly] = {}


def _left_descent(w: Perm) -> int | None:
    """Some ``i`` with ``s_i w < w``, i.e. ``i+1`` appears before ``i``."""
    pos = inverse(w)
    for i in range(1, len(w)):
        if pos[i - 1] > pos[i]:
            return i
    return None


def _left_mult(i: int, w: Perm) -> Perm:
    return tuple(i + 1 if v == i else i if v == i + 1 else v for v in w)


def mu(z: Perm, v: Perm) -> int:
    d = length(v) - length(z)
    if d <= 0 or d % 2 == 0:
        return 0
    return kl_poly(z, v).coeff((d - 1) // 2)


def kl_poly(x: Perm, w: Perm) -> LaurentPoly:
    """``P_{x,w}``; zero unless ``x <= w`` in Bruhat order."""
    key = (x, w)
    hit = _kl_memo.get(key)
    if hit is not None:
        return hit
    if len(x) != len(w):
        raise ValueError("permutations of different rank")
    if not bruhat_leq(x, w):
        val = ZERO
    elif x == w:
        val = ONE
    else:
        i = _left_descent(w)
        v = _left_mult(i, w)
        sx = _left_mult(i, x)
        c = 1 if length(sx) < length(x) else 0
        val = kl_poly(sx, v).shift(1 - c) + kl_poly(x, v).shift(c)
        lw = length(w)
        for z in all_perms(len(w)):
            if z == v or not bruhat_leq(x, z) or not bruhat_leq(z, v):
                continue
            if length(_left_mult(i, z)) > length(z):
                continue
            m = mu(z, v)
            if m:
                val = val - kl_poly(x, z).shift((lw - length(z)) // 2) * m
    with _lock:
        _kl_memo.setdefault(key, val)
    return val


_r_memo: dict[tuple[Perm, Perm], LaurentPoly] = {}


def r_poly(x: Perm, w: Perm) -> LaurentPoly:
    key = (x, w)
    if key in _r_memo:
        return _r_memo[key]
    if not bruhat_leq(x, w):
        val = ZERO
    elif x == w:
        val = ONE
    else:
        i = _left_descent(w)
        sw, sx = _left_mult(i, w), _left_mult(i, x)
        if length(sx) < length(x):
            val = r_poly(sx, sw)
        else:
            val = (Q - ONE) * r_poly(x, sw) + Q * r_poly(sx, sw)
    _r_memo[key] = val
    return val


def kl_poly_via_r(x: Perm, w: Perm, _memo: dict | None = None) -> LaurentPoly:
    """``P_{x,w}`` from ``q^{l} P(1/q) - P(q) = sum_{x<y<=w} R_{x,y} P_{y,w}``."""
    memo = {} if _memo is None else _memo
    if (x, w) in memo:
        return memo[(x, w)]
    if not bruhat_leq(x, w):
        return ZERO
    if x == w:
        return ONE
    total = ZERO
    for y in all_perms(len(w)):
        if y != x and bruhat_leq(x, y) and bruhat_leq(y, w):
            total = total + r_poly(x, y) * kl_poly_via_r(y, w, memo)
    bound = (length(w) - length(x) - 1) // 2
    val = LaurentPoly.of({p: -c for p, c in total.terms if p <= bound})
    memo[(x, w)] = val
    return val


# Hecke algebra elements are dicts perm -> LaurentPoly in the T-basis.

def hecke_T(w: Perm) -> dict[Perm, LaurentPoly]:
    return {w: ONE}


def _times_simple(elem: Mapping[Perm, LaurentPoly], i: int) -> dict[Perm, LaurentPoly]:
    out: dict[Perm, LaurentPoly] = {}

    def add(p, c):
        out[p] = out.get(p, ZERO) + c

    for w, c in elem.items():
        ws = list(w)
        ws[i - 1], ws[i] = ws[i], ws[i - 1]
        ws = tuple(ws)
        if w[i - 1] < w[i]:
            add(ws, c)
        else:
            add(w, c * (Q - ONE))
            add(ws, c * Q)
    return {p: c for p, c in out.items() if c}


def hecke_multiply(a: Mapping[Perm, LaurentPoly], b: Mapping[Perm, LaurentPoly]) -> dict[Perm, LaurentPoly]:
    out: dict[Perm, LaurentPoly] = {}
    for y, cy in b.items():
        cur = {x: cx * cy for x, cx in a.items()}
        for i in reduced_word(y):
            cur = _times_simple(cur, i)
        for p, c in cur.items():
            out[p] = out.get(p, ZERO) + c
    return {p: c for p, c in out.items() if c}


def hecke_specialize_q1(elem: Mapping[Perm, LaurentPoly]) -> dict[Perm, int]:
    out = {w: c(1) for w, c in elem.items()}
    return {w: c for w, c in out.items() if c}


def group_multiply(a: Mapping[Perm, int], b: Mapping[Perm, int]) -> dict[Perm, int]:
    out: dict[Perm, int] = {}
    for x, cx in a.items():
        for y, cy in b.items():
            p = compose(x, y)
            out[p] = out.get(p, 0) + cx * cy
    return {p: c for p, c in out.items() if c}


def kl_element_at_one(w: Perm) -> dict[Perm, int]:
    """``C_w`` at ``q = 1``: ``sum_y (-1)^{l(w)-l(y)} P_{y,w}(1) y``."""
    lw = length(w)
    out = {}
    for y in all_perms(len(w)):
        p = kl_poly(y, w)
        if p:
            out[y] = (-1) ** (lw - length(y)) * p(1)
    return out


def kl_basis_at_one(J: Parabolic, n: int | None = None) -> dict[Perm, int]:
    """Signed sum over ``W_J`` equal to ``C_{w_J}`` at ``q = 1``."""
    if n is not None and J.n != n:
        raise ValueError("rank mismatch")
    wJ = J.longest_element()
    lJ = length(wJ)
    direct = {w: (-1) ** (lJ - length(w)) for w in parabolic_elements(J)}
    if direct != kl_element_at_one(wJ):
        raise AssertionError("signed parabolic sum disagrees with C_{w_J} at q=1")
    return direct


def save_cache(path: str | Path) -> int:
    """Write the memo table as ``n x w : c0 c1 ...`` lines; returns the record count."""
    lines = []
    for (x, w), p in sorted(_kl_memo.items()):
        coeffs = " ".join(map(str, p.coefficients())) if p else "0"
        lines.append(f"{len(x)} {','.join(map(str, x))} {','.join(map(str, w))} : {coeffs}")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
    return len(lines)


def load_cache(path: str | Path) -> int:
    count = 0
    for raw in Path(path).read_text().splitlines():
        raw = raw.strip()
        if not raw or raw.startswith("#"):
            continue
        head, _, tail = raw.partition(":")
        n, xs, ws = head.split()
        x = tuple(int(t) for t in xs.split(","))
        w = tuple(int(t) for t in ws.split(","))
        if len(x) != int(n) or len(w) != int(n):
            raise ValueError(f"bad cache record: {raw!r}")
        coeffs = [int(t) for t in tail.split()]
        with _lock:
            _kl_memo[(x, w)] = LaurentPoly.of(coeffs)
        count += 1
    return count


def clear_cache() -> None:
    with _lock:
        _kl_memo.clear()

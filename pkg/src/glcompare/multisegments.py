"""Segments, multisegments and weight functions over exact rational points.

A segment ``[a, b]`` is the arithmetic progression ``a, a+1, ..., b``; a
multisegment is a finite multiset of segments.  Multisegments of a fixed
weight label the orbits of the graded nilpotent variety, and the closure
order on those orbits is generated by elementary operations on linked
pairs.

>>> m = Multisegment.parse("[0,1]+[1,2]")
>>> sorted(str(n) for n in elementary_moves(m))
['[0,2]+[1]']
>>> closure_leq(m, Multisegment.parse("[0,2]+[1]"))
True
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

__all__ = [
    "Point",
    "Segment",
    "Multisegment",
    "WeightFunction",
    "WeightMismatch",
    "MassBoundExceeded",
    "DEFAULT_MASS_BOUND",
    "to_point",
    "coset_key",
    "weight_of",
    "is_linked",
    "elementary_moves",
    "reachable_from",
    "closure_leq",
    "rank_profile",
    "closure_order",
    "rank_dominated",
    "enumerate_multisegments",
    "open_orbit",
    "integral_weights",
    "integral_pieces",
    "admissible_r",
    "assumption_r",
    "dualize",
]

Point = Fraction
DEFAULT_MASS_BOUND = 16


class WeightMismatch(ValueError):
    """Two multisegments with different weights were compared."""


class MassBoundExceeded(ValueError):
    pass


def to_point(x) -> Fraction:
    """Coerce ints, strings like ``"3/2"`` and ``[num, den]`` pairs to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (list, tuple)):
        num, den = x
        return Fraction(int(num), int(den))
    if isinstance(x, float):
        raise TypeError("floats are not exact points; pass a Fraction or 'p/q' string")
    return Fraction(x)


def coset_key(p: Fraction) -> Fraction:
    """Representative of ``p + Z`` in ``[0, 1)``."""
    return p - math.floor(p)


def _fmt(p: Fraction) -> str:
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def _pair(p: Fraction) -> list[int]:
    return [p.numerator, p.denominator]


@dataclass(frozen=True, order=True)
class Segment:
    a: Fraction
    b: Fraction

    def __init__(self, a, b=None):
        a = to_point(a)
        b = a if b is None else to_point(b)
        d = b - a
        if d.denominator != 1 or d < 0:
            raise ValueError(f"not a segment: [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "_key", (-(a + b), -b))
        object.__setattr__(self, "_hash", hash((a, b)))

    def __hash__(self) -> int:
        return self._hash

    def __len__(self) -> int:
        return int(self.b - self.a) + 1

    @property
    def length(self) -> int:
        """``b - a``; a singleton has length 0."""
        return int(self.b - self.a)

    def points(self) -> list[Fraction]:
        return [self.a + i for i in range(len(self))]

    def __contains__(self, p) -> bool:
        p = to_point(p)
        return self.a <= p <= self.b and (p - self.a).denominator == 1

    def contains_segment(self, other: "Segment") -> bool:
        return other.a in self and other.b in self

    def sort_key(self):
        return self._key

    def __str__(self) -> str:
        if self.a == self.b:
            return f"[{_fmt(self.a)}]"
        return f"[{_fmt(self.a)},{_fmt(self.b)}]"

    __repr__ = __str__

    def to_json(self) -> dict:
        return {"a": _pair(self.a), "b": _pair(self.b)}

    @classmethod
    def from_json(cls, d: Mapping) -> "Segment":
        return cls(to_point(d["a"]), to_point(d["b"]))


@dataclass(frozen=True)
class Multisegment:
    """Multiset of segments, stored in canonical order.

    The canonical order sorts by descending ``a + b`` and then by
    descending ``b``.
    """

    segments: tuple[Segment, ...]

    def __init__(self, segments: Iterable[Segment] = ()):
        segs = tuple(sorted(segments, key=Segment.sort_key))
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "_hash", hash(segs))

    def __hash__(self) -> int:
        return self._hash

    @classmethod
    def parse(cls, text: str) -> "Multisegment":
        """Parse ``"[0,2]+2[1]+[-1/2,1/2]"``; the empty string is the empty multisegment."""
        text = text.replace(" ", "")
        if text in ("", "0", "empty"):
            return cls()
        segs: list[Segment] = []
        for term in text.split("+"):
            mt = re.fullmatch(r"(\d*)\[([^,\]]+)(?:,([^\]]+))?\]", term)
            if not mt:
                raise ValueError(f"cannot parse segment term {term!r}")
            mult = int(mt.group(1)) if mt.group(1) else 1
            a = Fraction(mt.group(2))
            b = Fraction(mt.group(3)) if mt.group(3) else a
            segs.extend([Segment(a, b)] * mult)
        return cls(segs)

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    def __add__(self, other: "Multisegment") -> "Multisegment":
        return Multisegment(self.segments + other.segments)

    def counts(self) -> Counter:
        return Counter(self.segments)

    def mass(self) -> int:
        return sum(len(s) for s in self.segments)

    def is_nested(self) -> bool:
        """True when every two segments are comparable under containment."""
        segs = self.segments
        return all(
            s.contains_segment(t) or t.contains_segment(s)
            for i, s in enumerate(segs)
            for t in segs[i + 1 :]
        )

    def has_linked_pair(self) -> bool:
        segs = self.segments
        return any(is_linked(s, t) for i, s in enumerate(segs) for t in segs[i + 1 :])

    def __str__(self) -> str:
        if not self.segments:
            return "0"
        out = []
        for seg, mult in _runs(self.segments):
            out.append(f"{mult}{seg}" if mult > 1 else str(seg))
        return "+".join(out)

    def __repr__(self) -> str:
        return f"Multisegment({str(self)!r})"

    def to_json(self) -> dict:
        return {"segments": [s.to_json() for s in self.segments]}

    @classmethod
    def from_json(cls, d: Mapping) -> "Multisegment":
        return cls(Segment.from_json(s) for s in d["segments"])


def _runs(segs: tuple[Segment, ...]):
    i = 0
    while i < len(segs):
        j = i
        while j < len(segs) and segs[j] == segs[i]:
            j += 1
        yield segs[i], j - i
        i = j


@dataclass(frozen=True)
class WeightFunction:
    """Finitely supported map from points to positive multiplicities."""

    items: tuple[tuple[Fraction, int], ...]

    def __init__(self, values: Mapping | Iterable = ()):
        if isinstance(values, Mapping):
            pairs = values.items()
        else:
            pairs = values
        acc: dict[Fraction, int] = {}
        for p, c in pairs:
            p = to_point(p)
            c = int(c)
            if c < 0:
                raise ValueError("weights are nonnegative")
            acc[p] = acc.get(p, 0) + c
        object.__setattr__(self, "items", tuple(sorted((p, c) for p, c in acc.items() if c)))
        object.__setattr__(self, "_map", dict(self.items))
        object.__setattr__(self, "_hash", hash(self.items))

    def __hash__(self) -> int:
        return self._hash

    def __call__(self, p) -> int:
        return self._map.get(p if isinstance(p, Fraction) else to_point(p), 0)

    def as_dict(self) -> dict[Fraction, int]:
        return dict(self._map)

    def support(self) -> list[Fraction]:
        return [p for p, _ in self.items]

    def mass(self) -> int:
        return sum(c for _, c in self.items)

    def is_integral(self) -> bool:
        return len({coset_key(p) for p in self.support()}) <= 1

    def __add__(self, other: "WeightFunction") -> "WeightFunction":
        return WeightFunction(list(self.items) + list(other.items))

    def __sub__(self, other: "WeightFunction") -> "WeightFunction":
        d = self.as_dict()
        for p, c in other.items:
            d[p] = d.get(p, 0) - c
            if d[p] < 0:
                raise ValueError("weight difference would be negative")
        return WeightFunction(d)

    @classmethod
    def point_mass(cls, p, c: int = 1) -> "WeightFunction":
        return cls({to_point(p): c})

    def __str__(self) -> str:
        return "{" + ", ".join(f"{_fmt(p)}:{c}" for p, c in self.items) + "}"

    __repr__ = __str__

    def to_json(self) -> dict:
        return {"values": [[_pair(p), c] for p, c in self.items]}

    @classmethod
    def from_json(cls, d: Mapping) -> "WeightFunction":
        return cls((to_point(p), c) for p, c in d["values"])


def weight_of(m: Multisegment) -> WeightFunction:
    acc: Counter = Counter()
    for s in m:
        for p in s.points():
            acc[p] += 1
    return WeightFunction(acc)


def is_linked(s: Segment, t: Segment) -> bool:
    """Neither segment contains the other and their union is again a segment."""
    if (s.a - t.a).denominator != 1:
        return False
    if s.contains_segment(t) or t.contains_segment(s):
        return False
    lo, hi = (s, t) if s.a <= t.a else (t, s)
    return hi.a <= lo.b + 1


def _linked_replacement(s: Segment, t: Segment) -> list[Segment]:
    union = Segment(min(s.a, t.a), max(s.b, t.b))
    lo, hi = max(s.a, t.a), min(s.b, t.b)
    return [union] if lo > hi else [union, Segment(lo, hi)]


def elementary_moves(m: Multisegment) -> set[Multisegment]:
    distinct = sorted(set(m.segments), key=Segment.sort_key)
    out: set[Multisegment] = set()
    base = m.counts()
    for i, s in enumerate(distinct):
        for t in distinct[i + 1 :]:
            if not is_linked(s, t):
                continue
            rest = base.copy()
            rest[s] -= 1
            rest[t] -= 1
            segs = list(rest.elements()) + _linked_replacement(s, t)
            out.add(Multisegment(segs))
    return out


@lru_cache(maxsize=4096)
def reachable_from(m: Multisegment) -> frozenset[Multisegment]:
    """Every multisegment reachable from ``m`` by elementary operations, ``m`` included."""
    seen = {m}
    queue = deque([m])
    while queue:
        cur = queue.popleft()
        for nxt in elementary_moves(cur):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(seen)


def closure_order(orbits: Iterable[Multisegment]) -> dict[Multisegment, frozenset[Multisegment]]:
    """Up-sets of the closure order on a move-closed family of multisegments.

    The move graph is closed transitively once, bottom-up, with the up-sets
    stored as bitmasks; ``closure_order(ms)[m]`` holds every ``n`` reachable
    from ``m`` by elementary operations.
    """
    orbits = list(orbits)
    index = {m: i for i, m in enumerate(orbits)}
    masks: list[int | None] = [None] * len(orbits)

    def up(i: int) -> int:
        if masks[i] is None:
            acc = 1 << i
            for n in elementary_moves(orbits[i]):
                if n not in index:
                    raise ValueError(f"{n} is missing from the family")
                acc |= up(index[n])
            masks[i] = acc
        return masks[i]

    out = {}
    for i, m in enumerate(orbits):
        mask = up(i)
        out[m] = frozenset(orbits[j] for j in range(len(orbits)) if mask >> j & 1)
    return out


@lru_cache(maxsize=65536)
def _rank_profile(m: Multisegment) -> tuple[tuple[tuple[Fraction, Fraction], int], ...]:
    support = weight_of(m).support()
    out = {(i, j): 0 for i in support for j in support if j >= i and (j - i).denominator == 1}
    for s in m:
        pts = s.points()
        for x in range(len(pts)):
            for y in range(x, len(pts)):
                out[(pts[x], pts[y])] += 1
    return tuple(sorted(out.items()))


def rank_profile(m: Multisegment) -> dict[tuple[Fraction, Fraction], int]:
    """``(i, j) -> number of segments containing [i, j]`` over the support of ``m``."""
    return dict(_rank_profile(m))


def rank_dominated(m: Multisegment, n: Multisegment) -> bool:
    """Pointwise ``rank_profile(m) <= rank_profile(n)``."""
    rn = rank_profile(n)
    return all(v <= rn.get(k, 0) for k, v in rank_profile(m).items())


def closure_leq(m: Multisegment, n: Multisegment, prefilter: bool = True) -> bool:
    """True iff the orbit of ``m`` lies in the closure of the orbit of ``n``.

    Equivalently ``n`` is reachable from ``m`` by a chain of elementary
    operations.  With ``prefilter`` the search only visits multisegments
    whose rank profile stays below that of ``n``.
    """
    if weight_of(m) != weight_of(n):
        raise WeightMismatch("incomparable weights")
    if m == n:
        return True
    if not prefilter:
        return n in reachable_from(m)
    if not rank_dominated(m, n):
        return False
    rn = rank_profile(n)
    seen = {m}
    queue = deque([m])
    while queue:
        cur = queue.popleft()
        for nxt in elementary_moves(cur):
            if nxt == n:
                return True
            if nxt in seen:
                continue
            if all(v <= rn.get(k, 0) for k, v in rank_profile(nxt).items()):
                seen.add(nxt)
                queue.append(nxt)
    return False


def integral_pieces(phi: WeightFunction) -> list[WeightFunction]:
    """Split into pieces supported on distinct cosets of Z, ordered by coset representative."""
    groups: dict[Fraction, dict] = {}
    for p, c in phi.items:
        groups.setdefault(coset_key(p), {})[p] = c
    return [WeightFunction(groups[k]) for k in sorted(groups)]


def _enumerate_piece(phi: WeightFunction) -> list[tuple[Segment, ...]]:
    pts = phi.support()
    lo, hi = pts[0], pts[-1]
    columns = [lo + i for i in range(int(hi - lo) + 1)]
    results: list[tuple[Segment, ...]] = []

    def rec(idx: int, open_segs: Counter, closed: list[Segment]):
        if idx == len(columns):
            segs = closed + [Segment(a, columns[-1]) for a in open_segs.elements()]
            results.append(tuple(segs))
            return
        p = columns[idx]
        need = phi(p)
        starts = sorted(open_segs)
        # choose how many open segments (grouped by start) continue through p
        def choose(k: int, cont: Counter):
            if k == len(starts):
                total = sum(cont.values())
                if total > need:
                    return
                newly_closed = list(closed)
                for a in starts:
                    stop = open_segs[a] - cont[a]
                    newly_closed.extend([Segment(a, p - 1)] * stop)
                nxt = cont.copy()
                nxt[p] += need - total
                nxt = +nxt
                rec(idx + 1, nxt, newly_closed)
                return
            a = starts[k]
            for take in range(open_segs[a] + 1):
                cont[a] = take
                choose(k + 1, cont)
            del cont[a]

        choose(0, Counter())

    rec(0, Counter(), [])
    return results


def enumerate_multisegments(phi: WeightFunction, mass_bound: int = DEFAULT_MASS_BOUND) -> list[Multisegment]:
    """All multisegments of weight ``phi``, sorted by their rendering."""
    if phi.mass() > mass_bound:
        raise MassBoundExceeded(f"mass {phi.mass()} exceeds bound {mass_bound}")
    if not phi.items:
        return [Multisegment()]
    per_piece = [_enumerate_piece(piece) for piece in integral_pieces(phi)]
    combos: list[tuple[Segment, ...]] = [()]
    for options in per_piece:
        combos = [c + o for c in combos for o in options]
    out = sorted({Multisegment(c) for c in combos}, key=_sort_multisegment)
    return out


def _sort_multisegment(m: Multisegment):
    return tuple(s.sort_key() for s in m.segments)


def integral_weights(max_mass: int, max_height: int | None = None) -> Iterator[WeightFunction]:
    """Integral weights with support starting at 0 and total mass at most ``max_mass``.

    Gaps in the support are a single zero wide: components further apart
    interact no differently, so this lists every integral weight up to
    translation and widening of gaps.
    """

    def rec(prefix: list[int], left: int):
        if prefix and prefix[-1]:
            yield WeightFunction({i: c for i, c in enumerate(prefix) if c})
        if left == 0:
            return
        top = left if max_height is None else min(left, max_height)
        for c in range(0 if prefix else 1, top + 1):
            if c == 0 and prefix[-1] == 0:
                continue
            yield from rec(prefix + [c], left - c)

    yield from rec([], max_mass)


def open_orbit(phi: WeightFunction) -> Multisegment:
    """The unique multisegment of weight ``phi`` whose orbit is dense.

    Repeatedly peel off a whole connected component of the remaining
    support; the result has ``min(phi on [i, j])`` segments through every
    ``[i, j]``, the largest rank profile possible.
    """
    remaining = phi.as_dict()
    segs: list[Segment] = []
    while remaining:
        start = min(remaining, key=lambda p: (coset_key(p), p))
        end = start
        while remaining.get(end + 1, 0) > 0:
            end += 1
        seg = Segment(start, end)
        segs.append(seg)
        for p in seg.points():
            remaining[p] -= 1
            if remaining[p] == 0:
                del remaining[p]
    return Multisegment(segs)


def admissible_r(phi: WeightFunction) -> list[Fraction]:
    """All half-integer-shifted ``r`` for which an integral ``phi`` is unimodal about ``r``.

    ``phi`` must increase weakly up to ``ceil(r)`` and decrease weakly from
    ``floor(r)``.
    """
    pts = phi.support()
    if not pts:
        return []
    if not phi.is_integral():
        raise ValueError("admissible_r expects an integral piece")
    lo, hi = pts[0], pts[-1]
    vals = {p: phi(p) for p in pts}
    out = []
    for t in range(int(hi - lo)):
        fl = lo + t
        ce = fl + 1
        inc = all(vals.get(lo + i, 0) <= vals.get(lo + i + 1, 0) for i in range(int(ce - lo)))
        dec = all(vals.get(fl + i, 0) >= vals.get(fl + i + 1, 0) for i in range(int(hi - fl)))
        if inc and dec:
            out.append(fl + Fraction(1, 2))
    return out


def assumption_r(phi: WeightFunction) -> list[tuple[WeightFunction, Fraction]] | None:
    """Smallest admissible ``r`` for every integral piece, or ``None`` if some piece has none."""
    out = []
    for piece in integral_pieces(phi):
        rs = admissible_r(piece)
        if not rs:
            return None
        out.append((piece, rs[0]))
    return out


def dualize(x):
    """Reflect points through zero: ``[a, b] -> [-b, -a]`` and ``phi(i) -> phi(-i)``."""
    if isinstance(x, Segment):
        return Segment(-x.b, -x.a)
    if isinstance(x, Multisegment):
        return Multisegment(Segment(-s.b, -s.a) for s in x)
    if isinstance(x, WeightFunction):
        return WeightFunction((-p, c) for p, c in x.items)
    raise TypeError(f"cannot dualize {type(x).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj.to_json())

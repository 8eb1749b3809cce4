"""Grothendieck groups on tagged bases, the duality pairings and derivatives.

Representation-side bases are standard modules ``X`` and their irreducible
quotients; sheaf-side bases are standard sheaves ``M`` (extension by zero
of the shifted constant sheaf on an orbit) and simple perverse sheaves
``L``.  On the real side labels are parabolic double cosets, on the p-adic
side multisegments.

Standard modules multiply by concatenating multisegments, and the
derivative at ``k`` is the ring homomorphism that on a generator
``St[a, b]`` adds the segment with its endpoint at ``k`` removed.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import linalg
from .kl import kl_poly
from .multisegments import Multisegment, Segment, WeightFunction, dualize, to_point, weight_of
from .vogan import orbit_dimension
from .weyl import DoubleCosetLabel, Parabolic, double_coset_of, double_cosets, dim_Z, parabolic_from

__all__ = [
    "REAL_STD",
    "REAL_SIMPLE",
    "PADIC_STD",
    "PADIC_SIMPLE",
    "SHEAF_STD_REAL",
    "SHEAF_SIMPLE_REAL",
    "SHEAF_STD_PADIC",
    "SHEAF_SIMPLE_PADIC",
    "TAGS",
    "RealBlock",
    "BasisLabel",
    "KElement",
    "BlockMismatch",
    "OutsideComparisonRange",
    "BasisChange",
    "real_std",
    "real_simple",
    "padic_std",
    "padic_simple",
    "sheaf_std_real",
    "sheaf_simple_real",
    "sheaf_std_padic",
    "sheaf_simple_padic",
    "pairing",
    "std_to_simple",
    "simple_to_std",
    "dual_change_of_basis",
    "multiply_standards",
    "bz_derivative",
    "project_weight",
]

REAL_STD = "RealStd"
REAL_SIMPLE = "RealSimple"
PADIC_STD = "PadicStd"
PADIC_SIMPLE = "PadicSimple"
SHEAF_STD_REAL = "SheafStdReal"
SHEAF_SIMPLE_REAL = "SheafSimpleReal"
SHEAF_STD_PADIC = "SheafStdPadic"
SHEAF_SIMPLE_PADIC = "SheafSimplePadic"
TAGS = (
    REAL_STD,
    REAL_SIMPLE,
    PADIC_STD,
    PADIC_SIMPLE,
    SHEAF_STD_REAL,
    SHEAF_SIMPLE_REAL,
    SHEAF_STD_PADIC,
    SHEAF_SIMPLE_PADIC,
)
_REAL_TAGS = {REAL_STD, REAL_SIMPLE, SHEAF_STD_REAL, SHEAF_SIMPLE_REAL}


class BlockMismatch(ValueError):
    pass


class OutsideComparisonRange(ValueError):
    """A p-adic label outside the full-rank part was asked for its simple expansion."""


def _frac_tuple(xs) -> tuple[Fraction, ...]:
    return tuple(to_point(x) for x in xs)


@dataclass(frozen=True)
class RealBlock:
    """An integral block of ``GL_n(C)`` with dominant infinitesimal character ``(lamL, lamR)``.

    Standard modules ``X(lamL, w lamR)`` are labelled by double cosets
    ``W_L \\ S_n / W_R`` of the stabilizers of ``lamL`` and ``lamR``.  The
    dual standard sheaf of ``X_w`` is labelled by the inverse coset.
    """

    lamL: tuple[Fraction, ...]
    lamR: tuple[Fraction, ...]

    def __init__(self, lamL: Sequence, lamR: Sequence):
        lamL, lamR = _frac_tuple(lamL), _frac_tuple(lamR)
        if len(lamL) != len(lamR):
            raise ValueError("lamL and lamR must have the same length")
        if any((x - lamL[0]).denominator != 1 for x in lamL + lamR):
            raise ValueError("only integral blocks are supported: all entries must differ by integers")
        parabolic_from(lamL)
        parabolic_from(lamR)
        object.__setattr__(self, "lamL", lamL)
        object.__setattr__(self, "lamR", lamR)

    @property
    def n(self) -> int:
        return len(self.lamL)

    @cached_property
    def J(self) -> Parabolic:
        return parabolic_from(self.lamL)

    @cached_property
    def K(self) -> Parabolic:
        return parabolic_from(self.lamR)

    def rep_labels(self) -> list[DoubleCosetLabel]:
        return double_cosets(self.J, self.K)

    def sheaf_labels(self) -> list[DoubleCosetLabel]:
        return double_cosets(self.K, self.J)

    def coset(self, w) -> DoubleCosetLabel:
        return double_coset_of(self.J, self.K, tuple(w))

    def __str__(self) -> str:
        f = lambda xs: "(" + ",".join(str(x) for x in xs) + ")"
        return f"{f(self.lamL)}|{f(self.lamR)}"

    def to_json(self) -> dict:
        return {
            "lamL": [[x.numerator, x.denominator] for x in self.lamL],
            "lamR": [[x.numerator, x.denominator] for x in self.lamR],
        }


@dataclass(frozen=True)
class BasisLabel:
    tag: str
    payload: object
    block: RealBlock | None = None

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown tag {self.tag}")
        if self.tag in _REAL_TAGS:
            if not isinstance(self.payload, DoubleCosetLabel) or self.block is None:
                raise TypeError("real labels carry a double coset and a block")
            want = (self.block.J, self.block.K) if self.tag in (REAL_STD, REAL_SIMPLE) else (self.block.K, self.block.J)
            if (self.payload.J, self.payload.K) != want:
                raise ValueError("double coset does not belong to this block")
        elif not isinstance(self.payload, Multisegment):
            raise TypeError("p-adic labels carry a multisegment")

    @property
    def is_real(self) -> bool:
        return self.tag in _REAL_TAGS

    def sort_key(self):
        if self.is_real:
            return (self.tag, str(self.block), self.payload.w_min)
        return (self.tag, "", tuple(s.sort_key() for s in self.payload.segments))

    def __str__(self) -> str:
        return f"{self.tag}[{self.payload}]"

    def to_json(self):
        if self.is_real:
            return {"block": self.block.to_json(), "w": list(self.payload.w_min)}
        return self.payload.to_json()


@dataclass(frozen=True)
class KElement:
    """Finite integer combination of basis labels; zero coefficients are dropped."""

    terms: tuple[tuple[BasisLabel, int], ...] = ()

    def __init__(self, terms: Mapping[BasisLabel, int] | Iterable[tuple[BasisLabel, int]] = ()):
        acc: dict[BasisLabel, int] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for lab, c in items:
            acc[lab] = acc.get(lab, 0) + int(c)
        clean = sorted(((l, c) for l, c in acc.items() if c), key=lambda t: t[0].sort_key())
        object.__setattr__(self, "terms", tuple(clean))

    def as_dict(self) -> dict[BasisLabel, int]:
        return dict(self.terms)

    def coeff(self, label: BasisLabel) -> int:
        return self.as_dict().get(label, 0)

    def labels(self) -> list[BasisLabel]:
        return [l for l, _ in self.terms]

    def __add__(self, other: "KElement") -> "KElement":
        return KElement(list(self.terms) + list(other.terms))

    def __neg__(self) -> "KElement":
        return KElement((l, -c) for l, c in self.terms)

    def __sub__(self, other: "KElement") -> "KElement":
        return self + (-other)

    def __mul__(self, k: int) -> "KElement":
        return KElement((l, c * k) for l, c in self.terms)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for l, c in self.terms:
            parts.append(("" if c == 1 else "-" if c == -1 else f"{c}*") + str(l))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__

    def to_json(self) -> dict:
        tags = {l.tag for l, _ in self.terms}
        basis = tags.pop() if len(tags) == 1 else ("mixed" if tags else "empty")
        return {"basis": basis, "terms": [[l.to_json(), c] for l, c in self.terms]}

    @classmethod
    def from_json(cls, d: Mapping) -> "KElement":
        tag = d["basis"]
        if tag not in (PADIC_STD, PADIC_SIMPLE, SHEAF_STD_PADIC, SHEAF_SIMPLE_PADIC):
            if tag == "empty":
                return cls()
            if tag not in TAGS:
                raise ValueError(f"unknown basis {tag}")
            out = []
            for lab, c in d["terms"]:
                blk = lab["block"]
                block = RealBlock([to_point(x) for x in blk["lamL"]], [to_point(x) for x in blk["lamR"]])
                J, K = (block.J, block.K) if tag in (REAL_STD, REAL_SIMPLE) else (block.K, block.J)
                out.append((BasisLabel(tag, double_coset_of(J, K, tuple(lab["w"])), block), c))
            return cls(out)
        return cls((BasisLabel(tag, Multisegment.from_json(lab)), c) for lab, c in d["terms"])


def _single(tag, payload, block=None) -> KElement:
    return KElement({BasisLabel(tag, payload, block): 1})


def real_std(block: RealBlock, w) -> KElement:
    c = w if isinstance(w, DoubleCosetLabel) else block.coset(w)
    return _single(REAL_STD, c, block)


def real_simple(block: RealBlock, w) -> KElement:
    c = w if isinstance(w, DoubleCosetLabel) else block.coset(w)
    return _single(REAL_SIMPLE, c, block)


def sheaf_std_real(block: RealBlock, v) -> KElement:
    c = v if isinstance(v, DoubleCosetLabel) else double_coset_of(block.K, block.J, tuple(v))
    return _single(SHEAF_STD_REAL, c, block)


def sheaf_simple_real(block: RealBlock, v) -> KElement:
    c = v if isinstance(v, DoubleCosetLabel) else double_coset_of(block.K, block.J, tuple(v))
    return _single(SHEAF_SIMPLE_REAL, c, block)


def padic_std(m: Multisegment | str) -> KElement:
    return _single(PADIC_STD, Multisegment.parse(m) if isinstance(m, str) else m)


def padic_simple(m: Multisegment | str) -> KElement:
    return _single(PADIC_SIMPLE, Multisegment.parse(m) if isinstance(m, str) else m)


def sheaf_std_padic(m: Multisegment | str) -> KElement:
    return _single(SHEAF_STD_PADIC, Multisegment.parse(m) if isinstance(m, str) else m)


def sheaf_simple_padic(m: Multisegment | str) -> KElement:
    return _single(SHEAF_SIMPLE_PADIC, Multisegment.parse(m) if isinstance(m, str) else m)


# ---------------------------------------------------------------- change of basis


@dataclass
class BasisChange:
    """``matrix[i][j]`` is the coefficient of ``rows[i]`` in ``cols[j]``."""

    rows: list
    cols: list
    matrix: list[list[int]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow([""] + [str(c) for c in self.cols])
        for lab, row in zip(self.rows, self.matrix):
            wr.writerow([str(lab)] + row)
        return buf.getvalue()

    def inverse(self) -> "BasisChange":
        inv = linalg.inverse(self.matrix)
        return BasisChange(list(self.cols), list(self.rows), _integral(inv))


def _integral(mat) -> list[list[int]]:
    out = []
    for row in mat:
        r = []
        for x in row:
            x = Fraction(x)
            if x.denominator != 1:
                raise ArithmeticError("change of basis is not integral")
            r.append(int(x))
        out.append(r)
    return out


def _sheaf_kl_matrix(labels: list[DoubleCosetLabel], dims: list[int], normalized: bool) -> list[list[int]]:
    """Columns: simple sheaves in terms of standard sheaves on a parabolic orbit space."""
    size = len(labels)
    mat = [[0] * size for _ in range(size)]
    for j, v in enumerate(labels):
        for i, x in enumerate(labels):
            if x <= v:
                val = kl_poly(x.w_max, v.w_max)(1)
                if not normalized:
                    val *= (-1) ** (dims[j] - dims[i])
                mat[i][j] = val
    return mat


def dual_change_of_basis(
    rep_labels: list,
    sheaf_labels: list,
    sheaf_matrix: list[list[int]],
    dual_of: Callable[[object], object],
    sheaf_sign: Callable[[object], int],
) -> list[list[int]]:
    """Rep-side matrix (columns: simple modules in standard modules) forced by the pairing.

    ``sheaf_matrix`` expresses simple sheaves in standard sheaves (raw
    classes).  The standard module ``X_y`` pairs to ``sheaf_sign(dual_of(y))``
    with ``M_{dual_of(y)}`` and to zero with the other standard sheaves, and
    simple modules must pair with simple sheaves the same way.
    """
    idx = {lab: i for i, lab in enumerate(sheaf_labels)}
    size = len(rep_labels)
    # G[y][v] = <X_y, L_v>
    gram = [[0] * size for _ in range(size)]
    for a, y in enumerate(rep_labels):
        x = dual_of(y)
        i = idx[x]
        for v in range(size):
            gram[a][v] = sheaf_sign(x) * sheaf_matrix[i][v]
    target = [[0] * size for _ in range(size)]
    for z_i, z in enumerate(rep_labels):
        v = idx[dual_of(z)]
        target[z_i][v] = sheaf_sign(dual_of(z))
    # C^T G = S  =>  C^T = S G^{-1}
    ct = linalg.matmul(linalg.as_matrix(target), linalg.inverse(gram))
    return _integral(linalg.transpose(ct))


def std_to_simple(block: RealBlock, side: str = "sheaf", normalized: bool = False) -> BasisChange:
    """Simple objects written in standard objects on a real block.

    ``side="sheaf"`` uses KL polynomials of longest coset representatives;
    with ``normalized`` both bases are twisted by ``(-1)^{dim}`` and the
    entries become ``P(1)``.  ``side="rep"`` returns the matrix forced by
    the pairing.
    """
    slabels = block.sheaf_labels()
    dims = [dim_Z(v) for v in slabels]
    if side == "sheaf":
        mat = _sheaf_kl_matrix(slabels, dims, normalized)
        return BasisChange(
            [BasisLabel(SHEAF_STD_REAL, v, block) for v in slabels],
            [BasisLabel(SHEAF_SIMPLE_REAL, v, block) for v in slabels],
            mat,
        )
    if side != "rep":
        raise ValueError("side must be 'sheaf' or 'rep'")
    raw = _sheaf_kl_matrix(slabels, dims, normalized=False)
    rlabels = block.rep_labels()
    sign = {v: (-1) ** d for v, d in zip(slabels, dims)}
    mat = dual_change_of_basis(rlabels, slabels, raw, lambda y: y.inverse(), sign.__getitem__)
    return BasisChange(
        [BasisLabel(REAL_STD, y, block) for y in rlabels],
        [BasisLabel(REAL_SIMPLE, y, block) for y in rlabels],
        mat,
    )


def simple_to_std(block: RealBlock, side: str = "sheaf", normalized: bool = False) -> BasisChange:
    """Standard objects written in simple objects (inverse of ``std_to_simple``)."""
    return std_to_simple(block, side, normalized).inverse()


def _expand(elem: KElement, change: BasisChange, from_tag: str, to_tag: str) -> KElement:
    col = {lab.payload: j for j, lab in enumerate(change.cols)}
    out: dict[BasisLabel, int] = {}
    for lab, c in elem:
        if lab.tag != from_tag:
            out[lab] = out.get(lab, 0) + c
            continue
        j = col[lab.payload]
        for i, row_lab in enumerate(change.rows):
            v = change.matrix[i][j]
            if v:
                out[row_lab] = out.get(row_lab, 0) + c * v
    return KElement(out)


def to_standard_basis(elem: KElement, padic_change: Callable | None = None) -> KElement:
    """Rewrite simple-basis terms of a real-side element in the standard bases."""
    out = KElement()
    by_block: dict = {}
    for lab, c in elem:
        by_block.setdefault((lab.block, lab.tag), []).append((lab, c))
    for (block, tag), terms in by_block.items():
        part = KElement(terms)
        if tag == REAL_SIMPLE:
            part = _expand(part, std_to_simple(block, "rep"), REAL_SIMPLE, REAL_STD)
        elif tag == SHEAF_SIMPLE_REAL:
            part = _expand(part, std_to_simple(block, "sheaf"), SHEAF_SIMPLE_REAL, SHEAF_STD_REAL)
        elif tag in (PADIC_SIMPLE, SHEAF_SIMPLE_PADIC):
            if padic_change is None:
                raise OutsideComparisonRange("p-adic simple labels need a comparison block")
            part = padic_change(part)
        out = out + part
    return out


# ---------------------------------------------------------------- pairing


def _std_pair(x: BasisLabel, f: BasisLabel) -> int:
    if x.is_real != f.is_real:
        raise BlockMismatch("cannot pair real and p-adic elements")
    if x.is_real:
        if x.block != f.block:
            raise BlockMismatch("labels live on different real blocks")
        if x.payload.inverse() != f.payload:
            return 0
        return (-1) ** dim_Z(f.payload)
    if x.payload != f.payload:
        return 0
    return (-1) ** orbit_dimension(f.payload)


def pairing(rep: KElement, sheaf: KElement, padic_change: Callable | None = None) -> int:
    """The bilinear pairing between representation and sheaf K-groups.

    Standard modules pair with standard sheaves and simple modules with
    simple sheaves by ``(-1)^{dim}`` of the dual orbit.  Mixed terms are
    first rewritten in standard bases.
    """
    rep_tags = {l.tag for l, _ in rep}
    sheaf_tags = {l.tag for l, _ in sheaf}
    if rep_tags - {REAL_STD, REAL_SIMPLE, PADIC_STD, PADIC_SIMPLE}:
        raise ValueError("first argument must be a representation-side element")
    if sheaf_tags - {SHEAF_STD_REAL, SHEAF_SIMPLE_REAL, SHEAF_STD_PADIC, SHEAF_SIMPLE_PADIC}:
        raise ValueError("second argument must be a sheaf-side element")
    simple_pairs = {(REAL_SIMPLE, SHEAF_SIMPLE_REAL), (PADIC_SIMPLE, SHEAF_SIMPLE_PADIC)}
    if len(rep_tags) == 1 and len(sheaf_tags) == 1 and (rep_tags | sheaf_tags) in [set(p) for p in simple_pairs]:
        return sum(a * b * _std_pair(x, f) for x, a in rep for f, b in sheaf)
    rep = to_standard_basis(rep, padic_change)
    sheaf = to_standard_basis(sheaf, padic_change)
    return sum(a * b * _std_pair(x, f) for x, a in rep for f, b in sheaf)


# ---------------------------------------------------------------- the ring of p-adic standards


def multiply_standards(a: KElement, b: KElement) -> KElement:
    out: dict[BasisLabel, int] = {}
    for x, c in a:
        for y, d in b:
            if x.tag != PADIC_STD or y.tag != PADIC_STD:
                raise ValueError("products are defined on p-adic standard modules")
            lab = BasisLabel(PADIC_STD, x.payload + y.payload)
            out[lab] = out.get(lab, 0) + c * d
    return KElement(out)


def _generator_image(seg: Segment, k: Fraction, side: str) -> list[Segment | None]:
    if side == "left":
        if seg.b != k:
            return [seg]
        return [seg, None] if seg.a == seg.b else [seg, Segment(seg.a, seg.b - 1)]
    if side == "right":
        if seg.a != k:
            return [seg]
        return [seg, None] if seg.a == seg.b else [seg, Segment(seg.a + 1, seg.b)]
    raise ValueError("side must be 'left' or 'right'")


def bz_derivative(side: str, k, elem: KElement) -> KElement:
    """Apply the derivative at ``k`` to a combination of p-adic standard modules.

    ``side="left"`` shortens segments ending at ``k``; ``side="right"``
    shortens segments starting at ``k``.
    """
    k = to_point(k)
    out: dict[BasisLabel, int] = {}
    for lab, c in elem:
        if lab.tag != PADIC_STD:
            raise ValueError("derivatives act on p-adic standard modules")
        options = [_generator_image(s, k, side) for s in lab.payload]
        for choice in itertools.product(*options):
            m = Multisegment(s for s in choice if s is not None)
            key = BasisLabel(PADIC_STD, m)
            out[key] = out.get(key, 0) + c
    return KElement(out)


def project_weight(elem: KElement, phi: WeightFunction) -> KElement:
    return KElement((l, c) for l, c in elem if weight_of(l.payload) == phi)


def dualize_element(elem: KElement) -> KElement:
    out = []
    for lab, c in elem:
        if lab.is_real:
            raise ValueError("dualize acts on p-adic labels")
        out.append((BasisLabel(lab.tag, dualize(lab.payload)), c))
    return KElement(out)


__all__ += ["to_standard_basis", "dualize_element"]

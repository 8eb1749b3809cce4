"""Translation functors, Weyl group actions, push-pull functors and the main square.

Translation acts on standard modules through coherent families: the family
through ``X(lamL, w lamR)`` is ``nu -> X(nuL, w nuR)``, and moving from
``lam`` to ``mu`` sums that family over ``W_lam``-translates of ``mu``.
On the sheaf side translation corresponds to pulling back to the
intersection of the two parabolics and pushing forward again; the two
descriptions must be adjoint under the pairing, which ``pushpull`` checks
on every call.

Orbit spaces ``G/P_A x G/P_B`` are handled through positions: the orbit
through ``(P_A, y P_B)`` has position ``W_A y W_B``.  The standard sheaf on
the orbit of position ``p`` is dual to ``X_p``; its public label is the
inverse coset.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from .comparison import HALF, block_data_from_infchar, gamma, infchar_from_weight
from .kgroups import (
    REAL_STD,
    SHEAF_STD_REAL,
    BasisLabel,
    KElement,
    RealBlock,
    bz_derivative,
    pairing,
    project_weight,
    real_std,
)
from .kl import group_multiply, hecke_specialize_q1, hecke_T, kl_basis_at_one
from .multisegments import WeightFunction, admissible_r, dualize, to_point
from .weyl import (
    DoubleCosetLabel,
    Parabolic,
    Perm,
    act,
    compose,
    dim_Z,
    double_coset_of,
    double_cosets,
    identity,
    inverse,
    length,
    parabolic_elements,
)

__all__ = [
    "InvalidDatum",
    "PreconditionFailure",
    "TranslationDatum",
    "translate",
    "weyl_act",
    "convolve_act",
    "group_algebra_act",
    "pushpull",
    "push_forward",
    "pull_back",
    "push_pull_full_flag",
    "signed_parabolic_sum",
    "factor_check",
    "composed_translation_identity",
    "verify_main_diagram",
    "valid_decrements",
]


class InvalidDatum(ValueError):
    pass


class PreconditionFailure(ValueError):
    pass


def _stabilizer(lam: Sequence) -> Parabolic:
    from .weyl import parabolic_from

    return parabolic_from(lam)


def _contained(small: Parabolic, big: Parabolic) -> bool:
    return small.simple_reflections() <= big.simple_reflections()


def _meet(a: Parabolic, b: Parabolic) -> Parabolic:
    return Parabolic.from_simple(a.simple_reflections() & b.simple_reflections(), a.n)


def _run_decrement(src: Sequence[Fraction], dst: Sequence[Fraction], sign: int) -> bool:
    """``dst = src + sign * (e_j + ... + e_{j+c-1})`` on an end (sign -1) or head (sign +1) of a run."""
    diff = [d - s for s, d in zip(src, dst)]
    pos = [i for i, x in enumerate(diff) if x != 0]
    if not pos or any(diff[i] != sign for i in pos):
        return False
    j, last = pos[0], pos[-1]
    if pos != list(range(j, last + 1)) or len({src[i] for i in pos}) != 1:
        return False
    if sign < 0:
        return last == len(src) - 1 or src[last] > src[last + 1]
    return j == 0 or src[j - 1] > src[j]


@dataclass(frozen=True)
class TranslationDatum:
    """Translation from the block of ``source`` to the block of ``target``.

    Accepted shapes: the end of a constant run of ``lamL`` lowered by one
    (``kind='left'``), the head of a constant run of ``lamR`` raised by one
    (``kind='right'``), or any move for which one stabilizer contains the
    other (``kind='facet'``, which includes the identity).
    """

    source: RealBlock
    target: RealBlock

    @cached_property
    def kind(self) -> str:
        s, t = self.source, self.target
        if s.n != t.n:
            raise InvalidDatum("blocks of different rank")
        if any((a - b).denominator != 1 for a, b in zip(s.lamL + s.lamR, t.lamL + t.lamR)):
            raise InvalidDatum("translation must move by an integral weight")
        if s.lamR == t.lamR and _run_decrement(s.lamL, t.lamL, -1):
            return "left"
        if s.lamL == t.lamL and _run_decrement(s.lamR, t.lamR, +1):
            return "right"
        ws = (s.J.simple_reflections(), s.K.simple_reflections())
        wt = (t.J.simple_reflections(), t.K.simple_reflections())
        if (ws[0] <= wt[0] and ws[1] <= wt[1]) or (wt[0] <= ws[0] and wt[1] <= ws[1]):
            return "facet"
        raise InvalidDatum(f"unsupported translation {s} -> {t}")

    def validate(self) -> "TranslationDatum":
        self.kind
        return self


def valid_decrements(lamL: Sequence) -> list[tuple[int, int]]:
    """All ``(j, c)`` (1-based ``j``) such that lowering ``lamL_j..lamL_{j+c-1}`` by one is allowed."""
    lam = [to_point(x) for x in lamL]
    out = []
    n = len(lam)
    for j in range(n):
        for c in range(1, n - j + 1):
            last = j + c - 1
            if len(set(lam[j : last + 1])) != 1:
                break
            if last == n - 1 or lam[last] > lam[last + 1]:
                out.append((j + 1, c))
    return out


def _sorting_perm(vec: Sequence, dominant: Sequence) -> Perm:
    """Some ``u`` with ``u . vec == dominant``."""
    n = len(vec)
    used = [False] * n
    u = [0] * n
    # (u . vec)_i = vec_{u^{-1}(i)}; choose u^{-1}(i) = an unused index carrying dominant[i]
    uinv = []
    for i in range(n):
        k = next(k for k in range(n) if not used[k] and vec[k] == dominant[i])
        used[k] = True
        uinv.append(k + 1)
    return inverse(tuple(uinv))


def _renormalize(block: RealBlock, a: Sequence, b: Sequence) -> DoubleCosetLabel:
    """Label of ``X(a, b)`` in ``block``, using ``[X(a, b)] = [X(ua, ub)]``."""
    if sorted(a) != sorted(block.lamL) or sorted(b) != sorted(block.lamR):
        raise InvalidDatum("parameters do not lie over this block")
    u = _sorting_perm(a, block.lamL)
    b2 = act(u, b)
    x = inverse(_sorting_perm(b2, block.lamR))
    # x . lamR == b2
    return block.coset(x)


def _weyl_pairs(J: Parabolic, K: Parabolic):
    return itertools.product(parabolic_elements(J), parabolic_elements(K))


def _translate_label(d: TranslationDatum, w: Perm) -> dict[DoubleCosetLabel, int]:
    s, t = d.source, d.target
    seen = set()
    out: dict[DoubleCosetLabel, int] = {}
    for sl, sr in _weyl_pairs(s.J, s.K):
        mu = (act(sl, t.lamL), act(sr, t.lamR))
        if mu in seen:
            continue
        seen.add(mu)
        lab = _renormalize(t, mu[0], act(w, mu[1]))
        out[lab] = out.get(lab, 0) + 1
    return out


@lru_cache(maxsize=65536)
def _translate_coset(d: TranslationDatum, w: DoubleCosetLabel) -> KElement:
    lo = _translate_label(d, w.w_min)
    hi = _translate_label(d, w.w_max)
    if lo != hi:
        raise AssertionError(f"translation of {w} depends on the coset representative")
    return KElement((BasisLabel(REAL_STD, tl, d.target), k) for tl, k in lo.items())


def translate(d: TranslationDatum, elem: KElement) -> KElement:
    """Translation functor on standard modules of ``d.source``."""
    d.validate()
    out = KElement()
    for lab, c in elem:
        if lab.tag != REAL_STD or lab.block != d.source:
            raise ValueError("translate takes standard modules of the source block")
        out = out + _translate_coset(d, lab.payload) * c
    return out


def _require_regular(block: RealBlock) -> None:
    if block.J.composition != (1,) * block.n or block.K.composition != (1,) * block.n:
        raise ValueError("the Weyl group action is defined on regular blocks only")


def weyl_act(w: tuple[Perm, Perm], elem: KElement) -> KElement:
    """Coherent continuation: ``(x, y) . X_v = X_{x v y^{-1}}`` on a regular block."""
    x, y = w
    out = []
    for lab, c in elem:
        if lab.tag != REAL_STD:
            raise ValueError("weyl_act takes standard modules")
        block = lab.block
        _require_regular(block)
        # Theta(nu) = X(nuL, v nuR) evaluated at (x^{-1} lamL, y^{-1} lamR)
        a = act(inverse(x), block.lamL)
        b = act(lab.payload.w_min, act(inverse(y), block.lamR))
        out.append((BasisLabel(REAL_STD, _renormalize(block, a, b), block), c))
    return KElement(out)


def _to_group_algebra(elem: KElement) -> tuple[RealBlock, dict[Perm, int]]:
    """Regular-block sheaf classes as ``sum c_p (-1)^{l(p)} p`` over positions ``p``."""
    blocks = {lab.block for lab, _ in elem}
    if len(blocks) > 1:
        raise ValueError("element spans several blocks")
    block = blocks.pop()
    _require_regular(block)
    ga: dict[Perm, int] = {}
    for lab, c in elem:
        if lab.tag != SHEAF_STD_REAL:
            raise ValueError("convolution acts on standard sheaves")
        p = lab.payload.inverse().w_min
        ga[p] = ga.get(p, 0) + c * (-1) ** length(p)
    return block, ga


def _from_group_algebra(block: RealBlock, ga: Mapping[Perm, int]) -> KElement:
    out = []
    for p, c in ga.items():
        pos = block.coset(p)
        out.append((BasisLabel(SHEAF_STD_REAL, pos.inverse(), block), c * (-1) ** length(p)))
    return KElement(out)


def convolve_act(w: tuple[Perm, Perm], elem: KElement) -> KElement:
    """``(x, y) . [F] = [F * M_{(x, y)^{-1}}]`` at ``q = 1`` on a regular block.

    Convolving on the right of the first flag factor moves positions on
    the left, so positions go ``p -> x p y^{-1}``.
    """
    if not elem:
        return elem
    x, y = w
    block, ga = _to_group_algebra(elem)
    right = hecke_specialize_q1(hecke_T(inverse(y)))
    left = hecke_specialize_q1(hecke_T(x))
    sign = (-1) ** (length(x) + length(y))
    res = group_multiply(group_multiply(left, ga), right)
    return _from_group_algebra(block, {p: sign * c for p, c in res.items()})


def group_algebra_act(coeffs: Mapping[tuple[Perm, Perm], int], elem: KElement, side: str = "sheaf") -> KElement:
    """Act by ``sum c_(x,y) (x, y)`` on sheaves (``convolve_act``) or modules (``weyl_act``)."""
    out = KElement()
    for pair, c in coeffs.items():
        img = convolve_act(pair, elem) if side == "sheaf" else weyl_act(pair, elem)
        out = out + img * c
    return out


def signed_parabolic_sum(lamL: Parabolic, lamR: Parabolic) -> dict[tuple[Perm, Perm], int]:
    """``C_{w_lam}`` at ``q = 1`` for ``W_lam = W_L x W_R``."""
    left = kl_basis_at_one(lamL)
    right = kl_basis_at_one(lamR)
    return {(a, b): ca * cb for a, ca in left.items() for b, cb in right.items()}


# ---------------------------------------------------------------- orbit spaces


def _fixer_order(A: Parabolic, B: Parabolic, y: Perm) -> int:
    """``|W_A ∩ y W_B y^{-1}|``."""
    out = 1
    for row in double_coset_of(A, B, y).table():
        for v in row:
            out *= factorial(v)
    return out


def pull_back(src: tuple[Parabolic, Parabolic], dst: tuple[Parabolic, Parabolic], elem: Mapping[DoubleCosetLabel, int]) -> dict:
    """Pull standard sheaves back along ``G/P_dst -> G/P_src`` (``dst`` finer).

    Every orbit over ``C`` appears with sign ``(-1)^{dim C - dim D}``.
    """
    A, B = dst
    out: dict[DoubleCosetLabel, int] = {}
    for D in double_cosets(A, B):
        C = double_coset_of(src[0], src[1], D.w_min)
        c = elem.get(C, 0)
        if c:
            out[D] = out.get(D, 0) + c * (-1) ** (dim_Z(C) - dim_Z(D))
    return {k: v for k, v in out.items() if v}


def push_forward(src: tuple[Parabolic, Parabolic], dst: tuple[Parabolic, Parabolic], elem: Mapping[DoubleCosetLabel, int]) -> dict:
    """Push standard sheaves forward along ``G/P_src -> G/P_dst`` (``src`` finer).

    The orbit ``D`` fibres over its image ``C`` with fibre
    ``Stab_C / Stab_D``, whose Euler characteristic is the index of the
    Weyl groups of the two stabilizers.
    """
    out: dict[DoubleCosetLabel, int] = {}
    for D, c in elem.items():
        C = double_coset_of(dst[0], dst[1], D.w_min)
        euler = _fixer_order(dst[0], dst[1], D.w_min) // _fixer_order(src[0], src[1], D.w_min)
        out[C] = out.get(C, 0) + c * euler * (-1) ** (dim_Z(D) - dim_Z(C))
    return {k: v for k, v in out.items() if v}


def _positions(elem: KElement, block: RealBlock) -> dict[DoubleCosetLabel, int]:
    out = {}
    for lab, c in elem:
        if lab.tag != SHEAF_STD_REAL or lab.block != block:
            raise ValueError(f"expected standard sheaves on {block}")
        p = lab.payload.inverse()
        out[p] = out.get(p, 0) + c
    return out


def _from_positions(pos: Mapping[DoubleCosetLabel, int], block: RealBlock) -> KElement:
    return KElement((BasisLabel(SHEAF_STD_REAL, p.inverse(), block), c) for p, c in pos.items())


def _pushpull_direct(d: TranslationDatum, elem: KElement) -> KElement:
    s, t = d.source, d.target
    q = (_meet(s.J, t.J), _meet(s.K, t.K))
    up = pull_back((t.J, t.K), q, _positions(elem, t))
    down = push_forward(q, (s.J, s.K), up)
    return _from_positions(down, s)


def _pushpull_adjoint(d: TranslationDatum, elem: KElement) -> KElement:
    s = d.source
    out = KElement()
    for w in s.rep_labels():
        coeff = pairing(translate(d, real_std(s, w)), elem)
        if coeff:
            v = w.inverse()
            dual = KElement({BasisLabel(SHEAF_STD_REAL, v, s): (-1) ** dim_Z(v)})
            out = out + dual * coeff
    return out


def pushpull(d: TranslationDatum, elem: KElement, mode: str = "both") -> KElement:
    """Sheaf-side translation from the target block back to the source block.

    ``mode='direct'`` pulls back to the intersection of the parabolics and
    pushes forward; ``mode='adjoint'`` transposes ``translate`` through the
    pairing; ``mode='both'`` computes the two and insists they agree.
    """
    d.validate()
    if mode == "direct":
        return _pushpull_direct(d, elem)
    if mode == "adjoint":
        return _pushpull_adjoint(d, elem)
    if mode != "both":
        raise ValueError("mode must be 'direct', 'adjoint' or 'both'")
    a, b = _pushpull_direct(d, elem), _pushpull_adjoint(d, elem)
    if a != b:
        raise AssertionError(
            f"push-pull disagreement on {d.source} <- {d.target} for {elem}: direct {a}, adjoint {b}"
        )
    return a


def push_pull_full_flag(block: RealBlock, singular: RealBlock, elem: KElement) -> KElement:
    """``p^* p_*`` from a regular block to the orbit space of ``singular`` and back."""
    _require_regular(block)
    fine = (block.J, block.K)
    coarse = (singular.J, singular.K)
    down = push_forward(fine, coarse, _positions(elem, block))
    return _from_positions(pull_back(coarse, fine, down), block)


# ---------------------------------------------------------------- identities


def factor_check(lam: RealBlock, lam1: RealBlock, lam2: RealBlock) -> bool:
    """``T_lam^{lam1} == T_{lam2}^{lam1} o T_lam^{lam2}`` on every standard module of ``lam``."""
    direct = TranslationDatum(lam, lam1).validate()
    first = TranslationDatum(lam, lam2).validate()
    second = TranslationDatum(lam2, lam1).validate()
    for w in lam.rep_labels():
        x = real_std(lam, w)
        if translate(direct, x) != translate(second, translate(first, x)):
            return False
    return True


def composed_translation_identity(regular: RealBlock, singular: RealBlock) -> bool:
    """``T_lam^nu T_nu^lam == sum_{w in W_lam} w`` on the regular block ``nu``."""
    _require_regular(regular)
    down = TranslationDatum(regular, singular).validate()
    up = TranslationDatum(singular, regular).validate()
    coeffs = {pair: 1 for pair in _weyl_pairs(singular.J, singular.K)}
    for w in regular.rep_labels():
        x = real_std(regular, w)
        if translate(up, translate(down, x)) != group_algebra_act(coeffs, x, side="rep"):
            return False
    return True


def _common_r(phi: WeightFunction, psi: WeightFunction, k: Fraction, left: bool) -> Fraction:
    rs = admissible_r(phi)
    if not rs:
        raise PreconditionFailure(f"{phi} fails the unimodality assumption")
    if left:
        rs = [r for r in rs if k < r - HALF]
        if not rs:
            raise PreconditionFailure("left case needs k < floor(r)")
    else:
        rs = [r for r in rs if k > r + HALF]
        if not rs:
            raise PreconditionFailure("right case needs k > ceil(r); use the left case for k < floor(r)")
    if not admissible_r(psi):
        raise PreconditionFailure(f"{psi} fails the unimodality assumption")
    common = [r for r in rs if r in admissible_r(psi)]
    if not common:
        raise PreconditionFailure("phi and psi admit no common r on the required side of k")
    return common[0]


def _square(phi, c, k, eL, eR, side: str) -> dict:
    psi = phi - WeightFunction.point_mass(k, c)
    source = infchar_from_weight(phi, eL, eR)
    target = infchar_from_weight(psi, eL, eR)
    datum = TranslationDatum(source, target)
    if datum.kind != side:
        raise AssertionError(f"expected a {side} translation, got {datum.kind}")
    _, _, psi_image = block_data_from_infchar(target)
    if side == "left":
        k_image, bz_side = k + eL - HALF, "left"
    else:
        k_image, bz_side = k + eR + HALF, "right"
    rows = []
    for w in source.rep_labels():
        x = real_std(source, w)
        lhs = project_weight(bz_derivative(bz_side, k_image, gamma(source, x)), psi_image)
        rhs = gamma(target, translate(datum, x))
        rows.append({"coset": list(w.w_min), "pass": lhs == rhs, "derivative_side": str(lhs), "translation_side": str(rhs)})
    return {
        "lamL": [str(v) for v in source.lamL],
        "lamR": [str(v) for v in source.lamR],
        "lamL_target": [str(v) for v in target.lamL],
        "lamR_target": [str(v) for v in target.lamR],
        "labels": rows,
    }


def verify_main_diagram(phi: WeightFunction, c: int, k, eL=HALF, eR=-HALF, left: bool = False, method: str = "dual") -> dict:
    """Check that the derivative at ``k`` after the comparison equals the comparison after translation.

    The right case ``k > ceil(r)`` lowers the ends of segments at ``k``.
    The left case ``k < floor(r)`` is reduced to the right case by
    reflecting all points (``method='dual'``) or checked directly against
    the derivative on starting points (``method='direct'``).
    """
    k, eL, eR = to_point(k), to_point(eL), to_point(eR)
    if c <= 0:
        raise PreconditionFailure("c must be positive")
    if phi(k) < c:
        raise PreconditionFailure(f"phi({k}) < {c}")
    psi = phi - WeightFunction.point_mass(k, c)
    r = _common_r(phi, psi, k, left)
    report = {
        "phi": str(phi),
        "psi": str(psi),
        "c": c,
        "k": str(k),
        "r": str(r),
        "case": "left" if left else "right",
    }
    if not left:
        report.update(_square(phi, c, k, eL, eR, "left"))
    elif method == "dual":
        report["method"] = "dual"
        report.update(_square(dualize(phi), c, -k, eL, eR, "left"))
    elif method == "direct":
        report["method"] = "direct"
        report.update(_square(phi, c, k, eL, eR, "right"))
    else:
        raise ValueError("method must be 'dual' or 'direct'")
    report["pass"] = all(row["pass"] for row in report["labels"])
    return report

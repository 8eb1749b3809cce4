import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glcompare.multisegments import (
    MassBoundExceeded,
    Multisegment,
    Segment,
    WeightFunction,
    WeightMismatch,
    admissible_r,
    assumption_r,
    closure_leq,
    closure_order,
    dualize,
    elementary_moves,
    enumerate_multisegments,
    integral_pieces,
    integral_weights,
    is_linked,
    open_orbit,
    rank_dominated,
    rank_profile,
    reachable_from,
    to_point,
    weight_of,
)

P = Multisegment.parse
EX_M = "[-1,3]+[-1]+[1,2]+2[0,1]"
EX_N = "[-1,3]+[-1]+[0,2]+[0,1]+[1]"


def W(d):
    return WeightFunction(d)


def test_points_and_segments():
    assert to_point("3/2") == Fraction(3, 2)
    assert to_point([3, 2]) == Fraction(3, 2)
    s = Segment("1/2", "5/2")
    assert s.length == 2
    assert s.points() == [Fraction(1, 2), Fraction(3, 2), Fraction(5, 2)]
    with pytest.raises(ValueError):
        Segment(0, "1/2")
    with pytest.raises(ValueError):
        Segment(2, 1)


def test_canonical_order_and_rendering():
    m = P("[1]+[0,1]+2[0,3]")
    assert str(m) == "2[0,3]+[1]+[0,1]"
    assert P(str(m)) == m


def test_json_round_trip():
    m = P("[1/2,5/2]+2[-1/2]")
    data = json.loads(json.dumps(m.to_json()))
    assert Multisegment.from_json(data) == m
    phi = W({Fraction(1, 2): 2, 3: 1})
    assert WeightFunction.from_json(json.loads(json.dumps(phi.to_json()))) == phi
    assert phi.to_json() == {"values": [[[1, 2], 2], [[3, 1], 1]]}


def test_weight_of_examples():
    assert weight_of(P(EX_M)) == W({-1: 2, 0: 3, 1: 4, 2: 2, 3: 1})
    assert weight_of(Multisegment()) == W({})
    assert weight_of(P("[0,2]+[1]")) == W({0: 1, 1: 2, 2: 1})


def test_is_linked_examples():
    assert is_linked(Segment(0, 1), Segment(1, 2))
    assert not is_linked(Segment(0, 2), Segment(1))
    assert not is_linked(Segment(0, 1), Segment(5, 6))
    assert is_linked(Segment(0), Segment(1))
    assert not is_linked(Segment(0), Segment("1/2"))


def test_elementary_moves_examples():
    assert P(EX_N) in elementary_moves(P(EX_M))
    assert elementary_moves(P("[0,3]+[1,2]")) == set()
    assert elementary_moves(P("[0]+[1]")) == {P("[0,1]")}
    assert elementary_moves(P("[0,1]+[1,2]")) == {P("[0,2]+[1]")}


def test_closure_leq_examples():
    m, n = P(EX_M), P(EX_N)
    assert closure_leq(m, n)
    assert closure_leq(m, m)
    # a move goes up in the closure order: [0,2]+[1] is the dense orbit
    assert closure_leq(P("[0,1]+[1,2]"), P("[0,2]+[1]"))
    assert not closure_leq(P("[0,2]+[1]"), P("[0,1]+[1,2]"))
    with pytest.raises(WeightMismatch, match="incomparable weights"):
        closure_leq(P("[0,1]"), P("[0,2]"))


def test_enumerate_examples():
    assert set(enumerate_multisegments(W({0: 1, 1: 1}))) == {P("[0,1]"), P("[0]+[1]")}
    assert len(enumerate_multisegments(W({0: 1, 1: 2, 2: 1}))) == 5
    ms = enumerate_multisegments(weight_of(P(EX_M)))
    assert P(EX_M) in ms and P(EX_N) in ms
    assert len(ms) == len(set(ms))
    with pytest.raises(MassBoundExceeded):
        enumerate_multisegments(W({0: 9, 1: 9}))
    assert enumerate_multisegments(W({0: 9, 1: 9}), mass_bound=18)


def _brute_force_count(phi: WeightFunction) -> int:
    """Count multisegments by choosing, point by point, how many segments start there and their lengths."""
    pts = phi.support()
    lo, hi = int(pts[0]), int(pts[-1])
    segs = [Segment(a, b) for a in range(lo, hi + 1) for b in range(a, hi + 1)]
    found = set()

    def rec(i, remaining, chosen):
        if all(v == 0 for v in remaining.values()):
            found.add(Multisegment(chosen))
            return
        if i == len(segs):
            return
        s = segs[i]
        rec(i + 1, remaining, chosen)
        pts = s.points()
        if all(remaining.get(p, 0) > 0 for p in pts):
            r = dict(remaining)
            for p in pts:
                r[p] -= 1
            rec(i, r, chosen + [s])

    rec(0, phi.as_dict(), [])
    return len(found)


@pytest.mark.parametrize("phi", [{0: 1, 1: 2, 2: 1}, {0: 2, 1: 2}, {0: 1, 1: 3, 2: 2, 3: 1}, {0: 2, 2: 1, 3: 2}])
def test_enumeration_matches_brute_force(phi):
    phi = W(phi)
    assert len(enumerate_multisegments(phi)) == _brute_force_count(phi)


def test_non_integral_weights_split():
    phi = W({0: 1, 1: 1, Fraction(1, 2): 1})
    pieces = integral_pieces(phi)
    assert len(pieces) == 2
    assert sum(p.mass() for p in pieces) == phi.mass()
    ms = enumerate_multisegments(phi)
    assert len(ms) == 2
    assert assumption_r(phi) is None


def test_assumption_r_examples():
    phi = weight_of(P("[-1,4]+[-1,3]+[0,2]+[1,2]"))
    [(piece, r)] = assumption_r(phi)
    assert r == Fraction(3, 2) and piece == phi
    assert assumption_r(W({0: 1})) is None
    assert assumption_r(W({0: 2, 1: 2})) == [(W({0: 2, 1: 2}), Fraction(1, 2))]
    assert admissible_r(W({0: 1, 1: 1, 2: 1})) == [Fraction(1, 2), Fraction(3, 2)]


def test_dualize_examples():
    assert dualize(P("[0,2]")) == P("[-2,0]")
    assert dualize(W({0: 1, 1: 2})) == W({-1: 2, 0: 1})


@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(0, 3)), max_size=5))
def test_dualize_involution(raw):
    m = Multisegment(Segment(a, a + l) for a, l in raw)
    assert dualize(dualize(m)) == m
    assert weight_of(dualize(m)) == dualize(weight_of(m))


def test_rank_profile_examples():
    r = rank_profile(P("[0,2]"))
    assert r[(0, 2)] == r[(1, 1)] == r[(0, 0)] == 1
    r = rank_profile(P("[0,1]+[1,2]"))
    assert r[(0, 2)] == 0 and r[(1, 1)] == 2
    r = rank_profile(P("[0,2]+[1]"))
    assert r[(0, 2)] == 1 and r[(1, 1)] == 2


@pytest.mark.parametrize("max_mass", [5])
def test_closure_order_agrees_with_rank_dominance(max_mass):
    for phi in integral_weights(max_mass):
        ms = enumerate_multisegments(phi)
        up = closure_order(ms)
        for m in ms:
            assert up[m] == reachable_from(m)
            for n in ms:
                assert (n in up[m]) == rank_dominated(m, n) == closure_leq(m, n)


def test_moves_preserve_weight_and_dualize_respects_order():
    rng = random.Random(3)
    for phi in rng.sample(list(integral_weights(6)), 25):
        ms = enumerate_multisegments(phi)
        for m in ms:
            for n in elementary_moves(m):
                assert weight_of(n) == phi
                assert closure_leq(m, n) and not closure_leq(n, m)
        for m in rng.sample(ms, min(4, len(ms))):
            for n in rng.sample(ms, min(4, len(ms))):
                assert closure_leq(m, n) == closure_leq(dualize(m), dualize(n))


def test_open_orbit_is_maximum():
    for phi in integral_weights(6):
        ms = enumerate_multisegments(phi)
        top = open_orbit(phi)
        assert top in ms
        assert all(closure_leq(m, top) for m in ms)


def test_assumption_iff_open_orbit_nested():
    for phi in integral_weights(7):
        top = open_orbit(phi)
        ok = assumption_r(phi) is not None
        nested = top.is_nested() and min(s.b - s.a for s in top) >= 1
        assert ok == nested, (phi, top)


def test_integral_weights_counts():
    counts = [sum(1 for _ in integral_weights(k)) for k in range(1, 6)]
    # each unit of mass sits on the previous point, the next one, or past a gap
    assert counts == [(3**k - 1) // 2 for k in range(1, 6)]


@settings(max_examples=30, deadline=None)
@given(st.dictionaries(st.integers(0, 4), st.integers(1, 2), min_size=1, max_size=4))
def test_mass_and_support(d):
    phi = W(d)
    assert phi.mass() == sum(d.values())
    for m in enumerate_multisegments(phi):
        assert weight_of(m) == phi

import json
import random
from fractions import Fraction

import pytest

from glcompare import linalg
from glcompare.comparison import random_conjugate
from glcompare.multisegments import (
    Multisegment,
    WeightFunction,
    assumption_r,
    closure_order,
    enumerate_multisegments,
    integral_weights,
    open_orbit,
    weight_of,
)
from glcompare.vogan import (
    GradedOperator,
    group_dimension,
    is_full_rank,
    jordan_rep,
    jordan_type,
    orbit_dimension,
    space_dimension,
)

P = Multisegment.parse


def _hom(s, t) -> int:
    """dim Hom between the cells of ``s`` and ``t`` for a degree-raising nilpotent."""
    return int(t.a <= s.a <= t.b <= s.b)


def orbit_dimension_by_homs(m: Multisegment) -> int:
    phi = weight_of(m)
    stab = sum(_hom(s, t) for s in m for t in m)
    return group_dimension(phi) - stab


def test_jordan_rep_examples():
    T = jordan_rep(P("[0,1]"))
    assert T.block(Fraction(0)) == [[1]]
    T = jordan_rep(P("[0]+[1]"))
    assert T.block(Fraction(0)) == [[0]]
    T = jordan_rep(P("[0,1]+[1]"))
    assert T.dims == WeightFunction({0: 1, 1: 2})
    assert T.block(Fraction(0)) == [[1], [0]]


def test_jordan_type_examples():
    phi = WeightFunction({0: 2, 1: 1})
    assert jordan_type(GradedOperator(phi, {})) == P("2[0]+[1]")
    assert jordan_type(GradedOperator(phi, {0: [[1, 0]]})) == P("[0,1]+[0]")


def test_orbit_dimension_examples():
    assert orbit_dimension(P("[0,1]")) == 1
    assert orbit_dimension(P("[0]+[1]")) == 0
    assert orbit_dimension(P("[0,1]+[1]")) == 2


def test_operator_json_round_trip():
    T = jordan_rep(P("[0,2]+[1,2]+[1]"))
    back = GradedOperator.from_json(json.loads(json.dumps(T.to_json())))
    assert back == T
    assert jordan_type(back) == P("[0,2]+[1,2]+[1]")


def test_operator_validation():
    with pytest.raises(ValueError):
        GradedOperator(WeightFunction({0: 1, 1: 1}), {0: [[1, 2]]})
    with pytest.raises(ValueError):
        GradedOperator(WeightFunction({0: 1}), {0: [[1]]})


def test_orbit_dimension_matches_hom_count():
    for phi in integral_weights(6):
        for m in enumerate_multisegments(phi):
            assert orbit_dimension(m) == orbit_dimension_by_homs(m), m


def test_jordan_type_survives_random_conjugation():
    rng = random.Random(11)
    weights = [w for w in integral_weights(7) if max(c for _, c in w.items) >= 2]
    for phi in rng.sample(weights, 20):
        for m in enumerate_multisegments(phi)[:6]:
            T = random_conjugate(jordan_rep(m), seed=rng.randrange(10**6))
            assert jordan_type(T) == m


def test_rank_against_sympy():
    sympy = pytest.importorskip("sympy")
    rng = random.Random(5)
    for _ in range(40):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        mat = [[Fraction(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(c)] for _ in range(r)]
        if rng.random() < 0.5 and r > 1:
            mat[-1] = [x + y for x, y in zip(mat[0], mat[1 % r])]
        assert linalg.rank(mat) == sympy.Matrix(mat).rank()


def test_dimension_extremes_and_monotonicity():
    for phi in integral_weights(6):
        ms = enumerate_multisegments(phi)
        dims = {m: orbit_dimension(m) for m in ms}
        assert dims[open_orbit(phi)] == space_dimension(phi)
        assert min(dims.values()) == 0
        up = closure_order(ms)
        for m in ms:
            for n in up[m]:
                if n != m:
                    assert dims[m] < dims[n]


def test_full_rank_examples():
    m = P("[-1,4]+[-1,3]+[0,2]+[1,2]")
    phi = weight_of(m)
    assert is_full_rank(m, phi)
    singletons = Multisegment(s for seg in m for s in [type(seg)(p) for p in seg.points()])
    assert not is_full_rank(singletons, phi)
    phi = WeightFunction({0: 1, 1: 1})
    assert is_full_rank(P("[0,1]"), phi)
    assert not is_full_rank(P("[0]+[1]"), phi)
    with pytest.raises(ValueError):
        is_full_rank(P("[0]"), WeightFunction({0: 1}))


def test_full_rank_set_is_up_closed():
    for phi in integral_weights(7):
        if assumption_r(phi) is None:
            continue
        ms = enumerate_multisegments(phi)
        up = closure_order(ms)
        for m in ms:
            if is_full_rank(m, phi):
                assert all(is_full_rank(n, phi) for n in up[m])

import json
import random
from fractions import Fraction

import pytest

from glcompare.comparison import (
    ApartConditionFailure,
    AssumptionFailure,
    block_data_from_infchar,
    comparison_block,
    gamma,
    gamma_std,
    infchar_from_weight,
    padic_std_to_simple,
    parabolics_from_weight,
    random_conjugate,
    relative_position,
    tau,
    zeta_orbit,
    zeta_orbit_inv,
    zeta_pullback,
)
from glcompare.kgroups import (
    KElement,
    RealBlock,
    pairing,
    real_std,
    sheaf_simple_padic,
    sheaf_simple_real,
    sheaf_std_padic,
    to_standard_basis,
)
from glcompare.multisegments import Multisegment, WeightFunction, admissible_r, closure_leq, dualize, integral_weights, weight_of
from glcompare.vogan import jordan_rep, orbit_dimension
from glcompare.weyl import dim_Z, parabolic_from

P = Multisegment.parse
GEOM = weight_of(P("[-1,4]+[-1,3]+[0,2]+[1,2]"))
F = Fraction


def comparison_blocks(max_mass: int, max_n: int):
    for phi in integral_weights(max_mass):
        try:
            block = comparison_block(phi)
        except AssumptionFailure:
            continue
        if block.n <= max_n:
            yield block


def test_parabolics_examples():
    left, right = parabolics_from_weight(GEOM)
    assert left.composition == (2, 1, 1) and right.composition == (1, 1, 2)
    lam = (3, 3, 3, 2, 1, 0, 0, 0, 0)
    assert parabolic_from(lam).composition == (3, 1, 1, 4)
    assert tau(lam) == (0, 0, 0, 0, -1, -2, -3, -3, -3)
    assert parabolic_from(tau(lam)).composition == (4, 1, 1, 3)
    const = WeightFunction({0: 2, 1: 2, 2: 2})
    assert [p.composition for p in parabolics_from_weight(const)] == [(2,), (2,)]


def test_parabolics_need_assumption():
    with pytest.raises(AssumptionFailure):
        parabolics_from_weight(WeightFunction({0: 1, 1: 2, 2: 1}))
    with pytest.raises(AssumptionFailure):
        infchar_from_weight(WeightFunction({0: 1, F(1, 2): 1}))


def test_infchar_examples():
    block = infchar_from_weight(WeightFunction({0: 1, 1: 1, 2: 1}))
    assert block.lamL == (F(5, 2),) and block.lamR == (F(-1, 2),)
    with pytest.raises(ValueError):
        infchar_from_weight(WeightFunction({0: 1, 1: 1}), eL=0, eR=F(1, 2))
    # open orbit with ends k+1, k, k, k, k-1 for k = 3, no shifts
    phi = WeightFunction({0: 5, 1: 5, 2: 5, 3: 4, 4: 1})
    assert infchar_from_weight(phi, 0, 0).lamL == (4, 3, 3, 3, 2)


def test_block_data_examples():
    assert block_data_from_infchar(RealBlock(["5/2"], ["-1/2"]))[:2] == (3, P("[0,2]"))
    m, bm, phi = block_data_from_infchar(RealBlock(["7/2", "5/2"], ["1/2", "-1/2"]))
    assert (m, bm) == (6, P("[1,3]+[0,2]"))
    assert phi == WeightFunction({0: 1, 1: 2, 2: 2, 3: 1})
    assert block_data_from_infchar(RealBlock([], [])) == (0, Multisegment(), WeightFunction({}))
    with pytest.raises(ApartConditionFailure, match="determinant twist"):
        block_data_from_infchar(RealBlock([1], [0]))


def test_round_trip_infchar_block_data():
    for block in comparison_blocks(8, 4):
        m, bm, phi = block_data_from_infchar(block.real)
        assert phi == block.phi and m == phi.mass()
        assert infchar_from_weight(phi) == block.real
        assert weight_of(bm) == phi


def test_gamma_examples():
    block = RealBlock(["7/2", "5/2"], ["1/2", "-1/2"])
    assert gamma_std(block, (1, 2)) == P("[1,3]+[0,2]")
    assert gamma_std(block, (2, 1)) == P("[0,3]+[1,2]")
    assert gamma_std(RealBlock(["5/2"], ["-1/2"]), (1,)) == P("[0,2]")
    x = real_std(block, (1, 2)) * 2 - real_std(block, (2, 1))
    got = gamma(block, x)
    assert str(got) == "2*PadicStd[[1,3]+[0,2]] - PadicStd[[0,3]+[1,2]]"
    with pytest.raises(ValueError):
        gamma(RealBlock(["5/2"], ["-1/2"]), x)


def test_geometric_example_counts():
    block = comparison_block(GEOM)
    assert block.n == 4 and block.r == F(3, 2)
    assert len(block.full_rank_orbits) == len(block.rep_labels) == 7
    assert set(block.images.values()) == set(block.full_rank_orbits)


def test_zeta_minimal_and_absent():
    block = comparison_block(GEOM)
    e = block.real.coset(tuple(range(1, 5)))
    assert zeta_orbit(block, e.inverse()) == block.bm
    non_full = next(m for m in block.orbits if m not in block.full_rank_orbits)
    assert zeta_orbit_inv(block, non_full) is None
    assert zeta_pullback(block, sheaf_std_padic(non_full)) == KElement()
    with pytest.raises(ValueError):
        zeta_orbit_inv(block, P("[0]"))


def test_zeta_pullback_minimal_sign_and_linearity():
    block = comparison_block(GEOM)
    e = block.real.coset(tuple(range(1, 5))).inverse()
    img = zeta_pullback(block, sheaf_std_padic(block.bm))
    (lab, c), = img
    assert lab.payload == e
    assert c == (-1) ** (orbit_dimension(block.bm) - dim_Z(e))
    a, b = block.full_rank_orbits[:2]
    two = sheaf_std_padic(a) * 3 - sheaf_std_padic(b)
    assert zeta_pullback(block, two) == zeta_pullback(block, sheaf_std_padic(a)) * 3 - zeta_pullback(block, sheaf_std_padic(b))


def test_adjointness_small():
    for block in comparison_blocks(8, 3):
        for w in block.rep_labels:
            x = real_std(block.real, w)
            gx = gamma(block.real, x)
            for m in block.orbits:
                f = sheaf_std_padic(m)
                assert pairing(gx, f) == pairing(x, zeta_pullback(block, f))


def test_order_isomorphism_and_dimension_shift():
    for block in comparison_blocks(9, 3):
        images = block.images
        labels = block.rep_labels
        shifts = {orbit_dimension(images[w]) - dim_Z(w.inverse()) for w in labels}
        # the shift is constant, a stronger statement than matching parity
        assert len(shifts) == 1
        for v in labels:
            for w in labels:
                assert closure_leq(images[v], images[w]) == (v.inverse() <= w.inverse())


def test_relative_position_recovers_orbit():
    rng = random.Random(4)
    blocks = list(comparison_blocks(8, 3))
    for block in rng.sample(blocks, 25):
        for m in block.orbits:
            T = random_conjugate(jordan_rep(m), seed=rng.randrange(10**6))
            expected = zeta_orbit_inv(block, m)
            assert relative_position(block, T) == expected


def test_kl_transport_on_simples():
    # simple sheaves written in standards commute with the pullback
    for block in comparison_blocks(9, 3):
        change = padic_std_to_simple(block, "sheaf")
        for j, col in enumerate(change.cols):
            m = col.payload
            expanded = KElement((row, change.matrix[i][j]) for i, row in enumerate(change.rows))
            v = zeta_orbit_inv(block, m)
            real = to_standard_basis(zeta_pullback(block, sheaf_simple_padic(m)))
            assert zeta_pullback(block, expanded) == real
            sign = (-1) ** (orbit_dimension(m) - dim_Z(v))
            assert real == to_standard_basis(sheaf_simple_real(block.real, v)) * sign


def test_dualize_mirrors_block():
    for block in comparison_blocks(7, 3):
        dual = comparison_block(dualize(block.phi))
        assert dual.n == block.n
        assert admissible_r(dual.phi) == sorted(-r for r in admissible_r(block.phi))
        assert sorted(map(str, dual.full_rank_orbits)) == sorted(str(dualize(m)) for m in block.full_rank_orbits)


def test_block_json():
    data = json.loads(json.dumps(comparison_block(GEOM).to_json()))
    assert data["left_parabolic"] == [2, 1, 1] and data["right_parabolic"] == [1, 1, 2]
    assert len(data["bijection"]) == 7
    assert data["mass"] == 16
    for row in data["bijection"]:
        assert row["sign"] == (-1) ** row["orbit_dim"]

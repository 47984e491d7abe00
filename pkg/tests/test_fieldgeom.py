import json

import pytest

from blowup_rigidity.errors import (
    ExhaustedRetries,
    InvalidConfig,
    NDoesNotDivide,
    NonGeneric,
    NotPrime,
    OrbitCollision,
    TooFewPoints,
    TooSmallField,
    ZeroBase,
)
from blowup_rigidity.fieldgeom import (
    Config,
    FieldElement,
    Lcg,
    MoebiusMap,
    ProjPoint,
    affine_stabilizer_of,
    build_delta,
    config_is_generic,
    g_action,
    generate_config,
    multiplicative_order,
    primitive_nth_root,
    scaling_group,
    stabilizer_of_axis,
    structural_problems,
    validate_config,
)

from oracles import smallest_of_order, stabilizer_oracle


# --- field arithmetic -------------------------------------------------


def test_field_element_basics():
    a = FieldElement(7, 13)
    b = FieldElement(9, 13)
    assert (a + b).value == 3
    assert (a - b).value == 11
    assert (a * b).value == 63 % 13
    assert (-a).value == 6
    assert (a / b * b) == a
    assert (b ** 12).value == 1
    assert int(a) == 7


def test_field_element_rejects_composite_modulus():
    with pytest.raises(NotPrime):
        FieldElement(1, 12)


def test_field_element_mixed_moduli():
    with pytest.raises(ValueError):
        FieldElement(1, 13) + FieldElement(1, 7)


def test_primitive_nth_root_examples():
    assert primitive_nth_root(13, 2).value == 12
    assert primitive_nth_root(7, 3).value == 2
    # oracle: exhaustive smallest-of-exact-order scan
    for q, n in [(13, 2), (13, 3), (13, 4), (7, 3), (31, 5), (11, 2)]:
        assert primitive_nth_root(q, n).value == smallest_of_order(q, n)


def test_primitive_nth_root_errors():
    with pytest.raises(ValueError):
        primitive_nth_root(5, 1)
    with pytest.raises(NotPrime):
        primitive_nth_root(15, 2)
    with pytest.raises(NDoesNotDivide):
        primitive_nth_root(7, 4)


def test_multiplicative_order():
    assert multiplicative_order(FieldElement(12, 13)) == 2
    assert multiplicative_order(FieldElement(2, 13)) == 12
    with pytest.raises(ValueError):
        multiplicative_order(FieldElement(0, 13))


# --- projective points and maps ---------------------------------------


def test_projpoint_canonical_form():
    assert ProjPoint.of(2, 6, 13) == ProjPoint.of(1, 3, 13)
    assert ProjPoint.of(0, 5, 13) == ProjPoint.zero_one(13)
    assert ProjPoint.of(4, 0, 13) == ProjPoint.one_zero(13)
    with pytest.raises(ValueError):
        ProjPoint.of(0, 0, 13)


def test_moebius_canonical_and_group_ops():
    m = MoebiusMap.of(2, 0, 4, 6, 13)
    assert (m.a.value, m.b.value, m.c.value, m.d.value) == (1, 0, 2, 3)
    with pytest.raises(ValueError):
        MoebiusMap.of(1, 2, 2, 4, 13)  # det 0
    s = MoebiusMap.scaling(FieldElement(12, 13))
    assert s.apply(ProjPoint.zero_one(13)) == ProjPoint.zero_one(13)
    assert s.apply(ProjPoint.one_zero(13)) == ProjPoint.one_zero(13)
    assert s.apply(ProjPoint.of(1, 5, 13)) == ProjPoint.of(1, -5, 13)
    assert s.compose(s).is_identity()
    assert s.power(2).is_identity()
    aff = MoebiusMap.affine_on_v(FieldElement(3, 13), FieldElement(2, 13))
    assert aff.fixes_zero_one()
    assert aff.apply(ProjPoint.of(1, 4, 13)) == ProjPoint.of(1, 3 + 2 * 4, 13)
    assert aff.compose(aff.inverse()).is_identity()


# --- the marked configuration ----------------------------------------


def test_build_delta_c0_coordinates(c0):
    delta = build_delta(c0)
    assert len(delta) == 10
    axis1 = sorted(p.coord.v.value for p in delta if p.axis == 1)
    axis2 = sorted(p.coord.v.value for p in delta if p.axis == 2)
    assert axis1 == [1, 2, 11, 12]
    assert axis2 == [3, 4, 5, 8, 9, 10]


def test_build_delta_orbit_closure(c0):
    delta = build_delta(c0)
    coords = {(p.axis, p.coord) for p in delta}
    zeta = c0.zeta_el
    for p in delta:
        shifted = ProjPoint.affine(p.coord.v * zeta)
        assert (p.axis, shifted) in coords


def test_build_delta_orbit_collision():
    cfg = Config(n=2, r=2, s=(2, 3), q=13, zeta=12, base=((1, 12), (3, 4, 5)))
    with pytest.raises(OrbitCollision):
        build_delta(cfg)


def test_build_delta_zero_base():
    cfg = Config(n=2, r=2, s=(2, 3), q=13, zeta=12, base=((1, 0), (3, 4, 5)),
                 skip_checks=True)
    with pytest.raises(ZeroBase):
        build_delta(cfg)


def test_config_constructor_enforces_structure():
    with pytest.raises(InvalidConfig):
        Config(n=2, r=2, s=(2, 2), q=13, zeta=12, base=((1, 2), (3, 4)))
    with pytest.raises(InvalidConfig):
        Config(n=2, r=1, s=(2,), q=13, zeta=12, base=((1, 2),))
    with pytest.raises(InvalidConfig):
        Config(n=2, r=2, s=(1, 3), q=13, zeta=12, base=((1,), (3, 4, 5)))
    # r >= 3 has no lower bound on n*s_i
    Config(n=2, r=3, s=(1, 2, 3), q=11, zeta=10,
           base=((1,), (1, 2), (1, 2, 3)))


def test_g_action(c0):
    delta = build_delta(c0)
    p = delta[0]
    assert g_action(c0, (0, 0), p) == p
    moved = g_action(c0, (1, 0), p)
    assert (moved.axis, moved.orbit, moved.torsion) == (p.axis, p.orbit, 1)
    # orbit under the cyclic subgroup at the point's own axis has size n
    for p in delta:
        g = tuple(1 if i == p.axis - 1 else 0 for i in range(c0.r))
        orbit = {p}
        cur = p
        for _ in range(c0.n - 1):
            cur = g_action(c0, g, cur)
            orbit.add(cur)
        assert len(orbit) == c0.n
        assert g_action(c0, g, cur) == p


def test_g_action_is_group_action(c1):
    delta = build_delta(c1)
    rng = Lcg(7)
    for _ in range(25):
        g = tuple(rng.below(c1.n) for _ in range(c1.r))
        h = tuple(rng.below(c1.n) for _ in range(c1.r))
        gh = tuple((a + b) % c1.n for a, b in zip(g, h))
        for p in delta:
            assert g_action(c1, gh, p) == g_action(c1, g, g_action(c1, h, p))


# --- stabilizers -------------------------------------------------------


def test_stabilizer_c0_axis1_is_order_two(c0):
    stab = stabilizer_of_axis(c0, 1)
    assert len(stab) == 2
    assert sorted(stab, key=MoebiusMap.sort_key) == sorted(
        scaling_group(c0), key=MoebiusMap.sort_key
    )


def test_stabilizer_matches_pgl2_oracle(c0, c1):
    for cfg in (c0, c1):
        delta = build_delta(cfg)
        for axis in range(1, cfg.r + 1):
            coords = {p.coord.v.value for p in delta if p.axis == axis}
            assert sorted(
                stabilizer_of_axis(cfg, axis, delta), key=MoebiusMap.sort_key
            ) == stabilizer_oracle(coords, cfg.q)


def test_stabilizer_of_full_multiplicative_group():
    # degenerate harness: all of F_7^* is stabilized by every scaling z -> cz
    q = 7
    coords = [FieldElement(z, q) for z in range(1, q)]
    stab = affine_stabilizer_of(coords, q)
    assert len(stab) == q - 1
    for m in stab:
        assert m.c.value == 0  # pure scalings only


def test_stabilizer_too_few_points():
    with pytest.raises(TooFewPoints):
        affine_stabilizer_of([FieldElement(3, 13)], 13)


def test_scalings_contained_even_when_non_generic():
    # containment of the scaling group is construction-forced; equality is
    # the genericity condition, which this configuration violates on axis 1
    cfg = Config(n=3, r=2, s=(2, 3), q=13, zeta=3, base=((1, 4), (1, 2, 4)))
    stab = stabilizer_of_axis(cfg, 1)
    assert len(stab) == 6
    for m in scaling_group(cfg):
        assert m in stab


# --- validation --------------------------------------------------------


def test_validate_config_valid(c0):
    records = validate_config(c0)
    assert [r.status for r in records] == ["PASS"] * 4
    genericity = records[-1]
    assert genericity.check_id == "config.genericity"
    assert genericity.computed == {"axis_1": 2, "axis_2": 2}


def test_validate_config_repeated_s():
    cfg = Config(n=2, r=2, s=(2, 2), q=13, zeta=12, base=((1, 2), (3, 4)),
                 skip_checks=True)
    records = validate_config(cfg)
    assert records[0].status == "FAIL"
    assert any("s_i not distinct" in str(x) for x in records[0].computed)
    assert len(records) == 1  # downstream checks skipped


def test_validate_config_small_ns():
    cfg = Config(n=2, r=2, s=(1, 3), q=13, zeta=12, base=((1,), (3, 4, 5)),
                 skip_checks=True)
    records = validate_config(cfg)
    assert records[0].status == "FAIL"
    assert any("n*s_1 = 2 < 3" in str(x) for x in records[0].computed)


def test_validate_config_non_generic():
    # orbits {1,3,9} and {4,10,12} of the order-3 scaling mod 13 are swapped
    # by z -> 4z (order 6 > 3), so this axis fails genericity
    cfg = Config(n=3, r=2, s=(2, 3), q=13, zeta=3, base=((1, 4), (1, 2, 4)))
    records = validate_config(cfg)
    by_id = {r.check_id: r for r in records}
    assert by_id["config.structure"].status == "PASS"
    assert by_id["config.genericity"].status == "FAIL"
    assert by_id["config.genericity"].computed["axis_1"] == 6
    assert not config_is_generic(cfg)


# --- generation --------------------------------------------------------


def test_generate_config_deterministic():
    a = generate_config(2, 2, (2, 3), 13, seed=1)
    b = generate_config(2, 2, (2, 3), 13, seed=1)
    assert a == b
    assert config_is_generic(a)
    c = generate_config(2, 2, (2, 3), 13, seed=2)
    assert isinstance(c, Config)


def test_generate_config_too_small_field():
    with pytest.raises(TooSmallField):
        generate_config(2, 2, (2, 3), 5, seed=0)
    # nine distinct coordinates would be needed on axis 3, F_7^* has six
    with pytest.raises(TooSmallField):
        generate_config(3, 3, (1, 2, 3), 7, seed=0)


def test_generate_config_smallest_q_for_c1_shape():
    cfg = generate_config(3, 3, (1, 2, 3), 13, seed=0)
    assert cfg.zeta == 3
    assert config_is_generic(cfg)


def test_generate_config_exhausted_retries():
    # q = 7, n = 2, s = (2, 3): axis 2 must take all three scaling orbits,
    # i.e. all of F_7^*, which every scaling stabilizes; never generic
    with pytest.raises(ExhaustedRetries):
        generate_config(2, 2, (2, 3), 7, seed=0, max_retries=40)


def test_structural_problems_listing():
    problems = structural_problems(1, 1, (2, 2), 12, 5, ())
    text = " ".join(problems)
    assert "n = 1" in text and "r = 1" in text and "not prime" in text


# --- serialization and RNG --------------------------------------------


def test_config_json_round_trip(c0):
    d = json.loads(c0.canonical_json())
    assert Config.from_dict(d) == c0
    # zeta is recomputed canonically when omitted
    d.pop("zeta")
    assert Config.from_dict(d) == c0


def test_lcg_reproducible_and_bounded():
    a = Lcg(42)
    b = Lcg(42)
    seq_a = [a.below(97) for _ in range(50)]
    seq_b = [b.below(97) for _ in range(50)]
    assert seq_a == seq_b
    assert all(0 <= x < 97 for x in seq_a)
    assert [Lcg(1).next_u64()] != [Lcg(2).next_u64()]

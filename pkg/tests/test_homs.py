import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from groupnets.groups import LatticeWindow, TorusGrid, make_group
from groupnets.homs import (
    AffineMap,
    EnumerationBudgetError,
    FamilySpec,
    Homomorphism,
    apply,
    compose,
    enumerate_automorphisms,
    enumerate_family,
    enumerate_homs,
    family_size,
    hom_count,
    is_automorphism,
    map_from_dict,
    map_to_dict,
    parse_family,
    sample_map,
    validate_hom,
)


def _multiple(H, y, n):
    out = H.identity
    for _ in range(n):
        out = H.add(out, y)
    return out


def brute_force_homs(G, H):
    """Generator-image tuples whose induced element map is additive on all pairs."""
    valid = []
    for images in itertools.product(H.elements(), repeat=G.rank):
        table = {}
        for x in G.elements():
            v = H.identity
            for xi, yi in zip(x, images):
                v = H.add(v, _multiple(H, yi, xi))
            table[x] = v
        if all(table[G.add(x, y)] == H.add(table[x], table[y]) for x in table for y in table):
            valid.append(table)
    return valid


def element_map(f):
    return {x: f(x) for x in f.source.elements()}


def test_validate_hom_examples():
    Z4, Z6 = make_group([4]), make_group([6])
    assert validate_hom([[3]], Z4, Z6)
    assert not validate_hom([[1]], Z4, Z6)
    # the additivity witness for 1 -> 1: x = y = 2
    assert (2 + 2) % 4 == 0 and (1 * 2 + 1 * 2) % 6 != 0
    for G, H in [(Z4, Z6), (make_group([2, 3]), make_group([4])), (make_group([]), Z6)]:
        assert validate_hom(np.zeros((G.rank, H.rank), dtype=int), G, H)
    with pytest.raises(ValueError):
        validate_hom([[1, 2]], Z4, Z6)


def test_apply_examples():
    Z8 = make_group([8])
    assert apply(Homomorphism.scalar(Z8, 3), (5,)) == (7,)
    assert apply(Homomorphism(make_group([4]), make_group([6]), [[3]]), (2,)) == (0,)
    Z5 = make_group([5])
    assert apply(AffineMap(Homomorphism.scalar(Z5, 2), (1,)), (3,)) == (2,)
    with pytest.raises(ValueError):
        apply(Homomorphism.scalar(Z8, 3), (1, 2))


def test_compose_examples():
    Z6 = make_group([6])
    zero = compose(Homomorphism.scalar(Z6, 2), Homomorphism.scalar(Z6, 3))
    assert zero == Homomorphism.zero(Z6, Z6)
    f = Homomorphism.scalar(Z6, 5)
    assert compose(f, Homomorphism.identity(Z6)) == f == compose(Homomorphism.identity(Z6), f)
    with pytest.raises(ValueError):
        compose(f, Homomorphism.identity(make_group([3])))


def test_compose_matches_pointwise_application(rng):
    G = make_group([4, 2])
    ends = enumerate_homs(G, G)
    for _ in range(25):
        f, g = (ends[i] for i in rng.integers(len(ends), size=2))
        fg = compose(f, g)
        for x in G.elements():
            assert fg(x) == f(g(x))
    # affine composition too
    a = AffineMap(ends[5], (1, 1))
    b = AffineMap(ends[9], (3, 0))
    ab = compose(a, b)
    assert all(ab(x) == a(b(x)) for x in G.elements())


def test_is_automorphism_examples():
    Z8 = make_group([8])
    assert is_automorphism(Homomorphism.scalar(Z8, 3))
    kernel = [x for x in Z8.elements() if Homomorphism.scalar(Z8, 3)(x) == (0,)]
    assert kernel == [(0,)]
    assert not is_automorphism(Homomorphism.scalar(Z8, 2))
    assert Homomorphism.scalar(Z8, 2)((4,)) == (0,)
    assert is_automorphism(Homomorphism.identity(make_group([2, 3])))
    with pytest.raises(ValueError):
        is_automorphism(Homomorphism.zero(Z8, make_group([4])))


def test_enumeration_examples():
    homs = enumerate_homs(make_group([4]), make_group([6]))
    assert sorted(h.matrix[0][0] for h in homs) == [0, 3]
    assert len(enumerate_automorphisms(make_group([8]))) == 4
    assert len(enumerate_automorphisms(make_group([2, 2]))) == 6


def test_candidate_image_brute_force_z4_to_z6():
    # all 6 candidate images of the generator, filtered by exhaustive additivity
    valid = brute_force_homs(make_group([4]), make_group([6]))
    assert sorted(t[(1,)] for t in valid) == [(0,), (3,)]


@pytest.mark.parametrize(
    "gm,hm",
    [((4,), (6,)), ((2, 2), (4,)), ((6,), (2, 3)), ((2, 3), (6,)), ((4,), (2, 4)), ((3,), (2, 2)), ((), (5,)), ((2, 4), (2,))],
)
def test_enumeration_matches_brute_force(gm, hm):
    G, H = make_group(gm), make_group(hm)
    homs = enumerate_homs(G, H)
    brute = brute_force_homs(G, H)
    assert len(homs) == len(brute) == hom_count(G, H)
    as_tables = {tuple(sorted(element_map(h).items())) for h in homs}
    assert as_tables == {tuple(sorted(t.items())) for t in brute}


def test_aut_matches_bijective_filter():
    for moduli in [(2,), (4,), (8,), (2, 2), (2, 4), (3, 3), (6,), (2, 2, 2)]:
        G = make_group(moduli)
        brute = [t for t in brute_force_homs(G, G) if len(set(t.values())) == G.order]
        assert len(enumerate_automorphisms(G)) == len(brute)


def test_budget_error_points_to_sampling():
    G = make_group([2, 2, 2, 2])
    with pytest.raises(EnumerationBudgetError, match="sample_map"):
        enumerate_homs(G, G, budget=100)


def test_additivity_of_every_enumerated_map_up_to_order_32():
    for gm, hm in [((2, 4), (4, 4)), ((8,), (2, 8)), ((3, 3), (9,)), ((2, 2, 2), (2, 4)), ((32,), (4,)), ((4, 8), (2,))]:
        G, H = make_group(gm), make_group(hm)
        add = G.add_table
        for f in enumerate_homs(G, H):
            img = f.image_indices()
            assert np.array_equal(img[add], H.add_table[img[:, None], img[None, :]])


def test_aut_group_closed_with_inverses():
    G = make_group([2, 4])
    auts = enumerate_automorphisms(G)
    aset = set(auts)
    ident = Homomorphism.identity(G)
    for f in auts:
        assert any(compose(f, g) == ident for g in auts)
        for g in auts[:8]:
            assert compose(f, g) in aset


def test_compose_associative(rng):
    G = make_group([2, 6])
    ends = enumerate_homs(G, G)
    for _ in range(30):
        f, g, h = (ends[i] for i in rng.integers(len(ends), size=3))
        assert compose(compose(f, g), h) == compose(f, compose(g, h))


def test_zero_shift_affine_equals_hom():
    G = make_group([3, 4])
    for f in enumerate_homs(G, G)[:50]:
        a = AffineMap(f, G.identity)
        assert np.array_equal(a.images(), f.images())


def test_trivial_group_aut_is_identity(rng):
    T = make_group([])
    assert enumerate_automorphisms(T) == [Homomorphism.identity(T)]
    assert sample_map(FamilySpec("aut"), T, rng) == Homomorphism.identity(T)


def test_sample_hom_z2_to_z4_is_uniform(rng):
    fam = FamilySpec("hom", target="Z4")
    G = make_group([2])
    draws = [sample_map(fam, G, rng).matrix[0][0] for _ in range(10_000)]
    assert set(draws) == {0, 2}
    frac = np.mean(np.asarray(draws) == 2)
    sigma = np.sqrt(0.25 / 10_000)
    assert abs(frac - 0.5) < 3 * sigma


def test_sample_translations_z5_chi_square(rng):
    G = make_group([5])
    counts = np.zeros(5)
    for _ in range(10_000):
        counts[sample_map(FamilySpec("translations"), G, rng).shift[0]] += 1
    chi2 = np.sum((counts - 2000) ** 2 / 2000)
    assert chi2 < 18.47  # 0.999 quantile, 4 degrees of freedom


def test_sample_aut_is_uniform_over_enumeration(rng):
    G = make_group([2, 2])
    auts = enumerate_automorphisms(G)
    counts = {a: 0 for a in auts}
    for _ in range(6000):
        counts[sample_map(FamilySpec("aut"), G, rng)] += 1
    chi2 = sum((c - 1000) ** 2 / 1000 for c in counts.values())
    assert chi2 < 20.52  # 0.999 quantile, 5 degrees of freedom


def test_sampled_maps_are_homomorphisms(rng):
    G = make_group([4, 6])
    for kind in ("aut", "end", "affine-end", "affine-aut", "translations"):
        for _ in range(10):
            phi = sample_map(FamilySpec(kind), G, rng)
            hom = phi.hom
            img = hom.image_indices()
            assert np.array_equal(img[G.add_table], G.add_table[img[:, None], img[None, :]])


def test_torus_linear_family(rng):
    T = TorusGrid(1, 8)
    fam = parse_family("torus-linear:K=2")
    maps = enumerate_family(T, fam)
    assert sorted(m.matrix[0][0] for m in maps) == [0, 1, 2, 6, 7]
    phi = sample_map(fam, T, rng)
    assert phi.matrix[0][0] in {0, 1, 2, 6, 7}
    assert family_size(T, parse_family("affine-torus:K=2")) == 5 * 8


def test_window_families():
    W = LatticeWindow(1, 2)
    fam = parse_family("affine-end")
    assert family_size(W, fam) == 3 * 11
    maps = enumerate_family(W, fam)
    assert len(maps) == 33
    phi = next(m for m in maps if m.matrix == ((1,),) and m.shift == (-1,))
    assert phi((2,)) == (1,)
    assert family_size(W, parse_family("aut")) == 2


def test_family_spec_strings():
    assert str(parse_family("hom:Z2xZ2")) == "hom:Z2xZ2"
    assert parse_family("hom:z2xz2").target == "Z2xZ2"
    assert parse_family("torus-linear:K=8").k_max == 8
    assert parse_family("affine-end").affine
    with pytest.raises(ValueError):
        parse_family("bogus")
    with pytest.raises(ValueError):
        parse_family("torus-linear")


def test_map_json_round_trip():
    G, H = make_group([4, 2]), make_group([6])
    for phi in [Homomorphism(G, H, [[3], [3]]), AffineMap(Homomorphism.scalar(G, 3), (1, 1))]:
        data = json.loads(json.dumps(map_to_dict(phi)))
        assert map_from_dict(data) == phi
    W = LatticeWindow(1, 3)
    phi = enumerate_family(W, parse_family("affine-end"))[4]
    assert map_from_dict(map_to_dict(phi)) == phi


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(2, 6), min_size=1, max_size=2), st.lists(st.integers(2, 6), min_size=1, max_size=2), st.integers(0, 2**32 - 1))
def test_hom_count_formula_property(gm, hm, seed):
    G, H = make_group(gm), make_group(hm)
    homs = enumerate_homs(G, H)
    assert len(homs) == hom_count(G, H) == len(set(homs))
    f = homs[np.random.default_rng(seed).integers(len(homs))]
    img = f.image_indices()
    assert np.array_equal(img[G.add_table], H.add_table[img[:, None], img[None, :]])

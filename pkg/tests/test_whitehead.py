import random
from fractions import Fraction

import pytest

from ttrose import family
from ttrose.rosemap import RoseMap, compose_all, parse_map, power
from ttrose.whitehead import (
    WhiteheadGraph,
    combined_taken_turns,
    ideal_whitehead_graph,
    illegal_turns,
    is_legal,
    local_whitehead_graph,
    periodic_directions,
    prenull_turns,
    rotationless_index,
    stable_whitehead_graph,
    t_infinity,
    taken_turns,
)
from ttrose.words import make_turn

GOLDEN = parse_map("rank:2\na -> b\nb -> ba\n")


def make_full_inner_word(r):
    """Deterministic full word: the concatenation of every two-letter block."""
    out = []
    for i in range(2, r + 1):
        for j in range(2, r + 1):
            out.extend((i, j))
    return tuple(out)


def g12_taken_closed_form(r):
    out = {make_turn(d1, -d2) for d1 in (1, r - 1, r) for d2 in (r - 1, r)}
    out.add(make_turn(-1, r - 1))
    return out


def gw_taken_closed_form(r):
    out = {
        make_turn(d1, -d2)
        for d1 in range(2, r + 1)
        for d2 in range(2, r + 1)
    }
    out.add(make_turn(-1, r - 1))
    return out


def tinf_closed_form(r):
    out = {
        make_turn(d1, -d2)
        for d1 in range(1, r + 1)
        for d2 in range(2, r + 1)
    }
    out.add(make_turn(-1, r - 1))
    return out


def test_taken_turns_identity():
    assert taken_turns(RoseMap.identity(3)) == frozenset()


@pytest.mark.parametrize("r", [3, 4, 5])
def test_taken_turns_g12_closed_form(r):
    assert taken_turns(family.gen_g12_1(r)) == frozenset(g12_taken_closed_form(r))


@pytest.mark.parametrize("r", [3, 4, 5])
def test_taken_turns_gw_closed_form(r):
    z = make_full_inner_word(r)
    gw = family.gen_gw(r, family.wrap_word(r, z))
    assert taken_turns(gw) == frozenset(gw_taken_closed_form(r))


def test_t_infinity_identity():
    assert t_infinity(RoseMap.identity(3)) == frozenset()


@pytest.mark.parametrize("r", [3, 4, 5])
def test_t_infinity_family_closed_form(r):
    z = make_full_inner_word(r)
    fw = family.build_family_map(r, family.wrap_word(r, z))
    assert t_infinity(fw) == frozenset(tinf_closed_form(r))


def test_t_infinity_golden_brute_force():
    # oracle: union of taken turns over explicit iterates, stable by k=6
    union = set()
    for k in range(1, 7):
        union |= taken_turns(power(GOLDEN, k))
    assert t_infinity(GOLDEN) == frozenset(union)
    assert taken_turns(power(GOLDEN, 7)) <= union


def random_positive_map(rank, rng, max_len=3):
    return RoseMap(
        rank,
        [
            tuple(rng.randrange(1, rank + 1) for _ in range(rng.randrange(1, max_len + 1)))
            for _ in range(rank)
        ],
    )


def test_combined_taken_turns_single():
    g = random_positive_map(3, random.Random(1))
    assert combined_taken_turns([g]) == taken_turns(g)


def test_combined_taken_turns_two_factors():
    g1 = family.gen_elementary(3, 1)
    g2 = family.gen_elementary(3, 2)
    assert combined_taken_turns([g1, g2]) == taken_turns(compose_all([g1, g2]))


def test_combined_taken_turns_family_factors():
    z = family.enumerate_full_words(3, 5)[0]
    factors = family.family_factors(3, family.wrap_word(3, z))
    assert combined_taken_turns(factors) == taken_turns(compose_all(factors))


def test_combined_taken_turns_random_tuples():
    rng = random.Random(42)
    for _ in range(100):
        rank = rng.choice([3, 4, 5])
        factors = [
            random_positive_map(rank, rng) for _ in range(rng.randrange(1, 7))
        ]
        assert combined_taken_turns(factors) == taken_turns(compose_all(factors))


def test_combined_taken_turns_rejects_nonpositive():
    g = RoseMap(2, [(1, -2), (2,)])
    with pytest.raises(ValueError):
        combined_taken_turns([g, RoseMap.identity(2)])


def test_legality():
    z = family.enumerate_full_words(3, 5)[0]
    fw = family.build_family_map(3, family.wrap_word(3, z))
    assert not is_legal(make_turn(-1, -3), fw)  # the unique illegal turn
    assert is_legal(make_turn(-1, -2), fw)
    assert not is_legal(make_turn(2, 2), fw)  # degenerate
    assert illegal_turns(fw) == frozenset({make_turn(-1, -3)})


def test_prenull_turns():
    assert prenull_turns(RoseMap.identity(3)) == frozenset()
    assert prenull_turns(family.gen_elementary(3, 1)) == frozenset(
        {make_turn(-1, -3)}
    )
    assert prenull_turns(family.gen_elementary(3, 3)) == frozenset(
        {make_turn(-3, -2)}
    )


def test_periodic_directions():
    assert periodic_directions(RoseMap.identity(3)) == frozenset(
        (1, -1, 2, -2, 3, -3)
    )
    z = family.enumerate_full_words(3, 5)[0]
    fw = family.build_family_map(3, family.wrap_word(3, z))
    assert periodic_directions(fw) == frozenset((1, 2, 3, -2, -3))
    # golden: Dg has cycles (b) and (a-bar, b-bar)
    assert periodic_directions(GOLDEN) == frozenset((2, -1, -2))


def test_local_whitehead_graph_family():
    z = family.enumerate_full_words(3, 5)[0]
    fw = family.build_family_map(3, family.wrap_word(3, z))
    lw = local_whitehead_graph(fw)
    assert set(lw.vertices) == {1, -1, 2, -2, 3, -3}
    assert lw.edges == frozenset(tinf_closed_form(3))
    assert lw.is_connected()


def test_stable_and_ideal_graphs_family():
    z = family.enumerate_full_words(3, 5)[0]
    w = family.wrap_word(3, z)
    fw = family.build_family_map(3, w)
    sw = stable_whitehead_graph(fw)
    assert len(sw.vertices) == 5  # 2r - 1
    cert = family.certify(3, w)
    iw = ideal_whitehead_graph(fw, cert.pnp_certificate)
    assert iw.edges == frozenset(
        make_turn(d1, -d2) for d1 in (1, 2, 3) for d2 in (2, 3)
    )
    assert len(iw.edges) == 6
    assert rotationless_index(iw) == Fraction(-3, 2)


def test_ideal_graph_requires_certificate():
    z = family.enumerate_full_words(3, 5)[0]
    fw = family.build_family_map(3, family.wrap_word(3, z))
    with pytest.raises(ValueError):
        ideal_whitehead_graph(fw, None)


def test_whitehead_graph_preconditions():
    with pytest.raises(ValueError):
        local_whitehead_graph(RoseMap.identity(3))  # not expanding


def test_rotationless_index_small():
    two = WhiteheadGraph((1, 2), frozenset({make_turn(1, 2)}), "ideal")
    assert rotationless_index(two) == 0
    for r in (3, 4, 5):
        verts = tuple(range(1, 2 * r))
        g = WhiteheadGraph(verts, frozenset(), "ideal")
        assert rotationless_index(g) == Fraction(3, 2) - r


def test_connectivity_and_cut_vertices():
    k32 = WhiteheadGraph(
        (1, 2, 3, -1, -2),
        frozenset(make_turn(a, b) for a in (1, 2, 3) for b in (-1, -2)),
        "local",
    )
    assert k32.is_connected()
    assert k32.cut_vertices() == frozenset()
    path3 = WhiteheadGraph(
        (1, 2, 3), frozenset({make_turn(1, 2), make_turn(2, 3)}), "local"
    )
    assert path3.cut_vertices() == frozenset({2})
    two_edges = WhiteheadGraph(
        (1, 2, 3, -1), frozenset({make_turn(1, 2), make_turn(3, -1)}), "local"
    )
    assert not two_edges.is_connected()


def test_t_infinity_contains_taken_and_is_invariant():
    rng = random.Random(77)
    for _ in range(40):
        g = random_positive_map(rng.choice([2, 3]), rng)
        tinf = t_infinity(g)
        assert taken_turns(g) <= tinf
        for t in tinf:
            img = g.map_turn(t)
            assert img in tinf
            assert img[0] != img[1]


def test_serialization():
    g = WhiteheadGraph((1, -1), frozenset({make_turn(1, -1)}), "local")
    d = g.to_dict()
    assert d["kind"] == "local"
    assert d["edges"] == [["a", "A"]]
    assert "graph whitehead_local" in g.to_dot()

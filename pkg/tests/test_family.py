from fractions import Fraction

import pytest

from ttrose import family
from ttrose.family import (
    FullWord,
    build_family_map,
    certify,
    certify_map,
    distinct_outer_classes,
    enumerate_full_words,
    gen_elementary,
    gen_g12_1,
    gen_gw,
    is_full,
    sample_full_words,
    validate_generator_conventions,
    wrap_word,
)
from ttrose.rosemap import RoseMap, compose, compose_all, matmul, parse_map
from ttrose.spectral import is_primitive
from ttrose.words import parse_path


def test_generator_conventions():
    for r in (3, 4, 5):
        validate_generator_conventions(r)


def test_gen_elementary_examples():
    g1 = gen_elementary(3, 1)
    assert g1.images == ((1, 3), (2,), (3,))  # a -> ac
    assert gen_elementary(3, 7) == g1  # the second block repeats the first
    for k in range(1, 13):
        assert gen_elementary(4, k).norm() == 5  # r + 1
    with pytest.raises(ValueError):
        gen_elementary(2, 1)
    with pytest.raises(ValueError):
        gen_elementary(3, 13)


@pytest.mark.parametrize("r", [3, 4, 5])
def test_g12_direction_map(r):
    dm = gen_g12_1(r).direction_map()
    for d in dm:
        assert dm[d] == (-r if d == -1 else d)


def test_g12_images_contain_every_edge_rank3():
    g = gen_g12_1(3)
    for im in g.images:
        assert {abs(d) for d in im} == {1, 2, 3}


@pytest.mark.parametrize("r", [4, 5])
def test_g12_images_higher_rank(r):
    # only x_1, x_{r-1}, x_r are touched by the twelve generators; the
    # composite with g_w is still primitive because g_w cycles the petals
    g = gen_g12_1(r)
    touched = {1, r - 1, r}
    for e in touched:
        assert {abs(d) for d in g.images[e - 1]} == touched
    for e in range(2, r - 1):
        assert g.images[e - 1] == (e,)


def test_g12_is_squared_half_block():
    half = compose_all([gen_elementary(3, k) for k in range(1, 7)])
    assert gen_g12_1(3) == compose(half, half)


def test_gen_gw():
    w = wrap_word(3, (2, 3, 3, 2, 2))
    g = gen_gw(3, w)
    assert g.images[0] == (2,)
    assert g.images[1] == (3,)
    assert g.images[2] == (1, 2, 2, 3, 3, 2, 2, 2)
    assert g.norm() == 3 + len(w)


def test_full_word_validation_errors():
    with pytest.raises(ValueError, match="not full"):
        FullWord(3, (2, 2, 2, 2, 2, 2, 2))
    with pytest.raises(ValueError, match="start"):
        FullWord(3, (3, 2, 2, 3, 3, 2))  # full but starts with x_3
    with pytest.raises(ValueError, match="end"):
        FullWord(3, (2, 2, 3, 3, 2, 3))
    with pytest.raises(ValueError, match="x_2..x_r"):
        FullWord(3, (2, 1, 3, 2))
    with pytest.raises(ValueError, match="rank"):
        FullWord(2, (2, 2))


def test_is_full():
    assert is_full((2, 2, 3, 3, 2), 3)
    assert not is_full((2, 2, 2, 3, 3), 3)  # missing 32
    assert not is_full((2,), 3)


def test_enumerate_full_words():
    assert enumerate_full_words(3, 4) == []
    found = ["".join(map(str, w)) for w in enumerate_full_words(3, 5)]
    assert found == ["22332", "23322", "32233", "33223"]
    with pytest.raises(ValueError):
        enumerate_full_words(3, 0)


def test_full_fraction_grows():
    fractions = []
    for n in (6, 8, 10):
        total = 2**n
        fractions.append(len(enumerate_full_words(3, n)) / total)
    assert fractions[0] < fractions[1] < fractions[2]


def test_sampling_deterministic_and_full():
    a = sample_full_words(3, 8, 25, seed=123)
    b = sample_full_words(3, 8, 25, seed=123)
    assert a == b
    assert all(is_full(w, 3) for w in a)
    c = sample_full_words(3, 8, 25, seed=124)
    assert a != c
    with pytest.raises(ValueError, match="no full words"):
        sample_full_words(4, 8, 1, seed=0)


def test_wrap_word():
    w = wrap_word(3, (2, 3, 3, 2, 2))
    assert w.letters == (2, 2, 3, 3, 2, 2, 2)
    with pytest.raises(ValueError):
        wrap_word(3, (2, 2, 2))


def test_distinct_outer_classes():
    words = [wrap_word(3, z) for z in enumerate_full_words(3, 5)]
    assert not distinct_outer_classes(words[0], words[0])
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            assert distinct_outer_classes(words[i], words[j])


def test_build_family_map_properties():
    w = wrap_word(3, (2, 3, 3, 2, 2))
    fw = build_family_map(3, w)
    ok, _ = fw.is_train_track()
    assert ok
    assert fw.is_positive()
    assert is_primitive(fw.transition_matrix())
    # norm bound with the multiplier read off g_{12,1}'s matrix, not assumed
    m12 = gen_g12_1(3).transition_matrix()
    K = max(sum(m12[i][j] for i in range(3)) for j in range(3))
    assert fw.norm() <= K * (3 + len(w))


def test_family_norm_formula():
    # norm(f_w) is linear in |w| with coefficients from M(g_{12,1})
    m12 = gen_g12_1(3).transition_matrix()
    cols = [sum(m12[i][j] for i in range(3)) for j in range(3)]
    for z in enumerate_full_words(3, 5) + enumerate_full_words(3, 6)[:3]:
        w = wrap_word(3, z)
        fw = build_family_map(3, w)
        expected = cols[0] + cols[1] + cols[2] * (1 + len(w))
        assert fw.norm() == expected


def test_certify_family_word():
    cert = certify(3, wrap_word(3, (2, 3, 3, 2, 2)))
    assert cert.train_track and cert.expanding and cert.irreducible
    assert cert.primitive and cert.lw_connected and cert.pnp_free
    assert cert.ageometric_fully_irreducible
    assert cert.lone_axis
    assert cert.index == Fraction(-3, 2)
    assert cert.iw_vertex_count == 5
    assert cert.cut_vertex_free
    assert not cert.inconclusive
    assert cert.lam is not None and cert.lam <= cert.map_norm


def test_certificate_verdict_requires_all_parts():
    cert = certify(3, wrap_word(3, (2, 3, 3, 2, 2)))
    d = cert.to_dict()
    assert d["schema"] == 1
    assert d["lone_axis"] is True
    assert d["index"] == "-3/2"


def test_certify_map_golden():
    golden = parse_map("rank:2\na -> b\nb -> ba\n")
    cert = certify_map(golden)
    assert cert.train_track and cert.expanding and cert.irreducible
    assert cert.primitive and cert.lw_connected
    assert cert.pnp_free is False  # iNP found
    assert not cert.ageometric_fully_irreducible
    assert not cert.lone_axis
    assert cert.pnp_counterexamples


def test_certify_map_identity():
    cert = certify_map(RoseMap.identity(3))
    assert not cert.expanding
    assert not cert.lone_axis


def test_certify_matches_transition_product():
    w = wrap_word(3, (2, 3, 3, 2, 2))
    fw = build_family_map(3, w)
    prod = matmul(gen_g12_1(3).transition_matrix(), gen_gw(3, w).transition_matrix())
    assert fw.transition_matrix() == prod


def test_parse_word_path_consistency():
    # the g_w image of the last petal spells x_1 w
    w = wrap_word(3, (2, 3, 3, 2, 2))
    g = gen_gw(3, w)
    assert g.images[2] == parse_path("abbccbbb"[:8], 3)

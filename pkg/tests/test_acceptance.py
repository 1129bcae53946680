"""Acceptance suite: one test per criterion, printing a pass/fail line each.

Criterion 2's stated inner length (8) admits no full words at ranks 4 and 5
(a full word needs all (r-1)^2 two-letter blocks, so length >= 10 resp. 17);
the test asserts that impossibility explicitly and runs the criterion's
substance at the smallest comfortably sampleable lengths instead.

Criterion 6's fold-count clause (count == norm/2) is realized by no discrete
convention: norm(f_w) is odd at inner length 6.  The test asserts the honest
report and the two normative clauses (exact replay, #U <= norm).
"""

import math
import time
from fractions import Fraction

import pytest

from ttrose import census, family, folds, nielsen, spectral, whitehead
from ttrose.rosemap import RoseMap, compose_all, parse_map
from ttrose.words import make_turn, reverse_path, tighten

GOLDEN = parse_map("rank:2\na -> b\nb -> ba\n")

_LINES = []


def report(num, ok, msg):
    line = f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {msg}"
    _LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module", autouse=True)
def write_report():
    yield
    with open("acceptance_report.txt", "w", encoding="utf-8") as fh:
        fh.write("\n".join(_LINES) + "\n")


def bipartite_iw(r):
    return frozenset(
        make_turn(d1, -d2) for d1 in range(1, r + 1) for d2 in range(2, r + 1)
    )


def certified_lone_axis(r, z, **kw):
    cert = family.certify(r, family.wrap_word(r, z), **kw)
    return cert


def test_criterion_01_family_certification_r3():
    t0 = time.time()
    words = {5: family.enumerate_full_words(3, 5)}
    for n in range(6, 11):
        words[n] = family.sample_full_words(3, n, 200, seed=0)
    checked = 0
    cache = {}
    for n, zs in sorted(words.items()):
        for z in zs:
            if z not in cache:
                cache[z] = certified_lone_axis(3, z)
            cert = cache[z]
            assert cert.lone_axis, (n, z, cert.notes)
            assert cert.ageometric_fully_irreducible
            assert cert.index == Fraction(-3, 2)
            assert cert.iw.edges == bipartite_iw(3)
            assert set(cert.iw.vertices) == {1, 2, 3, -2, -3}
            checked += 1
    elapsed = time.time() - t0
    report(
        1,
        checked == 4 + 5 * 200 and elapsed < 120,
        f"{checked} r=3 words lone-axis with index -3/2 and bipartite IW "
        f"in {elapsed:.1f}s (< 120s)",
    )


def test_criterion_02_family_certification_r4_r5():
    t0 = time.time()
    # the stated inner length 8 admits no full words at ranks 4 and 5
    assert family.enumerate_full_words(4, 8) == []
    with pytest.raises(ValueError, match="no full words"):
        family.sample_full_words(5, 8, 1, seed=0)
    lengths = {4: 16, 5: 48}
    for r, n in lengths.items():
        for z in family.sample_full_words(r, n, 50, seed=0):
            cert = certified_lone_axis(r, z)
            assert cert.lone_axis, (r, z, cert.notes)
            assert cert.index == Fraction(3, 2) - r
            assert cert.iw.edges == bipartite_iw(r)
    elapsed = time.time() - t0
    report(
        2,
        elapsed < 300,
        "length-8 infeasibility asserted (0 full words at r=4,5); 50 words "
        f"each at inner lengths 16/48 lone-axis with index 3/2-r in "
        f"{elapsed:.1f}s (< 300s)",
    )


def test_criterion_03_pnp_machinery():
    t0 = time.time()
    out = nielsen.unfolding_inp_search(GOLDEN, period=1)
    assert out.status == "inps-found" and len(out.candidates) == 1
    rho = out.candidates[0].whole_path()
    image = tighten(GOLDEN.apply_to_path(rho))
    assert image in (rho, reverse_path(rho))

    family_words = [(3, z) for z in family.enumerate_full_words(3, 5)]
    family_words += [(4, family.sample_full_words(4, 16, 1, seed=1)[0])]
    family_words += [(5, family.sample_full_words(5, 48, 1, seed=1)[0])]
    for r, z in family_words:
        w = family.wrap_word(r, z)
        factors = family.family_factors(r, w)
        fw = compose_all(factors)
        cert = nielsen.factorization_pnp_certifier(factors, fw)
        forced = [
            (s["stage"], s["side"], s["position"], s["letter"])
            for s in cert.trace
            if s["type"] == "forced"
        ]
        xr = chr(ord("A") + r - 1)
        xr1 = chr(ord("A") + r - 2)
        assert forced == [
            (1, 2, 2, xr),
            (2, 1, 2, xr1),
            (3, 1, 3, xr1),
            (4, 2, 3, xr),
        ], (r, forced)
        seed = [s for s in cert.trace if s["type"] == "seed"][0]
        assert (seed["rho1"], seed["rho2"]) == ("A", xr)
        refuted = [s for s in cert.trace if s["type"] == "refuted"]
        assert len(refuted) == 1 and refuted[0]["contradiction_stage"] == 7
        assert nielsen.unfolding_inp_search(fw, period=1).status == "certified-empty"
    elapsed = time.time() - t0
    report(
        3,
        elapsed < 60,
        f"golden iNP found+rechecked; both methods certify absence on "
        f"{len(family_words)} family maps (r=3,4,5) with forced prefix "
        f"e1=x1bar, e1'=xrbar, e2'=xrbar, e2=x(r-1)bar, e3=x(r-1)bar, "
        f"e3'=xrbar and contradiction at stage 7, in {elapsed:.1f}s (< 60s)",
    )


def test_criterion_04_turn_calculus():
    import random

    rng = random.Random(42)

    def random_positive_map(rank):
        return RoseMap(
            rank,
            [
                tuple(
                    rng.randrange(1, rank + 1)
                    for _ in range(rng.randrange(1, 4))
                )
                for _ in range(rank)
            ],
        )

    for _ in range(100):
        rank = rng.choice([3, 4, 5])
        factors = [random_positive_map(rank) for _ in range(rng.randrange(1, 7))]
        assert whitehead.combined_taken_turns(factors) == whitehead.taken_turns(
            compose_all(factors)
        )
    for r in (3, 4, 5):
        g12 = family.gen_g12_1(r)
        dm = g12.direction_map()
        assert all(dm[d] == (-r if d == -1 else d) for d in dm)
        closed = {
            make_turn(d1, -d2) for d1 in (1, r - 1, r) for d2 in (r - 1, r)
        } | {make_turn(-1, r - 1)}
        assert whitehead.taken_turns(g12) == frozenset(closed)
    report(
        4,
        True,
        "combined turns == composition turns on 100 random tuples; "
        "T(g_{12,1}) and D(g_{12,1}) closed forms exact for r=3,4,5",
    )


def test_criterion_05_spectral():
    matrices = {((0, 1), (1, 1))}
    for n in range(5, 9):
        for z in family.enumerate_full_words(3, n):
            fw = family.build_family_map(3, family.wrap_word(3, z))
            matrices.add(fw.transition_matrix())
    worst = 0.0
    for m in sorted(matrices):
        assert spectral.is_primitive(m)
        res = spectral.pf_eigenvalue(m, 1e-12)
        root = spectral.pf_root_oracle(m, 1e-12)
        worst = max(worst, abs(res.lam - root))
        assert abs(res.lam - root) <= 2e-12, m
        assert res.lam <= spectral.max_row_sum(m) + 1e-9
    golden = spectral.pf_eigenvalue(((0, 1), (1, 1)), 1e-12)
    assert abs(golden.lam - (1 + math.sqrt(5)) / 2) <= 2e-12
    report(
        5,
        True,
        f"pf_eigenvalue vs root oracle within 2e-12 on {len(matrices)} "
        f"matrices (worst {worst:.2e}); lambda <= max row sum throughout",
    )


def test_criterion_06_folds():
    zs = family.enumerate_full_words(3, 5) + family.enumerate_full_words(3, 6)[:4]
    reports = []
    for z in zs:
        w = family.wrap_word(3, z)
        fw = family.build_family_map(3, w)
        seq = folds.stallings_decomposition(fw)
        assert folds.replay(fw, seq), z
        cert = family.certify(3, w)
        U = folds.unmarked_representatives(fw, cert)
        assert len(U) <= fw.norm()
        reports.append(folds.fold_count_report(fw))
    # the norm/2 fold count is realized by no convention: at inner length 6
    # the norm is odd, so no integer count can equal it; the report records
    # both measured conventions honestly
    assert all(rep["realized_by"] is None for rep in reports)
    assert all(rep["single_letter_folds"] == rep["norm"] - 3 for rep in reports)
    sample = reports[0]
    report(
        6,
        True,
        f"replay exact and #U <= norm on {len(zs)} family maps; fold-count "
        f"report: norm {sample['norm']}, maximal {sample['maximal_folds']}, "
        f"single-letter {sample['single_letter_folds']}, norm/2 realized by "
        f"no convention (norm odd at inner length 6)",
    )


def test_criterion_07_census():
    t0 = time.time()
    rows = census.census(3, [5, 6, 7, 8, 9])
    by_n = {row.n: row for row in rows}
    for row in rows:
        assert row.lower_bound_ok, row.n
        assert row.distinct_matrices <= row.n + 1
    counts = [by_n[n].conjugacy_classes for n in (5, 6, 7, 8, 9)]
    assert counts == sorted(set(counts)), counts  # strictly increasing
    gaps = [
        by_n[n].conjugacy_classes - by_n[n].distinct_matrices for n in (5, 6, 7, 8, 9)
    ]
    assert gaps == sorted(set(gaps)), gaps  # classes outpace matrices
    elapsed = time.time() - t0
    report(
        7,
        elapsed < 600,
        f"exhaustive census n=5..9: classes {counts} strictly increasing, "
        f"matrices capped at n+1, lower bounds hold, in {elapsed:.1f}s (< 600s)",
    )


def test_criterion_08_upper_bound():
    t0 = time.time()
    result = census.upper_bound_experiment(2, 6, tol=1e-9)
    assert result["entry_bound_ok"], result["violations"]
    elapsed = time.time() - t0
    report(
        8,
        elapsed < 60,
        f"all {result['expanding_irreducible_count']} expanding irreducible "
        f"maps of norm <= 6 satisfy max m_ij <= k*lambda^(k+1), "
        f"in {elapsed:.1f}s (< 60s)",
    )


def test_criterion_09_entropy():
    pts = [(t, (math.e**t) * math.log(2.0)) for t in range(5, 21)]
    est = census.entropy_estimate(pts, scale="log")
    err = abs(est.principal_log - 1.0)
    report(9, err <= 0.01, f"synthetic a=2, b=e recovers log b within {err:.2e} (<= 1%)")


def test_criterion_10_determinism(tmp_path):
    from ttrose import cli

    args = [
        "census",
        "--rank",
        "3",
        "--len",
        "5,6",
        "--mode",
        "sample",
        "--count",
        "8",
        "--seed",
        "31",
    ]
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert cli.main(args + ["--out", str(out1)]) == 0
    assert cli.main(args + ["--out", str(out2)]) == 0
    identical = out1.read_bytes() == out2.read_bytes()
    args_csv = args + ["--format", "csv"]
    out3, out4 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args_csv + ["--out", str(out3)]) == 0
    assert cli.main(args_csv + ["--out", str(out4)]) == 0
    identical = identical and out3.read_bytes() == out4.read_bytes()
    report(10, identical, "census reruns with identical flags+seed are byte-identical")

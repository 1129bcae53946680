"""Counting experiments over the lone-axis family, and their persistence.

The census certifies full words, computes the unmarked-representative sets
U(phi_w) along the fold line, and partitions words into exact conjugacy
classes: two certified words fall in one class precisely when their U-sets
intersect.  Stretch factors and transition matrices are bucketed exactly
(entries, characteristic polynomial) with an additional float bucketing of
lambda at 1e-9 for reporting; floats never merge classes.

The upper-bound experiment exhaustively enumerates positive rose maps of
bounded norm and checks the matrix entry bound max m_ij <= k * lambda^(k+1)
on every expanding irreducible one, grouping counts by ceil(log lambda).

The entropy estimator fits log log omega(t) against t by least squares; on
doubly exponential data a^(b^t) the slope recovers log b exactly.  Desk
scale data cannot certify the limsup; residuals are always reported.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import family, folds, spectral
from .rosemap import RoseMap, compose_all

SCHEMA = 1
LAMBDA_BUCKET = 1e-9

SYMMETRY = {r: (2**r) * math.factorial(r) for r in range(2, 9)}


@dataclass
class CensusRow:
    n: int
    words_tested: int
    words_certified: int
    distinct_matrices: int
    distinct_char_polys: int
    distinct_lambda_buckets: int
    conjugacy_classes: int
    max_log_lambda: Optional[float]
    lower_bound_ok: Optional[bool]
    class_reps: List[str] = field(default_factory=list)
    elapsed: float = 0.0  # console only; never serialized (determinism)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "n": self.n,
            "words_tested": self.words_tested,
            "words_certified": self.words_certified,
            "distinct_matrices": self.distinct_matrices,
            "distinct_char_polys": self.distinct_char_polys,
            "distinct_lambda_buckets": self.distinct_lambda_buckets,
            "conjugacy_classes": self.conjugacy_classes,
            "max_log_lambda": self.max_log_lambda,
            "lower_bound_ok": self.lower_bound_ok,
            "class_reps": self.class_reps,
        }


CSV_FIELDS = [
    "n",
    "words_tested",
    "words_certified",
    "distinct_matrices",
    "distinct_char_polys",
    "distinct_lambda_buckets",
    "conjugacy_classes",
    "max_log_lambda",
    "lower_bound_ok",
]


def _words_for(rank: int, n: int, mode: str, count: int, seed: int):
    if mode == "exhaustive":
        return family.enumerate_full_words(rank, n)
    if mode == "sample":
        return family.sample_full_words(rank, n, count, seed * 1000003 + n)
    raise ValueError(f"unknown mode {mode!r}")


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def classes(self):
        out: Dict[object, List[object]] = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


def census(
    rank: int,
    lengths: Sequence[int],
    mode: str = "exhaustive",
    count: int = 0,
    seed: int = 0,
    tol: float = 1e-12,
    cross_check_pnp: bool = True,
) -> List[CensusRow]:
    """Exact conjugacy-class counts per inner word length, via U-partition.

    Only fully certified words are counted; inconclusive certifications are
    excluded (never inflate the count).  The per-row lower bound
    classes >= certified / (2^r r! max_norm) is verified and recorded.
    """
    rows = []
    for n in lengths:
        t0 = time.time()
        words = sorted(set(_words_for(rank, n, mode, count, seed)))
        certified: List[Tuple[Tuple[int, ...], family.Certificate, RoseMap]] = []
        for z in words:
            w = family.wrap_word(rank, z)
            cert = family.certify(rank, w, tol=tol, cross_check_pnp=cross_check_pnp)
            if cert.lone_axis and not cert.inconclusive:
                g = compose_all(family.family_factors(rank, w))
                certified.append((z, cert, g))
        matrices = set()
        polys = set()
        lam_buckets = set()
        max_log = None
        uf = _UnionFind([z for z, _, _ in certified])
        rep_owner: Dict[folds.UnmarkedRep, Tuple[int, ...]] = {}
        for z, cert, g in certified:
            m = g.transition_matrix()
            matrices.add(m)
            polys.add(spectral.char_poly(m))
            lam_buckets.add(round(cert.lam / LAMBDA_BUCKET))
            lg = math.log(cert.lam)
            max_log = lg if max_log is None else max(max_log, lg)
            for rep in folds.unmarked_representatives(g, cert):
                if rep in rep_owner:
                    uf.union(rep_owner[rep], z)
                else:
                    rep_owner[rep] = z
        classes = uf.classes()
        bound_ok = None
        if certified:
            max_norm = max(g.norm() for _, _, g in certified)
            bound_ok = len(classes) >= len(certified) / (SYMMETRY[rank] * max_norm)
        rows.append(
            CensusRow(
                n=n,
                words_tested=len(words),
                words_certified=len(certified),
                distinct_matrices=len(matrices),
                distinct_char_polys=len(polys),
                distinct_lambda_buckets=len(lam_buckets),
                conjugacy_classes=len(classes),
                max_log_lambda=max_log,
                lower_bound_ok=bound_ok,
                class_reps=sorted(
                    "".join(str(x) for x in min(members))
                    for members in classes.values()
                ),
                elapsed=time.time() - t0,
            )
        )
    return rows


def spectrum(
    rank: int,
    lengths: Sequence[int],
    mode: str = "exhaustive",
    count: int = 0,
    seed: int = 0,
    tol: float = 1e-12,
    cross_check_pnp: bool = True,
) -> List[dict]:
    """Distinct-stretch-factor report per length.

    Exact buckets first (transition matrix, then characteristic polynomial,
    an upper bound for distinct lambda), float buckets at 1e-9 second; the
    report never claims an exact lambda count.  For the family the matrix
    count at inner length n is at most n+1 (matrices depend on the word only
    through letter multiplicities).
    """
    out = []
    for n in lengths:
        words = sorted(set(_words_for(rank, n, mode, count, seed)))
        matrices = set()
        polys = set()
        lam_buckets = set()
        certified = 0
        for z in words:
            w = family.wrap_word(rank, z)
            cert = family.certify(rank, w, tol=tol, cross_check_pnp=cross_check_pnp)
            if not (cert.lone_axis and not cert.inconclusive):
                continue
            certified += 1
            g = compose_all(family.family_factors(rank, w))
            m = g.transition_matrix()
            matrices.add(m)
            polys.add(spectral.char_poly(m))
            lam_buckets.add(round(cert.lam / LAMBDA_BUCKET))
        out.append(
            {
                "schema": SCHEMA,
                "n": n,
                "words_tested": len(words),
                "words_certified": certified,
                "distinct_matrices": len(matrices),
                "distinct_char_polys": len(polys),
                "distinct_lambda_buckets": len(lam_buckets),
                "matrix_count_bound": n + 1,
                "matrix_bound_ok": len(matrices) <= n + 1,
                "matrices": sorted([list(row) for row in m] for m in matrices),
            }
        )
    return out


def enumerate_positive_maps(rank: int, budget: int) -> Iterable[RoseMap]:
    """Every positive rose map with norm <= budget, in lexicographic order."""
    if budget < rank:
        return
    letters = range(1, rank + 1)
    for total in range(rank, budget + 1):
        for comp in itertools.product(range(1, total - rank + 2), repeat=rank):
            if sum(comp) != total:
                continue
            pools = [list(itertools.product(letters, repeat=c)) for c in comp]
            for images in itertools.product(*pools):
                yield RoseMap(rank, images)


def upper_bound_experiment(rank: int, budget: int, tol: float = 1e-9) -> dict:
    """Exhaustive census of expanding irreducible positive rose maps.

    Counts maps of norm <= budget grouped by ceil(log lambda) and verifies
    the transition-matrix entry bound max m_ij <= k lambda^(k+1) on each.
    """
    buckets: Dict[int, int] = {}
    total = 0
    violations = []
    for g in enumerate_positive_maps(rank, budget):
        if not (g.is_expanding() and g.is_irreducible()):
            continue
        total += 1
        m = g.transition_matrix()
        lam = spectral.pf_root_oracle(m, 1e-12)
        bucket = max(1, math.ceil(math.log(lam)))
        buckets[bucket] = buckets.get(bucket, 0) + 1
        k = rank
        bound = k * lam ** (k + 1) + tol
        worst = max(max(row) for row in m)
        if worst > bound:
            violations.append({"map": g.serialize(), "max_entry": worst, "bound": bound})
    return {
        "schema": SCHEMA,
        "rank": rank,
        "norm_budget": budget,
        "expanding_irreducible_count": total,
        "by_ceil_log_lambda": {str(k): v for k, v in sorted(buckets.items())},
        "entry_bound_ok": not violations,
        "violations": violations,
    }


@dataclass
class EntropyEstimate:
    principal_log: float  # slope of log log omega against t; log of principal entropy
    principal: float
    secondary_log: float
    secondary: float
    residual_principal: float  # rms residual of the principal fit
    residual_secondary: float
    points_used: int

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "principal_log": self.principal_log,
            "principal": self.principal,
            "secondary_log": self.secondary_log,
            "secondary": self.secondary,
            "residual_principal": self.residual_principal,
            "residual_secondary": self.residual_secondary,
            "points_used": self.points_used,
            "note": (
                "finite-range regression estimate with residuals; "
                "limit behavior is not certified by desk-scale data"
            ),
        }


def _least_squares(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        return 0.0, my, 0.0
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
    intercept = my - slope * mx
    rms = math.sqrt(
        sum((y - slope * x - intercept) ** 2 for x, y in zip(xs, ys)) / n
    )
    return slope, intercept, rms


def entropy_estimate(
    points: Sequence[Tuple[float, float]], scale: str = "linear"
) -> EntropyEstimate:
    """Fit the two growth exponents of a doubly exponential counting function.

    points are (t, omega(t)), or (t, log omega(t)) with scale="log" for data
    too large to represent directly; needs at least 3 usable points.
    Principal: slope of log log omega against t.  Secondary: slope of
    log omega against b^t using the fitted principal b.
    """
    if scale == "linear":
        logs = [(t, math.log(w)) for t, w in points if w > 1]
    elif scale == "log":
        logs = [(t, lw) for t, lw in points if lw > 0]
    else:
        raise ValueError("scale must be 'linear' or 'log'")
    if len(logs) < 3:
        raise ValueError("need at least 3 census points with count > 1")
    ts = [t for t, _ in logs]
    lls = [math.log(lw) for _, lw in logs]
    slope, _, rms = _least_squares(ts, lls)
    b = math.exp(slope)
    if slope > 0:
        xs = [b**t for t in ts]
        slope2, _, rms2 = _least_squares(xs, [lw for _, lw in logs])
        slope2 = max(slope2, 0.0)
    else:
        slope2, rms2 = 0.0, 0.0
    return EntropyEstimate(
        principal_log=slope,
        principal=b,
        secondary_log=slope2,
        secondary=math.exp(slope2),
        residual_principal=rms,
        residual_secondary=rms2,
        points_used=len(logs),
    )


def rows_to_jsonl(rows: Iterable) -> str:
    lines = []
    for row in rows:
        d = row.to_dict() if hasattr(row, "to_dict") else row
        lines.append(json.dumps(d, sort_keys=True, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def rows_to_csv(rows: Iterable) -> str:
    lines = [",".join(CSV_FIELDS)]
    for row in rows:
        d = row.to_dict() if hasattr(row, "to_dict") else row
        lines.append(",".join(str(d.get(f, "")) for f in CSV_FIELDS))
    return "\n".join(lines) + "\n"

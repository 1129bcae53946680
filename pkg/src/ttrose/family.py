"""The explicit lone-axis family and its certification pipeline.

For rank r >= 3 the family maps are f_w = g_w o g_{12,1} where g_w wraps a
full positive word w(x_2..x_r) around the last petal (x_k -> x_{k+1} for
k < r, x_r -> x_1 w) and g_{12,1} is a fixed composition of twelve
elementary positive automorphisms.  A positive word is *full* when every
two-letter word x_i x_j (2 <= i, j <= r) occurs in it; family words start
with x_{r-1} and end with x_2.

The twelve generators are the six maps

    g_1: x_1 -> x_1 x_r        g_2: x_r -> x_r x_1     g_3: x_r -> x_r x_{r-1}
    g_4: x_{r-1} -> x_{r-1} x_r  g_5: x_{r-1} -> x_{r-1} x_1  g_6: x_1 -> x_1 x_{r-1}

repeated twice (g_{k+6} = g_k), so g_{12,1} = (g_6 o ... o g_1)^2.  The
repeat-indexing is pinned down by the prenull-turn facts asserted in
`validate_generator_conventions`, which fails loudly if the convention were
wrong.

certify() runs the whole pipeline: train track, expanding, irreducible,
primitive transition matrix, connected local Whitehead graph, PNP-freeness
(factorization certifier with an optional unfolding cross-check), stable and
ideal Whitehead graphs, rotationless index, and cut vertices, recording
every sub-result in a Certificate.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import nielsen, spectral, whitehead
from .rosemap import RoseMap, compose, compose_all
from .words import Path, cyclic_equal, make_turn

__all__ = [
    "FullWord",
    "gen_elementary",
    "gen_g12_1",
    "gen_gw",
    "family_factors",
    "build_family_map",
    "is_full",
    "enumerate_full_words",
    "sample_full_words",
    "wrap_word",
    "distinct_outer_classes",
    "Certificate",
    "certify",
    "certify_map",
    "validate_generator_conventions",
]


@dataclass(frozen=True)
class FullWord:
    """A full positive word over x_2..x_r, wrapped to start x_{r-1} / end x_2."""

    rank: int
    letters: Tuple[int, ...]

    def __post_init__(self):
        r = self.rank
        if r < 3:
            raise ValueError("family words need rank >= 3")
        if any(not (2 <= x <= r) for x in self.letters):
            raise ValueError("word letters must lie in x_2..x_r")
        if not is_full(self.letters, r):
            raise ValueError("word is not full: some two-letter block x_i x_j is missing")
        if self.letters[0] != r - 1:
            raise ValueError(f"word must start with x_{r - 1}")
        if self.letters[-1] != 2:
            raise ValueError("word must end with x_2")

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return "".join(str(x) for x in self.letters)


def is_full(word: Sequence[int], rank: int) -> bool:
    """Every block x_i x_j with 2 <= i, j <= rank occurs as a subword."""
    need = {(i, j) for i in range(2, rank + 1) for j in range(2, rank + 1)}
    have = {(word[k], word[k + 1]) for k in range(len(word) - 1)}
    return need <= have


def enumerate_full_words(rank: int, n: int) -> List[Tuple[int, ...]]:
    """All full positive words of length n over x_2..x_rank, lexicographic."""
    if n < 1:
        raise ValueError("word length must be >= 1")
    alphabet = range(2, rank + 1)
    return [w for w in itertools.product(alphabet, repeat=n) if is_full(w, rank)]


def sample_full_words(rank: int, n: int, count: int, seed: int) -> List[Tuple[int, ...]]:
    """Uniform samples over full words of length n, by rejection; deterministic per seed.

    A full word over x_2..x_rank must contain all (rank-1)^2 two-letter
    blocks, so none exist below length (rank-1)^2 + 1; that case raises
    instead of looping forever.
    """
    if n < (rank - 1) ** 2 + 1:
        raise ValueError(
            f"no full words of length {n} exist for rank {rank}: "
            f"{(rank - 1) ** 2} two-letter blocks need length >= {(rank - 1) ** 2 + 1}"
        )
    rng = random.Random(seed)
    out = []
    alphabet = list(range(2, rank + 1))
    guard = 0
    while len(out) < count:
        w = tuple(rng.choice(alphabet) for _ in range(n))
        guard += 1
        if is_full(w, rank):
            out.append(w)
        if guard > 10**7:
            raise RuntimeError(f"rejection sampling stalled at length {n}, rank {rank}")
    return out


def wrap_word(rank: int, z: Sequence[int]) -> FullWord:
    """Prepend x_{rank-1} and append x_2 to a full inner word z."""
    z = tuple(z)
    if not is_full(z, rank):
        raise ValueError("inner word is not full")
    return FullWord(rank, (rank - 1,) + z + (2,))


_ELEMENTARY_RULES = {
    1: lambda r: (1, r),
    2: lambda r: (r, 1),
    3: lambda r: (r, r - 1),
    4: lambda r: (r - 1, r),
    5: lambda r: (r - 1, 1),
    6: lambda r: (1, r - 1),
}


def gen_elementary(r: int, k: int) -> RoseMap:
    """The k-th elementary generator, k in 1..12 (k and k+6 coincide)."""
    if r < 3:
        raise ValueError("elementary generators need rank >= 3")
    if not 1 <= k <= 12:
        raise ValueError("generator index must lie in 1..12")
    src, suffix = _ELEMENTARY_RULES[(k - 1) % 6 + 1](r)
    images = [(i,) for i in range(1, r + 1)]
    images[src - 1] = (src, suffix)
    return RoseMap(r, images)


def family_factors(r: int, w: FullWord) -> List[RoseMap]:
    """g_1, ..., g_12, g_w in application order (g_1 first)."""
    return [gen_elementary(r, k) for k in range(1, 13)] + [gen_gw(r, w)]


def gen_g12_1(r: int) -> RoseMap:
    """g_12 o ... o g_1."""
    return compose_all([gen_elementary(r, k) for k in range(1, 13)])


def gen_gw(r: int, w: FullWord) -> RoseMap:
    """x_k -> x_{k+1} for k < r, x_r -> x_1 w."""
    if w.rank != r:
        raise ValueError("word rank mismatch")
    images = [(k + 1,) for k in range(1, r)]
    images.append((1,) + w.letters)
    return RoseMap(r, images)


def build_family_map(r: int, w: FullWord) -> RoseMap:
    """f_w = g_w o g_{12,1}; positive, hence a train track map."""
    return compose(gen_gw(r, w), gen_g12_1(r))


def distinct_outer_classes(w: FullWord, w2: FullWord) -> bool:
    """True iff the cyclic words x_1 w and x_1 w' differ.

    Positive words with a unique x_1 letter, so this is a plain cyclic
    rotation check; True guarantees distinct outer automorphism classes.
    """
    if w.rank != w2.rank:
        raise ValueError("rank mismatch")
    a: Path = (1,) + w.letters
    b: Path = (1,) + w2.letters
    return not cyclic_equal(a, b)


def validate_generator_conventions(r: int) -> None:
    """Assert the prenull-turn facts that pin down the g_7..g_12 indexing."""
    facts = {
        2: make_turn(-1, -r),
        3: make_turn(-r, -(r - 1)),
        4: make_turn(-r, -(r - 1)),
        5: make_turn(-1, -(r - 1)),
        7: make_turn(-1, -r),
    }
    for k, expected in facts.items():
        got = whitehead.prenull_turns(gen_elementary(r, k))
        if got != frozenset({expected}):
            raise AssertionError(
                f"generator convention broken: prenull(g_{k}) = {got}, expected {{{expected}}}"
            )
    dm = gen_g12_1(r).direction_map()
    for d in dm:
        want = -r if d == -1 else d
        if dm[d] != want:
            raise AssertionError(f"D(g_12,1) wrong at {d}: {dm[d]} != {want}")
    # each generator is invertible: undoing x_i -> x_i x_j gives the identity
    for k in range(1, 13):
        src, suffix = _ELEMENTARY_RULES[(k - 1) % 6 + 1](r)
        images = [(i,) for i in range(1, r + 1)]
        images[src - 1] = (src, -suffix)
        undo = RoseMap(r, images)
        if compose(undo, gen_elementary(r, k)) != RoseMap.identity(r):
            raise AssertionError(f"g_{k} is not undone by its inverse")


@dataclass
class Certificate:
    """Record of every sub-result of the certification pipeline."""

    rank: int
    word: Optional[str]
    map_norm: int
    train_track: bool = False
    expanding: bool = False
    irreducible: bool = False
    primitive: bool = False
    lw_connected: bool = False
    pnp_free: Optional[bool] = None
    pnp_certificate: Optional[object] = None
    pnp_counterexamples: Tuple = ()
    index: Optional[Fraction] = None
    iw_vertex_count: Optional[int] = None
    cut_vertex_free: Optional[bool] = None
    log_lambda: Optional[float] = None
    lam: Optional[float] = None
    ageometric_fully_irreducible: bool = False
    lone_axis: bool = False
    inconclusive: bool = False
    notes: List[str] = field(default_factory=list)
    iw: Optional[whitehead.WhiteheadGraph] = None

    def to_dict(self) -> Dict:
        return {
            "schema": 1,
            "rank": self.rank,
            "word": self.word,
            "norm": self.map_norm,
            "train_track": self.train_track,
            "expanding": self.expanding,
            "irreducible": self.irreducible,
            "primitive": self.primitive,
            "lw_connected": self.lw_connected,
            "pnp_free": self.pnp_free,
            "index": None if self.index is None else str(self.index),
            "iw_vertex_count": self.iw_vertex_count,
            "cut_vertex_free": self.cut_vertex_free,
            "lambda": self.lam,
            "log_lambda": self.log_lambda,
            "ageometric_fully_irreducible": self.ageometric_fully_irreducible,
            "lone_axis": self.lone_axis,
            "inconclusive": self.inconclusive,
            "notes": list(self.notes),
        }


def _finish_certificate(cert: Certificate, g: RoseMap, pnp_cert, tol: float) -> Certificate:
    """Spectral data, ideal graph, index, and verdicts, given the PNP outcome."""
    import math

    if cert.primitive:
        res = spectral.pf_eigenvalue(g.transition_matrix(), tol)
        cert.lam = res.lam
        cert.log_lambda = math.log(res.lam)
    cert.ageometric_fully_irreducible = bool(
        cert.train_track
        and cert.irreducible
        and cert.primitive
        and cert.lw_connected
        and cert.pnp_free
    )
    if cert.pnp_free:
        iw = whitehead.ideal_whitehead_graph(g, pnp_cert)
        cert.iw = iw
        cert.iw_vertex_count = len(iw.vertices)
        cert.index = whitehead.rotationless_index(iw)
        cert.cut_vertex_free = not iw.has_cut_vertex_in_any_component()
        cert.lone_axis = bool(
            cert.ageometric_fully_irreducible
            and cert.index == Fraction(3, 2) - cert.rank
            and cert.cut_vertex_free
        )
    return cert


def certify(
    r: int,
    w: FullWord,
    tol: float = 1e-12,
    cross_check_pnp: bool = True,
    cross_check_periods: int = 1,
) -> Certificate:
    """Full family pipeline for f_w; verdicts only when all prerequisites hold.

    PNP-freeness comes from the factorization certifier (period-uniform);
    when cross_check_pnp is set, the generic unfolding search must also
    certify absence at periods 1..cross_check_periods, else the certificate
    is marked inconclusive.
    """
    factors = family_factors(r, w)
    g = compose_all(factors)
    cert = Certificate(rank=r, word=str(w), map_norm=g.norm())
    ok, _ = g.is_train_track()
    cert.train_track = ok
    cert.expanding = g.is_expanding()
    cert.irreducible = g.is_irreducible()
    cert.primitive = spectral.is_primitive(g.transition_matrix())
    cert.lw_connected = whitehead.local_whitehead_graph(g).is_connected()

    pnp_cert = None
    try:
        pnp_cert = nielsen.factorization_pnp_certifier(factors, g)
        cert.pnp_free = True
    except nielsen.SurvivingCandidateError as exc:
        cert.pnp_free = None
        cert.inconclusive = True
        cert.notes.append(f"factorization certifier inapplicable: {exc}")
    if cert.pnp_free and cross_check_pnp:
        for period in range(1, cross_check_periods + 1):
            outcome = nielsen.unfolding_inp_search(g, period=period)
            if outcome.status == "certified-empty":
                continue
            cert.inconclusive = True
            cert.pnp_free = None
            cert.notes.append(
                f"unfolding cross-check at period {period} returned {outcome.status}"
            )
            break
    cert.pnp_certificate = pnp_cert
    return _finish_certificate(cert, g, pnp_cert, tol)


def certify_map(g: RoseMap, tol: float = 1e-12, r_max: int = 3) -> Certificate:
    """Generic pipeline for an arbitrary rose map (no factorization available)."""
    cert = Certificate(rank=g.rank, word=None, map_norm=g.norm())
    ok, _ = g.is_train_track()
    cert.train_track = ok
    cert.expanding = g.is_expanding()
    cert.irreducible = g.is_irreducible()
    cert.primitive = spectral.is_primitive(g.transition_matrix())
    if not (cert.train_track and cert.expanding and cert.irreducible):
        cert.notes.append("expanding irreducible train track preconditions failed")
        return cert
    cert.lw_connected = whitehead.local_whitehead_graph(g).is_connected()
    pnp_cert = None
    try:
        pnp_cert = nielsen.certify_pnp_free(g, r_max=r_max)
        cert.pnp_free = True
    except nielsen.PNPsFoundError as exc:
        cert.pnp_free = False
        cert.pnp_counterexamples = tuple(exc.candidates)
        cert.notes.append(f"iNP found: {exc}")
    except nielsen.InconclusiveCertificationError as exc:
        cert.pnp_free = None
        cert.inconclusive = True
        cert.notes.append(f"PNP certification inconclusive: {exc}")
    cert.pnp_certificate = pnp_cert
    return _finish_certificate(cert, g, pnp_cert, tol)

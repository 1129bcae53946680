"""Detection and exclusion of (periodic, indivisible) Nielsen paths.

An indivisible Nielsen path (iNP) for an expanding irreducible train track
map h decomposes as rho = rho1-bar . rho2, two legal halves sharing their
initial vertex, meeting in a nondegenerate illegal turn, with h(rho_i) =
tau . rho_i for the common cancelled prefix tau.  In the eigenmetric the
halves have length L(tau)/(lambda - 1); endpoints may sit inside an edge
(fractional last letter).

Two certifiers of PNP-freeness live here:

* `unfolding_inp_search` - a generic bounded search.  Candidates are pairs
  of paths seeded at the prenull turns of h and driven by the strip map
  (apply h, cancel the maximal common prefix).  A candidate is confirmed
  when its edge sequence stabilizes over two consecutive pullbacks (either
  orientation: g#(rho) may equal rho reversed) and the endpoint length
  equation holds; a branch is refuted when no legal extension matches, its
  junction turn is legal (no further cancellation is possible), its state
  repeats, or it blows past the depth bound while still growing.
  "Inconclusive" (depth exhausted without refutation) is a first-class
  outcome, never treated as absence.

* `factorization_pnp_certifier` - constraint propagation along a positive
  factorization h = f_n o ... o f_1 with a unique illegal turn.  The halves
  are forced letter by letter: at each factor stage the junction turn of the
  partial images must remain an illegal turn of the remaining (cyclically
  rotated) composition, junction letters are only admitted when interior
  turns stay inside T_inf, and a branch dies when its junction turn can
  never degenerate under the periodic factor sequence.  The refutation
  trace is machine-checkable and period-uniform: it rules out Nielsen paths
  of every period at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import spectral
from .rosemap import RoseMap, compose, compose_all, power
from .whitehead import illegal_turns, is_legal, prenull_turns, t_infinity
from .words import (
    Path,
    Turn,
    direction_str,
    make_turn,
    path_str,
    reverse_path,
    tighten,
    turn_str,
)

__all__ = [
    "INPCandidate",
    "PNPFreeCertificate",
    "UnfoldingOutcome",
    "PNPsFoundError",
    "InconclusiveCertificationError",
    "SurvivingCandidateError",
    "eigen_lengths",
    "unfolding_inp_search",
    "factorization_pnp_certifier",
    "certify_pnp_free",
    "verify_certificate",
]


class PNPsFoundError(Exception):
    """Certification failed: concrete periodic Nielsen paths exist."""

    def __init__(self, candidates):
        self.candidates = list(candidates)
        desc = "; ".join(c.describe() for c in self.candidates)
        super().__init__(f"found {len(self.candidates)} iNP(s): {desc}")


class InconclusiveCertificationError(Exception):
    """Neither certifier reached a verdict; the pipeline must not guess."""


class SurvivingCandidateError(Exception):
    """Factorization propagation left a live branch; no certificate issued."""

    def __init__(self, message, prefix=None):
        super().__init__(message)
        self.prefix = prefix


@dataclass(frozen=True)
class INPCandidate:
    """An iNP rho = rho1-bar . rho2 with possibly fractional last edges.

    fraction_i is the eigenmetric fraction of the last letter of rho_i that
    the path covers; 1.0 means the endpoint is the vertex.
    """

    rho1: Path
    rho2: Path
    fraction1: float
    fraction2: float
    base_turn: Turn
    period: int

    def describe(self) -> str:
        f1 = "" if self.fraction1 == 1.0 else f"[{self.fraction1:.6f}]"
        f2 = "" if self.fraction2 == 1.0 else f"[{self.fraction2:.6f}]"
        return (
            f"rho1={path_str(self.rho1)}{f1} rho2={path_str(self.rho2)}{f2} "
            f"(period {self.period})"
        )

    def whole_path(self) -> Path:
        return reverse_path(self.rho1) + self.rho2

    def unoriented_key(self) -> Path:
        p = self.whole_path()
        return min(p, reverse_path(p))


@dataclass(frozen=True)
class PNPFreeCertificate:
    """Machine-checkable record that a map carries no PNPs.

    `periods` is either the tuple of periods the unfolding search cleared or
    the string "all" for the period-uniform factorization argument.
    """

    method: str  # unfolding-search | factorization-propagation
    periods: object
    trace: Tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "method": self.method,
            "periods": list(self.periods) if isinstance(self.periods, tuple) else self.periods,
            "trace": [dict(step) for step in self.trace],
        }


@dataclass
class UnfoldingOutcome:
    status: str  # inps-found | certified-empty | inconclusive
    candidates: List[INPCandidate] = field(default_factory=list)
    seeds_examined: int = 0
    notes: List[str] = field(default_factory=list)


def eigen_lengths(g: RoseMap, tol: float = 1e-12):
    """PF right eigenvector of M(g), normalized to sum 1.

    In the resulting edge metric each image g(e) has length lambda * l(e).
    """
    m = g.transition_matrix()
    if not spectral.is_primitive(m):
        raise spectral.NotPrimitiveError("eigen_lengths needs a primitive transition matrix")
    res = spectral.pf_eigenvalue(m, tol)
    return res.eigenvector


def _pf_data(h: RoseMap):
    """(lambda, edge lengths) for expanding irreducible h, primitive or not.

    Power iteration runs on M + I so that imprimitive irreducible matrices
    converge too; the eigenvector is shared and lambda(M+I) = lambda(M) + 1.
    """
    m = h.transition_matrix()
    lam = spectral.pf_root_oracle(m, 1e-13)
    k = len(m)
    shifted = tuple(
        tuple(m[i][j] + (1 if i == j else 0) for j in range(k)) for i in range(k)
    )
    res = spectral.pf_eigenvalue(shifted, 1e-12)
    return lam, res.eigenvector


def _mcp_len(a: Path, b: Path) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


def _path_elen(p, lengths) -> float:
    return sum(lengths[abs(d) - 1] for d in p)


def _interior_turns_legal(p: Path, h: RoseMap, legal_cache: Dict[Turn, bool]) -> bool:
    for i in range(len(p) - 1):
        t = make_turn(-p[i], p[i + 1])
        v = legal_cache.get(t)
        if v is None:
            v = is_legal(t, h)
            legal_cache[t] = v
        if not v:
            return False
    return True


def inp_recheck(h: RoseMap, cand: INPCandidate, lam: float, lengths, tol: float) -> bool:
    """Exact fixed-point recheck: tighten(h(rho)) is rho or rho-bar, and the
    endpoint length equation L(rho_i) = L(tau)/(lambda-1) holds within tol."""
    if cand.fraction1 == 1.0 and cand.fraction2 == 1.0:
        rho = cand.whole_path()
        image = tighten(h.apply_to_path(rho))
        if image != rho and image != reverse_path(rho):
            return False
    i1 = h.apply_to_path(cand.rho1)
    i2 = h.apply_to_path(cand.rho2)
    q = _mcp_len(i1, i2)
    tau_len = _path_elen(i1[:q], lengths)
    target = tau_len / (lam - 1.0)
    scale = 1.0 + abs(target)
    for p, frac in ((cand.rho1, cand.fraction1), (cand.rho2, cand.fraction2)):
        elen = _path_elen(p[:-1], lengths) + frac * lengths[abs(p[-1]) - 1]
        if abs(elen - target) > tol * scale:
            return False
    return True


def _locate_endpoint(path: Path, target: float, lengths, tol: float):
    """Walk eigenlength `target` along `path`; return (edge count, fraction)."""
    acc = 0.0
    for i, d in enumerate(path):
        ell = lengths[abs(d) - 1]
        if acc + ell >= target - tol:
            frac = (target - acc) / ell
            if frac < tol:
                return None
            if frac > 1.0 - 1e-7:
                frac = 1.0
            return i + 1, frac
        acc += ell
    return None


def _fractional_stable(h, r1, r2, loc1, loc2, lam, lengths, tol) -> bool:
    """One more pullback must reproduce the located endpoints exactly."""
    i1 = h.apply_to_path(r1)
    i2 = h.apply_to_path(r2)
    q = _mcp_len(i1, i2)
    if q == 0 or q == len(i1) or q == len(i2):
        return False
    target = _path_elen(i1[:q], lengths) / (lam - 1.0)
    n1 = _locate_endpoint(i1[q:], target, lengths, tol)
    n2 = _locate_endpoint(i2[q:], target, lengths, tol)
    if not n1 or not n2:
        return False
    (c1, f1), (c2, f2) = loc1, loc2
    (d1, g1), (d2, g2) = n1, n2
    return (
        d1 == c1
        and d2 == c2
        and i1[q : q + d1] == r1[:c1]
        and i2[q : q + d2] == r2[:c2]
        and abs(f1 - g1) <= 10 * tol
        and abs(f2 - g2) <= 10 * tol
    )


def unfolding_inp_search(
    g: RoseMap,
    period: int = 1,
    max_depth: Optional[int] = None,
    tol: float = 1e-9,
    iteration_cap: int = 64,
    state_cap: int = 4000,
) -> UnfoldingOutcome:
    """Bounded search for iNPs of g^period (unoriented).

    Returns an UnfoldingOutcome whose status is "inps-found",
    "certified-empty" (every seed refuted), or "inconclusive".
    """
    if period < 1:
        raise ValueError("period must be >= 1")
    ok, witness = g.is_train_track()
    if not ok:
        raise ValueError(f"not a train track map (witness {witness})")
    if not g.is_expanding() or not g.is_irreducible():
        raise ValueError("unfolding search needs an expanding irreducible map")
    if max_depth is None:
        max_depth = 4 * g.rank * max(len(im) for im in g.images)
    h = power(g, period)
    seeds = sorted(prenull_turns(h))
    outcome = UnfoldingOutcome(status="certified-empty", seeds_examined=len(seeds))
    if not seeds:
        return outcome

    lam, lengths = _pf_data(h)
    legal_cache: Dict[Turn, bool] = {}
    found: Dict[Path, INPCandidate] = {}
    inconclusive = False

    def legal(t: Turn) -> bool:
        v = legal_cache.get(t)
        if v is None:
            v = is_legal(t, h)
            legal_cache[t] = v
        return v

    def confirm(p1: Path, p2: Path, f1: float, f2: float, seed: Turn) -> bool:
        cand = INPCandidate(p1, p2, f1, f2, seed, period)
        if inp_recheck(h, cand, lam, lengths, tol):
            found.setdefault(cand.unoriented_key(), cand)
            return True
        return False

    for seed in seeds:
        stack = [(((seed[0],), (seed[1],)), 0)]
        visited = set()
        states = 0
        while stack:
            (p1, p2), depth = stack.pop()
            states += 1
            if states > state_cap or depth > iteration_cap:
                inconclusive = True
                outcome.notes.append(
                    f"seed {turn_str(seed)}: state/iteration cap reached"
                )
                break
            if (p1, p2) in visited:
                continue  # repeated state: cycles are not h-fixed points
            visited.add((p1, p2))
            junction = make_turn(p1[0], p2[0])
            if junction[0] == junction[1] or legal(junction):
                continue  # no further cancellation can happen at a legal junction
            if not (_interior_turns_legal(p1, h, legal_cache)
                    and _interior_turns_legal(p2, h, legal_cache)):
                continue
            i1 = h.apply_to_path(p1)
            i2 = h.apply_to_path(p2)
            q = _mcp_len(i1, i2)
            if q == 0:
                continue  # junction not prenull at this state
            exhausted1 = q == len(i1)
            exhausted2 = q == len(i2)
            if exhausted1 or exhausted2:
                side_path, other_img = (p1, i2) if exhausted1 else (p2, i1)
                if len(side_path) >= max_depth:
                    inconclusive = True
                    outcome.notes.append(
                        f"seed {turn_str(seed)}: extension depth exceeded"
                    )
                    continue
                last = side_path[-1]
                hdm = h.direction_map()
                for d in range(-g.rank, g.rank + 1):
                    if d == 0 or d == -last:
                        continue
                    t = make_turn(-last, d)
                    if not legal(t):
                        continue
                    if len(other_img) > q:
                        nxt = other_img[q]
                        jt = make_turn(nxt, hdm[d])
                        if jt[0] != jt[1] and legal(jt):
                            continue  # junction would be legal: dead end
                    if exhausted1:
                        stack.append(((p1 + (d,), p2), depth))
                    else:
                        stack.append(((p1, p2 + (d,)), depth))
                continue
            r1, r2 = i1[q:], i2[q:]
            if (r1, r2) == (p1, p2) or (r1, r2) == (p2, p1):
                confirm(p1, p2, 1.0, 1.0, seed)
                continue
            if (
                len(r1) >= len(p1)
                and len(r2) >= len(p2)
                and r1[: len(p1)] == p1
                and r2[: len(p2)] == p2
            ):
                # both sides extend: candidate with fractional endpoints,
                # confirmed only if the located endpoints survive one more
                # pullback unchanged (edge sequences and fractions)
                tau_len = _path_elen(i1[:q], lengths)
                target = tau_len / (lam - 1.0)
                loc1 = _locate_endpoint(r1, target, lengths, tol)
                loc2 = _locate_endpoint(r2, target, lengths, tol)
                if loc1 and loc2 and _fractional_stable(
                    h, r1, r2, loc1, loc2, lam, lengths, tol
                ):
                    c1, f1 = loc1
                    c2, f2 = loc2
                    if confirm(r1[:c1], r2[:c2], f1, f2, seed):
                        continue
            grew = len(r1) + len(r2) > len(p1) + len(p2)
            if max(len(r1), len(r2)) > max_depth:
                if grew:
                    continue  # refuted: diverging past the depth bound
                inconclusive = True
                outcome.notes.append(
                    f"seed {turn_str(seed)}: depth exceeded without growth"
                )
                continue
            stack.append(((r1, r2), depth + 1))

    if found:
        outcome.status = "inps-found"
        outcome.candidates = sorted(found.values(), key=lambda c: c.unoriented_key())
    elif inconclusive:
        outcome.status = "inconclusive"
    return outcome


def _remaining_sequence_kills(
    turn: Turn, position: int, dmaps: Sequence[Dict[int, int]]
) -> bool:
    """Does `turn` ever degenerate under factors position, position+1, ...
    of the periodic factor sequence?  Decided by cycle detection."""
    n = len(dmaps)
    seen = set()
    t, pos = turn, position % n
    while (t, pos) not in seen:
        if t[0] == t[1]:
            return True
        seen.add((t, pos))
        dm = dmaps[pos]
        t = make_turn(dm[t[0]], dm[t[1]])
        pos = (pos + 1) % n
    return t[0] == t[1]


def _contradiction_stage(
    turn: Turn, stage: int, dmaps: Sequence[Dict[int, int]]
) -> int:
    """Stage reported for a junction turn that can never die.

    The turn sits in place through inert factors; the last stage before some
    factor moves it is where a kill was due (this reproduces the classical
    hand-computation's attribution).
    """
    n = len(dmaps)
    t = turn
    for j in range(stage + 1, stage + 1 + 2 * n):
        dm = dmaps[(j - 1) % n]
        moved = make_turn(dm[t[0]], dm[t[1]])
        if moved != t:
            return j - 1
        t = moved
    return stage + 1


def factorization_pnp_certifier(
    factors: Sequence[RoseMap],
    g: Optional[RoseMap] = None,
    max_periods: int = 3,
    prefix_cap: int = 64,
    size_cap: int = 10**6,
) -> PNPFreeCertificate:
    """Propagate iNP constraints along a positive factorization of g.

    Raises SurvivingCandidateError when some branch survives (no certificate;
    the map may well have PNPs), ValueError on precondition violations.
    """
    factors = list(factors)
    if not factors:
        raise ValueError("empty factor list")
    for f in factors:
        if not f.is_positive():
            raise ValueError("factorization certifier needs positive factors")
    composed = compose_all(factors)
    if g is None:
        g = composed
    elif g != composed:
        raise ValueError("factors do not compose to the given map")
    ok, witness = g.is_train_track()
    if not ok:
        raise ValueError(f"not a train track map (witness {witness})")
    if not g.is_expanding() or not g.is_irreducible():
        raise ValueError("certifier needs an expanding irreducible map")
    ill = sorted(illegal_turns(g))
    if len(ill) != 1:
        raise ValueError(
            f"certifier needs a unique illegal turn, found {len(ill)}: "
            + ", ".join(turn_str(t) for t in ill)
        )
    seed = ill[0]
    tinf = t_infinity(g)
    n = len(factors)
    dmaps = [f.direction_map() for f in factors]
    stage_cap = n * max_periods

    trace: List[dict] = [
        {
            "type": "seed",
            "rho1": direction_str(seed[0]),
            "rho2": direction_str(seed[1]),
            "turn": turn_str(seed),
        }
    ]

    # composites of the first k factors, built lazily
    composites: List[RoseMap] = [RoseMap.identity(g.rank)]

    def composite(k: int) -> RoseMap:
        while len(composites) <= k:
            nxt = compose(factors[(len(composites) - 1) % n], composites[-1])
            if nxt.norm() > size_cap:
                raise SurvivingCandidateError(
                    "composite size cap exceeded during propagation"
                )
            composites.append(nxt)
        return composites[k]

    # branch: (rho1 prefix, rho2 prefix, next stage to process)
    stack: List[Tuple[Path, Path, int]] = [((seed[0],), (seed[1],), 1)]
    survivors: List[Tuple[Path, Path, int]] = []

    while stack:
        p1, p2, stage = stack.pop()
        if stage > stage_cap:
            survivors.append((p1, p2, stage))
            continue
        a = composite(stage)
        while True:
            i1 = a.apply_to_path(p1)
            i2 = a.apply_to_path(p2)
            q = _mcp_len(i1, i2)
            exhausted1 = q == len(i1)
            exhausted2 = q == len(i2)
            if not exhausted1 and not exhausted2:
                junction = make_turn(i1[q], i2[q])
                if _remaining_sequence_kills(junction, stage, dmaps):
                    stack.append((p1, p2, stage + 1))
                else:
                    cstage = _contradiction_stage(junction, stage, dmaps)
                    trace.append(
                        {
                            "type": "refuted",
                            "stage": stage,
                            "junction": turn_str(junction),
                            "contradiction_stage": cstage,
                            "rho1": path_str(p1),
                            "rho2": path_str(p2),
                        }
                    )
                break
            # one side's image is exhausted: its next letter is forced
            side = 1 if exhausted1 else 2
            path = p1 if side == 1 else p2
            other_img = i2 if side == 1 else i1
            if len(path) >= prefix_cap:
                raise SurvivingCandidateError(
                    "prefix cap exceeded during propagation",
                    prefix=(path_str(p1), path_str(p2)),
                )
            admitted = []
            for d in range(-g.rank, g.rank + 1):
                if d == 0 or d == -path[-1]:
                    continue
                interior = make_turn(-path[-1], d)
                if interior not in tinf:
                    continue
                img_d = a.image_of(d)
                if len(other_img) == q:
                    admitted.append((d, None))
                    continue
                nxt = other_img[q]
                if img_d[0] == nxt:
                    admitted.append((d, None))  # cancellation continues
                    continue
                junction = make_turn(nxt, img_d[0])
                if _remaining_sequence_kills(junction, stage, dmaps):
                    admitted.append((d, junction))
                else:
                    trace.append(
                        {
                            "type": "candidate-refuted",
                            "stage": stage,
                            "side": side,
                            "position": len(path) + 1,
                            "letter": direction_str(d),
                            "junction": turn_str(junction),
                            "contradiction_stage": _contradiction_stage(
                                junction, stage, dmaps
                            ),
                        }
                    )
            if not admitted:
                trace.append(
                    {
                        "type": "refuted",
                        "stage": stage,
                        "rho1": path_str(p1),
                        "rho2": path_str(p2),
                        "reason": "no admissible extension",
                    }
                )
                break
            if len(admitted) == 1:
                d = admitted[0][0]
                trace.append(
                    {
                        "type": "forced",
                        "stage": stage,
                        "side": side,
                        "position": len(path) + 1,
                        "letter": direction_str(d),
                    }
                )
                if side == 1:
                    p1 = p1 + (d,)
                else:
                    p2 = p2 + (d,)
                continue
            # genuine branching: push every admissible extension
            for d, _ in admitted:
                if side == 1:
                    stack.append((p1 + (d,), p2, stage))
                else:
                    stack.append((p1, p2 + (d,), stage))
            trace.append(
                {
                    "type": "branch",
                    "stage": stage,
                    "side": side,
                    "choices": [direction_str(d) for d, _ in admitted],
                }
            )
            break  # superseded by the pushed children

    if survivors:
        p1, p2, stage = survivors[0]
        raise SurvivingCandidateError(
            f"branch survived to stage {stage}: rho1={path_str(p1)} rho2={path_str(p2)}",
            prefix=(path_str(p1), path_str(p2)),
        )
    trace.append({"type": "certified"})
    return PNPFreeCertificate(
        method="factorization-propagation", periods="all", trace=tuple(trace)
    )


def verify_certificate(cert: PNPFreeCertificate, factors: Sequence[RoseMap]) -> bool:
    """Replay a factorization certificate: rerunning the propagation must
    reproduce the trace step for step."""
    if cert.method != "factorization-propagation":
        raise ValueError("only factorization certificates replay against factors")
    fresh = factorization_pnp_certifier(factors)
    return fresh.trace == cert.trace


def certify_pnp_free(
    g: RoseMap,
    factors: Optional[Sequence[RoseMap]] = None,
    r_max: int = 3,
    max_depth: Optional[int] = None,
    tol: float = 1e-9,
) -> PNPFreeCertificate:
    """Certify absence of PNPs via either certifier.

    With a factorization available the period-uniform propagation is tried
    first; otherwise (or when it is inapplicable) the unfolding search must
    certify emptiness at every period 1..r_max.  Finding an iNP raises
    PNPsFoundError; an unresolved search raises InconclusiveCertificationError.
    """
    if factors is not None:
        try:
            return factorization_pnp_certifier(factors, g)
        except SurvivingCandidateError:
            pass
    periods = []
    trace: List[dict] = []
    for period in range(1, r_max + 1):
        outcome = unfolding_inp_search(g, period=period, max_depth=max_depth, tol=tol)
        if outcome.status == "inps-found":
            raise PNPsFoundError(outcome.candidates)
        if outcome.status == "inconclusive":
            raise InconclusiveCertificationError(
                f"unfolding search inconclusive at period {period}: {outcome.notes}"
            )
        periods.append(period)
        trace.append(
            {
                "type": "period-certified",
                "period": period,
                "seeds": outcome.seeds_examined,
            }
        )
    return PNPFreeCertificate(
        method="unfolding-search", periods=tuple(periods), trace=tuple(trace)
    )

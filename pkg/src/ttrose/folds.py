"""Stallings fold decompositions and unmarked train track representatives.

A rose self-map g is decomposed by labeling each petal with its image path
and greedily folding: at the canonically least vertex carrying two edge
germs whose label words share a first letter, the maximal common initial
segments are identified (subdividing so fold endpoints land on label
boundaries).  The process ends when the labeling is an immersion, which for
a homotopy equivalence must be a graph homeomorphism (single-letter labels
forming a signed permutation of the petals).

The decomposition supports the discrete periodic fold line: for every index
at which the intermediate graph is an r-rose, the first-return map (folds
after the point, then the final homeomorphism, then folds before the point)
is again a rose self-map.  For a lone-axis map these first returns exhaust
the unmarked representatives U(phi), the conjugacy invariant used by the
census: two maps are unmarked-equivalent when some simplicial rose
automorphism conjugates one to the other, detected by a canonical form that
minimizes over all 2^r * r! signed permutations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .rosemap import RoseMap
from .words import Path, is_tight, path_str, reverse_path

__all__ = [
    "FoldStep",
    "FoldSequence",
    "UnmarkedRep",
    "stallings_decomposition",
    "canonical_form",
    "unmarked_equivalent",
    "unmarked_representatives",
    "signed_permutations",
    "conjugate_by",
]


class NotHomotopyEquivalenceError(ValueError):
    """The fold process did not terminate in a graph homeomorphism."""


@dataclass(frozen=True)
class FoldStep:
    """One fold: which two germs at which vertex, and the common segment."""

    vertex: int
    germ1: Tuple[int, int]  # (edge id, end); end 0 = edge starts here
    germ2: Tuple[int, int]
    segment: Path  # common initial label segment, read from the vertex


@dataclass
class FoldSequence:
    rank: int
    steps: List[FoldStep]
    final_perm: Tuple[int, ...]  # final edge (sorted order) -> signed target letter
    rose_indices: List[int]  # indices k with Gamma_k an r-rose (0 = start)
    # internals for replay and first-return computation
    edge_maps: List[Dict[int, Path]] = field(default_factory=list)  # F_k, identity omitted
    edge_lists: List[Tuple[int, ...]] = field(default_factory=list)  # edges of Gamma_k
    vertex_counts: List[int] = field(default_factory=list)
    final_labels: Dict[int, int] = field(default_factory=dict)  # Gamma_N edge -> signed letter
    snapshots: List[Dict[int, Tuple[int, int, Path]]] = field(default_factory=list)

    def fold_count(self) -> int:
        return len(self.steps)

    def graph_dot(self, k: int) -> str:
        """DOT rendering of the intermediate graph Gamma_k with its labels."""
        lines = [f"digraph fold_stage_{k} {{"]
        for eid, (u, v, label) in sorted(self.snapshots[k].items()):
            lines.append(f'  {u} -> {v} [label="{eid}:{path_str(label)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "rank": self.rank,
            "folds": [
                {
                    "vertex": s.vertex,
                    "germ1": list(s.germ1),
                    "germ2": list(s.germ2),
                    "segment": path_str(s.segment),
                }
                for s in self.steps
            ],
            "final_permutation": list(self.final_perm),
            "rose_indices": list(self.rose_indices),
        }


@dataclass(frozen=True, order=True)
class UnmarkedRep:
    """Canonical form of a rose map under the rose symmetry group."""

    rank: int
    images: Tuple[Path, ...]

    def __str__(self):
        return ";".join(path_str(im) for im in self.images)


def signed_permutations(rank: int):
    """All 2^r r! signed permutations, as tuples sigma with q(e_i) = sigma[i-1]."""
    for perm in itertools.permutations(range(1, rank + 1)):
        for signs in itertools.product((1, -1), repeat=rank):
            yield tuple(s * p for s, p in zip(signs, perm))


def conjugate_by(g: RoseMap, sigma: Sequence[int]) -> RoseMap:
    """q^-1 o g o q for the simplicial automorphism q(e_i) = sigma[i-1]."""
    r = g.rank
    inv = [0] * (r + 1)
    for i, s in enumerate(sigma, start=1):
        inv[abs(s)] = i if s > 0 else -i

    def pull(letter: int) -> int:
        t = inv[abs(letter)]
        return t if letter > 0 else -t

    images = []
    for i in range(1, r + 1):
        img = g.image_of(sigma[i - 1])
        images.append(tuple(pull(d) for d in img))
    return RoseMap(r, images)


def canonical_form(g: RoseMap) -> UnmarkedRep:
    """Lexicographic minimum of the images over all signed-permutation conjugates."""
    best: Optional[Tuple[Path, ...]] = None
    for sigma in signed_permutations(g.rank):
        images = conjugate_by(g, sigma).images
        if best is None or images < best:
            best = images
    return UnmarkedRep(g.rank, best)


def unmarked_equivalent(f: RoseMap, f2: RoseMap) -> bool:
    if f.rank != f2.rank:
        raise ValueError("rank mismatch")
    return canonical_form(f) == canonical_form(f2)


class _Graph:
    """Mutable labeled graph during folding; edges carry target-rose labels."""

    def __init__(self, rank: int, images):
        self.rank = rank
        self.edges: Dict[int, Tuple[int, int, Path]] = {}
        self.next_id = rank + 1
        for i, im in enumerate(images, start=1):
            self.edges[i] = (0, 0, tuple(im))
        self.vertices: Set[int] = {0}
        self.next_vertex = 1

    def germ_word(self, eid: int, end: int) -> Path:
        u, v, label = self.edges[eid]
        return label if end == 0 else reverse_path(label)

    def germs_at(self, vertex: int):
        out = []
        for eid, (u, v, label) in self.edges.items():
            if u == vertex:
                out.append((eid, 0))
            if v == vertex:
                out.append((eid, 1))
        return out

    def subdivide(self, eid: int, m: int):
        """Split so the m letters nearest the given end form their own edge.

        Returns (F-entry path for eid, segment edge id for end 0, for end 1).
        Callers slice off what they need.
        """
        u, v, label = self.edges[eid]
        s = self.next_vertex
        self.next_vertex += 1
        self.vertices.add(s)
        a = self.next_id
        b = self.next_id + 1
        self.next_id += 2
        self.edges[a] = (u, s, label[:m])
        self.edges[b] = (s, v, label[m:])
        del self.edges[eid]
        return (a, b), s

    def merge_vertices(self, keep: int, drop: int):
        if keep == drop:
            return
        if drop < keep:
            keep, drop = drop, keep
        for eid, (u, v, label) in list(self.edges.items()):
            nu = keep if u == drop else u
            nv = keep if v == drop else v
            if (nu, nv) != (u, v):
                self.edges[eid] = (nu, nv, label)
        self.vertices.discard(drop)


def _find_fold(graph: _Graph):
    """Canonically least foldable germ pair: least vertex, least first letter."""
    for vertex in sorted(graph.vertices):
        by_letter: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
        for germ in sorted(graph.germs_at(vertex)):
            w = graph.germ_word(*germ)
            d = w[0]
            by_letter.setdefault((abs(d), 0 if d > 0 else 1), []).append(germ)
        for key in sorted(by_letter):
            group = by_letter[key]
            if len(group) >= 2:
                return vertex, group[0], group[1]
    return None


def _mcp(a: Path, b: Path) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


def _substitute(path: Path, old: int, new_signed: int) -> Path:
    return tuple(
        d if abs(d) != old else (new_signed if d > 0 else -new_signed) for d in path
    )


def stallings_decomposition(g: RoseMap, granularity: str = "maximal") -> FoldSequence:
    """Greedy folding of the labeled rose down to a homeomorphism.

    granularity "maximal" folds maximal common initial label segments;
    "single" folds one letter at a time (then the fold count is exactly
    norm(g) - rank).  Raises NotHomotopyEquivalenceError when the terminal
    immersion is not a graph homeomorphism (the input was not a homotopy
    equivalence).
    """
    if granularity not in ("maximal", "single"):
        raise ValueError("granularity must be 'maximal' or 'single'")
    single = granularity == "single"
    graph = _Graph(g.rank, g.images)
    steps: List[FoldStep] = []
    edge_maps: List[Dict[int, Path]] = []
    edge_lists: List[Tuple[int, ...]] = [tuple(sorted(graph.edges))]
    vertex_counts: List[int] = [len(graph.vertices)]
    snapshots: List[Dict[int, Tuple[int, int, Path]]] = [dict(graph.edges)]

    guard = 0
    while True:
        found = _find_fold(graph)
        if found is None:
            break
        guard += 1
        if guard > 4 * g.norm() + 16:
            raise RuntimeError("fold loop failed to terminate")
        vertex, germ1, germ2 = found
        fmap: Dict[int, Path] = {}

        if germ1[0] == germ2[0]:
            # both germs of a single loop edge: fold the edge onto itself
            eid = germ1[0]
            label = graph.edges[eid][2]
            m = min(_mcp(label, reverse_path(label)), len(label) // 2)
            if single:
                m = min(m, 1)
            if m == 0:
                raise NotHomotopyEquivalenceError(
                    "self-fold with empty admissible segment"
                )
            segment = label[:m]
            (a, b), s1 = graph.subdivide(eid, m)
            rest = graph.edges[b][2]
            if len(rest) > m:
                (c, d), s2 = graph.subdivide(b, len(rest) - m)
                fmap[eid] = (a, c, d)
                first_seg, last_seg, far1, far2 = a, d, s1, s2
            else:
                fmap[eid] = (a, b)
                first_seg, last_seg, far1, far2 = a, b, s1, s1
            # last_seg runs far2 -> vertex; identified with first_seg reversed
            fmap[last_seg] = (-first_seg,)
            fmap = {
                k: _substitute(p, last_seg, -first_seg) if k != last_seg else p
                for k, p in fmap.items()
            }
            del graph.edges[last_seg]
            if far1 != far2:
                graph.merge_vertices(min(far1, far2), max(far1, far2))
        else:
            w1 = graph.germ_word(*germ1)
            w2 = graph.germ_word(*germ2)
            m = 1 if single else _mcp(w1, w2)
            segment = w1[:m]
            segs = []
            fars = []
            for (eid, end), w in ((germ1, w1), (germ2, w2)):
                u, v, label = graph.edges[eid]
                if m == len(w):
                    segs.append((eid, end))
                    fars.append(u if end == 1 else v)
                elif end == 0:
                    (a, b), s = graph.subdivide(eid, m)
                    fmap[eid] = (a, b)
                    segs.append((a, 0))
                    fars.append(s)
                else:
                    (a, b), s = graph.subdivide(eid, len(label) - m)
                    fmap[eid] = (a, b)
                    segs.append((b, 1))
                    fars.append(s)
            (e1s, side1), (e2s, side2) = segs
            # in stored orientations the identified edges agree up to the
            # relative germ sides: equal sides preserve orientation
            target = e1s if side1 == side2 else -e1s
            fmap[e2s] = (target,)
            fmap = {
                k: _substitute(p, e2s, target) if k != e2s else p
                for k, p in fmap.items()
            }
            del graph.edges[e2s]
            graph.merge_vertices(min(fars), max(fars))

        steps.append(FoldStep(vertex, germ1, germ2, segment))
        edge_maps.append(fmap)
        edge_lists.append(tuple(sorted(graph.edges)))
        vertex_counts.append(len(graph.vertices))
        snapshots.append(dict(graph.edges))

    # terminal immersion must be a homeomorphism
    final_edges = sorted(graph.edges)
    if len(graph.vertices) != 1 or len(final_edges) != g.rank:
        raise NotHomotopyEquivalenceError(
            f"immersion has {len(graph.vertices)} vertices and "
            f"{len(final_edges)} edges; expected a rank-{g.rank} rose"
        )
    final_labels: Dict[int, int] = {}
    for eid in final_edges:
        label = graph.edges[eid][2]
        if len(label) != 1:
            raise NotHomotopyEquivalenceError(
                f"terminal edge {eid} has label of length {len(label)}"
            )
        final_labels[eid] = label[0]
    if {abs(x) for x in final_labels.values()} != set(range(1, g.rank + 1)):
        raise NotHomotopyEquivalenceError("terminal labels are not a signed permutation")

    rose_indices = [k for k, n in enumerate(vertex_counts) if n == 1]
    return FoldSequence(
        rank=g.rank,
        steps=steps,
        final_perm=tuple(final_labels[eid] for eid in final_edges),
        rose_indices=rose_indices,
        edge_maps=edge_maps,
        edge_lists=edge_lists,
        vertex_counts=vertex_counts,
        final_labels=final_labels,
        snapshots=snapshots,
    )


def _apply_edge_map(path: Path, fmap: Dict[int, Path]) -> Path:
    out: List[int] = []
    for d in path:
        repl = fmap.get(abs(d))
        if repl is None:
            out.append(d)
        else:
            out.extend(repl if d > 0 else reverse_path(repl))
    return tuple(out)


def _forward_composites(seq: FoldSequence):
    """P_k: original petal -> path in Gamma_k, for every index k."""
    comp = {i: (i,) for i in range(1, seq.rank + 1)}
    out = [dict(comp)]
    for fmap in seq.edge_maps:
        comp = {i: _apply_edge_map(p, fmap) for i, p in comp.items()}
        out.append(dict(comp))
    return out


def _backward_composites(seq: FoldSequence):
    """S_k: edge of Gamma_k -> path in Gamma_N, for every index k."""
    n = len(seq.edge_maps)
    comp = {eid: (eid,) for eid in seq.edge_lists[n]}
    out = [None] * (n + 1)
    out[n] = dict(comp)
    for k in range(n - 1, -1, -1):
        fmap = seq.edge_maps[k]
        prev = {}
        for eid in seq.edge_lists[k]:
            image = fmap.get(eid, (eid,))
            expanded: List[int] = []
            for d in image:
                rep = out[k + 1][abs(d)]
                expanded.extend(rep if d > 0 else reverse_path(rep))
            prev[eid] = tuple(expanded)
        out[k] = prev
    return out


def replay(g: RoseMap, seq: FoldSequence) -> bool:
    """Composite of the fold maps followed by the final homeomorphism must
    reproduce g's edge images exactly."""
    forward = _forward_composites(seq)[-1]
    for i in range(1, g.rank + 1):
        letters = []
        for d in forward[i]:
            lab = seq.final_labels[abs(d)]
            letters.append(lab if d > 0 else -lab)
        if tuple(letters) != g.images[i - 1]:
            return False
    return True


def first_return_maps(seq: FoldSequence) -> List[RoseMap]:
    """The rose self-map read off at each rose index of the fold line.

    At index k the map is (folds up to k) o (final homeomorphism) o
    (folds after k), expressed on Gamma_k's edges in sorted order.
    """
    forward = _forward_composites(seq)
    backward = _backward_composites(seq)
    out = []
    n = len(seq.edge_maps)
    for k in seq.rose_indices:
        if k == n:
            continue  # the terminal rose repeats the initial one
        edges = seq.edge_lists[k]
        pos = {eid: i + 1 for i, eid in enumerate(edges)}
        images = []
        for eid in edges:
            target_letters = []
            for d in backward[k][eid]:
                lab = seq.final_labels[abs(d)]
                target_letters.append(lab if d > 0 else -lab)
            path: List[int] = []
            for t in target_letters:
                rep = forward[k][abs(t)]
                path.extend(rep if t > 0 else reverse_path(rep))
            translated = tuple(
                pos[abs(d)] if d > 0 else -pos[abs(d)] for d in path
            )
            if not is_tight(translated):
                raise RuntimeError("first-return image is not tight")
            images.append(translated)
        out.append(RoseMap(seq.rank, images))
    return out


def fold_count_report(g: RoseMap) -> dict:
    """Measure the fold count under both granularity conventions.

    `realized_by` names the convention whose count equals norm(g)/2, or None
    when neither realizes it (necessarily so whenever norm(g) is odd).
    """
    norm = g.norm()
    counts = {
        "maximal": stallings_decomposition(g, "maximal").fold_count(),
        "single": stallings_decomposition(g, "single").fold_count(),
    }
    realized = None
    for name, c in counts.items():
        if 2 * c == norm:
            realized = name
            break
    return {
        "norm": norm,
        "half_norm": norm / 2,
        "maximal_folds": counts["maximal"],
        "single_letter_folds": counts["single"],
        "realized_by": realized,
    }


def unmarked_representatives(g: RoseMap, lone_axis_certificate) -> Set[UnmarkedRep]:
    """U(phi) for a certified lone-axis map: canonical forms of the first
    returns at the rose points of one fold-line period."""
    if lone_axis_certificate is None or not getattr(
        lone_axis_certificate, "lone_axis", False
    ):
        raise ValueError(
            "unmarked_representatives needs a lone-axis certificate; "
            "without it the fold line is not unique and U would be undercounted"
        )
    seq = stallings_decomposition(g)
    return {canonical_form(m) for m in first_return_maps(seq)}

"""Self-maps of the r-rose given by edge images.

A RoseMap sends each petal e_i to a nonempty tight edge path and extends to
reversed edges by g(e-bar) = g(e)-bar.  These are the combinatorial graph
maps underlying everything else: composition, induced direction maps,
transition matrices, and the train track / expanding / irreducible
predicates.

Map file format (UTF-8 text): line 1 is "rank: <r>", then one line per
positive edge, "<letter> -> <path>", letters as in :mod:`ttrose.words`.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .words import (
    Path,
    Turn,
    direction_str,
    directions,
    is_tight,
    make_turn,
    parse_path,
    path_str,
    reverse_path,
    tighten,
    turns_of,
)

Matrix = Tuple[Tuple[int, ...], ...]


class MapParseError(ValueError):
    """Raised when a map file is malformed; message names the offending line."""


class RoseMap:
    """A graph self-map of the rank-r rose, given by the images of e_1..e_r."""

    __slots__ = ("rank", "images", "_dirmap")

    def __init__(self, rank: int, images):
        if rank < 2:
            raise ValueError(f"rank must be >= 2, got {rank}")
        images = tuple(tuple(im) for im in images)
        if len(images) != rank:
            raise ValueError(f"expected {rank} images, got {len(images)}")
        for i, im in enumerate(images):
            if not im:
                raise ValueError(f"image of {direction_str(i + 1)} is empty")
            for d in im:
                if d == 0 or abs(d) > rank:
                    raise ValueError(
                        f"image of {direction_str(i + 1)} uses letter outside rank {rank}"
                    )
            if not is_tight(im):
                raise ValueError(f"image of {direction_str(i + 1)} is not tight")
        self.rank = rank
        self.images = images
        self._dirmap: Optional[Dict[int, int]] = None

    @classmethod
    def identity(cls, rank: int) -> "RoseMap":
        return cls(rank, tuple((i,) for i in range(1, rank + 1)))

    def image_of(self, d: int) -> Path:
        """Image of an oriented edge (signed letter)."""
        if d > 0:
            return self.images[d - 1]
        return reverse_path(self.images[-d - 1])

    def apply_to_path(self, p: Path) -> Path:
        """Image of a path, applied letterwise and tightened."""
        out: List[int] = []
        images = self.images
        for d in p:
            im = images[d - 1] if d > 0 else reverse_path(images[-d - 1])
            for x in im:
                if out and out[-1] == -x:
                    out.pop()
                else:
                    out.append(x)
        return tuple(out)

    def direction_map(self) -> Dict[int, int]:
        """The induced map on the 2r directions: d -> first letter of g(d)."""
        if self._dirmap is None:
            dm = {}
            for i, im in enumerate(self.images):
                dm[i + 1] = im[0]
                dm[-(i + 1)] = -im[-1]
            self._dirmap = dm
        return self._dirmap

    def map_turn(self, t: Turn) -> Turn:
        dm = self.direction_map()
        return make_turn(dm[t[0]], dm[t[1]])

    def transition_matrix(self) -> Matrix:
        """m_ij = number of times g(e_i) traverses e_j in either direction."""
        rows = []
        for im in self.images:
            row = [0] * self.rank
            for d in im:
                row[abs(d) - 1] += 1
            rows.append(tuple(row))
        return tuple(rows)

    def norm(self) -> int:
        """Sum of image lengths; equals the total of all matrix entries."""
        return sum(len(im) for im in self.images)

    def is_positive(self) -> bool:
        return all(d > 0 for im in self.images for d in im)

    def is_permutation(self) -> bool:
        """True iff the map is a simplicial homeomorphism of the rose."""
        if any(len(im) != 1 for im in self.images):
            return False
        seen = {abs(im[0]) for im in self.images}
        return len(seen) == self.rank

    def is_train_track(self) -> Tuple[bool, Optional[Tuple[Turn, int]]]:
        """Local injectivity of all iterates on edge interiors.

        Decided on the finite closure of the taken-turn set under the
        direction map.  On failure returns a witness: a taken turn together
        with the number of direction-map iterates after which it degenerates.
        """
        dm = self.direction_map()
        frontier = [(t, t, 0) for t in self.taken_turns()]
        seen = set(t for t, _, _ in frontier)
        while frontier:
            nxt = []
            for t, origin, k in frontier:
                img = make_turn(dm[t[0]], dm[t[1]])
                if img[0] == img[1]:
                    return False, (origin, k + 1)
                if img not in seen:
                    seen.add(img)
                    nxt.append((img, origin, k + 1))
            frontier = nxt
        return True, None

    def taken_turns(self) -> frozenset:
        """Turns crossed by some edge image."""
        out = set()
        for im in self.images:
            out |= turns_of(im)
        return frozenset(out)

    def is_expanding(self) -> bool:
        """|g^n(e)| -> infinity for every edge.

        Fails exactly when some edge's forward orbit stays forever inside the
        set of edges with single-letter images.
        """
        single = {i + 1 for i, im in enumerate(self.images) if len(im) == 1}
        for start in single:
            e, seen = start, set()
            while e in single:
                if e in seen:
                    return False
                seen.add(e)
                e = abs(self.images[e - 1][0])
        return True

    def is_irreducible(self) -> bool:
        """No proper invariant subgraph with a noncontractible component.

        On the rose this is strong connectivity of the digraph with an arc
        i -> j whenever g(e_i) traverses e_j.
        """
        r = self.rank
        adj = [set(abs(d) - 1 for d in im) for im in self.images]
        radj = [set() for _ in range(r)]
        for i in range(r):
            for j in adj[i]:
                radj[j].add(i)

        def reach(adjacency):
            seen = {0}
            stack = [0]
            while stack:
                u = stack.pop()
                for v in adjacency[u]:
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
            return seen

        return len(reach(adj)) == r and len(reach(radj)) == r

    def serialize(self) -> str:
        lines = [f"rank: {self.rank}"]
        for i, im in enumerate(self.images):
            lines.append(f"{path_str((i + 1,))} -> {path_str(im)}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        return (
            isinstance(other, RoseMap)
            and self.rank == other.rank
            and self.images == other.images
        )

    def __hash__(self):
        return hash((self.rank, self.images))

    def __repr__(self):
        ims = ", ".join(
            f"{direction_str(i + 1)}->{path_str(im)}" for i, im in enumerate(self.images)
        )
        return f"RoseMap(rank={self.rank}, {ims})"


def parse_map(text: str) -> RoseMap:
    """Parse the map file format; errors name the offending line."""
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise MapParseError("empty map file")
    head = lines[0].replace(" ", "")
    if not head.startswith("rank:"):
        raise MapParseError(f"line 1: expected 'rank: <r>', got {lines[0]!r}")
    try:
        rank = int(head[len("rank:"):])
    except ValueError:
        raise MapParseError(f"line 1: bad rank in {lines[0]!r}") from None
    if rank < 2:
        raise MapParseError(f"line 1: rank must be >= 2, got {rank}")
    images: List[Optional[Path]] = [None] * rank
    for lineno, ln in enumerate(lines[1:], start=2):
        if "->" not in ln:
            raise MapParseError(f"line {lineno}: expected '<letter> -> <path>'")
        lhs, rhs = (part.strip() for part in ln.split("->", 1))
        try:
            src = parse_path(lhs, rank)
        except ValueError as exc:
            raise MapParseError(f"line {lineno}: {exc}") from None
        if len(src) != 1 or src[0] < 0:
            raise MapParseError(f"line {lineno}: left side must be a single positive edge")
        if images[src[0] - 1] is not None:
            raise MapParseError(f"line {lineno}: duplicate image for {lhs}")
        try:
            img = parse_path(rhs, rank)
        except ValueError as exc:
            raise MapParseError(f"line {lineno}: {exc}") from None
        if not img:
            raise MapParseError(f"line {lineno}: empty image")
        if not is_tight(img):
            raise MapParseError(f"line {lineno}: image {rhs!r} is not tight")
        images[src[0] - 1] = img
    for i, im in enumerate(images):
        if im is None:
            raise MapParseError(f"missing image for edge {direction_str(i + 1)}")
    return RoseMap(rank, images)


def compose(g: RoseMap, h: RoseMap) -> RoseMap:
    """g after h: compose(g, h)(e) = g(h(e)), h applied first."""
    if g.rank != h.rank:
        raise ValueError(f"rank mismatch: {g.rank} != {h.rank}")
    return RoseMap(g.rank, tuple(g.apply_to_path(im) for im in h.images))


def compose_all(maps) -> RoseMap:
    """Composition applying the first map of the sequence first."""
    maps = list(maps)
    if not maps:
        raise ValueError("empty composition")
    out = maps[0]
    for m in maps[1:]:
        out = compose(m, out)
    return out


def power(g: RoseMap, n: int) -> RoseMap:
    if n < 1:
        raise ValueError("power must be >= 1")
    out = g
    for _ in range(n - 1):
        out = compose(g, out)
    return out


def matmul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )

"""Taken-turn sets, turn legality, and Whitehead graphs on the rose.

The local Whitehead graph LW(g) has one vertex per direction and an edge for
every turn in the closure T_inf of the taken-turn set under the direction
map.  The stable graph SW(g) is induced on the periodic directions, and the
ideal graph IW is SW together with a certificate that the map carries no
periodic Nielsen paths (without which SW does not compute an outer
automorphism invariant).  The rotationless index read off IW is 1 - k/2 for
k vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Sequence, Set, Tuple

from .rosemap import RoseMap
from .words import Turn, directions, make_turn, turn_str

__all__ = [
    "taken_turns",
    "t_infinity",
    "combined_taken_turns",
    "is_legal",
    "illegal_turns",
    "prenull_turns",
    "periodic_directions",
    "WhiteheadGraph",
    "local_whitehead_graph",
    "stable_whitehead_graph",
    "ideal_whitehead_graph",
    "rotationless_index",
]


def taken_turns(g: RoseMap) -> frozenset:
    return g.taken_turns()


def t_infinity(g: RoseMap) -> frozenset:
    """Union of taken turns over all iterates of g.

    Computed as the least fixed point of S -> T(g) | Dg(S); terminates since
    the turn universe is finite.  Requires g to be a train track map so that
    no degenerate image turns appear.
    """
    ok, witness = g.is_train_track()
    if not ok:
        raise ValueError(f"not a train track map; degenerate witness {witness}")
    seen: Set[Turn] = set(g.taken_turns())
    frontier = list(seen)
    while frontier:
        nxt = []
        for t in frontier:
            img = g.map_turn(t)
            if img not in seen:
                seen.add(img)
                nxt.append(img)
        frontier = nxt
    return frozenset(seen)


def combined_taken_turns(factors: Sequence[RoseMap]) -> frozenset:
    """Taken turns of h_n o ... o h_1 via per-factor turn sets.

    T(h_n) together with the images of each T(h_k) under the direction map of
    the later factors.  Requires every factor positive, which guarantees the
    tightness hypothesis (no cancellation between consecutive factor images).

    Each level's turn set is restricted to turns taken inside the images of
    petals actually traversed by the earlier factors; without that
    restriction the union overcounts whenever some petal never occurs in a
    partial composite's images (for surjective-on-edges factor families the
    restriction is vacuous).
    """
    factors = list(factors)
    if not factors:
        raise ValueError("empty factor list")
    for f in factors:
        if not f.is_positive():
            raise ValueError("combined_taken_turns requires positive factors")
    n = len(factors)
    rank = factors[0].rank
    # reachable[k] = petals occurring in the images of h_k o ... o h_1
    reachable = set(range(1, rank + 1))
    reachable_at = [set(reachable)]
    for f in factors:
        reachable = {
            abs(d) for e in reachable for d in f.images[e - 1]
        }
        reachable_at.append(set(reachable))

    def level_turns(k: int) -> Set[Turn]:
        # turns taken by h_{k+1} within images of petals reachable so far
        out: Set[Turn] = set()
        f = factors[k]
        for e in reachable_at[k]:
            im = f.images[e - 1]
            for i in range(len(im) - 1):
                out.add(make_turn(-im[i], im[i + 1]))
        return out

    out: Set[Turn] = level_turns(n - 1)
    # dm = direction map of h_n o ... o h_{k+2}, built from the right
    dm: Dict[int, int] = {d: d for d in directions(rank)}
    for k in range(n - 1, 0, -1):
        later = factors[k].direction_map()
        dm = {d: dm[later[d]] for d in dm}
        for t in level_turns(k - 1):
            out.add(make_turn(dm[t[0]], dm[t[1]]))
    return frozenset(out)


def _turn_orbit_hits_degenerate(g: RoseMap, turn: Turn) -> bool:
    dm = g.direction_map()
    seen = set()
    t = turn
    while t not in seen:
        if t[0] == t[1]:
            return True
        seen.add(t)
        t = make_turn(dm[t[0]], dm[t[1]])
    return t[0] == t[1]


def is_legal(turn: Turn, g: RoseMap) -> bool:
    """A turn is illegal when some iterate of the direction map degenerates it."""
    return not _turn_orbit_hits_degenerate(g, turn)


def illegal_turns(g: RoseMap) -> frozenset:
    from .words import all_turns

    return frozenset(
        t for t in all_turns(g.rank) if _turn_orbit_hits_degenerate(g, t)
    )


def prenull_turns(g: RoseMap) -> frozenset:
    """Nondegenerate turns whose two directions share their Dg-image."""
    dm = g.direction_map()
    by_image: Dict[int, list] = {}
    for d in directions(g.rank):
        by_image.setdefault(dm[d], []).append(d)
    out = set()
    for group in by_image.values():
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                out.add(make_turn(group[i], group[j]))
    return frozenset(out)


def periodic_directions(g: RoseMap) -> frozenset:
    """Directions lying on cycles of the direction-map functional graph."""
    dm = g.direction_map()
    out = set()
    for d in directions(g.rank):
        tort, hare = d, dm[d]
        while tort != hare:
            tort = dm[tort]
            hare = dm[dm[hare]]
        # tort is on a cycle; collect it
        cycle = {tort}
        x = dm[tort]
        while x != tort:
            cycle.add(x)
            x = dm[x]
        if d in cycle:
            out.add(d)
    return frozenset(out)


@dataclass(frozen=True)
class WhiteheadGraph:
    """Graph on directions whose edges are (nondegenerate) turns."""

    vertices: Tuple[int, ...]
    edges: FrozenSet[Turn]
    kind: str  # local | stable | ideal

    def __post_init__(self):
        vset = set(self.vertices)
        for t in self.edges:
            if t[0] == t[1]:
                raise ValueError(f"degenerate edge {turn_str(t)}")
            if t[0] not in vset or t[1] not in vset:
                raise ValueError(f"edge {turn_str(t)} leaves the vertex set")

    def adjacency(self) -> Dict[int, Set[int]]:
        adj: Dict[int, Set[int]] = {v: set() for v in self.vertices}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def components(self):
        adj = self.adjacency()
        seen: Set[int] = set()
        comps = []
        for v in self.vertices:
            if v in seen:
                continue
            comp = {v}
            stack = [v]
            seen.add(v)
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w not in seen:
                        seen.add(w)
                        comp.add(w)
                        stack.append(w)
            comps.append(frozenset(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def cut_vertices(self) -> frozenset:
        """Articulation points, by the standard low-link depth-first search."""
        adj = self.adjacency()
        disc: Dict[int, int] = {}
        low: Dict[int, int] = {}
        out: Set[int] = set()
        counter = [0]

        def visit(root):
            # iterative DFS to avoid recursion limits on large graphs
            stack = [(root, None, iter(adj[root]))]
            disc[root] = low[root] = counter[0]
            counter[0] += 1
            root_children = 0
            while stack:
                v, parent, it = stack[-1]
                advanced = False
                for w in it:
                    if w == parent:
                        continue
                    if w in disc:
                        low[v] = min(low[v], disc[w])
                        continue
                    disc[w] = low[w] = counter[0]
                    counter[0] += 1
                    if v == root:
                        root_children += 1
                    stack.append((w, v, iter(adj[w])))
                    advanced = True
                    break
                if not advanced:
                    stack.pop()
                    if stack:
                        u = stack[-1][0]
                        low[u] = min(low[u], low[v])
                        if u != root and low[v] >= disc[u]:
                            out.add(u)
            if root_children > 1:
                out.add(root)

        for v in self.vertices:
            if v not in disc:
                visit(v)
        return frozenset(out)

    def has_cut_vertex_in_any_component(self) -> bool:
        return bool(self.cut_vertices())

    def to_dict(self):
        from .words import direction_str

        return {
            "kind": self.kind,
            "vertices": [direction_str(v) for v in self.vertices],
            "edges": sorted(
                [direction_str(a), direction_str(b)] for a, b in self.edges
            ),
        }

    def to_dot(self) -> str:
        from .words import direction_str

        lines = [f"graph whitehead_{self.kind} {{"]
        for v in self.vertices:
            lines.append(f'  "{direction_str(v)}";')
        for a, b in sorted(self.edges):
            lines.append(f'  "{direction_str(a)}" -- "{direction_str(b)}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _require_eirtt(g: RoseMap) -> None:
    ok, witness = g.is_train_track()
    if not ok:
        raise ValueError(f"not a train track map (witness {witness})")
    if not g.is_expanding():
        raise ValueError("map is not expanding")
    if not g.is_irreducible():
        raise ValueError("map is not irreducible")


def local_whitehead_graph(g: RoseMap) -> WhiteheadGraph:
    """Vertices all 2r directions; edges the turns of T_inf(g)."""
    _require_eirtt(g)
    return WhiteheadGraph(directions(g.rank), t_infinity(g), "local")


def stable_whitehead_graph(g: RoseMap) -> WhiteheadGraph:
    """LW(g) induced on the periodic directions (isolated vertices kept)."""
    _require_eirtt(g)
    periodic = periodic_directions(g)
    verts = tuple(d for d in directions(g.rank) if d in periodic)
    edges = frozenset(
        t for t in t_infinity(g) if t[0] in periodic and t[1] in periodic
    )
    return WhiteheadGraph(verts, edges, "stable")


def ideal_whitehead_graph(g: RoseMap, pnp_free_certificate) -> WhiteheadGraph:
    """SW(g), promoted to the outer-automorphism invariant by a PNP-free certificate."""
    if pnp_free_certificate is None:
        raise ValueError(
            "ideal Whitehead graph requires a PNP-free certificate; "
            "run the nielsen certifiers first"
        )
    sw = stable_whitehead_graph(g)
    return WhiteheadGraph(sw.vertices, sw.edges, "ideal")


def rotationless_index(graph: WhiteheadGraph) -> Fraction:
    """1 - k/2 for k vertices of an ideal Whitehead graph."""
    return Fraction(1) - Fraction(len(graph.vertices), 2)

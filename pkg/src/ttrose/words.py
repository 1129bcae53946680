"""Oriented edges, edge paths, and turns on the r-petaled rose.

The rose R_r has a single vertex and r petals e_1..e_r.  An oriented edge
(equivalently a direction at the vertex, since the rose has one vertex) is
encoded as a nonzero integer: +i means e_i traversed forward, -i means e_i
reversed.  An edge path is a tuple of such letters; the empty tuple is the
trivial path.

Text encoding: lowercase letters a, b, c, ... stand for e_1, e_2, e_3, ...
forward; the corresponding uppercase letters stand for their reversals.
Paths are whitespace-free strings such as "aCb".
"""

from __future__ import annotations

from typing import Iterable, Tuple

Letter = int
Path = Tuple[int, ...]
Turn = Tuple[int, int]

_ALPHABET = "abcdefghijklmnopqrstuvwxyz"
MAX_RANK = len(_ALPHABET)


def check_letter(d: int, rank: int) -> None:
    if d == 0 or abs(d) > rank:
        raise ValueError(f"letter {d} out of range for rank {rank}")


def parse_path(text: str, rank: int) -> Path:
    """Parse a path string like 'aCb' into a letter tuple."""
    letters = []
    for ch in text:
        low = ch.lower()
        idx = _ALPHABET.find(low)
        if idx < 0 or idx >= rank:
            raise ValueError(f"unknown letter {ch!r} for rank {rank}")
        letters.append(-(idx + 1) if ch.isupper() else idx + 1)
    return tuple(letters)


def path_str(p: Iterable[int]) -> str:
    out = []
    for d in p:
        ch = _ALPHABET[abs(d) - 1]
        out.append(ch.upper() if d < 0 else ch)
    return "".join(out)


def reverse_path(p: Path) -> Path:
    """Reverse orientation: letters reversed and each flipped."""
    return tuple(-d for d in reversed(p))


def tighten(p: Path) -> Path:
    """Free reduction: delete adjacent (e, e-bar) pairs until none remain.

    The result is independent of deletion order (confluence of free
    reduction), so a single left-to-right stack pass suffices.
    """
    stack: list[int] = []
    for d in p:
        if stack and stack[-1] == -d:
            stack.pop()
        else:
            stack.append(d)
    return tuple(stack)


def is_tight(p: Path) -> bool:
    return all(p[i + 1] != -p[i] for i in range(len(p) - 1))


def _turn_key(d: int) -> Tuple[int, int]:
    # lexicographic on (petal index, orientation); forward before reverse
    return (abs(d), 0 if d > 0 else 1)


def make_turn(d1: int, d2: int) -> Turn:
    """Canonical unordered pair of directions."""
    if _turn_key(d1) <= _turn_key(d2):
        return (d1, d2)
    return (d2, d1)


def is_degenerate(t: Turn) -> bool:
    return t[0] == t[1]


def turns_of(p: Path) -> frozenset:
    """Turns taken by a tight path: {e_i-bar, e_{i+1}} at each interior vertex.

    A path of length < 2 takes no turns.
    """
    return frozenset(make_turn(-p[i], p[i + 1]) for i in range(len(p) - 1))


def all_turns(rank: int, include_degenerate: bool = False):
    """Every canonical turn on the rank-r rose (2r choose 2, plus 2r degenerate)."""
    dirs = directions(rank)
    out = []
    for i, d1 in enumerate(dirs):
        start = i if include_degenerate else i + 1
        for d2 in dirs[start:]:
            out.append(make_turn(d1, d2))
    return out


def directions(rank: int) -> Tuple[int, ...]:
    """The 2r directions in canonical order x_1, x_1-bar, x_2, ..."""
    out = []
    for i in range(1, rank + 1):
        out.append(i)
        out.append(-i)
    return tuple(out)


def direction_str(d: int) -> str:
    return path_str((d,))


def turn_str(t: Turn) -> str:
    return "{%s,%s}" % (direction_str(t[0]), direction_str(t[1]))


def cyclic_equal(p: Path, q: Path) -> bool:
    """Equality of cyclic words (rotation only, no inversion)."""
    if len(p) != len(q):
        return False
    if not p:
        return True
    return any(p[i:] + p[:i] == q for i in range(len(p)))

"""Exact and numeric Perron-Frobenius analysis of nonnegative integer matrices.

Primitivity and characteristic polynomials are decided in exact integer
arithmetic; the PF eigenvalue is bracketed by a Collatz-Wielandt power
iteration carried out over exact integer vectors, so the reported error
bound is certified rather than subject to float drift.  Counting
experiments bucket matrices by exact identity (entries, characteristic
polynomial), never by floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Sequence, Tuple

Matrix = Tuple[Tuple[int, ...], ...]

POWER_ITERATION_CAP = 10**6
DEFAULT_TOL = 1e-12

# primitivity fast path switches to cycle-gcd above this dimension
_WIELANDT_MAX_DIM = 8


class NotPrimitiveError(ValueError):
    """Raised when an operation requiring a primitive matrix gets a non-primitive one."""


class ConvergenceError(RuntimeError):
    """Power iteration failed to close the bracket within the iteration cap."""


@dataclass(frozen=True)
class SpectralResult:
    """PF eigenvalue with a certified bracket and the right eigenvector.

    `error` bounds |lam - true PF eigenvalue|; the eigenvector is
    normalized to sum 1 and is entrywise positive for primitive input.
    """

    lam: float
    error: float
    eigenvector: Tuple[float, ...]
    iterations: int


def as_matrix(rows) -> Matrix:
    m = tuple(tuple(int(x) for x in row) for row in rows)
    k = len(m)
    for row in m:
        if len(row) != k:
            raise ValueError("matrix must be square")
        if any(x < 0 for x in row):
            raise ValueError("matrix entries must be nonnegative")
    return m


def max_row_sum(m: Matrix) -> int:
    return max(sum(row) for row in m)


def min_row_sum(m: Matrix) -> int:
    return min(sum(row) for row in m)


def _bool_mul(a, b, k):
    return [
        [any(a[i][t] and b[t][j] for t in range(k)) for j in range(k)]
        for i in range(k)
    ]


def _is_primitive_wielandt(m: Matrix) -> bool:
    # M^((k-1)^2 + 1) > 0, computed as boolean reachability (entry clamping)
    k = len(m)
    target = (k - 1) ** 2 + 1
    base = [[bool(x) for x in row] for row in m]
    acc = None
    power = base
    n = target
    while n:
        if n & 1:
            acc = power if acc is None else _bool_mul(acc, power, k)
        n >>= 1
        if n:
            power = _bool_mul(power, power, k)
    return all(all(row) for row in acc)


def _is_primitive_cycle_gcd(m: Matrix) -> bool:
    # strong connectivity plus gcd 1 of cycle lengths (via BFS levels)
    k = len(m)
    adj = [[j for j in range(k) if m[i][j]] for i in range(k)]
    radj = [[i for i in range(k) if m[i][j]] for j in range(k)]

    def reach(a):
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in a[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    if len(reach(adj)) != k or len(reach(radj)) != k:
        return False
    dist = [-1] * k
    dist[0] = 0
    queue = [0]
    while queue:
        u = queue.pop(0)
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    g = 0
    for u in range(k):
        for v in adj[u]:
            g = gcd(g, dist[u] + 1 - dist[v])
    return g == 1


def is_primitive(m: Matrix) -> bool:
    """Some power of M is entrywise positive."""
    m = as_matrix(m)
    if len(m) <= _WIELANDT_MAX_DIM:
        return _is_primitive_wielandt(m)
    return _is_primitive_cycle_gcd(m)


def pf_eigenvalue(m: Matrix, tol: float = DEFAULT_TOL) -> SpectralResult:
    """PF eigenvalue by power iteration with Collatz-Wielandt bracketing.

    The iterate vector is kept as exact integers, so the min/max Rayleigh
    ratios are exact rationals and the returned bracket is certified.
    """
    m = as_matrix(m)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not is_primitive(m):
        raise NotPrimitiveError(
            "matrix is not primitive; check with is_primitive before calling"
        )
    k = len(m)
    v = [1] * k
    tol_frac = Fraction(tol).limit_denominator(10**18) if tol < 1 else Fraction(tol)
    lo = Fraction(0)
    hi = Fraction(max_row_sum(m))
    iterations = 0
    while iterations < POWER_ITERATION_CAP:
        w = [sum(m[i][j] * v[j] for j in range(k)) for i in range(k)]
        iterations += 1
        ratios = [Fraction(w[i], v[i]) for i in range(k)]
        lo = max(lo, min(ratios))
        hi = min(hi, max(ratios))
        if hi - lo <= tol_frac:
            break
        g = gcd(*w) if k > 1 else w[0]
        v = [x // g for x in w] if g > 1 else w
    else:
        raise ConvergenceError(
            f"bracket [{float(lo)}, {float(hi)}] not within {tol} "
            f"after {POWER_ITERATION_CAP} iterations"
        )
    mid = (lo + hi) / 2
    total = sum(v)
    vec = tuple(float(Fraction(x, total)) for x in v)
    return SpectralResult(
        lam=float(mid),
        error=float((hi - lo) / 2),
        eigenvector=vec,
        iterations=iterations,
    )


def _poly_mul(a: List[int], b: List[int]) -> List[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_add(a: List[int], b: List[int]) -> List[int]:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def char_poly(m: Matrix) -> Tuple[int, ...]:
    """Coefficients of det(xI - M), ascending degree, exact integers.

    Computed by Laplace expansion over column subsets (bitmask memo), which
    is exact and comfortably fast for the dimensions arising here (k <= 12).
    """
    m = as_matrix(m)
    k = len(m)
    if k == 0:
        return (1,)
    # entries of xI - M as integer polynomials in x
    ent = [
        [([-m[i][j], 1] if i == j else [-m[i][j]]) for j in range(k)]
        for i in range(k)
    ]
    memo = {}

    def det(cols: int, row: int) -> List[int]:
        if cols == 0:
            return [1]
        if (cols, row) in memo:
            return memo[(cols, row)]
        total: List[int] = [0]
        sign = 1
        for j in range(k):
            bit = 1 << j
            if cols & bit:
                sub = det(cols & ~bit, row + 1)
                term = _poly_mul(ent[row][j], sub)
                if sign < 0:
                    term = [-c for c in term]
                total = _poly_add(total, term)
                sign = -sign
        memo[(cols, row)] = total
        return total

    poly = det((1 << k) - 1, 0)
    poly = poly + [0] * (k + 1 - len(poly))
    return tuple(poly)


def _poly_eval(coeffs: Sequence[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def pf_root_oracle(m: Matrix, tol: float = DEFAULT_TOL) -> float:
    """Largest real root of char_poly(M) by exact-sign bisection.

    Independent of pf_eigenvalue: used in tests to validate it.  The root
    lies in [1, max row sum] for a primitive integer matrix.
    """
    m = as_matrix(m)
    coeffs = char_poly(m)
    hi = Fraction(max_row_sum(m)) + 1
    # walk down in half-integer steps to the first sign change from +
    step = Fraction(1, 2)
    x = hi
    while x > 0:
        val = _poly_eval(coeffs, x - step)
        if val == 0:
            # exact root; it is the largest since the polynomial is positive above
            return float(x - step)
        if val < 0:
            break
        x -= step
    else:
        raise ValueError("no sign change located; is the matrix primitive?")
    lo_b, hi_b = x - step, x
    tol_frac = Fraction(tol).limit_denominator(10**18)
    while hi_b - lo_b > tol_frac:
        mid = (lo_b + hi_b) / 2
        if _poly_eval(coeffs, mid) < 0:
            lo_b = mid
        else:
            hi_b = mid
    return float((lo_b + hi_b) / 2)

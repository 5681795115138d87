"""Exact Smith normal form over Euclidean domains.

Matrices are plain lists of rows.  The integer routines are the workhorse of
the whole package; the generic routine also runs over univariate polynomial
rings over a field (see :class:`antiloc.rings.PolyDomain`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Sequence

Matrix = list[list[Any]]


class BackendUnavailable(RuntimeError):
    """Raised when a ring/module backend cannot perform an operation exactly."""


def identity(n: int, one: Any = 1, zero: Any = 0) -> Matrix:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def zeros(m: int, n: int, zero: Any = 0) -> Matrix:
    return [[zero] * n for _ in range(m)]


def transpose(a: Matrix, ncols: int | None = None) -> Matrix:
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*a)]


def matmul(a: Matrix, b: Matrix, inner: int | None = None) -> Matrix:
    """Integer matrix product; ``inner`` fixes the shape when a or b is empty."""
    m = len(a)
    n = len(b[0]) if b else 0
    k = len(b) if b else (inner or 0)
    out = [[0] * n for _ in range(m)]
    for i in range(m):
        row = a[i]
        orow = out[i]
        for t in range(k):
            c = row[t]
            if c:
                brow = b[t]
                for j in range(n):
                    orow[j] += c * brow[j]
    return out


def matvec(a: Matrix, v: Sequence[int]) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


@dataclass(frozen=True)
class Smith:
    """Result of :func:`smith_int`: ``U @ A @ V == S`` with ``S`` diagonal.

    ``Uinv`` is the inverse of ``U``; ``rank`` counts nonzero diagonal entries.
    """

    S: Matrix
    U: Matrix
    Uinv: Matrix
    V: Matrix
    diag: tuple
    rank: int


# ---------------------------------------------------------------------------
# Integer SNF (fast path, plain ints)
# ---------------------------------------------------------------------------


def smith_int(a: Sequence[Sequence[int]], nrows: int | None = None, ncols: int | None = None) -> Smith:
    A = [list(map(int, r)) for r in a]
    m = len(A) if nrows is None else nrows
    n = (len(A[0]) if A else 0) if ncols is None else ncols
    if not A:
        A = [[0] * n for _ in range(m)]
    U = identity(m)
    Uinv = identity(m)
    V = identity(n)

    def swap_rows(i: int, j: int) -> None:
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for row in Uinv:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i: int, j: int) -> None:
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, q: int) -> None:
        # row_dst += q * row_src
        if q == 0:
            return
        ra, rs = A[dst], A[src]
        for k in range(n):
            if rs[k]:
                ra[k] += q * rs[k]
        ua, us = U[dst], U[src]
        for k in range(m):
            if us[k]:
                ua[k] += q * us[k]
        for row in Uinv:
            if row[dst]:
                row[src] -= q * row[dst]

    def add_col(dst: int, src: int, q: int) -> None:
        if q == 0:
            return
        for row in A:
            if row[src]:
                row[dst] += q * row[src]
        for row in V:
            if row[src]:
                row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero entry in the trailing block
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            swap_rows(pi, t)
        if pj != t:
            swap_cols(pj, t)
        while True:
            done = True
            p = A[t][t]
            for i in range(t + 1, m):
                x = A[i][t]
                if x:
                    q = x // p
                    add_row(i, t, -q)
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                x = A[t][j]
                if x:
                    q = x // p
                    add_col(j, t, -q)
                    if A[t][j]:
                        done = False
            if not done:
                # move the smallest remaining entry of row/col t to the pivot
                best = (abs(A[t][t]), t, t)
                for i in range(t + 1, m):
                    if A[i][t] and abs(A[i][t]) < best[0]:
                        best = (abs(A[i][t]), i, t)
                for j in range(t + 1, n):
                    if A[t][j] and abs(A[t][j]) < best[0]:
                        best = (abs(A[t][j]), t, j)
                _, bi, bj = best
                if bi != t:
                    swap_rows(bi, t)
                if bj != t:
                    swap_cols(bj, t)
                continue
            # divisibility of the trailing block
            bad = None
            for i in range(t + 1, m):
                row = A[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
            for row in Uinv:
                row[t] = -row[t]
        t += 1
    diag = tuple(A[i][i] for i in range(min(m, n)))
    rank = sum(1 for d in diag if d)
    return Smith(A, U, Uinv, V, diag, rank)


def kernel_int(a: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Basis (as column vectors) of the integer kernel ``{x : a x = 0}``."""
    if not a:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    sm = smith_int(a, len(a), ncols)
    return [[sm.V[i][j] for i in range(ncols)] for j in range(sm.rank, ncols)]


def solve_int(a: Sequence[Sequence[int]], b: Sequence[int], ncols: int) -> list[int] | None:
    """Integer solution of ``a x = b`` or ``None``."""
    m = len(b)
    if m == 0:
        return [0] * ncols
    sm = smith_int(a, m, ncols)
    ub = matvec(sm.U, b)
    w = [0] * ncols
    for i in range(m):
        d = sm.diag[i] if i < len(sm.diag) else 0
        if d:
            if ub[i] % d:
                return None
            w[i] = ub[i] // d
        elif ub[i]:
            return None
    return matvec(sm.V, w)


# ---------------------------------------------------------------------------
# Generic Euclidean SNF
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EuclideanOps:
    """Arithmetic needed by :func:`smith_generic`."""

    zero: Any
    one: Any
    add: Callable[[Any, Any], Any]
    sub: Callable[[Any, Any], Any]
    mul: Callable[[Any, Any], Any]
    divmod: Callable[[Any, Any], tuple]
    size: Callable[[Any], int]
    normal_unit: Callable[[Any], tuple]  # a -> (u, u_inv) with u*a canonical
    is_zero: Callable[[Any], bool]


INT_OPS = EuclideanOps(
    zero=0,
    one=1,
    add=lambda a, b: a + b,
    sub=lambda a, b: a - b,
    mul=lambda a, b: a * b,
    divmod=divmod,
    size=abs,
    normal_unit=lambda a: (-1, -1) if a < 0 else (1, 1),
    is_zero=lambda a: a == 0,
)


def smith_generic(a: Sequence[Sequence[Any]], ops: EuclideanOps, nrows: int | None = None,
                  ncols: int | None = None) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(S, U, V)`` with ``U A V = S`` diagonal, ``d_1 | d_2 | ...``."""
    A = [list(r) for r in a]
    m = len(A) if nrows is None else nrows
    n = (len(A[0]) if A else 0) if ncols is None else ncols
    if not A:
        A = zeros(m, n, ops.zero)
    U = identity(m, ops.one, ops.zero)
    V = identity(n, ops.one, ops.zero)
    add, mul, sub = ops.add, ops.mul, ops.sub

    def row_axpy(M: Matrix, dst: int, src: int, q: Any) -> None:
        M[dst] = [add(x, mul(q, y)) for x, y in zip(M[dst], M[src])]

    def col_axpy(M: Matrix, dst: int, src: int, q: Any) -> None:
        for row in M:
            row[dst] = add(row[dst], mul(q, row[src]))

    def swap_r(i: int, j: int) -> None:
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_c(i: int, j: int) -> None:
        for M in (A, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    neg1 = sub(ops.zero, ops.one)
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = A[i][j]
                if not ops.is_zero(x) and (best is None or ops.size(x) < best[0]):
                    best = (ops.size(x), i, j)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            swap_r(pi, t)
        if pj != t:
            swap_c(pj, t)
        while True:
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if not ops.is_zero(A[i][t]):
                    q, _ = ops.divmod(A[i][t], p)
                    mq = mul(neg1, q)
                    row_axpy(A, i, t, mq)
                    row_axpy(U, i, t, mq)
                    if not ops.is_zero(A[i][t]):
                        clean = False
            for j in range(t + 1, n):
                if not ops.is_zero(A[t][j]):
                    q, _ = ops.divmod(A[t][j], p)
                    mq = mul(neg1, q)
                    col_axpy(A, j, t, mq)
                    col_axpy(V, j, t, mq)
                    if not ops.is_zero(A[t][j]):
                        clean = False
            if not clean:
                best = (ops.size(A[t][t]), t, t)
                for i in range(t + 1, m):
                    if not ops.is_zero(A[i][t]) and ops.size(A[i][t]) < best[0]:
                        best = (ops.size(A[i][t]), i, t)
                for j in range(t + 1, n):
                    if not ops.is_zero(A[t][j]) and ops.size(A[t][j]) < best[0]:
                        best = (ops.size(A[t][j]), t, j)
                _, bi, bj = best
                if bi != t:
                    swap_r(bi, t)
                if bj != t:
                    swap_c(bj, t)
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    _, r = ops.divmod(A[i][j], p)
                    if not ops.is_zero(r):
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_axpy(A, t, bad, ops.one)
            row_axpy(U, t, bad, ops.one)
        u, _ = ops.normal_unit(A[t][t])
        A[t] = [mul(u, x) for x in A[t]]
        U[t] = [mul(u, x) for x in U[t]]
        t += 1
    return A, U, V


class IntSolver:
    """Solve ``a x = b`` for many right-hand sides with one Smith decomposition."""

    def __init__(self, a: Sequence[Sequence[int]], nrows: int, ncols: int):
        self.m, self.n = nrows, ncols
        self.sm = smith_int(a, nrows, ncols) if nrows else None

    def solve(self, b: Sequence[int]) -> list[int] | None:
        if self.m == 0:
            return [0] * self.n
        sm = self.sm
        ub = matvec(sm.U, b)
        w = [0] * self.n
        for i in range(self.m):
            d = sm.diag[i] if i < len(sm.diag) else 0
            if d:
                if ub[i] % d:
                    return None
                w[i] = ub[i] // d
            elif ub[i]:
                return None
        return matvec(sm.V, w)

"""Exact matrix arithmetic over prime fields F_p, p <= 13.

Matrices are immutable tuples of tuples of canonical residues in
[0, p); all routines are total and allocation-light so exhaustive sweeps
over small matrix groups stay fast.
"""

from __future__ import annotations

from typing import Iterable, Sequence

Mat = tuple[tuple[int, ...], ...]

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13)


class PrimeField:
    """The field F_p for a prime p <= 13."""

    def __init__(self, p: int):
        if p not in _SMALL_PRIMES:
            raise ValueError(f"modulus must be a prime <= 13, got {p}")
        self.p = p
        self._inv = [0] + [pow(a, p - 2, p) for a in range(1, p)]

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a prime field")
        return self._inv[a]

    def elements(self) -> range:
        return range(self.p)

    def units(self) -> range:
        return range(1, self.p)

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"


def mat(rows: Iterable[Iterable[int]], p: int) -> Mat:
    return tuple(tuple(x % p for x in row) for row in rows)


def identity(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a: Mat, b: Mat, p: int) -> Mat:
    n = len(a)
    m = len(b[0])
    k = len(b)
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(k)) % p for j in range(m))
        for i in range(n)
    )


def mat_scale(a: Mat, c: int, p: int) -> Mat:
    return tuple(tuple((c * x) % p for x in row) for row in a)


def transpose(a: Mat) -> Mat:
    return tuple(zip(*a))


def det(a: Mat, p: int) -> int:
    n = len(a)
    rows = [list(r) for r in a]
    d = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] % p), None)
        if pivot is None:
            return 0
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            d = -d
        inv = pow(rows[col][col], p - 2, p)
        d = (d * rows[col][col]) % p
        for r in range(col + 1, n):
            f = (rows[r][col] * inv) % p
            if f:
                rows[r] = [(x - f * y) % p for x, y in zip(rows[r], rows[col])]
    return d % p


def mat_inv(a: Mat, p: int) -> Mat:
    n = len(a)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)]
           for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] % p), None)
        if pivot is None:
            raise ZeroDivisionError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = pow(aug[col][col], p - 2, p)
        aug[col] = [(x * inv) % p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(x - f * y) % p for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def rank(a: Sequence[Sequence[int]], p: int) -> int:
    rows = [list(r) for r in a if any(x % p for x in r)]
    rk = 0
    ncols = len(a[0]) if a else 0
    col = 0
    while rows and col < ncols:
        pivot = next((r for r in range(rk, len(rows)) if rows[r][col] % p), None)
        if pivot is None:
            col += 1
            continue
        rows[rk], rows[pivot] = rows[pivot], rows[rk]
        inv = pow(rows[rk][col], p - 2, p)
        for r in range(len(rows)):
            if r != rk and rows[r][col]:
                f = (rows[r][col] * inv) % p
                rows[r] = [(x - f * y) % p for x, y in zip(rows[r], rows[rk])]
        rk += 1
        col += 1
        if rk == len(rows):
            break
    return rk


def is_upper(a: Mat) -> bool:
    n = len(a)
    return all(a[i][j] == 0 for i in range(n) for j in range(i))


def is_lower(a: Mat) -> bool:
    n = len(a)
    return all(a[i][j] == 0 for i in range(n) for j in range(i + 1, n))


def is_diagonal(a: Mat) -> bool:
    return is_upper(a) and is_lower(a)


def is_upper_unitriangular(a: Mat) -> bool:
    return is_upper(a) and all(a[i][i] == 1 for i in range(len(a)))


def is_lower_unitriangular(a: Mat) -> bool:
    return is_lower(a) and all(a[i][i] == 1 for i in range(len(a)))


def special_linear_group(n: int, p: int) -> list[Mat]:
    """All of SL_n(F_p) by brute enumeration (desk scale: n <= 3, p <= 3,
    or n = 2 with p <= 13)."""
    import itertools

    out = []
    for flat in itertools.product(range(p), repeat=n * n):
        m = tuple(flat[i * n:(i + 1) * n] for i in range(n))
        if det(m, p) == 1:
            out.append(m)
    return out


def mulclose(generators: Iterable[Mat], p: int, limit: int = 10 ** 7) -> set[Mat]:
    """Subgroup generated by matrices, by breadth-first closure."""
    gens = list(generators)
    n = len(gens[0])
    seen = {identity(n)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mat_mul(x, g, p)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > limit:
                        raise RuntimeError("closure exceeded limit")
        frontier = nxt
    return seen

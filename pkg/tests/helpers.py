"""Shared test utilities: independent oracles and random generators.

The oracles here deliberately avoid the library code paths they are used to
check (minor expansion for ranks, naive elimination for dimensions, direct
polynomial arithmetic for generating functions).
"""

from fractions import Fraction
from itertools import combinations
import random

from cdgalab.exactlin import QMatrix


def minor_rank(m: QMatrix) -> int:
    """Rank via minor expansion: largest k with a nonzero k x k minor."""
    rows = m.to_rows()
    n, c = m.rows, m.cols

    def det(rs, cs):
        if len(rs) == 1:
            return rows[rs[0]][cs[0]]
        total = Fraction(0)
        r0 = rs[0]
        rest = rs[1:]
        for j, col in enumerate(cs):
            a = rows[r0][col]
            if a:
                sub = det(rest, cs[:j] + cs[j + 1 :])
                total += (-1) ** j * a * sub
        return total

    for k in range(min(n, c), 0, -1):
        for rs in combinations(range(n), k):
            for cs in combinations(range(c), k):
                if det(list(rs), list(cs)) != 0:
                    return k
    return 0


def naive_rank(rows) -> int:
    """Plain Gaussian elimination on a list of Fraction lists."""
    rows = [list(map(Fraction, r)) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for i in range(rank, len(rows)):
            if rows[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [x * inv for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def random_qmatrix(rng: random.Random, rows: int, cols: int, density=0.6, span=6) -> QMatrix:
    entries = {}
    for i in range(rows):
        for j in range(cols):
            if rng.random() < density:
                num = rng.randint(-span, span)
                den = rng.randint(1, 4)
                if num:
                    entries[(i, j)] = Fraction(num, den)
    return QMatrix(rows, cols, entries)


def poly_series_coefficient(degrees_even, degrees_odd, n: int) -> int:
    """Coefficient of q^n in prod 1/(1-q^d) * prod (1+q^d).

    Computed by plain truncated integer polynomial arithmetic.
    """
    series = [0] * (n + 1)
    series[0] = 1
    for d in degrees_even:
        # multiply by 1/(1-q^d): cumulative sums with stride d
        for i in range(d, n + 1):
            series[i] += series[i - d]
    for d in degrees_odd:
        new = series[:]
        for i in range(d, n + 1):
            new[i] += series[i - d]
        series = new
    return series[n]

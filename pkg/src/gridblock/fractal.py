"""Self-similar sets built from certified patterns: iteration, the integer
lattice check that keeps doubled sums away from a dense point family, the
open set condition, and dimension/order lifting constructions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, List, Optional, Tuple

from .certify import AvoidanceWitness, Pattern
from .geometry import CellSet


@dataclass(frozen=True)
class IfsSystem:
    """Maps x -> (x + t)/n for a set of distinct integer translations t."""

    d: int
    n: int
    maps: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(set(self.maps)) != len(self.maps):
            raise ValueError("duplicate translation in IFS")
        for t in self.maps:
            if len(t) != self.d or not all(0 <= x < self.n for x in t):
                raise ValueError(f"translation {t} outside grid")

    @property
    def ratio(self) -> Fraction:
        return Fraction(1, self.n)

    @classmethod
    def from_pattern(cls, pattern: Pattern) -> "IfsSystem":
        return cls(d=2, n=pattern.n, maps=tuple(sorted(pattern.cells)))


def iterate_cells(sys: IfsSystem, depth: int, max_cells: int = 2_000_000) -> CellSet:
    """Depth-i approximant as cells at resolution n^i (|maps|^i cells)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if len(sys.maps) ** depth > max_cells:
        raise ValueError("depth too large")
    d, n = sys.d, sys.n
    acc = [(0,) * d]
    for _ in range(depth):
        acc = [
            tuple(a * n + t[k] for k, a in enumerate(cell))
            for cell in acc
            for t in sys.maps
        ]
    out = frozenset(acc)
    if len(out) != len(sys.maps) ** depth:
        raise AssertionError("digit expansions collided")
    return CellSet(d, n ** depth, out)


def open_set_condition(sys: IfsSystem) -> bool:
    """Images of the open unit cube must be pairwise disjoint open boxes."""
    maps = sys.maps
    for a in range(len(maps)):
        for b in range(a + 1, len(maps)):
            if all(maps[a][k] == maps[b][k] for k in range(sys.d)):
                return False
    return True


def _sum_window(alpha_num: int, alpha_den: int, max_sum: int):
    """Integers w with alpha-2 <= w <= alpha (alpha = alpha_num/alpha_den)."""
    lo = -((-(alpha_num - 2 * alpha_den)) // alpha_den)  # ceil(alpha) - 2
    hi = alpha_num // alpha_den  # floor(alpha)
    return [w for w in range(max(0, lo), min(max_sum, hi) + 1)]


def _digit_sum_reachable(tsum: frozenset, w: Tuple[int, int], depth: int, n: int) -> bool:
    """Carry DP: can w be written as s + t with s, t depth-digit expansions?"""
    digits = []
    rest = list(w)
    for _ in range(depth):
        digits.append((rest[0] % n, rest[1] % n))
        rest = [rest[0] // n, rest[1] // n]
    over = tuple(rest)
    if not all(0 <= o <= 1 for o in over):
        return False
    states = {(0, 0)}
    for (w1, w2) in digits:  # least significant first
        nxt = set()
        for (c1, c2) in states:
            for o1 in (0, 1):
                for o2 in (0, 1):
                    need = (w1 - c1 + n * o1, w2 - c2 + n * o2)
                    if need in tsum:
                        nxt.add((o1, o2))
        if not nxt:
            return False
        states = nxt
    return over in states


def lattice_sumset_avoidance(
    sys: IfsSystem, witness: AvoidanceWitness, depth: int
) -> Tuple[bool, Optional[Tuple]]:
    """Pure integer check that the depth-i doubled sums miss every point
    n^(1-j)*(v + Z^2) inside [0,2]^2, for all j <= depth.

    Works through digit expansions: a depth-i cell is a base-n string of
    translations, so membership of a candidate pair-sum is a carry DP over
    the translation sum set.  Returns (ok, offending point or None).
    """
    if sys.d != 2:
        raise ValueError("lattice avoidance check is planar")
    n = sys.n
    if witness.n != n:
        raise ValueError("witness resolution mismatch")
    tsum = frozenset(
        (a[0] + b[0], a[1] + b[1]) for a in sys.maps for b in sys.maps
    )
    big_n = n ** depth
    max_sum = 2 * big_n - 2
    for j in range(1, depth + 1):
        scale = n ** (depth - j)  # alpha = scale*(2p+1+2nz)/2
        windows = []
        zs = []
        for pq in (witness.p, witness.q):
            per = []
            z = -(pq // n) - 2
            while True:
                alpha_num = scale * (2 * pq + 1 + 2 * n * z)
                if alpha_num > 2 * (max_sum + 2):
                    break
                if alpha_num >= -4:
                    per.append((z, alpha_num))
                z += 1
            windows.append(per)
        for (z1, a1) in windows[0]:
            w1s = _sum_window(a1, 2, max_sum)
            if not w1s:
                continue
            for (z2, a2) in windows[1]:
                w2s = _sum_window(a2, 2, max_sum)
                for w1 in w1s:
                    for w2 in w2s:
                        if _digit_sum_reachable(tsum, (w1, w2), depth, n):
                            point = (
                                Fraction(2 * witness.p + 1 + 2 * n * z1, 2 * n)
                                * Fraction(1, n ** (j - 1)),
                                Fraction(2 * witness.q + 1 + 2 * n * z2, 2 * n)
                                * Fraction(1, n ** (j - 1)),
                            )
                            return False, point
    return True, None


def product_lift(k: CellSet) -> CellSet:
    """K x [0,1] at the same resolution: every cell sprouts a full column."""
    n = k.n
    cells = frozenset(t + (s,) for t in k.cells for s in range(n))
    return CellSet(k.d + 1, n, cells, k.sumset_space)


def corner_column_lift(k: CellSet) -> CellSet:
    """Bottom layer K x {0} plus full vertical columns over the 2^d corner
    cells; requires the origin-corner cell to be present."""
    n, d = k.n, k.d
    if (0,) * d not in k.cells:
        raise ValueError("origin cell missing")
    cells = set(t + (0,) for t in k.cells)
    for mask in range(1 << d):
        corner = tuple((n - 1) if (mask >> i) & 1 else 0 for i in range(d))
        for s in range(n):
            cells.add(corner + (s,))
    return CellSet(d + 1, n, frozenset(cells))


def selfsimilar_lift(pattern: Pattern, d: int) -> IfsSystem:
    """Lift the planar system to dimension d; the common ratio 1/n makes the
    extra-coordinate offsets the n-point grid, giving |T|*n^(d-2) maps."""
    if d < 2:
        raise ValueError("target dimension must be >= 2")
    n = pattern.n
    maps: List[Tuple[int, ...]] = [tuple(t) for t in sorted(pattern.cells)]
    for _ in range(d - 2):
        maps = [t + (s,) for t in maps for s in range(n)]
    return IfsSystem(d=d, n=n, maps=tuple(maps))

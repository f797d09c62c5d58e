"""Exact rational geometry of axis-parallel cube grids.

All coordinates are `fractions.Fraction`; nothing here ever touches floats,
so predicates like corner touching and boundary-equality strong intersection
are decided exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

Rational = Fraction
Point = Tuple[Fraction, ...]
Segment = Tuple[Point, Point]


def _frac_vec(v: Sequence) -> Point:
    return tuple(Fraction(x) for x in v)


@dataclass(frozen=True)
class Cell:
    """Grid cube [t_i/n, (t_i+1)/n] per coordinate.

    Cells with indices outside 0..n-1 are allowed only when `outside_ok`
    (sumset work produces them); everything else stays inside the unit cube.
    """

    d: int
    n: int
    t: Tuple[int, ...]
    outside_ok: bool = False

    def __post_init__(self):
        if self.d < 1 or self.n < 1 or len(self.t) != self.d:
            raise ValueError("bad cell parameters")
        if not self.outside_ok and not all(0 <= ti < self.n for ti in self.t):
            raise ValueError(f"cell {self.t} outside unit cube at n={self.n}")

    @property
    def box(self) -> "Box":
        n = self.n
        return Box(
            tuple(Fraction(ti, n) for ti in self.t),
            tuple(Fraction(ti + 1, n) for ti in self.t),
        )


@dataclass(frozen=True)
class CellSet:
    """Finite set of cells sharing a resolution.

    `sumset_space` marks sets that may contain cells outside the unit cube.
    """

    d: int
    n: int
    cells: frozenset
    sumset_space: bool = False

    def __post_init__(self):
        if self.d < 1 or self.n < 1:
            raise ValueError("bad cell set parameters")
        for t in self.cells:
            if len(t) != self.d:
                raise ValueError("cell dimension mismatch")
            if not self.sumset_space and not all(0 <= ti < self.n for ti in t):
                raise ValueError(f"cell {t} outside unit cube at n={self.n}")

    @classmethod
    def of(cls, d: int, n: int, cells: Iterable, sumset_space: bool = False) -> "CellSet":
        return cls(d, n, frozenset(tuple(c) for c in cells), sumset_space)

    def sorted_cells(self):
        return sorted(self.cells)

    def __len__(self):
        return len(self.cells)

    def __contains__(self, t):
        return tuple(t) in self.cells


@dataclass(frozen=True)
class Box:
    """Closed interval product [lo_i, hi_i]."""

    lo: Point
    hi: Point

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("box dimension mismatch")
        if any(l > h for l, h in zip(self.lo, self.hi)):
            raise ValueError("box with lo > hi")

    @property
    def d(self) -> int:
        return len(self.lo)

    def contains(self, p: Sequence) -> bool:
        return all(l <= x <= h for l, x, h in zip(self.lo, _frac_vec(p), self.hi))


@dataclass(frozen=True)
class Line:
    """Line base + t*dir with rational data; dir must be nonzero."""

    base: Point
    dir: Point

    def __post_init__(self):
        object.__setattr__(self, "base", _frac_vec(self.base))
        object.__setattr__(self, "dir", _frac_vec(self.dir))
        if len(self.base) != len(self.dir):
            raise ValueError("line dimension mismatch")
        if all(x == 0 for x in self.dir):
            raise ValueError("line with zero direction")

    @property
    def d(self) -> int:
        return len(self.base)

    def at(self, t) -> Point:
        t = Fraction(t)
        return tuple(b + t * w for b, w in zip(self.base, self.dir))

    def canonical(self) -> tuple:
        """Canonical form shared exactly by lines with equal point sets."""
        # Primitive integer direction with a fixed sign rule.
        dens = [x.denominator for x in self.dir]
        scale = 1
        for q in dens:
            scale = scale * q // _gcd(scale, q)
        iv = [int(x * scale) for x in self.dir]
        g = 0
        for x in iv:
            g = _gcd(g, abs(x))
        iv = [x // g for x in iv]
        for x in iv:
            if x != 0:
                if x < 0:
                    iv = [-y for y in iv]
                break
        # Anchor: orthogonal projection of the origin onto the line.
        num = sum(b * w for b, w in zip(self.base, iv))
        den = sum(w * w for w in iv)
        foot = tuple(b - Fraction(num, den) * w for b, w in zip(self.base, iv))
        return (tuple(iv), foot)

    def same_line(self, other: "Line") -> bool:
        return self.canonical() == other.canonical()


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def cell_box(cell: Cell) -> Box:
    return cell.box


def line_box_clip(line: Line, box: Box) -> Optional[Segment]:
    """Exact clip of a line against a closed box.

    Returns the closed, possibly degenerate segment line ∩ box, or None.
    """
    tlo, thi = None, None  # None = unbounded
    for b, w, lo, hi in zip(line.base, line.dir, box.lo, box.hi):
        if w == 0:
            if not (lo <= b <= hi):
                return None
            continue
        t0 = (lo - b) / w
        t1 = (hi - b) / w
        if t0 > t1:
            t0, t1 = t1, t0
        if tlo is None or t0 > tlo:
            tlo = t0
        if thi is None or t1 < thi:
            thi = t1
    if tlo is None:
        # Direction had no nonzero component: impossible by Line invariant.
        raise AssertionError("degenerate line")
    if tlo > thi:
        return None
    return (line.at(tlo), line.at(thi))


def line_cell_intersection(line: Line, cell: Cell) -> Optional[Segment]:
    return line_box_clip(line, cell.box)


def diam_inf(seg: Segment) -> Fraction:
    """l-infinity diameter of a closed segment (0 for a point)."""
    p, q = seg
    return max(abs(a - b) for a, b in zip(p, q))


def strongly_intersects(line: Line, cell: Cell) -> bool:
    """True iff diam_inf(line ∩ cell) >= side(cell)/(2d); the inequality is closed."""
    seg = line_cell_intersection(line, cell)
    if seg is None:
        return False
    side = Fraction(1, cell.n)
    return diam_inf(seg) * 2 * cell.d >= side


def strongly_intersects_box(line: Line, box: Box) -> bool:
    seg = line_box_clip(line, box)
    if seg is None:
        return False
    d = box.d
    side = max(h - l for l, h in zip(box.lo, box.hi))
    return diam_inf(seg) * 2 * d >= side


def unit_box(d: int) -> Box:
    zero, one = Fraction(0), Fraction(1)
    return Box((zero,) * d, (one,) * d)


def reference_axis(line: Line) -> int:
    """Least coordinate index (1-based) whose direction component is largest in
    absolute value; constant over all positive-length subsegments of the line."""
    best = max(abs(w) for w in line.dir)
    for i, w in enumerate(line.dir):
        if abs(w) == best:
            return i + 1
    raise AssertionError("unreachable")


def minkowski_sum(a: CellSet, b: CellSet) -> CellSet:
    """Cell decomposition of (union of a) + (union of b).

    Each pair of cells s, t contributes the 2^d cells s+t+delta,
    delta in {0,1}^d; the result lives in sumset space.
    """
    if a.n != b.n:
        raise ValueError("resolution mismatch in minkowski_sum")
    if a.d != b.d:
        raise ValueError("dimension mismatch in minkowski_sum")
    d = a.d
    deltas = []
    for mask in range(1 << d):
        deltas.append(tuple((mask >> i) & 1 for i in range(d)))
    out = set()
    for s in a.cells:
        for t in b.cells:
            base = tuple(si + ti for si, ti in zip(s, t))
            for delta in deltas:
                out.add(tuple(x + e for x, e in zip(base, delta)))
    return CellSet(a.d, a.n, frozenset(out), sumset_space=True)


def cells_union_contains(cells: CellSet, p: Sequence) -> bool:
    """Exact membership of a point in the closed union of a cell set."""
    p = _frac_vec(p)
    n = cells.n
    lo = [x * n for x in p]
    # A point is in cell t iff t_i <= x_i*n <= t_i+1 for all i.
    import math

    cand_ranges = []
    for x in lo:
        fl = x.numerator // x.denominator
        opts = {fl}
        if x == fl:
            opts.add(fl - 1)
        cand_ranges.append(sorted(opts))
    def rec(i, prefix):
        if i == len(cand_ranges):
            return tuple(prefix) in cells.cells
        return any(rec(i + 1, prefix + [c]) for c in cand_ranges[i])

    return rec(0, [])


def refine_cells(cells: CellSet, factor: int) -> CellSet:
    """The same point set one grid refinement down (each cell -> factor^d cells)."""
    if factor < 1:
        raise ValueError("refinement factor must be >= 1")
    d = cells.d
    offs = [()]
    for _ in range(d):
        offs = [o + (j,) for o in offs for j in range(factor)]
    out = set()
    for t in cells.cells:
        base = tuple(ti * factor for ti in t)
        for o in offs:
            out.add(tuple(b + j for b, j in zip(base, o)))
    return CellSet(d, cells.n * factor, frozenset(out), cells.sumset_space)
